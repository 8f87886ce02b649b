use std::path::PathBuf;
use std::process::ExitCode;

use bsk_cli::{run_and_write, Command, RunConfig};
use clap::Parser;

/// Relatively hyperbolic splittings: fine graphs, peripheral structures and
/// relative quasiconvexity checks over finite windows.
#[derive(Parser, Debug)]
#[command(name = "bsk", version)]
struct Args {
    /// Command to run.
    #[arg(value_enum)]
    command: Command,
    /// Graph-of-groups input file (JSON).
    input: PathBuf,
    /// Bass-Serre tree radius R.
    #[arg(long, alias = "R", default_value_t = 3)]
    tree_radius: usize,
    /// Word-length window L.
    #[arg(long, alias = "L", default_value_t = 5)]
    word_window: usize,
    /// Circuit length bound n for the fineness check.
    #[arg(long, alias = "n", default_value_t = 8)]
    circuit_bound: usize,
    /// Number of consecutive word windows compared for stability.
    #[arg(long, default_value_t = 2)]
    stability_step: usize,
    /// Directory for report.txt and DOT files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the quasiconvexity witness even when hypotheses fail.
    #[arg(long)]
    skip_hypotheses: bool,
    /// Emit DOT files.
    #[arg(long)]
    dot: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = RunConfig {
        input: args.input,
        command: args.command,
        tree_radius: args.tree_radius,
        word_window: args.word_window,
        circuit_bound: args.circuit_bound,
        stability_step: args.stability_step,
        out: args.out,
        skip_hypotheses: args.skip_hypotheses,
        dot: args.dot,
    };
    match run_and_write(&config) {
        Ok(o) => {
            if o.status == 2 {
                eprint!("{}", o.report);
            } else {
                print!("{}", o.report);
            }
            ExitCode::from(o.status as u8)
        }
        Err(e) => {
            eprintln!("error: IoError: {e}");
            ExitCode::from(2)
        }
    }
}
