//! Batch front end: loads a graph-of-groups file, runs one command and
//! renders a line-oriented `key: value` report plus optional DOT files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use bsk_core::bass_serre::TreeWindow;
use bsk_core::fine::{check_fine, check_hyperbolic, parabolic_tree_stabilizers, quotient, FineWindow, Quotient};
use bsk_core::input::{parse_input, Input};
use bsk_core::peripheral::{
    compute_q, compute_union_minus_repeats, repeat_search, structures_agree, totality_probe, PeripheralDesc,
    PeripheralStructure,
};
use bsk_core::quasiconvex::{check_hypotheses, verify_relative_quasiconvexity};
use bsk_core::{GraphOfGroups, NormalForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Tree,
    Fine,
    Quotient,
    Peripherals,
    ParabolicTrees,
    Qc,
    Hypotheses,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub command: Command,
    pub tree_radius: usize,
    pub word_window: usize,
    pub circuit_bound: usize,
    pub stability_step: usize,
    pub out: Option<PathBuf>,
    pub skip_hypotheses: bool,
    pub dot: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, command: Command) -> RunConfig {
        RunConfig {
            input: input.into(),
            command,
            tree_radius: 3,
            word_window: 5,
            circuit_bound: 8,
            stability_step: 2,
            out: None,
            skip_hypotheses: false,
            dot: false,
        }
    }
}

/// Result of a run: exit status, report text and DOT artifacts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub report: String,
    pub files: Vec<(String, String)>,
}

#[derive(Default)]
struct Report {
    blocks: Vec<Vec<(String, String)>>,
}

impl Report {
    fn block(&mut self, check: &str) -> &mut Vec<(String, String)> {
        self.blocks.push(vec![("check".into(), check.into())]);
        self.blocks.last_mut().unwrap()
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            for (k, v) in b {
                let _ = writeln!(s, "{k}: {v}");
            }
        }
        s
    }
}

trait Push {
    fn kv(&mut self, k: impl Into<String>, v: impl ToString);
}

impl Push for Vec<(String, String)> {
    fn kv(&mut self, k: impl Into<String>, v: impl ToString) {
        self.push((k.into(), v.to_string()));
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Name of the innermost error variant, read from its `Debug` form.
pub fn error_name(debug: &str) -> String {
    const WRAPPERS: [&str; 6] = ["Input", "Gog", "Tree", "Fine", "Qc", "Peripheral"];
    let mut rest = debug;
    loop {
        let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        let name = &rest[..end];
        if WRAPPERS.contains(&name) && rest[end..].starts_with('(') {
            rest = &rest[end + 1..];
        } else {
            return name.to_string();
        }
    }
}

fn failure(status: i32, e: &(impl std::fmt::Debug + std::fmt::Display)) -> Outcome {
    Outcome { status, report: format!("error: {}: {e}\n", error_name(&format!("{e:?}"))), files: vec![] }
}

/// Compact rendering of a group element when every symbol is one character.
pub fn show(g: &GraphOfGroups, nf: &NormalForm) -> String {
    let s = g.display_nf(nf);
    if g.symbols.iter().all(|x| x.chars().count() == 1) {
        s.replace(' ', "")
    } else {
        s
    }
}

fn show_gens(g: &GraphOfGroups, gens: &[NormalForm]) -> String {
    gens.iter().map(|h| show(g, h)).collect::<Vec<_>>().join(", ")
}

fn window_line(c: &RunConfig) -> String {
    format!("R={} L={}", c.tree_radius, c.word_window)
}

fn delta_string(twice: u32) -> String {
    if twice.is_multiple_of(2) {
        format!("{}", twice / 2)
    } else {
        format!("{}.5", twice / 2)
    }
}

pub fn run(c: &RunConfig) -> Outcome {
    let text = match std::fs::read_to_string(&c.input) {
        Ok(t) => t,
        Err(e) => return Outcome { status: 2, report: format!("error: IoError: {e}\n"), files: vec![] },
    };
    if c.word_window < 1 || c.circuit_bound < 3 {
        return Outcome {
            status: 2,
            report: "error: InvalidConfig: requires word window ≥ 1 and circuit bound ≥ 3\n".into(),
            files: vec![],
        };
    }
    let input = match parse_input(&text) {
        Ok(i) => i,
        Err(e) => return failure(2, &e),
    };
    let mut rep = Report::default();
    let mut files = Vec::new();
    let status = match c.command {
        Command::Validate => validate(&input.graph, &mut rep),
        Command::Hypotheses => hypotheses(&input.graph, &mut rep),
        Command::Tree => {
            let t = match TreeWindow::build(&input.graph, c.tree_radius, c.word_window) {
                Ok(t) => t,
                Err(e) => return failure(2, &e),
            };
            tree(&input.graph, &t, c, &mut rep);
            if c.dot {
                files.push(("tree.dot".into(), t.dot(&input.graph)));
            }
            0
        }
        Command::Fine | Command::Quotient | Command::Peripherals | Command::ParabolicTrees => {
            let g = &input.graph;
            let t = match TreeWindow::build(g, c.tree_radius, c.word_window) {
                Ok(t) => t,
                Err(e) => return failure(2, &e),
            };
            let k = match FineWindow::build(g, &t) {
                Ok(k) => k,
                Err(e) => return failure(1, &e),
            };
            let q = quotient(&k);
            match c.command {
                Command::Fine => {
                    fine(g, &k, &q, c, &mut rep);
                    if c.dot {
                        files.push(("k.dot".into(), k.dot_k(g, &t)));
                        files.push(("kbar.dot".into(), q.dot(&k, g, &t, &BTreeSet::new())));
                    }
                    0
                }
                Command::Quotient => {
                    quotient_report(&k, &q, c, &mut rep);
                    if c.dot {
                        files.push(("kbar.dot".into(), q.dot(&k, g, &t, &BTreeSet::new())));
                    }
                    0
                }
                Command::Peripherals => match peripherals(g, &t, &k, c, &mut rep) {
                    Ok(()) => 0,
                    Err(o) => return o,
                },
                _ => {
                    parabolic_trees(g, &t, &k, c, &mut rep);
                    0
                }
            }
        }
        Command::Qc => match qc(&input, c, &mut rep, &mut files) {
            Ok(s) => s,
            Err(o) => return o,
        },
    };
    Outcome { status, report: rep.render(), files }
}

fn validate(g: &GraphOfGroups, rep: &mut Report) -> i32 {
    let v = g.validate();
    for e in &v.ends {
        let malnormal = v.vertices.iter().find(|x| x.vertex == e.vertex).is_some_and(|x| x.peripherals_malnormal);
        let b = rep.block("edge end");
        b.kv("window", "exact");
        b.kv("edge", &e.edge);
        b.kv("end", e.end);
        b.kv("vertex", &e.vertex);
        b.kv("container", &e.container);
        b.kv("parabolic", yes(e.parabolic));
        b.kv("maximal", yes(e.maximal));
        b.kv("total", yes(e.total));
        if let Some(w) = &e.total_witness {
            b.kv("total witness", w);
        }
        b.kv(
            "summary",
            format!(
                "parabolic: {}; maximal: {}; container malnormal: {}",
                yes(e.parabolic),
                yes(e.maximal),
                yes(malnormal)
            ),
        );
    }
    for x in &v.vertices {
        let b = rep.block("vertex");
        b.kv("window", "exact");
        b.kv("vertex", &x.vertex);
        b.kv("container malnormal", yes(x.peripherals_malnormal));
        if let Some(w) = &x.peripherals_witness {
            b.kv("container witness", w);
        }
        b.kv("edge images malnormal", yes(x.edge_images_malnormal));
        if let Some(w) = &x.edge_images_witness {
            b.kv("edge images witness", w);
        }
    }
    0
}

fn hypotheses(g: &GraphOfGroups, rep: &mut Report) -> i32 {
    let hs = check_hypotheses(g);
    for h in &hs {
        let b = rep.block(&format!("hypothesis ({})", h.name));
        b.kv("window", "exact");
        b.kv("statement", h.statement);
        b.kv("holds", yes(h.holds));
        if let Some(w) = &h.witness {
            b.kv("witness", w);
        }
    }
    if hs.iter().all(|h| h.holds) {
        0
    } else {
        1
    }
}

fn tree(g: &GraphOfGroups, t: &TreeWindow, c: &RunConfig, rep: &mut Report) {
    let b = rep.block("tree window");
    b.kv("window", window_line(c));
    b.kv("vertices", t.len());
    b.kv("edges", t.edges.len());
    for d in 0..=t.radius {
        let n = t.vertices.iter().filter(|v| v.depth == d).count();
        if n > 0 {
            b.kv(format!("depth {d}"), n);
        }
    }
    for (i, v) in t.vertices.iter().enumerate() {
        b.kv(format!("vertex {i}"), format!("{} (depth {})", t.label(g, i), v.depth));
    }
}

fn fine(g: &GraphOfGroups, k: &FineWindow, q: &Quotient, c: &RunConfig, rep: &mut Report) {
    let b = rep.block("fine graph");
    b.kv("window", window_line(c));
    b.kv("vertex graph templates", k.templates.len());
    b.kv("K vertices", k.num_vertices);
    b.kv("K vertex-space edges", k.vertex_edges().count());
    b.kv("K edge-space edges", k.space_edges.len());
    b.kv("forest vertices", k.forest.vertices.len());
    b.kv("forest edges", k.forest.edges.len());
    b.kv("forest components", k.forest.num_components);
    b.kv("K̄ vertices", q.graph.num_vertices());
    b.kv("K̄ edges", q.graph.num_edges());
    b.kv("K̄ connected", yes(q.graph.is_connected()));
    let blocks = q.graph.blocks();
    b.kv("K̄ largest block", blocks.iter().map(|x| x.len()).max().unwrap_or(0));
    b.kv("circuits within one copy", yes(q.blocks_within_copies()));
    let b = rep.block("fineness");
    b.kv("window", window_line(c));
    match q.base_cone_edge(k, g) {
        Some(e) => {
            let (x, y) = q.graph.edges[e as usize];
            b.kv("edge", format!("K̄ {e} ({x} -- {y})"));
            b.kv(format!("circuits (n={})", c.circuit_bound), check_fine(&q.graph, e, c.circuit_bound));
        }
        None => b.kv("edge", "none (no cone edge at the base)"),
    }
    let b = rep.block("hyperbolicity");
    b.kv("window", window_line(c));
    b.kv("delta", delta_string(check_hyperbolic(&q.graph)));
}

fn quotient_report(k: &FineWindow, q: &Quotient, c: &RunConfig, rep: &mut Report) {
    let b = rep.block("quotient");
    b.kv("window", window_line(c));
    b.kv("K vertices", k.num_vertices);
    b.kv("K̄ vertices", q.graph.num_vertices());
    b.kv("K̄ edges", q.graph.num_edges());
    b.kv("collapsed classes", q.class_component.iter().filter(|x| x.is_some()).count());
    b.kv("forest components", k.forest.num_components);
    b.kv("K̄ connected", yes(q.graph.is_connected()));
}

fn member_line(g: &GraphOfGroups, m: &PeripheralDesc) -> String {
    format!(
        "⟨{}⟩; from {}; finite: {}; truncated: {}",
        show_gens(g, &m.generators),
        m.provenance,
        yes(m.finite),
        yes(m.truncated)
    )
}

const TOTALITY_RADIUS: usize = 2;

fn structure_line(g: &GraphOfGroups, s: &PeripheralStructure) -> String {
    let inf: Vec<String> = s.infinite().map(|m| format!("⟨{}⟩", show_gens(g, &m.generators))).collect();
    format!("{{{}}}", inf.join(", "))
}

fn peripherals(
    g: &GraphOfGroups,
    t: &TreeWindow,
    k: &FineWindow,
    c: &RunConfig,
    rep: &mut Report,
) -> Result<(), Outcome> {
    let q = compute_q(g, Some(t), Some(k)).map_err(|e| failure(1, &e))?;
    let b = rep.block("peripherals ℚ");
    b.kv("window", window_line(c));
    b.kv("structure", format!("ℚ = {}", structure_line(g, &q)));
    b.kv("conjugate representatives", "ShortLex-least found in window");
    for m in &q.members {
        b.kv(format!("member {}", m.id), member_line(g, m));
    }
    let search = repeat_search(g, &q, c.word_window);
    b.kv("repeats", repeat_line(search, c.word_window));
    let probe = totality_probe(g, &q, TOTALITY_RADIUS.min(c.word_window));
    let verdict = match probe.failures.first() {
        None => "no violation".to_string(),
        Some(f) => format!("{} violations; first: {f}", probe.failures.len()),
    };
    b.kv("totality probe", format!("radius {}; {} checks; {verdict}", probe.radius, probe.checked));
    let b = rep.block("union minus repeats");
    b.kv("window", window_line(c));
    match compute_union_minus_repeats(g) {
        Ok((variant, s)) => {
            b.kv("variant", variant);
            b.kv("structure", format!("ℙ = {}", structure_line(g, &s)));
            for m in &s.members {
                b.kv(format!("member {}", m.id), member_line(g, m));
            }
            for r in &s.removed {
                b.kv(
                    format!("removed {}", r.id),
                    format!("kept {} via {}; verified: {}", r.kept, r.chain.join(" "), yes(r.verified)),
                );
            }
            b.kv("agrees with ℚ", yes(structures_agree(g, &s, &q)));
            let search = repeat_search(g, &s, c.word_window);
            b.kv("repeats", repeat_line(search, c.word_window));
        }
        Err(e) => {
            b.kv("error", format!("{}: {e}", error_name(&format!("{e:?}"))));
            b.kv("fallback", format!("ℚ = {}", structure_line(g, &q)));
        }
    }
    Ok(())
}

fn repeat_line(found: Option<(String, String, String)>, n: usize) -> String {
    match found {
        Some((a, b, w)) => format!("{a} conjugates into {b} by {w}"),
        None => format!("no repeat found up to length {n}"),
    }
}

fn parabolic_trees(g: &GraphOfGroups, t: &TreeWindow, k: &FineWindow, c: &RunConfig, rep: &mut Report) {
    for (i, s) in parabolic_tree_stabilizers(g, Some(t), Some(k)).iter().enumerate() {
        let b = rep.block(&format!("parabolic tree {}", i + 1));
        b.kv("window", window_line(c));
        let name = |(v, p): (usize, usize)| format!("{}.{}", g.vertices[v].id, g.vertices[v].peripherals[p].id);
        b.kv("root", name(s.root));
        b.kv("members", s.component.members.iter().map(|&x| name(x)).collect::<Vec<_>>().join(", "));
        b.kv("edges", s.component.edges.iter().map(|&e| g.edges[e].id.clone()).collect::<Vec<_>>().join(", "));
        b.kv("generators", format!("⟨{}⟩", show_gens(g, &s.generators)));
        b.kv("finite", yes(s.finite));
        match s.representative {
            Some(r) => {
                b.kv("representative", format!("S{r}"));
                b.kv("in-window size", k.forest.component_members(r).len());
            }
            None => b.kv("representative", "outside the window"),
        }
        b.kv("truncated", yes(s.truncated));
        if s.truncated {
            b.kv("warning", "TruncationWarning: component reaches the window boundary");
        }
    }
}

fn qc(input: &Input, c: &RunConfig, rep: &mut Report, files: &mut Vec<(String, String)>) -> Result<i32, Outcome> {
    let g = &input.graph;
    if input.tame.is_empty() {
        return Err(Outcome {
            status: 2,
            report: "error: MissingTamePresentation: the input has no tame_presentations section\n".into(),
            files: vec![],
        });
    }
    let step = c.stability_step.max(1);
    let windows: Vec<(usize, usize)> =
        (0..step).rev().filter(|&d| c.word_window > d).map(|d| (c.tree_radius, c.word_window - d)).collect();
    let mut status = 0;
    for spec in &input.tame {
        let v = verify_relative_quasiconvexity(g, spec, &windows, c.skip_hypotheses).map_err(|e| failure(2, &e))?;
        let b = rep.block(&format!("quasiconvexity {}", spec.id));
        b.kv("window", window_line(c));
        for h in &v.hypotheses {
            b.kv(
                format!("hypothesis ({})", h.name),
                format!("{}: {}", h.statement, if h.holds { "holds" } else { "fails" }),
            );
            if let Some(w) = h.witness.as_ref().filter(|_| !h.holds) {
                b.kv(format!("hypothesis ({}) witness", h.name), w);
            }
        }
        if v.skipped {
            b.kv("hypothesis checks", "skipped");
        }
        for r in &v.runs {
            let k = &r.kappa;
            b.kv(
                format!("R={} L={}", r.radius, r.window),
                format!(
                    "κ={}; L̄ vertices {}; distortion {}; max geodesics {}{}",
                    k.kappa,
                    r.witness.vertices.len(),
                    k.distortion_string(),
                    k.max_geodesics,
                    if k.capped { " (capped, κ is a lower bound)" } else { "" }
                ),
            );
        }
        if !v.runs.is_empty() {
            b.kv("stable", if c.stability_step < 2 { "not claimed".into() } else { yes(v.stable).to_string() });
        }
        b.kv("verdict", &v.verdict);
        if !v.hypotheses_hold() && !c.skip_hypotheses {
            status = 1;
        }
        if c.dot {
            if let Some(r) = v.runs.last() {
                let t = TreeWindow::build(g, r.radius, r.window).map_err(|e| failure(2, &e))?;
                let k = FineWindow::build(g, &t).map_err(|e| failure(1, &e))?;
                let q = quotient(&k);
                files.push((format!("qc-{}.dot", spec.id), q.dot(&k, g, &t, &r.witness.vertices)));
            }
        }
    }
    Ok(status)
}

/// Runs and writes the report and DOT files into the output directory.
pub fn run_and_write(c: &RunConfig) -> std::io::Result<Outcome> {
    let o = run(c);
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), &o.report)?;
        for (name, body) in &o.files {
            std::fs::write(dir.join(name), body)?;
        }
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_names_unwrap_wrappers() {
        assert_eq!(error_name("Gog(UnknownVertex(\"w\"))"), "UnknownVertex");
        assert_eq!(error_name("ParseError { line: 1 }"), "ParseError");
        assert_eq!(error_name("Qc(Tree(WindowTooSmall { window: 0 }))"), "WindowTooSmall");
    }

    #[test]
    fn deltas_render_halves() {
        assert_eq!(delta_string(2), "1");
        assert_eq!(delta_string(3), "1.5");
    }
}
