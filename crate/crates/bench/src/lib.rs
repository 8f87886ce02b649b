//! Shared inputs for the pipeline benchmarks.

use std::path::Path;

use bsk_core::input::parse_input;
use bsk_core::GraphOfGroups;

/// Loads a graph of groups from the workspace `fixtures/` directory.
pub fn fixture(name: &str) -> GraphOfGroups {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    parse_input(&text).expect("valid fixture").graph
}
