//! Shared inputs for the criterion benchmarks.

use strata_core::parse::parse_sum;
use strata_core::{DecoratedGraph, FormalSum};

/// Reads a formal sum from the repository fixtures.
pub fn fixture_sum(name: &str) -> FormalSum {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    parse_sum(&std::fs::read_to_string(path).expect("fixture exists")).expect("fixture parses")
}

/// The first graph of a fixture.
pub fn fixture_graph(name: &str) -> DecoratedGraph {
    fixture_sum(name).iter().next().expect("non-empty fixture").0.clone()
}
