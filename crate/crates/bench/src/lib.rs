//! Shared fixtures for the benchmarks.

use kcore::graph::{gen_ba, gen_grid, gen_hcns};
use kcore::CsrGraph;

/// Named graphs small enough to time repeatedly.
pub fn fixtures() -> Vec<(&'static str, CsrGraph)> {
    vec![
        ("grid-300", gen_grid(300, 300).unwrap()),
        ("ba-50k-16", gen_ba(50_000, 16, 1).unwrap()),
        ("hcns-300", gen_hcns(300, 1).unwrap()),
    ]
}
