use super::PeelConfig;
use serde::Serialize;

/// Counters of one decomposition. Everything except `restarts` and `wall_ms`
/// describes the final, successful attempt.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PeelStats {
    pub n: usize,
    pub m2: usize,
    pub kmax: u32,
    pub rounds: u64,
    pub subrounds: u64,
    /// Atomic (online) or batched unit (offline) degree decrements.
    pub decrements: u64,
    /// Coin flips that came up heads.
    pub samples: u64,
    pub resamples: u64,
    pub restarts: u64,
    /// Sum of active-set sizes over all rounds.
    pub sum_active: u64,
    /// Most atomic updates any single vertex's degree or sample counter received.
    pub max_hot_updates: u64,
    pub wall_ms: f64,
    pub config: PeelConfig,
}

impl PeelStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}
