//! Parallel k-core decomposition.
//!
//! The engine peels vertices round by round (round `k` assigns coreness `k`),
//! with either batch (offline) or atomic (online) subrounds. Online peeling can
//! additionally run bounded local searches, and sample high-degree vertices
//! instead of decrementing them. Frontiers come from a plain pack, a fixed
//! window of buckets, or a hierarchical bucket structure.
//!
//! [`oracle::bz_coreness`] is the sequential reference every configuration is
//! checked against.

pub mod bucketing;
pub mod engine;
mod error;
pub mod graph;
pub mod hashbag;
pub mod offline;
pub mod online;
pub mod oracle;
mod par;
pub mod sampler;
pub mod state;

pub use bucketing::{hbs_index, BucketStrategy};
pub use engine::{
    decompose, decompose_once, decompose_traced, kcore_subgraph, PeelConfig, PeelKind, PeelStats, Trace,
};
pub use error::{Error, Result};
pub use par::hardware_threads;
pub use graph::{CsrGraph, EdgeList};
pub use hashbag::HashBag;
pub use oracle::{bz_coreness, verify_coreness, CorenessArray, Mismatch};
pub use sampler::{DetectedError, SamplingParams};

/// Dense vertex id.
pub type Vertex = u32;
