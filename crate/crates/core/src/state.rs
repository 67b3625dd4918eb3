//! Per-vertex state shared by the peeling strategies.

use crate::{CsrGraph, Vertex};
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, AtomicI32, AtomicU32, Ordering::*};

/// Marks a vertex whose coreness has not been assigned yet.
pub const UNASSIGNED: u32 = u32::MAX;

/// Current induced degrees. Online peeling decrements without a guard, so a
/// peeled vertex may go negative.
pub struct InducedDegrees {
    vals: Vec<AtomicI32>,
}

impl InducedDegrees {
    pub fn new(g: &CsrGraph) -> Self {
        assert!(g.max_degree() < i32::MAX as usize, "degree exceeds i32 range");
        InducedDegrees {
            vals: (0..g.n() as Vertex).into_par_iter().map(|v| AtomicI32::new(g.degree(v) as i32)).collect(),
        }
    }

    pub fn from_values(vals: &[i32]) -> Self {
        InducedDegrees { vals: vals.iter().map(|&d| AtomicI32::new(d)).collect() }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> i64 {
        self.vals[v as usize].load(Relaxed) as i64
    }

    #[inline]
    pub fn set(&self, v: Vertex, d: i64) {
        self.vals[v as usize].store(d as i32, Relaxed)
    }

    /// Atomic decrement by `by`, returning the value before it.
    #[inline]
    pub fn fetch_sub(&self, v: Vertex, by: i64) -> i64 {
        self.vals[v as usize].fetch_sub(by as i32, AcqRel) as i64
    }

    pub fn snapshot(&self) -> Vec<i64> {
        self.vals.iter().map(|d| d.load(Relaxed) as i64).collect()
    }
}

/// Everything a peeling subround reads or writes per vertex.
pub struct PeelState {
    pub deg: InducedDegrees,
    /// Coreness, doubling as the round in which the vertex was peeled.
    pub kappa: Vec<AtomicU32>,
    /// Set once when the vertex enters a frontier.
    pub claimed: Vec<AtomicBool>,
    /// Atomic updates to the vertex's degree.
    pub hot: Vec<AtomicU32>,
    /// Atomic updates to the vertex's sample counter.
    pub hot_samples: Vec<AtomicU32>,
}

impl PeelState {
    pub fn new(g: &CsrGraph) -> Self {
        let n = g.n();
        PeelState {
            deg: InducedDegrees::new(g),
            kappa: (0..n).into_par_iter().map(|_| AtomicU32::new(UNASSIGNED)).collect(),
            claimed: (0..n).into_par_iter().map(|_| AtomicBool::new(false)).collect(),
            hot: (0..n).into_par_iter().map(|_| AtomicU32::new(0)).collect(),
            hot_samples: (0..n).into_par_iter().map(|_| AtomicU32::new(0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.kappa.len()
    }

    /// Marks `v` as claimed; true only for the first caller.
    #[inline]
    pub fn claim(&self, v: Vertex) -> bool {
        !self.claimed[v as usize].load(Relaxed) && !self.claimed[v as usize].swap(true, AcqRel)
    }

    #[inline]
    pub fn is_claimed(&self, v: Vertex) -> bool {
        self.claimed[v as usize].load(Acquire)
    }

    #[inline]
    pub fn kappa(&self, v: Vertex) -> u32 {
        self.kappa[v as usize].load(Relaxed)
    }

    #[inline]
    pub fn set_kappa(&self, v: Vertex, k: u32) {
        self.kappa[v as usize].store(k, Relaxed)
    }

    #[inline]
    pub fn touch(&self, v: Vertex) {
        self.hot[v as usize].fetch_add(1, Relaxed);
    }

    #[inline]
    pub fn touch_sample(&self, v: Vertex) {
        self.hot_samples[v as usize].fetch_add(1, Relaxed);
    }

    /// Largest number of atomic updates any single per-vertex field received.
    pub fn max_hot(&self) -> u64 {
        let max = |h: &[AtomicU32]| h.par_iter().map(|h| h.load(Relaxed) as u64).max().unwrap_or(0);
        max(&self.hot).max(max(&self.hot_samples))
    }

    pub fn coreness(&self) -> Vec<u32> {
        self.kappa.iter().map(|k| k.load(Relaxed)).collect()
    }
}
