//! Frontier generation: plain pack, a fixed window of single-key buckets, and
//! the hierarchical bucket structure (eight single-key buckets followed by
//! exponentially wider ranges).
//!
//! Both bucket structures are lazy. A vertex whose degree moves to a new
//! bucket gets a fresh copy there and the old copy stays behind; extraction
//! filters out copies of vertices that are already claimed.

use crate::hashbag::HashBag;
use crate::state::{InducedDegrees, PeelState};
use crate::{Error, Vertex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering::Relaxed};

/// Default switch point for [`BucketStrategy::Auto`] and width for fixed buckets.
pub const THETA: u32 = 16;
const SINGLE_KEYS: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BucketStrategy {
    Single,
    Fixed(u32),
    Hbs,
    /// Pack while the graph is sparse and `k < theta`, then switch to HBS.
    Auto { theta: u32 },
}

impl Default for BucketStrategy {
    fn default() -> Self {
        BucketStrategy::Auto { theta: THETA }
    }
}

impl fmt::Display for BucketStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BucketStrategy::Single => write!(f, "single"),
            BucketStrategy::Fixed(b) => write!(f, "fixed:{b}"),
            BucketStrategy::Hbs => write!(f, "hbs"),
            BucketStrategy::Auto { theta } if *theta == THETA => write!(f, "auto"),
            BucketStrategy::Auto { theta } => write!(f, "auto:{theta}"),
        }
    }
}

impl FromStr for BucketStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parameter(format!("unknown bucketing {s:?}; expected single, fixed:<b>, hbs or auto"));
        let num = |t: &str| t.parse::<u32>().ok().filter(|&b| b >= 1).ok_or_else(bad);
        match s.split_once(':') {
            None => match s {
                "single" => Ok(BucketStrategy::Single),
                "fixed" => Ok(BucketStrategy::Fixed(THETA)),
                "hbs" => Ok(BucketStrategy::Hbs),
                "auto" => Ok(BucketStrategy::default()),
                _ => Err(bad()),
            },
            Some(("fixed", b)) => Ok(BucketStrategy::Fixed(num(b)?)),
            Some(("auto", t)) => Ok(BucketStrategy::Auto { theta: num(t)? }),
            _ => Err(bad()),
        }
    }
}

/// Bucket of degree `d` relative to round `k`: `d - k` below 8, then one
/// bucket per power of two of `(d - k) / 8`.
pub fn hbs_index(d: u64, k: u64) -> usize {
    assert!(d >= k, "hbs_index needs d >= k (d = {d}, k = {k})");
    let x = d - k;
    if x < SINGLE_KEYS {
        x as usize
    } else {
        8 + (x / SINGLE_KEYS).ilog2() as usize
    }
}

/// Lower end of bucket `i`, relative to the anchor round.
fn rel_lo(i: usize) -> u64 {
    if (i as u64) < SINGLE_KEYS {
        i as u64
    } else {
        SINGLE_KEYS << (i - 8)
    }
}

/// Enough buckets that `hbs_index(dmax, 0)` is valid.
pub fn hbs_bucket_count(dmax: usize) -> usize {
    let groups = (dmax as u64 + 1).div_ceil(SINGLE_KEYS).max(1);
    let log = if groups <= 1 { 0 } else { (groups - 1).ilog2() as usize + 1 };
    8 + (log + 1).max(1)
}

/// Notified when a live vertex's degree drops from `old` to `new > k` without
/// it joining the frontier.
pub trait DegreeHook: Sync {
    fn moved(&self, v: Vertex, old: i64, new: i64, k: u32);
}

/// Hierarchical buckets over absolute degree ranges `bounds[i]..bounds[i+1]`.
/// A range bucket that comes to contain the current round is split again
/// relative to that round, so ranges above it never need touching.
pub struct HierBuckets {
    bags: Vec<HashBag>,
    bounds: Vec<u64>,
    inserts: Vec<AtomicU32>,
}

impl HierBuckets {
    /// Anchors the buckets at round `k` and inserts every unclaimed `v ∈ active`.
    pub fn build(n: usize, dmax: usize, active: &[Vertex], st: &PeelState, k: u32) -> Self {
        let count = hbs_bucket_count(dmax);
        let mut bounds: Vec<u64> = (0..count).map(|i| k as u64 + rel_lo(i)).collect();
        bounds.push(u64::MAX);
        let h = HierBuckets {
            bags: (0..count).map(|i| HashBag::new(n, 0xB0C4 + i as u64)).collect(),
            bounds,
            inserts: (0..n).map(|_| AtomicU32::new(0)).collect(),
        };
        active.par_iter().with_min_len(1024).for_each(|&v| {
            if !st.is_claimed(v) {
                let d = st.deg.get(v);
                debug_assert!(d >= k as i64);
                h.put(h.bucket_of(d), v);
            }
        });
        h
    }

    pub fn bucket_count(&self) -> usize {
        self.bags.len()
    }

    /// Bucket whose current range contains `d`.
    pub fn bucket_of(&self, d: i64) -> usize {
        let d = d.max(0) as u64;
        self.bounds.partition_point(|&b| b <= d).saturating_sub(1).min(self.bags.len() - 1)
    }

    /// Per-vertex insertion counts since the build.
    pub fn insert_counts(&self) -> Vec<u32> {
        self.inserts.iter().map(|c| c.load(Relaxed)).collect()
    }

    fn put(&self, b: usize, v: Vertex) {
        self.inserts[v as usize].fetch_add(1, Relaxed);
        self.bags[b].insert(v).expect("bucket bags hold every vertex once");
    }

    /// Inserts a copy of `v` if its degree moved to a different bucket.
    pub fn update(&self, v: Vertex, old: i64, new: i64) {
        let b = self.bucket_of(new);
        if b != self.bucket_of(old) {
            self.put(b, v);
        }
    }

    /// Frontier for round `k`: every unclaimed vertex with degree at most `k`.
    /// Claims what it returns.
    pub fn next(&mut self, k: u32, st: &PeelState) -> Vec<Vertex> {
        let k64 = k as u64;
        let j = self.bucket_of(k as i64);
        if !(self.bounds[j] == k64 && self.bounds[j + 1] == k64 + 1) {
            self.split(j, k, st);
        }
        let i = self.bucket_of(k as i64);
        debug_assert!(self.bounds[i] == k64 && self.bounds[i + 1] == k64 + 1);
        let items = self.bags[i].extract_all();
        items.into_par_iter().with_min_len(1024).filter(|&v| st.deg.get(v) <= k as i64 && st.claim(v)).collect()
    }

    /// Re-anchors buckets `0..=j` at round `k` and moves the live entries of
    /// bucket `j` down. Buckets below `j` only hold stale copies by now.
    fn split(&mut self, j: usize, k: u32, st: &PeelState) {
        for b in 0..j {
            self.bags[b].extract_all();
        }
        let items = self.bags[j].extract_all();
        let top = self.bounds[j + 1];
        for i in 0..=j {
            self.bounds[i] = (k as u64 + rel_lo(i)).min(top);
        }
        let this = &*self;
        items.into_par_iter().with_min_len(1024).for_each(|v| {
            if !st.is_claimed(v) {
                let b = this.bucket_of(st.deg.get(v));
                debug_assert!(b < j);
                this.put(b, v);
            }
        });
    }
}

impl DegreeHook for HierBuckets {
    fn moved(&self, v: Vertex, old: i64, new: i64, _k: u32) {
        self.update(v, old, new);
    }
}

/// Window of `b` single-key buckets for rounds `base..base+b`; everything
/// above the window waits for the next rebuild.
pub struct FixedBuckets {
    bags: Vec<HashBag>,
    base: u32,
    built: bool,
}

impl FixedBuckets {
    pub fn new(n: usize, b: u32) -> Self {
        assert!(b >= 1);
        FixedBuckets { bags: (0..b).map(|i| HashBag::new(n, 0xF1C5 + i as u64)).collect(), base: 0, built: false }
    }

    fn width(&self) -> u32 {
        self.bags.len() as u32
    }

    fn rebuild(&mut self, k: u32, active: &[Vertex], st: &PeelState) {
        for bag in &mut self.bags {
            bag.extract_all();
        }
        self.base = k;
        self.built = true;
        let this = &*self;
        active.par_iter().with_min_len(1024).for_each(|&v| {
            let d = st.deg.get(v);
            if !st.is_claimed(v) && d - (k as i64) < this.width() as i64 {
                this.bags[(d - k as i64) as usize].insert(v).expect("window bags hold every vertex once");
            }
        });
    }

    pub fn next(&mut self, k: u32, active: &[Vertex], st: &PeelState) -> Vec<Vertex> {
        if !self.built || k >= self.base + self.width() {
            self.rebuild(k, active, st);
        }
        let items = self.bags[(k - self.base) as usize].extract_all();
        items.into_par_iter().with_min_len(1024).filter(|&v| st.deg.get(v) <= k as i64 && st.claim(v)).collect()
    }
}

impl DegreeHook for FixedBuckets {
    fn moved(&self, v: Vertex, _old: i64, new: i64, _k: u32) {
        let top = self.base as i64 + self.width() as i64;
        if self.built && new < top && new >= self.base as i64 {
            self.bags[(new - self.base as i64) as usize].insert(v).expect("window bags hold every vertex once");
        }
    }
}

/// The pack-based frontier: unclaimed `v ∈ active` with degree at most `k`.
pub fn pack_frontier(active: &[Vertex], deg: &InducedDegrees, k: u32, st: &PeelState) -> Vec<Vertex> {
    active.par_iter().with_min_len(1024).copied().filter(|&v| deg.get(v) <= k as i64 && st.claim(v)).collect()
}
