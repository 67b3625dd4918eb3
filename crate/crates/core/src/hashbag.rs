//! Concurrent multiset of vertex ids with geometrically growing chunks.
//!
//! Inserts hash into the active chunk and probe linearly inside it. Each chunk
//! has a relaxed occupancy counter; once it reaches half the chunk size the
//! bag moves on to the next (twice as large) chunk. Extraction only scans the
//! chunks used so far, so its cost tracks the number of elements, not the
//! capacity.

use crate::{Error, Result, Vertex};
use rayon::prelude::*;
use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering::*};

/// Size of the first chunk.
pub const LAMBDA: usize = 256;

const EMPTY: u32 = u32::MAX;
const PAR_SCAN: usize = 1 << 14;

pub struct HashBag {
    slots: Vec<AtomicU32>,
    /// `bounds[i]..bounds[i + 1]` is chunk `i`.
    bounds: Vec<usize>,
    counters: Vec<AtomicUsize>,
    active: AtomicUsize,
    seed: u64,
    last_scan: usize,
}

#[inline]
fn mix(seed: u64, x: u64) -> u64 {
    let mut z = seed ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl HashBag {
    /// Bag holding at least `capacity` simultaneous elements.
    pub fn new(capacity: usize, seed: u64) -> Self {
        let mut bounds = vec![0];
        let mut size = LAMBDA;
        let mut room = 0;
        loop {
            bounds.push(bounds.last().unwrap() + size);
            room += size / 2;
            if room >= capacity {
                break;
            }
            size *= 2;
        }
        let total = *bounds.last().unwrap();
        HashBag {
            slots: (0..total).map(|_| AtomicU32::new(EMPTY)).collect(),
            counters: (0..bounds.len() - 1).map(|_| AtomicUsize::new(0)).collect(),
            bounds,
            active: AtomicUsize::new(0),
            seed,
            last_scan: 0,
        }
    }

    pub fn chunk_count(&self) -> usize {
        self.counters.len()
    }

    pub fn active_chunk(&self) -> usize {
        self.active.load(Relaxed)
    }

    /// Slots visited by the most recent [`extract_all`](Self::extract_all).
    pub fn last_scan(&self) -> usize {
        self.last_scan
    }

    /// Adds one copy of `x`. Safe to call from any number of threads.
    pub fn insert(&self, x: Vertex) -> Result<()> {
        debug_assert_ne!(x, EMPTY);
        let last = self.counters.len() - 1;
        let h = mix(self.seed, x as u64);
        loop {
            let a = self.active.load(Acquire);
            let (lo, hi) = (self.bounds[a], self.bounds[a + 1]);
            let size = hi - lo;
            let c = self.counters[a].fetch_add(1, Relaxed);
            if c >= size / 2 && a < last {
                self.active.fetch_max(a + 1, AcqRel);
                continue;
            }
            let start = (h as usize) & (size - 1);
            for i in 0..size {
                let slot = &self.slots[lo + ((start + i) & (size - 1))];
                if slot.load(Relaxed) == EMPTY
                    && slot.compare_exchange(EMPTY, x, Release, Relaxed).is_ok()
                {
                    return Ok(());
                }
            }
            if a == last {
                return Err(Error::BagOverflow { capacity: self.bounds[last + 1] / 2 });
            }
            self.active.fetch_max(a + 1, AcqRel);
        }
    }

    /// Removes and returns every element. Needs exclusive access, so no insert
    /// can race with it.
    pub fn extract_all(&mut self) -> Vec<Vertex> {
        let a = *self.active.get_mut();
        let end = self.bounds[a + 1];
        self.last_scan = end;
        debug_assert!(end <= LAMBDA * ((1 << (a + 1)) - 1));
        let take = |s: &mut AtomicU32| {
            let v = *s.get_mut();
            (v != EMPTY).then(|| {
                *s.get_mut() = EMPTY;
                v
            })
        };
        let out = if end >= PAR_SCAN {
            self.slots[..end].par_iter_mut().filter_map(take).collect()
        } else {
            self.slots[..end].iter_mut().filter_map(take).collect()
        };
        for c in &mut self.counters[..=a] {
            *c.get_mut() = 0;
        }
        *self.active.get_mut() = 0;
        out
    }
}
