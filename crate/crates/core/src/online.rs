//! Atomic subround: every peeled vertex decrements its neighbors directly and
//! the decrement that takes a neighbor from `k+1` to `k` claims it.
//!
//! With a local queue capacity `cap > 0`, claimed vertices are peeled by the
//! claiming task itself (FIFO, at most `cap` per local search) instead of
//! waiting for the next subround. With a sampler table, neighbors in sample
//! mode get a coin flip instead of a decrement.

use crate::bucketing::DegreeHook;
use crate::hashbag::HashBag;
use crate::sampler::{coin, SamplerTable};
use crate::state::PeelState;
use crate::{CsrGraph, Result, Vertex};
use rayon::prelude::*;
use std::ops::Add;

/// Frontier vertices with more neighbors than this spread them over threads.
const PAR_NEIGHBORS: usize = 1 << 13;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PeelCounters {
    pub decrements: u64,
    pub samples: u64,
}

impl Add for PeelCounters {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        PeelCounters { decrements: self.decrements + o.decrements, samples: self.samples + o.samples }
    }
}

/// Sampling inputs for [`Online`].
pub struct Sampling<'a> {
    pub table: &'a SamplerTable,
    /// Receives vertices whose sample count reached the target.
    pub recount: &'a HashBag,
    pub seed: u64,
}

/// Shared inputs of one online subround.
pub struct Online<'a> {
    pub g: &'a CsrGraph,
    pub st: &'a PeelState,
    pub k: u32,
    pub cap: usize,
    pub next: &'a HashBag,
    pub sampling: Option<Sampling<'a>>,
    pub hook: Option<&'a dyn DegreeHook>,
}

impl Online<'_> {
    /// Removes `v` from the graph as seen by its neighbors, handing each newly
    /// claimed neighbor to `sink`.
    #[inline]
    fn relax<S: FnMut(Vertex) -> Result<()>>(&self, v: Vertex, sink: &mut S, ctr: &mut PeelCounters) -> Result<()> {
        for &u in self.g.neighbors(v) {
            self.relax_one(v, u, sink, ctr)?;
        }
        Ok(())
    }

    #[inline]
    fn relax_one<S: FnMut(Vertex) -> Result<()>>(
        &self,
        v: Vertex,
        u: Vertex,
        sink: &mut S,
        ctr: &mut PeelCounters,
    ) -> Result<()> {
        if let Some(s) = &self.sampling {
            if s.table.mode(u) {
                if coin(s.seed, u, v, s.table.rate(u)) {
                    ctr.samples += 1;
                    if let Some(c) = s.table.add_sample(u) {
                        self.st.touch_sample(u);
                        if c == s.table.mu {
                            s.recount.insert(u)?;
                        }
                    }
                }
                return Ok(());
            }
        }
        let pre = self.st.deg.fetch_sub(u, 1);
        self.st.touch(u);
        ctr.decrements += 1;
        let k = self.k as i64;
        if pre == k + 1 {
            if self.st.claim(u) {
                sink(u)?;
            }
        } else if pre - 1 > k {
            if let Some(h) = self.hook {
                h.moved(u, pre, pre - 1, self.k);
            }
        }
        Ok(())
    }

    /// Peels `v` and then, in FIFO order, every vertex it claims while the
    /// queue has had fewer than `cap` entries; later claims go to the next
    /// frontier. On return `queue` lists the vertices peeled locally.
    pub fn local_search(&self, v: Vertex, queue: &mut Vec<Vertex>) -> Result<PeelCounters> {
        let mut ctr = PeelCounters::default();
        queue.clear();
        let cap = self.cap;
        let next = self.next;
        let push = |q: &mut Vec<Vertex>, u: Vertex| -> Result<()> {
            if q.len() < cap {
                q.push(u);
                Ok(())
            } else {
                next.insert(u)
            }
        };
        self.relax(v, &mut |u| push(queue, u), &mut ctr)?;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            self.st.set_kappa(u, self.k);
            self.relax(u, &mut |w| push(queue, w), &mut ctr)?;
        }
        Ok(ctr)
    }

    /// High-degree frontier vertex: neighbors in parallel, claims straight to
    /// the next frontier.
    fn peel_wide(&self, v: Vertex) -> Result<PeelCounters> {
        self.g
            .neighbors(v)
            .par_chunks(PAR_NEIGHBORS / 4)
            .map(|chunk| {
                let mut ctr = PeelCounters::default();
                for &u in chunk {
                    self.relax_one(v, u, &mut |w| self.next.insert(w), &mut ctr)?;
                }
                Ok(ctr)
            })
            .try_reduce(PeelCounters::default, |a, b| Ok(a + b))
    }

    /// Peels every vertex of `frontier`, which must already carry coreness
    /// `k`. Newly claimed vertices not handled locally land in `next`.
    pub fn run(&self, frontier: &[Vertex]) -> Result<PeelCounters> {
        let cap = self.cap;
        frontier
            .par_iter()
            .with_min_len(if cap > 0 { 1 } else { 64 })
            .map_init(
                || Vec::with_capacity(cap),
                |queue, &v| {
                    if self.g.degree(v) >= PAR_NEIGHBORS {
                        self.peel_wide(v)
                    } else if cap > 0 {
                        self.local_search(v, queue)
                    } else {
                        let mut ctr = PeelCounters::default();
                        self.relax(v, &mut |u| self.next.insert(u), &mut ctr)?;
                        Ok(ctr)
                    }
                },
            )
            .try_reduce(PeelCounters::default, |a, b| Ok(a + b))
    }
}

/// One online subround; returns the next frontier and the counters.
pub fn peel_online(
    g: &CsrGraph,
    st: &PeelState,
    frontier: &[Vertex],
    k: u32,
    cap: usize,
    next: &mut HashBag,
) -> Result<(Vec<Vertex>, PeelCounters)> {
    let ctr = Online { g, st, k, cap, next, sampling: None, hook: None }.run(frontier)?;
    Ok((next.extract_all(), ctr))
}
