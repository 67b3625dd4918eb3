//! Round/subround driver.
//!
//! Round `k` takes the frontier of active vertices with degree at most `k`,
//! gives them coreness `k`, peels them, and repeats on whatever the peel
//! claimed until nothing is left; then the active set drops every vertex of
//! degree at most `k`. With sampling, sampled vertices are validated at round
//! start and when the round runs out of frontier, and recounted after each
//! subround once they collect enough heads.

mod config;
mod stats;

pub use config::{PeelConfig, PeelKind, DEFAULT_VGC};
pub use stats::PeelStats;

use crate::bucketing::{pack_frontier, BucketStrategy, DegreeHook, FixedBuckets, HierBuckets};
use crate::hashbag::HashBag;
use crate::offline::peel_offline;
use crate::online::{Online, Sampling};
use crate::par::with_threads;
use crate::sampler::{DetectedError, SamplerTable, SamplingParams};
use crate::state::{PeelState, UNASSIGNED};
use crate::{CorenessArray, CsrGraph, Result, Vertex};
use rayon::prelude::*;
use std::time::Instant;

/// Extra per-round detail, for strategy comparisons.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    /// Sorted initial frontier of every round, including vertices that joined
    /// through a round-start recount.
    pub frontiers: Vec<Vec<Vertex>>,
    /// Subrounds of every round.
    pub subrounds: Vec<u64>,
    /// Per-vertex bucket insertions, when hierarchical buckets were used.
    pub hbs_inserts: Option<Vec<u32>>,
}

enum Index {
    Single,
    Fixed(FixedBuckets),
    Hbs(HierBuckets),
    /// Pack until `k` reaches `theta`, then hierarchical buckets.
    Pending { theta: u32 },
}

impl Index {
    fn new(strategy: BucketStrategy, g: &CsrGraph) -> Self {
        match strategy {
            BucketStrategy::Single => Index::Single,
            BucketStrategy::Fixed(b) => Index::Fixed(FixedBuckets::new(g.n(), b)),
            BucketStrategy::Hbs => Index::Pending { theta: 0 },
            BucketStrategy::Auto { theta } => {
                let dense = g.n() > 0 && g.m2() as f64 / g.n() as f64 > theta as f64;
                Index::Pending { theta: if dense { 0 } else { theta } }
            }
        }
    }

    fn next(&mut self, g: &CsrGraph, k: u32, active: &[Vertex], st: &PeelState) -> Vec<Vertex> {
        if let Index::Pending { theta } = *self {
            if k >= theta {
                *self = Index::Hbs(HierBuckets::build(g.n(), g.max_degree(), active, st, k));
            }
        }
        match self {
            Index::Single | Index::Pending { .. } => pack_frontier(active, &st.deg, k, st),
            Index::Fixed(f) => f.next(k, active, st),
            Index::Hbs(h) => h.next(k, st),
        }
    }

    fn hook(&self) -> Option<&dyn DegreeHook> {
        match self {
            Index::Fixed(f) => Some(f),
            Index::Hbs(h) => Some(h),
            _ => None,
        }
    }

    fn inserts(&self) -> Option<Vec<u32>> {
        match self {
            Index::Hbs(h) => Some(h.insert_counts()),
            _ => None,
        }
    }
}

fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z = (z ^ (z >> 32)).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z ^ (z >> 32)
}

struct Attempt {
    coreness: CorenessArray,
    stats: PeelStats,
    trace: Option<Trace>,
}

/// One full peeling run. `sampling` carries the parameters and sample target
/// for this attempt.
fn attempt(
    g: &CsrGraph,
    cfg: &PeelConfig,
    sampling: Option<(SamplingParams, u32)>,
    salt: u64,
    want_trace: bool,
) -> Result<std::result::Result<Attempt, DetectedError>> {
    let n = g.n();
    let st = PeelState::new(g);
    let table = sampling.map(|(p, mu)| {
        let t = SamplerTable::new(n, mu, p);
        t.init(n, &st.deg);
        t
    });
    let coin_seed = mix_seed(cfg.seed, salt);
    let mut next = HashBag::new(n, mix_seed(coin_seed, 1));
    let mut recount = HashBag::new(n, mix_seed(coin_seed, 2));
    let mut index = Index::new(cfg.bucketing, g);
    let mut stats = PeelStats { n, m2: g.m2(), config: cfg.clone(), ..Default::default() };
    let mut trace = want_trace.then(Trace::default);
    let mut active: Vec<Vertex> = (0..n as Vertex).collect();
    let mut k: u32 = 0;

    macro_rules! detect {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => return Ok(Err(e)),
            }
        };
    }

    while !active.is_empty() {
        stats.rounds += 1;
        stats.sum_active += active.len() as u64;
        let mut frontier = index.next(g, k, &active, &st);
        if let Some(t) = &table {
            let (claimed, count) = detect!(t.round_prologue(g, &st, &active, k, index.hook()));
            frontier.extend(claimed);
            stats.resamples += count;
        }
        if let Some(tr) = trace.as_mut() {
            let mut f = frontier.clone();
            f.par_sort_unstable();
            tr.frontiers.push(f);
        }
        let mut subrounds = 0;
        loop {
            while !frontier.is_empty() {
                subrounds += 1;
                frontier.par_iter().with_min_len(1024).for_each(|&v| st.set_kappa(v, k));
                match cfg.peel {
                    PeelKind::Offline => {
                        let (f, decs) = peel_offline(g, &st, &frontier, k, index.hook());
                        frontier = f;
                        stats.decrements += decs;
                    }
                    PeelKind::Online => {
                        let ctr = Online {
                            g,
                            st: &st,
                            k,
                            cap: cfg.vgc,
                            next: &next,
                            sampling: table.as_ref().map(|t| Sampling { table: t, recount: &recount, seed: coin_seed }),
                            hook: index.hook(),
                        }
                        .run(&frontier)?;
                        stats.decrements += ctr.decrements;
                        stats.samples += ctr.samples;
                        frontier = next.extract_all();
                        if let Some(t) = &table {
                            let due = recount.extract_all();
                            stats.resamples += due.len() as u64;
                            frontier.extend(detect!(t.resample_all(g, &st, &due, k, index.hook())));
                        }
                    }
                }
            }
            let Some(t) = &table else { break };
            let (claimed, count) = detect!(t.round_epilogue(g, &st, &active, k, index.hook()));
            stats.resamples += count;
            if claimed.is_empty() {
                break;
            }
            frontier = claimed;
        }
        stats.subrounds += subrounds;
        if let Some(tr) = trace.as_mut() {
            tr.subrounds.push(subrounds);
        }
        active = refine_active(&active, &st, k);
        k += 1;
    }

    let coreness = CorenessArray { values: st.coreness() };
    debug_assert!(!coreness.values.contains(&UNASSIGNED));
    stats.kmax = coreness.kmax();
    stats.max_hot_updates = st.max_hot();
    if let Some(tr) = trace.as_mut() {
        tr.hbs_inserts = index.inserts();
    }
    Ok(Ok(Attempt { coreness, stats, trace }))
}

/// Active vertices that survive round `k`.
pub fn refine_active(active: &[Vertex], st: &PeelState, k: u32) -> Vec<Vertex> {
    active
        .par_iter()
        .with_min_len(1024)
        .copied()
        .filter(|&v| {
            let live = st.deg.get(v) > k as i64;
            debug_assert_eq!(live, st.kappa(v) == UNASSIGNED, "vertex {v} at round {k}");
            live
        })
        .collect()
}

fn run(g: &CsrGraph, cfg: &PeelConfig, want_trace: bool) -> Result<(CorenessArray, PeelStats, Option<Trace>)> {
    cfg.validate()?;
    let t0 = Instant::now();
    with_threads(resolve_threads(cfg.threads), || {
        let mut sampling = cfg.sampling.map(|p| (p, p.mu(g.n())));
        let mut restarts = 0u64;
        loop {
            match attempt(g, cfg, sampling, restarts, want_trace)? {
                Ok(a) => {
                    let mut stats = a.stats;
                    stats.restarts = restarts;
                    stats.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
                    return Ok((a.coreness, stats, a.trace));
                }
                Err(_) => {
                    restarts += 1;
                    sampling = if restarts <= 2 { sampling.map(|(p, mu)| (p, mu.saturating_mul(2))) } else { None };
                }
            }
        }
    })
}

fn resolve_threads(t: usize) -> usize {
    if t == 0 {
        crate::par::hardware_threads()
    } else {
        t
    }
}

/// Exact coreness of every vertex. Sampling failures are detected and
/// recovered by restarting: first with a doubled sample target (twice), then
/// without sampling.
pub fn decompose(g: &CsrGraph, cfg: &PeelConfig) -> Result<(CorenessArray, PeelStats)> {
    run(g, cfg, false).map(|(c, s, _)| (c, s))
}

/// [`decompose`] plus per-round detail of the final attempt.
pub fn decompose_traced(g: &CsrGraph, cfg: &PeelConfig) -> Result<(CorenessArray, PeelStats, Trace)> {
    run(g, cfg, true).map(|(c, s, t)| (c, s, t.expect("trace requested")))
}

/// A single attempt without the restart policy; surfaces sampling failures.
pub fn decompose_once(
    g: &CsrGraph,
    cfg: &PeelConfig,
) -> Result<std::result::Result<(CorenessArray, PeelStats), DetectedError>> {
    cfg.validate()?;
    with_threads(resolve_threads(cfg.threads), || {
        let sampling = cfg.sampling.map(|p| (p, p.mu(g.n())));
        Ok(attempt(g, cfg, sampling, 0, false)?.map(|a| (a.coreness, a.stats)))
    })
}

/// Vertices of the maximum `kprime`-core: peels every vertex whose degree is
/// below `kprime` until none is left, using the configured peel strategy and
/// local queue. Sampling is not used.
pub fn kcore_subgraph(g: &CsrGraph, kprime: u32, cfg: &PeelConfig) -> Result<Vec<Vertex>> {
    let mut cfg = cfg.clone();
    cfg.sampling = None;
    cfg.validate()?;
    let n = g.n();
    if kprime == 0 {
        return Ok((0..n as Vertex).collect());
    }
    with_threads(resolve_threads(cfg.threads), || {
        let st = PeelState::new(g);
        let k = kprime - 1;
        let all: Vec<Vertex> = (0..n as Vertex).collect();
        let mut frontier = pack_frontier(&all, &st.deg, k, &st);
        let mut next = HashBag::new(n, cfg.seed);
        while !frontier.is_empty() {
            frontier.par_iter().with_min_len(1024).for_each(|&v| st.set_kappa(v, k));
            frontier = match cfg.peel {
                PeelKind::Offline => peel_offline(g, &st, &frontier, k, None).0,
                PeelKind::Online => {
                    Online { g, st: &st, k, cap: cfg.vgc, next: &next, sampling: None, hook: None }.run(&frontier)?;
                    next.extract_all()
                }
            };
        }
        Ok(all.into_par_iter().filter(|&v| st.kappa(v) == UNASSIGNED).collect())
    })
}
