//! Sampling for high-degree vertices. While a vertex is in sample mode its
//! degree is frozen; each peeled neighbor instead flips a coin with the
//! vertex's rate, and heads bump a counter. Enough heads, or a failed
//! validation at round start, trigger an exact recount.

use crate::bucketing::DegreeHook;
use crate::state::{InducedDegrees, PeelState, UNASSIGNED};
use crate::{CsrGraph, Vertex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, Ordering::*};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    /// Confidence constant; larger means more samples before a recount.
    pub c: f64,
    /// Fraction of the snapshot degree at which the sampler expires.
    pub r: f64,
    /// Smallest `r · degree` allowed in sample mode.
    pub threshold: f64,
    /// Fixed sample target instead of the one derived from `c` and `n`.
    pub mu_override: Option<u32>,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams { c: 1.0, r: 0.10, threshold: 16.0, mu_override: None }
    }
}

impl SamplingParams {
    /// Sample target `⌈4(c+2)·ln n⌉`, at least 1.
    pub fn mu(&self, n: usize) -> u32 {
        if let Some(m) = self.mu_override {
            return m.max(1);
        }
        let ln = if n > 1 { (n as f64).ln() } else { 0.0 };
        ((4.0 * (self.c + 2.0) * ln).ceil() as u32).max(1)
    }
}

/// Value view of one vertex's sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampler {
    pub mode: bool,
    pub rate: f64,
    pub cnt: u32,
}

impl Sampler {
    pub const OFF: Sampler = Sampler { mode: false, rate: 0.0, cnt: 0 };
}

/// Sampler for a vertex of true degree `d` at round `k`.
pub fn fresh_sampler(d: i64, k: u32, mu: u32, p: &SamplingParams) -> Sampler {
    let d = d as f64;
    if p.r * d > p.threshold.max(k as f64) {
        Sampler { mode: true, rate: (mu as f64 / ((1.0 - p.r) * d)).min(1.0), cnt: 0 }
    } else {
        Sampler::OFF
    }
}

/// Whether a sampled vertex with frozen degree `d` may stay sampled through
/// round `k`: the round must stay below `r · d`, and the heads seen so far
/// must stay below a quarter of those expected for `d - k` removed neighbors.
pub fn validate(s: &Sampler, d: i64, k: u32, p: &SamplingParams) -> bool {
    let (d, k) = (d as f64, k as f64);
    k < p.r * d && (s.cnt as f64) < (d - k) * s.rate / 4.0
}

/// Counter-based coin keyed by `(seed, sampled vertex, peeled neighbor)`. Each
/// directed edge is peeled at most once per run, so no draw repeats.
#[inline]
pub fn coin(seed: u64, u: Vertex, v: Vertex, rate: f64) -> bool {
    let mut z = seed ^ ((u as u64) << 32 | v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ((z >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < rate
}

/// A sampled vertex turned out to have fallen below the current round before
/// it was recounted. Only possible with low probability; the engine restarts.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("sampling error: vertex {vertex} had only {prev_count} live neighbors at the start of round {round}")]
pub struct DetectedError {
    pub vertex: Vertex,
    pub round: u32,
    pub prev_count: u32,
}

/// Per-vertex sampler state.
pub struct SamplerTable {
    mode: Vec<AtomicBool>,
    rate: Vec<AtomicU64>,
    cnt: Vec<AtomicU32>,
    pub mu: u32,
    pub params: SamplingParams,
}

/// What a recount did to the vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resampled {
    /// Degree fell to the round; the vertex joins the frontier.
    Claimed,
    /// Degree updated from `old` to `new`, sampler reset.
    Updated { old: i64, new: i64 },
}

impl SamplerTable {
    pub fn new(n: usize, mu: u32, params: SamplingParams) -> Self {
        SamplerTable {
            mode: (0..n).into_par_iter().map(|_| AtomicBool::new(false)).collect(),
            rate: (0..n).into_par_iter().map(|_| AtomicU64::new(0)).collect(),
            cnt: (0..n).into_par_iter().map(|_| AtomicU32::new(0)).collect(),
            mu,
            params,
        }
    }

    #[inline]
    pub fn mode(&self, v: Vertex) -> bool {
        self.mode[v as usize].load(Relaxed)
    }

    #[inline]
    pub fn rate(&self, v: Vertex) -> f64 {
        f64::from_bits(self.rate[v as usize].load(Relaxed))
    }

    pub fn get(&self, v: Vertex) -> Sampler {
        Sampler { mode: self.mode(v), rate: self.rate(v), cnt: self.cnt[v as usize].load(Relaxed) }
    }

    pub fn put(&self, v: Vertex, s: Sampler) {
        let i = v as usize;
        self.rate[i].store(s.rate.to_bits(), Relaxed);
        self.cnt[i].store(s.cnt, Relaxed);
        self.mode[i].store(s.mode, Relaxed);
    }

    /// Re-derives `v`'s sampler from its current (true) degree.
    pub fn set_sampler(&self, v: Vertex, k: u32, deg: &InducedDegrees) -> Sampler {
        let s = fresh_sampler(deg.get(v), k, self.mu, &self.params);
        self.put(v, s);
        s
    }

    /// Initializes every vertex for round 0.
    pub fn init(&self, n: usize, deg: &InducedDegrees) {
        (0..n as Vertex).into_par_iter().with_min_len(1024).for_each(|v| {
            self.set_sampler(v, 0, deg);
        });
    }

    /// Counts one head for `u` and returns the new count, or `None` once the
    /// counter already holds the sample target (it never exceeds it).
    #[inline]
    pub fn add_sample(&self, u: Vertex) -> Option<u32> {
        let mu = self.mu;
        self.cnt[u as usize].fetch_update(AcqRel, Relaxed, |c| (c < mu).then_some(c + 1)).ok().map(|c| c + 1)
    }

    /// Exact recount of `v` at a phase boundary of round `k`. "Live" neighbors
    /// have no coreness yet; at the start of round `k` the live set also
    /// included those peeled during round `k`.
    pub fn resample(
        &self,
        g: &CsrGraph,
        st: &PeelState,
        v: Vertex,
        k: u32,
        hook: Option<&dyn DegreeHook>,
    ) -> Result<Resampled, DetectedError> {
        let (mut now, mut before) = (0u32, 0u32);
        for &u in g.neighbors(v) {
            match st.kappa(u) {
                UNASSIGNED => {
                    now += 1;
                    before += 1;
                }
                e if e == k => before += 1,
                _ => {}
            }
        }
        let old = st.deg.get(v);
        let new = now as i64;
        st.deg.set(v, new);
        if new <= k as i64 {
            self.put(v, Sampler::OFF);
            if before < k {
                return Err(DetectedError { vertex: v, round: k, prev_count: before });
            }
            let first = st.claim(v);
            debug_assert!(first, "sampled vertex {v} was already claimed");
            return Ok(Resampled::Claimed);
        }
        self.set_sampler(v, k, &st.deg);
        if let Some(h) = hook {
            if new != old {
                h.moved(v, old, new, k);
            }
        }
        Ok(Resampled::Updated { old, new })
    }

    /// Validates every sampled vertex of `active` at the start of round `k`
    /// and recounts the ones that fail. Returns the vertices that joined the
    /// frontier and the number of recounts.
    pub fn round_prologue(
        &self,
        g: &CsrGraph,
        st: &PeelState,
        active: &[Vertex],
        k: u32,
        hook: Option<&dyn DegreeHook>,
    ) -> Result<(Vec<Vertex>, u64), DetectedError> {
        self.revalidate(g, st, active, k, k, hook)
    }

    /// Once round `k` runs out of frontier: validates the still-live sampled
    /// vertices against round `k + 1` and recounts the failures within round
    /// `k`, so a vertex whose neighborhood was peeled during this round (with
    /// too few heads to reach the sample target) still gets coreness `k`.
    pub fn round_epilogue(
        &self,
        g: &CsrGraph,
        st: &PeelState,
        active: &[Vertex],
        k: u32,
        hook: Option<&dyn DegreeHook>,
    ) -> Result<(Vec<Vertex>, u64), DetectedError> {
        self.revalidate(g, st, active, k + 1, k, hook)
    }

    fn revalidate(
        &self,
        g: &CsrGraph,
        st: &PeelState,
        active: &[Vertex],
        check: u32,
        k: u32,
        hook: Option<&dyn DegreeHook>,
    ) -> Result<(Vec<Vertex>, u64), DetectedError> {
        let failing: Vec<Vertex> = active
            .par_iter()
            .with_min_len(1024)
            .copied()
            .filter(|&v| self.mode(v) && !validate(&self.get(v), st.deg.get(v), check, &self.params))
            .collect();
        let count = failing.len() as u64;
        let claimed = self.resample_all(g, st, &failing, k, hook)?;
        Ok((claimed, count))
    }

    /// Recounts each of `vs` and returns the ones that joined the frontier.
    pub fn resample_all(
        &self,
        g: &CsrGraph,
        st: &PeelState,
        vs: &[Vertex],
        k: u32,
        hook: Option<&dyn DegreeHook>,
    ) -> Result<Vec<Vertex>, DetectedError> {
        let out: Result<Vec<Option<Vertex>>, DetectedError> = vs
            .par_iter()
            .with_min_len(64)
            .map(|&v| Ok((self.resample(g, st, v, k, hook)? == Resampled::Claimed).then_some(v)))
            .collect();
        Ok(out?.into_iter().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{from_edges, EdgeList};

    fn params() -> SamplingParams {
        SamplingParams::default()
    }

    #[test]
    fn mu_formula() {
        assert_eq!(params().mu(1000), 83);
        assert_eq!(params().mu(1), 1);
        assert_eq!(SamplingParams { c: 2.0, ..params() }.mu(1000), 111);
        assert_eq!(SamplingParams { mu_override: Some(4), ..params() }.mu(1000), 4);
    }

    #[test]
    fn fresh_sampler_gate() {
        let s = fresh_sampler(2000, 0, 83, &params());
        assert!(s.mode);
        assert!((s.rate - 83.0 / 1800.0).abs() < 1e-12);
        assert!((s.rate - 0.04611).abs() < 1e-5);
        assert!(!fresh_sampler(100, 0, 83, &params()).mode);
        assert!(!fresh_sampler(2000, 250, 83, &params()).mode);
        assert_eq!(fresh_sampler(200, 0, 10_000, &params()).rate, 1.0);
    }

    #[test]
    fn validate_bounds() {
        let rate = 83.0 / 1800.0;
        let s = |cnt| Sampler { mode: true, rate, cnt };
        assert!(validate(&s(21), 2000, 150, &params()));
        assert!(!validate(&s(22), 2000, 150, &params()));
        assert!(!validate(&s(0), 2000, 200, &params()));
        assert!(validate(&s(0), 2000, 199, &params()));
    }

    #[test]
    fn coin_frequency() {
        let p = 0.3;
        let t = 200_000u32;
        let heads = (0..t).filter(|&i| coin(42, 7, i, p)).count() as f64;
        let sd = (t as f64 * p * (1.0 - p)).sqrt();
        assert!((heads - t as f64 * p).abs() < 4.0 * sd);
        assert!((0..1000).all(|i| coin(1, 2, i, 1.0)));
        assert!((0..1000).all(|i| !coin(1, 2, i, 0.0)));
    }

    #[test]
    fn add_sample_caps_at_mu() {
        let t = SamplerTable::new(1, 5, params());
        let hits: Vec<_> = (0..8).map(|_| t.add_sample(0)).collect();
        assert_eq!(hits, vec![Some(1), Some(2), Some(3), Some(4), Some(5), None, None, None]);
        assert_eq!(t.get(0).cnt, 5);
    }

    /// Vertex 0 joined to 1..=10; `peeled` neighbors get coreness `k`,
    /// `old` ones a smaller coreness.
    fn gadget(peeled: &[u32], old: &[u32], k: u32) -> (CsrGraph, PeelState) {
        let edges = (1..=10).map(|u| (0, u)).collect();
        let g = from_edges(&EdgeList { n: 11, edges }).unwrap();
        let st = PeelState::new(&g);
        for &u in peeled {
            st.set_kappa(u, k);
        }
        for &u in old {
            st.set_kappa(u, k - 3);
        }
        (g, st)
    }

    #[test]
    fn resample_claims_into_frontier() {
        let (g, st) = gadget(&[1, 2, 3, 4], &[5], 7);
        let t = SamplerTable::new(11, 4, params());
        t.put(0, Sampler { mode: true, rate: 0.5, cnt: 4 });
        assert_eq!(t.resample(&g, &st, 0, 7, None), Ok(Resampled::Claimed));
        assert_eq!(st.deg.get(0), 5);
        assert!(st.is_claimed(0));
        assert!(!t.mode(0));
    }

    #[test]
    fn resample_detects_missed_round() {
        let (g, st) = gadget(&[1], &[2, 3, 4, 5, 6], 7);
        let t = SamplerTable::new(11, 4, params());
        t.put(0, Sampler { mode: true, rate: 0.01, cnt: 0 });
        let err = t.resample(&g, &st, 0, 7, None).unwrap_err();
        assert_eq!(err, DetectedError { vertex: 0, round: 7, prev_count: 5 });
    }

    #[test]
    fn resample_updates_and_resets() {
        let (g, st) = gadget(&[], &[1], 4);
        let t = SamplerTable::new(11, 4, params());
        t.put(0, Sampler { mode: true, rate: 0.5, cnt: 3 });
        assert_eq!(t.resample(&g, &st, 0, 4, None), Ok(Resampled::Updated { old: 10, new: 9 }));
        assert_eq!(t.get(0), Sampler::OFF);
    }

    #[test]
    fn prologue_recounts_only_failing() {
        let (g, st) = gadget(&[], &[], 5);
        let t = SamplerTable::new(11, 4, SamplingParams { threshold: 0.0, ..params() });
        assert!(t.round_prologue(&g, &st, &[0], 0, None).unwrap() == (vec![], 0));
        t.put(0, Sampler { mode: true, rate: 0.4, cnt: 0 });
        // r·10 = 1, so round 1 already fails the first condition
        let before = st.deg.get(0);
        assert_eq!(t.round_prologue(&g, &st, &[0], 0, None).unwrap(), (vec![], 0));
        assert_eq!(st.deg.get(0), before);
        assert_eq!(t.round_prologue(&g, &st, &[0], 1, None).unwrap(), (vec![], 1));
        assert!(!t.mode(0));
    }
}
