//! Batch-synchronous subround: gather the neighbor multiset of the frontier,
//! count it, then apply every vertex's decrement once.

use crate::bucketing::DegreeHook;
use crate::state::PeelState;
use crate::{CsrGraph, Vertex};
use rayon::prelude::*;
use std::collections::HashMap;

/// Multiplicity of each distinct id, merged from per-thread counting maps.
/// Sorted by id.
pub fn histogram(list: &[Vertex]) -> Vec<(Vertex, u32)> {
    let mut h = histogram_unordered(list);
    h.par_sort_unstable();
    h
}

fn histogram_unordered(list: &[Vertex]) -> Vec<(Vertex, u32)> {
    if list.len() < 4096 {
        let mut m: HashMap<Vertex, u32> = HashMap::new();
        for &u in list {
            *m.entry(u).or_insert(0) += 1;
        }
        return m.into_iter().collect();
    }
    list.par_chunks(4096)
        .fold(HashMap::new, |mut m: HashMap<Vertex, u32>, chunk| {
            for &u in chunk {
                *m.entry(u).or_insert(0) += 1;
            }
            m
        })
        .reduce(HashMap::new, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, c) in small {
                *big.entry(k).or_insert(0) += c;
            }
            big
        })
        .into_iter()
        .collect()
}

/// One offline subround at round `k`. Every `v ∈ frontier` must already have
/// coreness `k`. Returns the vertices whose degree crossed from above `k` to at
/// most `k` (claimed, in no particular order) and the number of unit
/// decrements applied.
pub fn peel_offline(
    g: &CsrGraph,
    st: &PeelState,
    frontier: &[Vertex],
    k: u32,
    hook: Option<&dyn DegreeHook>,
) -> (Vec<Vertex>, u64) {
    let list: Vec<Vertex> =
        frontier.par_iter().with_min_len(64).flat_map_iter(|&v| g.neighbors(v).iter().copied()).collect();
    let hist = histogram_unordered(&list);
    let k = k as i64;
    let res: Vec<(Option<Vertex>, u64)> = hist
        .par_iter()
        .with_min_len(1024)
        .map(|&(u, f)| {
            let d = st.deg.get(u);
            if d <= k {
                return (None, 0);
            }
            let new = d - f as i64;
            st.deg.set(u, new);
            st.touch(u);
            if new <= k {
                (st.claim(u).then_some(u), f as u64)
            } else {
                if let Some(h) = hook {
                    h.moved(u, d, new, k as u32);
                }
                (None, f as u64)
            }
        })
        .collect();
    let decs = res.iter().map(|r| r.1).sum();
    (res.into_iter().filter_map(|r| r.0).collect(), decs)
}
