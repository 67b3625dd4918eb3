//! Seeded synthetic graphs. Every generator is a pure function of its
//! arguments.

use super::{from_edges, CsrGraph, EdgeList, MAX_VERTICES};
use crate::{Error, Result, Vertex};
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vertex_count(dims: &[usize]) -> Result<usize> {
    if dims.contains(&0) {
        return Err(Error::Parameter(format!("lattice dimensions must be >= 1, got {dims:?}")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= MAX_VERTICES)
        .ok_or_else(|| Error::Capacity(format!("lattice {dims:?} exceeds the 32-bit id space")))
}

/// Builds a CSR from a per-vertex callback that pushes neighbors in ascending order.
fn build_sorted(n: usize, mut nbrs: impl FnMut(usize, &mut Vec<Vertex>)) -> CsrGraph {
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    offsets.push(0u64);
    for v in 0..n {
        nbrs(v, &mut targets);
        offsets.push(targets.len() as u64);
    }
    CsrGraph { offsets, targets }
}

/// `w × h` 4-neighbor lattice without wraparound. Vertex `(x, y)` has id `y·w + x`.
pub fn gen_grid(w: usize, h: usize) -> Result<CsrGraph> {
    let n = vertex_count(&[w, h])?;
    Ok(build_sorted(n, |v, out| {
        let (x, y) = (v % w, v / w);
        if y > 0 {
            out.push((v - w) as Vertex);
        }
        if x > 0 {
            out.push((v - 1) as Vertex);
        }
        if x + 1 < w {
            out.push((v + 1) as Vertex);
        }
        if y + 1 < h {
            out.push((v + w) as Vertex);
        }
    }))
}

/// `x × y × z` 6-neighbor lattice without wraparound.
pub fn gen_cube(x: usize, y: usize, z: usize) -> Result<CsrGraph> {
    let n = vertex_count(&[x, y, z])?;
    let layer = x * y;
    Ok(build_sorted(n, |v, out| {
        let (i, j, k) = (v % x, (v / x) % y, v / layer);
        if k > 0 {
            out.push((v - layer) as Vertex);
        }
        if j > 0 {
            out.push((v - x) as Vertex);
        }
        if i > 0 {
            out.push((v - 1) as Vertex);
        }
        if i + 1 < x {
            out.push((v + 1) as Vertex);
        }
        if j + 1 < y {
            out.push((v + x) as Vertex);
        }
        if k + 1 < z {
            out.push((v + layer) as Vertex);
        }
    }))
}

/// High-coreness graph: a clique on vertices `0..=kmax`, plus for each
/// `i in 1..kmax` a vertex `kmax + i` joined to `i` distinct clique vertices.
/// The extra vertex `kmax + i` has coreness exactly `i` and the clique has
/// coreness `kmax`.
pub fn gen_hcns(kmax: usize, seed: u64) -> Result<CsrGraph> {
    if kmax == 0 {
        return Err(Error::Parameter("hcns needs kmax >= 1".into()));
    }
    let clique = kmax + 1;
    let n = clique
        .checked_add(kmax - 1)
        .filter(|&n| n <= MAX_VERTICES)
        .ok_or_else(|| Error::Capacity(format!("hcns kmax {kmax} exceeds the 32-bit id space")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(clique * kmax / 2 + kmax * kmax / 2);
    for u in 0..clique {
        for v in u + 1..clique {
            edges.push((u as Vertex, v as Vertex));
        }
    }
    for i in 1..kmax {
        let p = (clique + i - 1) as Vertex;
        for c in sample(&mut rng, clique, i) {
            edges.push((p, c as Vertex));
        }
    }
    from_edges(&EdgeList { n, edges })
}

/// Preferential attachment from a seed clique `K_{a+1}`. Each new vertex picks
/// `a` distinct targets by repeated uniform draws from the running endpoint
/// list, rejecting duplicates.
pub fn gen_ba(n: usize, a: usize, seed: u64) -> Result<CsrGraph> {
    if a == 0 {
        return Err(Error::Parameter("ba needs a >= 1".into()));
    }
    if n <= a {
        return Err(Error::Parameter(format!("ba needs n > a, got n = {n}, a = {a}")));
    }
    if n > MAX_VERTICES {
        return Err(Error::Capacity(format!("n = {n} exceeds the 32-bit id space")));
    }
    let m = a * (a + 1) / 2 + a * (n - a - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity(m);
    let mut ends: Vec<Vertex> = Vec::with_capacity(2 * m);
    for u in 0..=a {
        for v in u + 1..=a {
            edges.push((u as Vertex, v as Vertex));
            ends.push(u as Vertex);
            ends.push(v as Vertex);
        }
    }
    let mut picked: Vec<Vertex> = Vec::with_capacity(a);
    for t in a + 1..n {
        picked.clear();
        while picked.len() < a {
            let c = ends[rng.gen_range(0..ends.len())];
            if !picked.contains(&c) {
                picked.push(c);
            }
        }
        for &c in &picked {
            edges.push((t as Vertex, c));
            ends.push(t as Vertex);
            ends.push(c);
        }
    }
    drop(ends);
    from_edges(&EdgeList { n, edges })
}

/// Erdős–Rényi `G(n, p)` with `p = avg_degree / (n - 1)`, by geometric skipping.
pub fn gen_er(n: usize, avg_degree: f64, seed: u64) -> Result<CsrGraph> {
    if n > MAX_VERTICES {
        return Err(Error::Capacity(format!("n = {n} exceeds the 32-bit id space")));
    }
    if avg_degree.is_nan() || avg_degree < 0.0 {
        return Err(Error::Parameter(format!("average degree must be >= 0, got {avg_degree}")));
    }
    if n < 2 || avg_degree == 0.0 {
        return Ok(CsrGraph::empty(n));
    }
    let p = (avg_degree / (n - 1) as f64).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u as Vertex, v as Vertex));
            }
        }
    } else {
        let lp = (1.0 - p).ln();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.gen();
            w += 1 + ((1.0 - r).ln() / lp).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((v as Vertex, w as Vertex));
            }
        }
    }
    from_edges(&EdgeList { n, edges })
}
