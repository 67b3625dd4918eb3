//! Immutable symmetric CSR graphs, their ingestion formats and generators.

mod gen;
pub(crate) mod io;

pub use gen::{gen_ba, gen_cube, gen_er, gen_grid, gen_hcns};
pub use io::{load_binary, load_edge_list, save_binary, GRAPH_MAGIC};

use crate::{Error, Result, Vertex};
use rayon::prelude::*;

/// Largest vertex count representable with [`Vertex`] ids.
pub const MAX_VERTICES: usize = u32::MAX as usize;

/// Raw edge pairs. May contain duplicates, self-loops and one-directional edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
}

/// Simple undirected graph in compressed adjacency form. Every edge is stored
/// in both directions and each adjacency list is sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<u64>,
    targets: Vec<Vertex>,
}

impl CsrGraph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        CsrGraph { offsets: vec![0; n + 1], targets: Vec::new() }
    }

    /// Wraps raw arrays after checking every structural invariant.
    pub fn from_parts(offsets: Vec<u64>, targets: Vec<Vertex>) -> Result<Self> {
        let g = CsrGraph { offsets, targets };
        g.check()?;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Directed slot count, `2|E|`.
    pub fn m2(&self) -> usize {
        self.targets.len()
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn targets(&self) -> &[Vertex] {
        &self.targets
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as usize).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as usize).max().unwrap_or(0)
    }

    /// Undirected edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n() as Vertex)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Verifies offsets, bounds, sortedness, simplicity and symmetry.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(msg));
        if self.offsets.is_empty() {
            return bad("offsets array is empty".into());
        }
        let n = self.n();
        if n > MAX_VERTICES {
            return bad(format!("n = {n} exceeds the 32-bit id space"));
        }
        if self.offsets[0] != 0 {
            return bad(format!("offsets[0] = {}", self.offsets[0]));
        }
        if self.offsets[n] != self.targets.len() as u64 {
            return bad(format!("offsets[n] = {} but m2 = {}", self.offsets[n], self.targets.len()));
        }
        if let Some(i) = self.offsets.windows(2).position(|w| w[0] > w[1]) {
            return bad(format!("offsets decrease at index {i}"));
        }
        let res: std::result::Result<(), String> = (0..n).into_par_iter().try_for_each(|u| {
            let nb = self.neighbors(u as Vertex);
            for (i, &v) in nb.iter().enumerate() {
                if v as usize >= n {
                    return Err(format!("target {v} of vertex {u} out of range"));
                }
                if v as usize == u {
                    return Err(format!("self-loop at vertex {u}"));
                }
                if i > 0 && nb[i - 1] >= v {
                    return Err(format!("adjacency of {u} not strictly ascending"));
                }
                if self.neighbors(v).binary_search(&(u as Vertex)).is_err() {
                    return Err(format!("edge {u}->{v} has no reverse"));
                }
            }
            Ok(())
        });
        res.map_err(Error::Format)
    }
}

/// Builds the simple symmetric graph of an edge list: both directions kept,
/// self-loops dropped, duplicates merged, adjacency sorted.
pub fn from_edges(e: &EdgeList) -> Result<CsrGraph> {
    let n = e.n;
    if n > MAX_VERTICES {
        return Err(Error::Capacity(format!("n = {n} exceeds the 32-bit id space")));
    }
    if let Some(&(u, v)) = e.edges.iter().find(|&&(u, v)| u as usize >= n || v as usize >= n) {
        let id = if u as usize >= n { u } else { v };
        return Err(Error::InputRange { id: id as u64, n: n as u64 });
    }
    let mut counts = vec![0u64; n + 1];
    for &(u, v) in &e.edges {
        if u != v {
            counts[u as usize] += 1;
            counts[v as usize] += 1;
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0u64;
    offsets.push(0);
    for &c in &counts[..n] {
        acc += c;
        offsets.push(acc);
    }
    let mut cursor: Vec<u64> = offsets[..n].to_vec();
    let mut raw = vec![0 as Vertex; acc as usize];
    for &(u, v) in &e.edges {
        if u != v {
            raw[cursor[u as usize] as usize] = v;
            cursor[u as usize] += 1;
            raw[cursor[v as usize] as usize] = u;
            cursor[v as usize] += 1;
        }
    }
    drop(cursor);

    let mut lists: Vec<&mut [Vertex]> = Vec::with_capacity(n);
    let mut rest = raw.as_mut_slice();
    for w in offsets.windows(2) {
        let (head, tail) = rest.split_at_mut((w[1] - w[0]) as usize);
        lists.push(head);
        rest = tail;
    }
    let kept: Vec<usize> = lists
        .par_iter_mut()
        .map(|l| {
            l.sort_unstable();
            let mut w = 0;
            for r in 0..l.len() {
                if r == 0 || l[r] != l[w - 1] {
                    l[w] = l[r];
                    w += 1;
                }
            }
            w
        })
        .collect();
    drop(lists);

    let total: usize = kept.iter().sum();
    if total == raw.len() {
        return Ok(CsrGraph { offsets, targets: raw });
    }
    let mut targets = Vec::with_capacity(total);
    let mut new_offsets = Vec::with_capacity(n + 1);
    new_offsets.push(0u64);
    for (v, &k) in kept.iter().enumerate() {
        let s = offsets[v] as usize;
        targets.extend_from_slice(&raw[s..s + k]);
        new_offsets.push(targets.len() as u64);
    }
    Ok(CsrGraph { offsets: new_offsets, targets })
}
