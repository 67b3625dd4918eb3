//! Sequential bucket-peeling reference and coreness verification.

use crate::graph::io::{read_magic, read_u64, read_u64s, write_u64s};
use crate::{CsrGraph, Error, Result, Vertex};
use serde::Serialize;
use std::io::{Read, Write};

pub const CORENESS_MAGIC: &[u8; 4] = b"KCC1";

/// Per-vertex coreness.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorenessArray {
    pub values: Vec<u32>,
}

impl CorenessArray {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kmax(&self) -> u32 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Vertices with coreness at least `k`.
    pub fn at_least(&self, k: u32) -> Vec<Vertex> {
        (0..self.values.len() as Vertex).filter(|&v| self.values[v as usize] >= k).collect()
    }

    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CORENESS_MAGIC)?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        write_u64s(&mut w, self.values.iter().map(|&k| k as u64))?;
        w.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        read_magic(&mut r, CORENESS_MAGIC)?;
        let n = read_u64(&mut r)?;
        if n > u32::MAX as u64 {
            return Err(Error::Format(format!("n = {n} exceeds the 32-bit id space")));
        }
        let raw = read_u64s(&mut r, n as usize)?;
        let values = raw
            .into_iter()
            .map(|k| u32::try_from(k).map_err(|_| Error::Format(format!("coreness {k} out of range"))))
            .collect::<Result<_>>()?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after coreness values".into()));
        }
        Ok(CorenessArray { values })
    }
}

/// First vertex where a candidate disagrees with the reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub vertex: Vertex,
    pub expected: u32,
    pub got: u32,
}

/// Bin-sort peeling over `bin`/`pos`/`vert` arrays with position swaps.
/// O(n + m), single-threaded.
pub fn bz_coreness(g: &CsrGraph) -> CorenessArray {
    let n = g.n();
    if n == 0 {
        return CorenessArray::default();
    }
    let mut deg: Vec<usize> = g.degrees();
    let md = g.max_degree();
    let mut bin = vec![0usize; md + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let c = *b;
        *b = start;
        start += c;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0 as Vertex; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v as Vertex;
        bin[deg[v]] += 1;
    }
    for d in (1..=md).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = vert[i] as usize;
        for &u in g.neighbors(v as Vertex) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw] as usize;
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w as Vertex;
                    pos[w] = pu;
                    vert[pw] = u as Vertex;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    CorenessArray { values: deg.into_iter().map(|d| d as u32).collect() }
}

/// Recomputes the reference and reports the least mismatching vertex, if any.
pub fn verify_coreness(g: &CsrGraph, k: &CorenessArray) -> Result<Option<Mismatch>> {
    if k.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: k.len() });
    }
    let truth = bz_coreness(g);
    Ok(truth
        .values
        .iter()
        .zip(&k.values)
        .position(|(a, b)| a != b)
        .map(|v| Mismatch { vertex: v as Vertex, expected: truth.values[v], got: k.values[v] }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{from_edges, gen_grid, EdgeList};

    fn graph(n: usize, edges: &[(u32, u32)]) -> CsrGraph {
        from_edges(&EdgeList { n, edges: edges.to_vec() }).unwrap()
    }

    fn k4() -> CsrGraph {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn clique_star_grid() {
        assert_eq!(bz_coreness(&k4()).values, vec![3; 4]);
        let star = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(bz_coreness(&star).values, vec![1; 6]);
        assert_eq!(bz_coreness(&gen_grid(4, 4).unwrap()).values, vec![2; 16]);
        assert_eq!(bz_coreness(&CsrGraph::empty(3)).values, vec![0; 3]);
    }

    #[test]
    fn verify_reports_first_mismatch() {
        let g = k4();
        assert_eq!(verify_coreness(&g, &CorenessArray { values: vec![3; 4] }).unwrap(), None);
        let m = verify_coreness(&g, &CorenessArray { values: vec![3, 3, 3, 2] }).unwrap();
        assert_eq!(m, Some(Mismatch { vertex: 3, expected: 3, got: 2 }));
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(verify_coreness(&p3, &CorenessArray { values: vec![1; 3] }).unwrap(), None);
        assert!(matches!(
            verify_coreness(&g, &CorenessArray { values: vec![3; 3] }),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn coreness_file_round_trip() {
        let k = CorenessArray { values: vec![0, 5, 2, 7] };
        let mut blob = vec![];
        k.save(&mut blob).unwrap();
        assert_eq!(blob.len(), 4 + 8 + 32);
        assert_eq!(CorenessArray::load(blob.as_slice()).unwrap(), k);
        assert!(matches!(CorenessArray::load(&blob[..blob.len() - 1]), Err(Error::Format(_))));
        blob[1] = 0;
        assert!(matches!(CorenessArray::load(blob.as_slice()), Err(Error::Format(_))));
    }
}
