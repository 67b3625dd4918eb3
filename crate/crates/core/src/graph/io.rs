use super::{CsrGraph, EdgeList, MAX_VERTICES};
use crate::{Error, Result, Vertex};
use std::io::{BufRead, Read, Write};

pub const GRAPH_MAGIC: &[u8; 4] = b"KCG1";

/// Parses whitespace-separated `u v` pairs, one per line. Lines starting with
/// `#` or `%` are comments, except that a first line of the form `# <n>` fixes
/// the vertex count. Without it, `n = 1 + max id`.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<EdgeList> {
    let mut header_n = None;
    let mut edges = Vec::new();
    let mut max_id: Option<u64> = None;
    let mut seen_content = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if !seen_content && header_n.is_none() {
                if let Ok(n) = rest.trim().parse::<u64>() {
                    header_n = Some(n);
                }
            }
            seen_content = true;
            continue;
        }
        seen_content = true;
        if t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let mut id = |what: &str| -> Result<u64> {
            let tok = it.next().ok_or_else(|| Error::Parse { line: lineno, msg: format!("missing {what} endpoint") })?;
            tok.parse::<u64>()
                .map_err(|_| Error::Parse { line: lineno, msg: format!("bad vertex id {tok:?}") })
        };
        let u = id("first")?;
        let v = id("second")?;
        if let Some(tok) = it.next() {
            return Err(Error::Parse { line: lineno, msg: format!("unexpected token {tok:?}") });
        }
        let hi = u.max(v);
        if hi >= MAX_VERTICES as u64 {
            return Err(Error::Capacity(format!("vertex id {hi} at line {lineno} exceeds the 32-bit id space")));
        }
        max_id = Some(max_id.map_or(hi, |m| m.max(hi)));
        edges.push((u as Vertex, v as Vertex));
    }
    let n = match header_n {
        Some(n) if n > MAX_VERTICES as u64 => {
            return Err(Error::Capacity(format!("header n = {n} exceeds the 32-bit id space")))
        }
        Some(n) => n as usize,
        None => max_id.map_or(0, |m| m as usize + 1),
    };
    Ok(EdgeList { n, edges })
}

/// Writes `KCG1 | n | m2 | offsets | targets`, all little-endian u64.
pub fn save_binary<W: Write>(g: &CsrGraph, mut w: W) -> Result<()> {
    w.write_all(GRAPH_MAGIC)?;
    w.write_all(&(g.n() as u64).to_le_bytes())?;
    w.write_all(&(g.m2() as u64).to_le_bytes())?;
    write_u64s(&mut w, g.offsets().iter().copied())?;
    write_u64s(&mut w, g.targets().iter().map(|&t| t as u64))?;
    w.flush()?;
    Ok(())
}

pub fn load_binary<R: Read>(mut r: R) -> Result<CsrGraph> {
    read_magic(&mut r, GRAPH_MAGIC)?;
    let n = read_u64(&mut r)?;
    let m2 = read_u64(&mut r)?;
    if n > MAX_VERTICES as u64 {
        return Err(Error::Format(format!("n = {n} exceeds the 32-bit id space")));
    }
    let offsets = read_u64s(&mut r, n as usize + 1)?;
    if offsets[n as usize] != m2 {
        return Err(Error::Format(format!("offsets[n] = {} but header m2 = {m2}", offsets[n as usize])));
    }
    let raw = read_u64s(&mut r, m2 as usize)?;
    let mut targets = Vec::with_capacity(raw.len());
    for t in raw {
        if t >= n {
            return Err(Error::Format(format!("target {t} out of range for n = {n}")));
        }
        targets.push(t as Vertex);
    }
    CsrGraph::from_parts(offsets, targets)
}

pub(crate) fn write_u64s<W: Write>(w: &mut W, vals: impl Iterator<Item = u64>) -> Result<()> {
    let mut buf = Vec::with_capacity(1 << 16);
    for v in vals {
        buf.extend_from_slice(&v.to_le_bytes());
        if buf.len() >= 1 << 16 {
            w.write_all(&buf)?;
            buf.clear();
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub(crate) fn read_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut m = [0u8; 4];
    read_exact(r, &mut m)?;
    if &m != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Reads `count` values in bounded chunks so a corrupt header cannot force a
/// huge up-front allocation.
pub(crate) fn read_u64s<R: Read>(r: &mut R, count: usize) -> Result<Vec<u64>> {
    const CHUNK: usize = 1 << 16;
    let mut out = Vec::with_capacity(count.min(CHUNK));
    let mut buf = vec![0u8; 8 * CHUNK];
    let mut left = count;
    while left > 0 {
        let take = left.min(CHUNK);
        read_exact(r, &mut buf[..8 * take])?;
        out.extend(buf[..8 * take].chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())));
        left -= take;
    }
    Ok(out)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated stream".into()),
        _ => Error::Io(e),
    })
}
