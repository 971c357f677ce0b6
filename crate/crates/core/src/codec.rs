//! graph6 and digraph6 encodings.
//!
//! graph6: one byte `63 + n`, then the upper triangle `x(0,1), x(0,2),
//! x(1,2), x(0,3), ...` packed big-endian into 6-bit groups, each plus 63,
//! zero padded. digraph6: `&`, the same size byte, then all `n * n` matrix
//! bits row-major with the same packing.

use crate::error::{Error, Result};
use crate::graph::{LabelledGraph, MAX_N};

fn parse_err(offset: usize, msg: impl Into<String>) -> Error {
    Error::Malformed(format!("at byte {offset}: {}", msg.into()))
}

fn pack(bits: impl Iterator<Item = bool>, out: &mut String) {
    let mut acc = 0u8;
    let mut k = 0;
    for b in bits {
        acc = acc << 1 | b as u8;
        k += 1;
        if k == 6 {
            out.push((acc + 63) as char);
            acc = 0;
            k = 0;
        }
    }
    if k > 0 {
        out.push(((acc << (6 - k)) + 63) as char);
    }
}

/// Unpacks `count` bits from `body`, which starts at byte `offset` of the input.
fn unpack(body: &[u8], offset: usize, count: usize) -> Result<Vec<bool>> {
    let need = count.div_ceil(6);
    if body.len() != need {
        return Err(parse_err(
            offset + body.len().min(need),
            format!("expected {need} data bytes, found {}", body.len()),
        ));
    }
    let mut bits = Vec::with_capacity(need * 6);
    for (i, &c) in body.iter().enumerate() {
        if !(63..=126).contains(&c) {
            return Err(parse_err(offset + i, format!("byte {c} outside 63..=126")));
        }
        let v = c - 63;
        for s in (0..6).rev() {
            bits.push(v >> s & 1 == 1);
        }
    }
    if bits[count..].iter().any(|&b| b) {
        return Err(parse_err(offset + need - 1, "non-zero padding bits"));
    }
    bits.truncate(count);
    Ok(bits)
}

fn size_byte(bytes: &[u8], offset: usize) -> Result<usize> {
    let &c = bytes.get(offset).ok_or_else(|| parse_err(offset, "missing size byte"))?;
    if c == b'~' {
        return Err(parse_err(offset, format!("orders above 62 are not supported (max {MAX_N})")));
    }
    if !(63..=125).contains(&c) {
        return Err(parse_err(offset, format!("invalid size byte {c}")));
    }
    let n = (c - 63) as usize;
    if n == 0 || n > MAX_N {
        return Err(Error::Capacity(n));
    }
    Ok(n)
}

pub fn encode_graph6(g: &LabelledGraph) -> Result<String> {
    if g.is_directed() {
        return Err(Error::Malformed("graph6 encodes undirected graphs only".into()));
    }
    let n = g.order();
    let mut out = String::with_capacity(1 + (n * n / 12) + 1);
    out.push((63 + n as u8) as char);
    pack((1..n).flat_map(|j| (0..j).map(move |i| g.has_arc(i, j))), &mut out);
    Ok(out)
}

pub fn decode_graph6(s: &str) -> Result<LabelledGraph> {
    let bytes = s.trim_end_matches(['\n', '\r']).as_bytes();
    if bytes.first() == Some(&b'&') {
        return Err(parse_err(0, "digraph6 input given to the graph6 decoder"));
    }
    let n = size_byte(bytes, 0)?;
    let bits = unpack(&bytes[1..], 1, n * (n - 1) / 2)?;
    let mut g = LabelledGraph::empty(n, false)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    Ok(g)
}

pub fn encode_digraph6(g: &LabelledGraph) -> Result<String> {
    if !g.is_directed() {
        return Err(Error::Malformed("digraph6 encodes directed graphs only".into()));
    }
    let n = g.order();
    let mut out = String::with_capacity(2 + (n * n).div_ceil(6));
    out.push('&');
    out.push((63 + n as u8) as char);
    pack((0..n).flat_map(|i| (0..n).map(move |j| g.has_arc(i, j))), &mut out);
    Ok(out)
}

pub fn decode_digraph6(s: &str) -> Result<LabelledGraph> {
    let bytes = s.trim_end_matches(['\n', '\r']).as_bytes();
    if bytes.first() != Some(&b'&') {
        return Err(parse_err(0, "digraph6 must start with '&'"));
    }
    let n = size_byte(bytes, 1)?;
    let bits = unpack(&bytes[2..], 2, n * n)?;
    let mut g = LabelledGraph::empty(n, true)?;
    for i in 0..n {
        for j in 0..n {
            if bits[i * n + j] {
                if i == j {
                    return Err(parse_err(2 + (i * n + j) / 6, format!("loop at vertex {i}")));
                }
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// graph6 for undirected graphs, digraph6 for digraphs.
pub fn encode(g: &LabelledGraph) -> String {
    if g.is_directed() {
        encode_digraph6(g)
    } else {
        encode_graph6(g)
    }
    .expect("encoder matches directedness")
}

/// Dispatches on the leading `&`.
pub fn decode(s: &str) -> Result<LabelledGraph> {
    if s.starts_with('&') {
        decode_digraph6(s)
    } else {
        decode_graph6(s)
    }
}
