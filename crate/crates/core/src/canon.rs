//! Canonical labelling, automorphism groups and orbits.
//!
//! [`canonical`] is an individualisation-refinement search: equitable
//! partition refinement on (out, in) neighbour counts, backtracking over the
//! first smallest non-singleton cell, automorphism pruning with the
//! generators found so far, and node invariants taken from the refinement
//! trace. The canonical leaf is the maximum of (invariant path, relabelled
//! adjacency rows). [`brute_canonical`] is an independent exhaustive oracle.

use std::collections::HashSet;
use std::fmt;

use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::graph::{low_mask, Bits, ExtensionPair, LabelledGraph, VertexSet, MAX_N};

/// A vertex permutation; entry `v` is the image of vertex `v`.
pub type Perm = [u8; MAX_N];

pub(crate) fn identity_perm() -> Perm {
    std::array::from_fn(|i| i as u8)
}

/// Identifies an isomorphism class: the adjacency rows of its canonical form.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonCode {
    n: u8,
    directed: bool,
    rows: [u16; MAX_N],
}

impl CanonCode {
    fn of(g: &LabelledGraph) -> Self {
        let mut rows = [0u16; MAX_N];
        rows[..g.order()].copy_from_slice(g.rows());
        CanonCode {
            n: g.order() as u8,
            directed: g.is_directed(),
            rows,
        }
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// The canonical form itself.
    pub fn graph(&self) -> LabelledGraph {
        LabelledGraph::from_rows(self.order(), self.directed, &self.rows[..self.order()])
            .expect("canonical codes hold valid adjacency rows")
    }

    /// Byte form: `[n, directed]` followed by the `n*n` adjacency bits,
    /// row-major, most significant bit first, zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.order();
        let mut out = vec![self.n, self.directed as u8];
        out.resize(2 + (n * n).div_ceil(8), 0);
        for i in 0..n {
            for j in 0..n {
                if self.rows[i] >> j & 1 == 1 {
                    let k = i * n + j;
                    out[2 + k / 8] |= 0x80 >> (k % 8);
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (&n, rest) = bytes
            .split_first()
            .ok_or_else(|| Error::Malformed("empty canonical code".into()))?;
        let n = n as usize;
        let (&dir, bits) = rest
            .split_first()
            .ok_or_else(|| Error::Malformed("truncated canonical code header".into()))?;
        if bits.len() != (n * n).div_ceil(8) || dir > 1 {
            return Err(Error::Malformed(format!("canonical code length {} does not match n={n}", bytes.len())));
        }
        let mut rows = vec![0u16; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..n {
                let k = i * n + j;
                if bits[k / 8] & (0x80 >> (k % 8)) != 0 {
                    *row |= 1 << j;
                }
            }
        }
        Ok(CanonCode::of(&LabelledGraph::from_rows(n, dir == 1, &rows)?))
    }
}

impl fmt::Debug for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonCode(")?;
        for b in self.to_bytes() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// Result of a canonical labelling.
#[derive(Clone, Debug)]
pub struct CanonicalResult {
    pub canon_code: CanonCode,
    /// `relabelling[v]` is the canonical label of vertex `v`.
    pub relabelling: Vec<usize>,
    /// Generators of the automorphism group, each as an image table.
    pub generators: Vec<Vec<usize>>,
    /// Orbit partition of the vertices, each orbit sorted, orbits ordered by
    /// least element.
    pub vertex_orbits: Vec<Vec<usize>>,
}

impl CanonicalResult {
    fn build(g: &LabelledGraph, code: CanonCode, relabel: &Perm, gens: &[Perm]) -> Self {
        let n = g.order();
        let orbit_rep = orbit_reps(gens.iter(), n);
        let mut vertex_orbits: Vec<Vec<usize>> = vec![];
        for v in 0..n {
            if orbit_rep[v] as usize == v {
                vertex_orbits.push((v..n).filter(|&u| orbit_rep[u] as usize == v).collect());
            }
        }
        CanonicalResult {
            canon_code: code,
            relabelling: relabel[..n].iter().map(|&x| x as usize).collect(),
            generators: gens.iter().map(|p| p[..n].iter().map(|&x| x as usize).collect()).collect(),
            vertex_orbits,
        }
    }

    /// Order of the automorphism group, by closure. Only for small groups.
    pub fn group_order(&self) -> usize {
        let n = self.relabelling.len();
        let gens: Vec<Perm> = self.generators.iter().map(|g| to_perm(g)).collect();
        group_closure(&gens, n).len()
    }
}

fn to_perm(p: &[usize]) -> Perm {
    let mut out = identity_perm();
    for (i, &x) in p.iter().enumerate() {
        out[i] = x as u8;
    }
    out
}

/// Canonical labelling without the public conversions.
#[derive(Clone, Debug)]
pub(crate) struct Canon {
    pub code: CanonCode,
    /// `lab[i]` is the vertex that receives canonical label `i`.
    pub lab: Perm,
    pub gens: Vec<Perm>,
}

impl Canon {
    /// Orbit (as a vertex set) of `v` under the automorphism group.
    pub fn orbit_of(&self, v: usize, n: usize) -> VertexSet {
        let reps = orbit_reps(self.gens.iter(), n);
        VertexSet((0..n).filter(|&u| reps[u] == reps[v]).fold(0, |m, u| m | 1 << u))
    }
}

/// Union-find orbit representatives (least element) for the group generated by `gens`.
pub(crate) fn orbit_reps<'a, I: Iterator<Item = &'a Perm>>(gens: I, n: usize) -> [u8; MAX_N] {
    let mut parent = identity_perm();
    fn find(p: &mut Perm, mut x: u8) -> u8 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    for g in gens {
        for v in 0..n {
            let a = find(&mut parent, v as u8);
            let b = find(&mut parent, g[v]);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    for v in 0..n {
        parent[v] = find(&mut parent, v as u8);
    }
    parent
}

/// Every element of the group generated by `gens`.
pub(crate) fn group_closure(gens: &[Perm], n: usize) -> Vec<Perm> {
    let id = identity_perm();
    let mut seen: HashSet<Perm> = HashSet::from([id]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        let a = out[i];
        for g in gens {
            let mut c = identity_perm();
            for v in 0..n {
                c[v] = g[a[v] as usize];
            }
            if seen.insert(c) {
                out.push(c);
            }
        }
        i += 1;
    }
    out
}

/// Canonical labelling of `g`.
pub fn canonical(g: &LabelledGraph) -> CanonicalResult {
    let c = canon(g);
    let mut relabel = identity_perm();
    for (i, &v) in c.lab[..g.order()].iter().enumerate() {
        relabel[v as usize] = i as u8;
    }
    CanonicalResult::build(g, c.code, &relabel, &c.gens)
}

/// Canonical code only.
pub fn canon_code(g: &LabelledGraph) -> CanonCode {
    canon(g).code
}

/// Whether two graphs are isomorphic.
pub fn isomorphic(a: &LabelledGraph, b: &LabelledGraph) -> bool {
    a.order() == b.order() && a.is_directed() == b.is_directed() && canon_code(a) == canon_code(b)
}

pub(crate) fn canon(g: &LabelledGraph) -> Canon {
    let n = g.order();
    let mut s = Searcher {
        out: [0; MAX_N],
        inn: g.in_rows(),
        n,
        directed: g.is_directed(),
        gens: Vec::new(),
        first: None,
        best: None,
        first_path: [0; MAX_N],
        cur_path: [0; MAX_N],
        cur_inv: [0; MAX_N + 1],
    };
    s.out[..n].copy_from_slice(g.rows());
    let mut root = Partition {
        lab: identity_perm(),
        starts: 1,
        n: n as u8,
    };
    s.cur_inv[0] = s.refine(&mut root, 1);
    s.dfs(0, &root);
    let best = s.best.expect("search reaches at least one leaf");
    Canon {
        code: best.code,
        lab: best.lab,
        gens: s.gens,
    }
}

#[derive(Clone, Copy)]
struct Partition {
    /// Vertices in cell order.
    lab: [u8; MAX_N],
    /// Bit `i` set when a cell starts at position `i`.
    starts: u16,
    n: u8,
}

impl Partition {
    #[inline]
    fn cell_end(&self, s: usize) -> usize {
        let rest = (self.starts as u32) >> (s + 1);
        if rest == 0 {
            self.n as usize
        } else {
            s + 1 + rest.trailing_zeros() as usize
        }
    }

    #[inline]
    fn is_discrete(&self) -> bool {
        self.starts == low_mask(self.n as usize)
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> (usize, usize) {
        let n = self.n as usize;
        let mut best = (0, 0);
        let mut best_len = usize::MAX;
        let mut c = 0;
        while c < n {
            let e = self.cell_end(c);
            if e - c > 1 && e - c < best_len {
                best = (c, e);
                best_len = e - c;
                if best_len == 2 {
                    break;
                }
            }
            c = e;
        }
        best
    }
}

#[derive(Clone)]
struct Leaf {
    lab: Perm,
    code: CanonCode,
    inv: Vec<u64>,
}

struct Searcher {
    out: [u16; MAX_N],
    inn: [u16; MAX_N],
    n: usize,
    directed: bool,
    gens: Vec<Perm>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    first_path: [u8; MAX_N],
    cur_path: [u8; MAX_N],
    cur_inv: [u64; MAX_N + 1],
}

#[inline]
pub(crate) fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Searcher {
    /// Refines `p` to the coarsest equitable partition finer than it, using
    /// the cells in `queue` (by start position) as initial splitters.
    /// Returns a labelling-invariant trace of the work done.
    fn refine(&self, p: &mut Partition, mut queue: u16) -> u64 {
        let n = self.n;
        let mut trace = 0x51_7cc1_b727_220a_u64;
        let mut keys = [0u16; MAX_N];
        while queue != 0 {
            let s = queue.trailing_zeros() as usize;
            queue &= queue - 1;
            let e = p.cell_end(s);
            let mut w = 0u16;
            for &v in &p.lab[s..e] {
                w |= 1 << v;
            }
            trace = mix(trace, s as u64);
            let mut c = 0;
            while c < n {
                let ce = p.cell_end(c);
                if ce - c > 1 {
                    let mut same = true;
                    for i in c..ce {
                        let v = p.lab[i] as usize;
                        let mut k = (self.out[v] & w).count_ones() as u16;
                        if self.directed {
                            k = k << 5 | (self.inn[v] & w).count_ones() as u16;
                        }
                        keys[i] = k;
                        same &= k == keys[c];
                    }
                    if !same {
                        // stable insertion sort of the cell by key
                        for i in c + 1..ce {
                            let (k, v) = (keys[i], p.lab[i]);
                            let mut j = i;
                            while j > c && keys[j - 1] > k {
                                keys[j] = keys[j - 1];
                                p.lab[j] = p.lab[j - 1];
                                j -= 1;
                            }
                            keys[j] = k;
                            p.lab[j] = v;
                        }
                        trace = mix(trace, (c as u64) << 32 | keys[c] as u64);
                        queue |= 1 << c;
                        for i in c + 1..ce {
                            if keys[i] != keys[i - 1] {
                                p.starts |= 1 << i;
                                queue |= 1 << i;
                                trace = mix(trace, (i as u64) << 32 | keys[i] as u64);
                            }
                        }
                    }
                }
                c = ce;
            }
        }
        mix(trace, p.starts.count_ones() as u64)
    }

    fn leaf_code(&self, lab: &Perm) -> CanonCode {
        let n = self.n;
        let mut pos = [0u8; MAX_N];
        for (i, &v) in lab[..n].iter().enumerate() {
            pos[v as usize] = i as u8;
        }
        let mut rows = [0u16; MAX_N];
        for i in 0..n {
            rows[i] = VertexSet(self.out[lab[i] as usize]).permute(&pos).0;
        }
        CanonCode {
            n: n as u8,
            directed: self.directed,
            rows,
        }
    }

    fn push_automorphism(&mut self, from: &Perm, to: &Perm) {
        let mut g = identity_perm();
        for i in 0..self.n {
            g[from[i] as usize] = to[i];
        }
        if g != identity_perm() && !self.gens.contains(&g) {
            self.gens.push(g);
        }
    }

    /// Returns `Some(d)` to unwind the search to depth `d`.
    fn leaf(&mut self, depth: usize, p: &Partition) -> Option<usize> {
        let code = self.leaf_code(&p.lab);
        let inv = &self.cur_inv[..=depth];
        let Some(first) = &self.first else {
            let leaf = Leaf {
                lab: p.lab,
                code,
                inv: inv.to_vec(),
            };
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            self.first_path = self.cur_path;
            return None;
        };
        if code == first.code {
            let from = first.lab;
            self.push_automorphism(&from, &p.lab);
            let d = (0..depth).find(|&i| self.cur_path[i] != self.first_path[i]).unwrap_or(depth);
            return Some(d);
        }
        let best = self.best.as_ref().unwrap();
        match inv.cmp(&best.inv[..]).then_with(|| code.rows.cmp(&best.code.rows)) {
            std::cmp::Ordering::Greater => {
                self.best = Some(Leaf {
                    lab: p.lab,
                    code,
                    inv: inv.to_vec(),
                });
            }
            std::cmp::Ordering::Equal => {
                let from = best.lab;
                self.push_automorphism(&from, &p.lab);
            }
            std::cmp::Ordering::Less => {}
        }
        None
    }

    fn dfs(&mut self, depth: usize, p: &Partition) -> Option<usize> {
        if p.is_discrete() {
            return self.leaf(depth, p);
        }
        let (cs, ce) = p.target_cell();
        let mut cell: [u8; MAX_N] = [0; MAX_N];
        let len = ce - cs;
        cell[..len].copy_from_slice(&p.lab[cs..ce]);
        cell[..len].sort_unstable();
        let mut explored = 0u16;
        for &v in &cell[..len] {
            if explored != 0 && !self.gens.is_empty() {
                let path = &self.cur_path[..depth];
                let fixing = self.gens.iter().filter(|g| path.iter().all(|&x| g[x as usize] == x));
                let reps = orbit_reps(fixing, self.n);
                if Bits(explored as u32).any(|u| reps[u] == reps[v as usize]) {
                    continue;
                }
            }
            explored |= 1 << v;
            let mut child = *p;
            let at = (cs..ce).find(|&i| child.lab[i] == v).unwrap();
            child.lab.swap(cs, at);
            child.starts |= 1 << (cs + 1);
            let inv = self.refine(&mut child, 1 << cs);
            self.cur_path[depth] = v;
            self.cur_inv[depth + 1] = inv;
            if let (Some(first), Some(best)) = (&self.first, &self.best) {
                let prefix = &self.cur_inv[..=depth + 1];
                let eq_first = first.inv.len() > depth + 1 && first.inv[..=depth + 1] == *prefix;
                let below_best = {
                    let k = prefix.len().min(best.inv.len());
                    match prefix[..k].cmp(&best.inv[..k]) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => false,
                    }
                };
                if below_best && !eq_first {
                    continue;
                }
            }
            if let Some(d) = self.dfs(depth + 1, &child) {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }
}

/// Exhaustive canonical labelling over all `n!` orderings, for `n <= 8`.
///
/// The canonical form maximises (vertex degree keys in position order,
/// adjacency bits ordered by the larger endpoint). Orderings whose degree
/// keys are not non-increasing are dominated and skipped, which does not
/// change the maximum. Returns the whole automorphism group as generators.
pub fn brute_canonical(g: &LabelledGraph) -> Result<CanonicalResult> {
    let n = g.order();
    if n > 8 {
        return Err(Error::Refused(format!("brute-force canonical form needs n <= 8, got {n}")));
    }
    let inn = g.in_rows();
    let keys: Vec<u16> = (0..n)
        .map(|v| (g.row(v).count_ones() as u16) << 5 | inn[v].count_ones() as u16)
        .collect();
    let total_bits = if g.is_directed() { n * (n - 1) } else { n * (n - 1) / 2 };

    struct State<'a> {
        g: &'a LabelledGraph,
        keys: &'a [u16],
        n: usize,
        total_bits: usize,
        order: Vec<usize>,
        best: Option<u64>,
        best_orders: Vec<Vec<usize>>,
    }

    fn go(st: &mut State, used: u16, code: u64, bits: usize) {
        let k = st.order.len();
        if k == st.n {
            match st.best {
                Some(b) if code < b => {}
                Some(b) if code == b => st.best_orders.push(st.order.clone()),
                _ => {
                    st.best = Some(code);
                    st.best_orders = vec![st.order.clone()];
                }
            }
            return;
        }
        let top = (0..st.n)
            .filter(|&v| used >> v & 1 == 0)
            .map(|v| st.keys[v])
            .max()
            .unwrap();
        for v in 0..st.n {
            if used >> v & 1 == 1 || st.keys[v] != top {
                continue;
            }
            let mut c = code;
            let mut b = bits;
            for &u in &st.order {
                c = c << 1 | st.g.has_arc(u, v) as u64;
                b += 1;
                if st.g.is_directed() {
                    c = c << 1 | st.g.has_arc(v, u) as u64;
                    b += 1;
                }
            }
            if let Some(best) = st.best {
                let best_prefix = if b == 0 { 0 } else { best >> (st.total_bits - b) };
                if c < best_prefix {
                    continue;
                }
            }
            st.order.push(v);
            go(st, used | 1 << v, c, b);
            st.order.pop();
        }
    }

    let mut st = State {
        g,
        keys: &keys,
        n,
        total_bits,
        order: Vec::with_capacity(n),
        best: None,
        best_orders: Vec::new(),
    };
    go(&mut st, 0, 0, 0);
    // order[i] = vertex at position i; relabelling sends vertex -> position
    let as_relabel = |order: &[usize]| {
        let mut r = identity_perm();
        for (i, &v) in order.iter().enumerate() {
            r[v] = i as u8;
        }
        r
    };
    let sigma0 = as_relabel(&st.best_orders[0]);
    let mut sigma0_inv = identity_perm();
    for v in 0..n {
        sigma0_inv[sigma0[v] as usize] = v as u8;
    }
    let mut gens = Vec::new();
    for order in &st.best_orders {
        let sigma = as_relabel(order);
        let mut tau = identity_perm();
        for v in 0..n {
            tau[v] = sigma0_inv[sigma[v] as usize];
        }
        if tau != identity_perm() {
            gens.push(tau);
        }
    }
    let code = CanonCode::of(&g.permute(&sigma0));
    Ok(CanonicalResult::build(g, code, &sigma0, &gens))
}

/// One representative per orbit of the automorphism group of `g` on the
/// extensions of `g` that stay inside `spec`'s generation class.
pub fn orbits_on_extensions(g: &LabelledGraph, spec: ClassSpec) -> Result<Vec<ExtensionPair>> {
    spec.require_directed(g.is_directed())?;
    let c = canon(g);
    let cands = spec.extension_candidates(g);
    Ok(extension_reps(g.order(), g.is_directed(), &c.gens, cands)
        .into_iter()
        .map(|w| ExtensionPair::unpack(w, g.order()))
        .collect())
}

#[inline]
fn permute_packed(w: u32, n: usize, directed: bool, perm: &Perm) -> u32 {
    let m = low_mask(n) as u32;
    let out = VertexSet((w & m) as u16).permute(perm).0 as u32;
    if directed {
        out | (VertexSet((w >> n & m) as u16).permute(perm).0 as u32) << n
    } else {
        out
    }
}

/// Orbit representatives (first in candidate order) of the packed
/// extensions in `cands`, which must be a union of orbits.
pub(crate) fn extension_reps(n: usize, directed: bool, gens: &[Perm], cands: Vec<u32>) -> Vec<u32> {
    if gens.is_empty() {
        return cands;
    }
    let space_bits = if directed { 2 * n } else { n };
    let mut reps = Vec::new();
    let mut stack = Vec::new();
    if space_bits <= 24 {
        let mut seen = vec![0u64; ((1usize << space_bits) + 63) / 64];
        for &c in &cands {
            if seen[c as usize / 64] >> (c % 64) & 1 == 1 {
                continue;
            }
            reps.push(c);
            seen[c as usize / 64] |= 1 << (c % 64);
            stack.push(c);
            while let Some(x) = stack.pop() {
                for g in gens {
                    let y = permute_packed(x, n, directed, g);
                    if seen[y as usize / 64] >> (y % 64) & 1 == 0 {
                        seen[y as usize / 64] |= 1 << (y % 64);
                        stack.push(y);
                    }
                }
            }
        }
    } else {
        let mut seen = HashSet::new();
        for &c in &cands {
            if !seen.insert(c) {
                continue;
            }
            reps.push(c);
            stack.push(c);
            while let Some(x) = stack.pop() {
                for g in gens {
                    let y = permute_packed(x, n, directed, g);
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
    }
    reps
}
