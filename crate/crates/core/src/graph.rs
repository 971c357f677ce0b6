//! Bit-packed labelled graphs and digraphs on at most [`MAX_N`] vertices.
//!
//! Vertices are numbered `0..n`. Row `i` of the adjacency matrix is a `u16`
//! whose bit `j` is set when the arc `i -> j` is present; undirected graphs
//! keep the matrix symmetric. The diagonal is always zero.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported vertex count; one adjacency row fits a `u16`.
pub const MAX_N: usize = 16;

/// A subset of the vertex set, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexSet(pub u16);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    /// The full vertex set `{0..n}`.
    pub fn full(n: usize) -> Self {
        VertexSet(low_mask(n))
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(vs: I) -> Self {
        VertexSet(vs.into_iter().fold(0u16, |m, v| m | (1 << v)))
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        Bits(self.0 as u32)
    }

    /// Image of the set under a vertex permutation (`perm[v]` is the image of `v`).
    #[inline]
    pub fn permute(self, perm: &[u8]) -> Self {
        let mut out = 0u16;
        let mut bits = self.0;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= 1 << perm[v];
        }
        VertexSet(out)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterator over the set bits of a word, lowest first.
#[derive(Clone, Copy)]
pub(crate) struct Bits(pub u32);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let v = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(v)
        }
    }
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u16 {
    if n >= 16 {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// Neighbourhoods of a new vertex appended by [`LabelledGraph::extend`].
///
/// Undirected graphs only look at `out_set`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ExtensionPair {
    pub out_set: VertexSet,
    pub in_set: VertexSet,
}

impl ExtensionPair {
    pub fn undirected(w: VertexSet) -> Self {
        ExtensionPair {
            out_set: w,
            in_set: VertexSet::EMPTY,
        }
    }

    pub fn directed(out_set: VertexSet, in_set: VertexSet) -> Self {
        ExtensionPair { out_set, in_set }
    }

    /// Unpacks a word of the form `out | in << n`.
    #[inline]
    pub(crate) fn unpack(word: u32, n: usize) -> Self {
        let m = low_mask(n) as u32;
        ExtensionPair {
            out_set: VertexSet((word & m) as u16),
            in_set: VertexSet((word >> n & m) as u16),
        }
    }
}

/// Degree data of a graph, sorted into non-increasing order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DegreeSequence {
    Undirected(Vec<usize>),
    /// `(out-degree, in-degree)` pairs.
    Directed(Vec<(usize, usize)>),
}

/// A labelled simple graph or digraph on the vertex set `0..n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelledGraph {
    n: u8,
    directed: bool,
    adj: [u16; MAX_N],
}

impl LabelledGraph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize, directed: bool) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::Capacity(n));
        }
        Ok(LabelledGraph {
            n: n as u8,
            directed,
            adj: [0; MAX_N],
        })
    }

    /// The single-vertex graph.
    pub fn k1(directed: bool) -> Self {
        LabelledGraph {
            n: 1,
            directed,
            adj: [0; MAX_N],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n, false)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n, true)?;
        for &(a, b) in arcs {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Builds a graph from raw adjacency rows, validating the invariants.
    pub fn from_rows(n: usize, directed: bool, rows: &[u16]) -> Result<Self> {
        let mut g = Self::empty(n, directed)?;
        if rows.len() != n {
            return Err(Error::Malformed(format!(
                "expected {n} adjacency rows, got {}",
                rows.len()
            )));
        }
        let m = low_mask(n);
        for (i, &r) in rows.iter().enumerate() {
            if r & !m != 0 || r >> i & 1 == 1 {
                return Err(Error::Malformed(format!("row {i} has bits outside the vertex set or on the diagonal")));
            }
            g.adj[i] = r;
        }
        if !directed {
            for i in 0..n {
                for j in 0..n {
                    if g.has_arc(i, j) != g.has_arc(j, i) {
                        return Err(Error::Malformed(format!("undirected matrix not symmetric at ({i},{j})")));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Builds a digraph from 0/1 matrix rows; bit `(i,j)` means `i -> j`.
    pub fn from_matrix(directed: bool, matrix: &[&[u8]]) -> Result<Self> {
        let n = matrix.len();
        let mut rows = Vec::with_capacity(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!("matrix row {i} has length {}", row.len())));
            }
            let mut r = 0u16;
            for (j, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    1 => r |= 1 << j,
                    _ => return Err(Error::Malformed(format!("matrix entry ({i},{j}) is {x}"))),
                }
            }
            rows.push(r);
        }
        Self::from_rows(n, directed, &rows)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Out-neighbourhood row of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> u16 {
        self.adj[v]
    }

    pub fn rows(&self) -> &[u16] {
        &self.adj[..self.n as usize]
    }

    #[inline]
    pub fn out_set(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    /// In-neighbourhood of `v` (equal to the out-neighbourhood when undirected).
    pub fn in_set(&self, v: usize) -> VertexSet {
        if !self.directed {
            return VertexSet(self.adj[v]);
        }
        let mut m = 0u16;
        for u in 0..self.order() {
            m |= (self.adj[u] >> v & 1) << u;
        }
        VertexSet(m)
    }

    /// All in-neighbourhood rows at once.
    pub(crate) fn in_rows(&self) -> [u16; MAX_N] {
        if !self.directed {
            return self.adj;
        }
        let mut inn = [0u16; MAX_N];
        for u in 0..self.order() {
            for v in Bits(self.adj[u] as u32) {
                inn[v] |= 1 << u;
            }
        }
        inn
    }

    #[inline]
    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    /// Adds edge `{a,b}` (undirected) or arc `a -> b` (directed).
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.order();
        if a >= n || b >= n {
            return Err(Error::VertexOutOfRange { v: a.max(b), n });
        }
        if a == b {
            return Err(Error::Malformed(format!("loop at vertex {a}")));
        }
        self.adj[a] |= 1 << b;
        if !self.directed {
            self.adj[b] |= 1 << a;
        }
        Ok(())
    }

    /// Sets or clears the single bit `i -> j`, with no symmetry applied.
    #[inline]
    pub(crate) fn set_arc(&mut self, i: usize, j: usize, on: bool) {
        if on {
            self.adj[i] |= 1 << j;
        } else {
            self.adj[i] &= !(1 << j);
        }
    }

    /// The card obtained by deleting `v`; later vertices shift down by one.
    pub fn delete_vertex(&self, v: usize) -> Result<Self> {
        let n = self.order();
        if n == 1 {
            return Err(Error::NoCardOfK1);
        }
        if v >= n {
            return Err(Error::VertexOutOfRange { v, n });
        }
        let low = (1u16 << v) - 1;
        let mut out = LabelledGraph {
            n: self.n - 1,
            directed: self.directed,
            adj: [0; MAX_N],
        };
        let mut k = 0;
        for i in (0..n).filter(|&i| i != v) {
            let r = self.adj[i];
            out.adj[k] = (r & low) | ((r >> 1) & !low);
            k += 1;
        }
        Ok(out)
    }

    /// Appends vertex `n` joined according to `ext`.
    pub fn extend(&self, ext: ExtensionPair) -> Result<Self> {
        let n = self.order();
        if n + 1 > MAX_N {
            return Err(Error::Capacity(n + 1));
        }
        let m = low_mask(n);
        if ext.out_set.0 & !m != 0 || ext.in_set.0 & !m != 0 {
            return Err(Error::Malformed("extension sets exceed the vertex set".into()));
        }
        let mut out = *self;
        out.n += 1;
        let (to_new, from_new) = if self.directed {
            (ext.in_set.0, ext.out_set.0)
        } else {
            (ext.out_set.0, ext.out_set.0)
        };
        out.adj[n] = from_new;
        for u in Bits(to_new as u32) {
            out.adj[u] |= 1 << n;
        }
        Ok(out)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[u8]) -> Self {
        let mut out = LabelledGraph {
            n: self.n,
            directed: self.directed,
            adj: [0; MAX_N],
        };
        for i in 0..self.order() {
            out.adj[perm[i] as usize] = VertexSet(self.adj[i]).permute(perm).0;
        }
        out
    }

    /// Reverses every arc.
    pub fn converse(&self) -> Result<Self> {
        if !self.directed {
            return Err(Error::NotDirected);
        }
        let inn = self.in_rows();
        let mut out = *self;
        out.adj[..self.order()].copy_from_slice(&inn[..self.order()]);
        Ok(out)
    }

    /// Edge count, or arc count for digraphs.
    pub fn edge_count(&self) -> usize {
        let total: u32 = self.rows().iter().map(|r| r.count_ones()).sum();
        if self.directed {
            total as usize
        } else {
            total as usize / 2
        }
    }

    /// Triangles (undirected) or cyclic triangles (directed).
    pub fn triangle_count(&self) -> usize {
        let n = self.order();
        let mut t = 0usize;
        if self.directed {
            // each cyclic triangle is seen once from its smallest vertex
            for a in 0..n {
                let above = !low_mask(a + 1);
                for b in Bits((self.adj[a] & above) as u32) {
                    let closing = self.adj[b] & above & !(1 << b);
                    for c in Bits(closing as u32) {
                        t += (self.adj[c] >> a & 1) as usize;
                    }
                }
            }
        } else {
            for a in 0..n {
                let above = !low_mask(a + 1);
                for b in Bits((self.adj[a] & above) as u32) {
                    t += (self.adj[a] & self.adj[b] & !low_mask(b + 1)).count_ones() as usize;
                }
            }
        }
        t
    }

    /// Triangles (or cyclic triangles) through `v`.
    #[inline]
    pub(crate) fn triangles_at(&self, v: usize, inn: &[u16; MAX_N]) -> u32 {
        let mut t = 0;
        if self.directed {
            // v -> u -> w -> v
            for u in Bits(self.adj[v] as u32) {
                t += (self.adj[u] & inn[v]).count_ones();
            }
        } else {
            for u in Bits(self.adj[v] as u32) {
                t += (self.adj[u] & self.adj[v]).count_ones();
            }
            t /= 2;
        }
        t
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.adj[..self.order()].iter().filter(|&&r| r >> v & 1 == 1).count()
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        if self.directed {
            let inn = self.in_rows();
            let mut d: Vec<(usize, usize)> = (0..self.order())
                .map(|v| (self.adj[v].count_ones() as usize, inn[v].count_ones() as usize))
                .collect();
            d.sort_unstable_by(|a, b| b.cmp(a));
            DegreeSequence::Directed(d)
        } else {
            let mut d: Vec<usize> = (0..self.order()).map(|v| self.out_degree(v)).collect();
            d.sort_unstable_by(|a, b| b.cmp(a));
            DegreeSequence::Undirected(d)
        }
    }

    pub fn min_degree(&self) -> usize {
        (0..self.order()).map(|v| self.out_degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order()).map(|v| self.out_degree(v)).max().unwrap_or(0)
    }

    /// Number of unordered pairs joined in both directions.
    pub fn two_cycle_count(&self) -> usize {
        if !self.directed {
            return 0;
        }
        let mut c = 0;
        for a in 0..self.order() {
            for b in Bits((self.adj[a] & !low_mask(a + 1)) as u32) {
                c += (self.adj[b] >> a & 1) as usize;
            }
        }
        c
    }

    /// Every pair of distinct vertices joined by exactly one arc.
    pub fn is_tournament(&self) -> bool {
        if !self.directed {
            return false;
        }
        let n = self.order();
        let inn = self.in_rows();
        (0..n).all(|v| self.adj[v] & inn[v] == 0 && (self.adj[v] | inn[v]) == low_mask(n) & !(1 << v))
    }

    /// No 2-cycles (tournaments included).
    pub fn is_two_cycle_free(&self) -> bool {
        self.directed && self.two_cycle_count() == 0
    }

    /// Length of the shortest cycle, `None` for forests. Undirected only.
    pub fn girth(&self) -> Option<usize> {
        debug_assert!(!self.directed);
        let n = self.order();
        let mut best: Option<usize> = None;
        for s in 0..n {
            // BFS from s; a non-tree edge between levels gives a cycle through s
            let mut dist = [u8::MAX; MAX_N];
            let mut parent = [u8::MAX; MAX_N];
            let mut queue = [0u8; MAX_N];
            let (mut head, mut tail) = (0, 1);
            dist[s] = 0;
            queue[0] = s as u8;
            while head < tail {
                let u = queue[head] as usize;
                head += 1;
                for w in Bits(self.adj[u] as u32) {
                    if dist[w] == u8::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u as u8;
                        queue[tail] = w as u8;
                        tail += 1;
                    } else if parent[u] as usize != w {
                        let len = dist[u] as usize + dist[w] as usize + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Undirected only.
    pub fn is_bipartite(&self) -> bool {
        self.two_colouring().is_some()
    }

    /// Side masks `(a, b)` of a proper 2-colouring, if one exists.
    pub(crate) fn two_colouring(&self) -> Option<(u16, u16)> {
        let n = self.order();
        let (mut side_a, mut side_b) = (0u16, 0u16);
        let mut unseen = low_mask(n);
        while unseen != 0 {
            let s = unseen.trailing_zeros() as usize;
            let mut frontier = 1u16 << s;
            let mut on_a = true;
            while frontier != 0 {
                if on_a {
                    side_a |= frontier;
                } else {
                    side_b |= frontier;
                }
                unseen &= !frontier;
                let mut next = 0u16;
                for v in Bits(frontier as u32) {
                    next |= self.adj[v];
                }
                let same = if on_a { side_a } else { side_b };
                if next & same != 0 {
                    return None;
                }
                frontier = next & unseen;
                on_a = !on_a;
            }
        }
        Some((side_a, side_b))
    }

    /// Whether some (not necessarily induced) cycle of length exactly `k` exists.
    /// Undirected only; intended for small orders.
    pub fn has_cycle_of_length(&self, k: usize) -> bool {
        let n = self.order();
        if k < 3 || k > n {
            return false;
        }
        // cycles rooted at their smallest vertex
        fn walk(g: &LabelledGraph, start: usize, v: usize, used: u16, left: usize) -> bool {
            if left == 0 {
                return g.has_arc(v, start);
            }
            let allowed = g.adj[v] & !used & !low_mask(start + 1);
            Bits(allowed as u32).any(|w| walk(g, start, w, used | 1 << w, left - 1))
        }
        (0..n).any(|s| walk(self, s, s, 1 << s, k - 1))
    }
}

impl fmt::Debug for LabelledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelledGraph(n={}, {}, [", self.n, if self.directed { "directed" } else { "undirected" })?;
        for (i, r) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            for j in 0..self.order() {
                write!(f, "{}", r >> j & 1)?;
            }
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> LabelledGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        LabelledGraph::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> LabelledGraph {
        let mut edges = vec![];
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        LabelledGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn delete_cut_vertex_of_path() {
        let p3 = LabelledGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let card = p3.delete_vertex(1).unwrap();
        assert_eq!(card, LabelledGraph::empty(2, false).unwrap());
    }

    #[test]
    fn delete_from_k4_gives_k3() {
        for v in 0..4 {
            assert_eq!(complete(4).delete_vertex(v).unwrap(), complete(3));
        }
    }

    #[test]
    fn delete_from_directed_triangle() {
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let card = c3.delete_vertex(2).unwrap();
        assert_eq!(card, LabelledGraph::from_arcs(2, &[(0, 1)]).unwrap());
    }

    #[test]
    fn k1_has_no_card() {
        assert!(matches!(LabelledGraph::k1(false).delete_vertex(0), Err(Error::NoCardOfK1)));
    }

    #[test]
    fn extend_examples() {
        let k1 = LabelledGraph::k1(false);
        assert_eq!(k1.extend(ExtensionPair::default()).unwrap(), LabelledGraph::empty(2, false).unwrap());
        let k2 = k1.extend(ExtensionPair::undirected(VertexSet(1))).unwrap();
        assert_eq!(k2, complete(2));
        assert_eq!(k2.extend(ExtensionPair::undirected(VertexSet(3))).unwrap(), complete(3));
    }

    #[test]
    fn extend_directed_uses_both_sets() {
        let k1 = LabelledGraph::k1(true);
        let g = k1
            .extend(ExtensionPair::directed(VertexSet(1), VertexSet(0)))
            .unwrap();
        assert!(g.has_arc(1, 0) && !g.has_arc(0, 1));
    }

    #[test]
    fn extend_past_capacity_fails() {
        let g = LabelledGraph::empty(16, false).unwrap();
        assert!(matches!(g.extend(ExtensionPair::default()), Err(Error::Capacity(17))));
    }

    #[test]
    fn counting_examples() {
        assert_eq!((complete(4).edge_count(), complete(4).triangle_count()), (6, 4));
        assert_eq!((cycle(5).edge_count(), cycle(5).triangle_count()), (5, 0));
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!((c3.edge_count(), c3.triangle_count()), (3, 1));
        let tt = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tt.triangle_count(), 0);
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(cycle(4).degree_sequence(), DegreeSequence::Undirected(vec![2, 2, 2, 2]));
        let star = LabelledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.degree_sequence(), DegreeSequence::Undirected(vec![3, 1, 1, 1]));
        let tt = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tt.degree_sequence(), DegreeSequence::Directed(vec![(2, 0), (1, 1), (0, 2)]));
    }

    #[test]
    fn converse_examples() {
        let arc = LabelledGraph::from_arcs(2, &[(0, 1)]).unwrap();
        assert_eq!(arc.converse().unwrap(), LabelledGraph::from_arcs(2, &[(1, 0)]).unwrap());
        assert!(matches!(cycle(3).converse(), Err(Error::NotDirected)));
    }

    #[test]
    fn girth_and_bipartite() {
        assert_eq!(cycle(5).girth(), Some(5));
        assert_eq!(cycle(4).girth(), Some(4));
        assert_eq!(complete(4).girth(), Some(3));
        let path = LabelledGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.girth(), None);
        assert!(cycle(6).is_bipartite());
        assert!(!cycle(5).is_bipartite());
        assert!(complete(4).has_cycle_of_length(4));
        assert!(!cycle(5).has_cycle_of_length(4));
    }

    #[test]
    fn tournament_and_two_cycles() {
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(c3.is_tournament());
        let two = LabelledGraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(two.two_cycle_count(), 1);
        assert!(!two.is_tournament());
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        assert!(LabelledGraph::from_rows(2, false, &[0b10, 0]).is_err());
        assert!(LabelledGraph::from_rows(2, true, &[0b01, 0]).is_err());
    }
}
