//! Canonical construction path generation.
//!
//! Starting from `K1`, each graph is extended by one representative of every
//! orbit of its automorphism group on the admissible extensions. A child is
//! kept only when its new vertex lies in `m(child)`:
//!
//! * below the target order, `m` is the orbit of the vertex that the
//!   canonical labelling places last ([`m_mid`]), so every isomorphism class
//!   is reached exactly once;
//! * at the target order, [`TopRule::Exact`] keeps the same rule while
//!   [`TopRule::Recon`] uses [`m_top`], the union of all orbits whose cards
//!   are maximal under [`PreorderKey`]. In that mode two non-isomorphic
//!   graphs with equal reduced decks are emitted as children of the same
//!   set of parents, so per-parent comparison finds every such pair.

use std::collections::HashSet;

use crate::canon::{canon, extension_reps, orbit_reps, Canon, CanonCode};
use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::graph::{ExtensionPair, LabelledGraph, VertexSet, MAX_N};

/// Isomorphism-invariant preorder on cards: edges, then triangles
/// (cyclic triangles for digraphs), compared lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PreorderKey {
    pub edge_count: usize,
    pub triangle_count: usize,
}

impl PreorderKey {
    pub fn of(g: &LabelledGraph) -> Self {
        PreorderKey {
            edge_count: g.edge_count(),
            triangle_count: g.triangle_count(),
        }
    }
}

/// Preorder keys of all `n` cards, computed without building the cards.
pub fn card_keys(g: &LabelledGraph) -> Vec<PreorderKey> {
    let mut out = Vec::with_capacity(g.order());
    let mut keys = [(0u32, 0u32); MAX_N];
    raw_card_keys(g, &mut keys);
    let whole = PreorderKey::of(g);
    for &(incident, tri) in &keys[..g.order()] {
        out.push(PreorderKey {
            edge_count: whole.edge_count - incident as usize,
            triangle_count: whole.triangle_count - tri as usize,
        });
    }
    out
}

/// Per vertex: (edges or arcs incident to it, triangles through it).
/// Card `v` is maximal exactly when this pair is minimal.
#[inline]
fn raw_card_keys(g: &LabelledGraph, keys: &mut [(u32, u32); MAX_N]) {
    let inn = g.in_rows();
    for (v, key) in keys.iter_mut().enumerate().take(g.order()) {
        let incident = if g.is_directed() {
            g.row(v).count_ones() + inn[v].count_ones()
        } else {
            g.row(v).count_ones()
        };
        *key = (incident, g.triangles_at(v, &inn));
    }
}

/// Whether the card at `v` is maximal among all cards of `g`.
#[inline]
fn has_maximal_card(g: &LabelledGraph, v: usize) -> bool {
    let mut keys = [(0u32, 0u32); MAX_N];
    raw_card_keys(g, &mut keys);
    keys[..g.order()].iter().all(|k| keys[v] <= *k)
}

/// Orbit of the vertex that the canonical labelling of `h` places last.
pub fn m_mid(h: &LabelledGraph) -> VertexSet {
    let c = canon(h);
    let n = h.order();
    c.orbit_of(c.lab[n - 1] as usize, n)
}

/// Union of the orbits whose cards are maximal under [`PreorderKey`].
///
/// Card keys are invariant under automorphisms, so this is simply the set
/// of vertices whose card key is maximal.
pub fn m_top(h: &LabelledGraph) -> VertexSet {
    let keys = card_keys(h);
    let top = keys.iter().max().copied();
    VertexSet::from_vertices((0..h.order()).filter(|&v| Some(keys[v]) == top))
}

/// The first refinement step sorts vertices by (out, in) degree and the
/// canonical labelling never moves a vertex out of its cell, so the last
/// canonical vertex always has the largest degree key.
#[inline]
fn has_top_degree(h: &LabelledGraph, v: usize, inn: &[u16; MAX_N]) -> bool {
    let key = |u: usize| (h.row(u).count_ones(), inn[u].count_ones());
    let kv = key(v);
    (0..h.order()).all(|u| key(u) <= kv)
}

/// `Some(canon)` when the new (last) vertex of `h` lies in [`m_mid`]`(h)`.
fn accept_mid(h: &LabelledGraph) -> Option<Canon> {
    let n = h.order();
    let v = n - 1;
    let inn = h.in_rows();
    if !has_top_degree(h, v, &inn) {
        return None;
    }
    let c = canon(h);
    let last = c.lab[n - 1] as usize;
    let keep = if c.gens.is_empty() {
        last == v
    } else {
        let reps = orbit_reps(c.gens.iter(), n);
        reps[last] == reps[v]
    };
    keep.then_some(c)
}

/// Which m-function applies at the target order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TopRule {
    /// One output per isomorphism class.
    Exact,
    /// Over-generate so that equal-deck pairs share parents.
    Recon,
}

/// Partition of the search tree: subtree `i` rooted at level `depth` is
/// processed iff `i % modulus == res`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Split {
    pub res: usize,
    pub modulus: usize,
    pub depth: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GenConfig {
    pub target_n: usize,
    pub class: ClassSpec,
    pub top_rule: TopRule,
    pub split: Option<Split>,
}

impl GenConfig {
    pub fn new(target_n: usize, class: ClassSpec, top_rule: TopRule) -> Self {
        GenConfig {
            target_n,
            class,
            top_rule,
            split: None,
        }
    }

    pub fn with_split(mut self, res: usize, modulus: usize, depth: usize) -> Self {
        self.split = Some(Split { res, modulus, depth });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_n == 0 || self.target_n > MAX_N {
            return Err(Error::Capacity(self.target_n));
        }
        if let Some(s) = self.split {
            if s.modulus == 0 || s.res >= s.modulus {
                return Err(Error::InvalidConfig(format!("need 0 <= res < mod, got res={} mod={}", s.res, s.modulus)));
            }
            if s.depth == 0 || s.depth >= self.target_n {
                return Err(Error::InvalidConfig(format!(
                    "split depth must satisfy 1 <= depth < n, got depth={} n={}",
                    s.depth, self.target_n
                )));
            }
        }
        Ok(())
    }

    /// The conjectures are stated for n >= 3 (full deck) and n >= 4 (reduced).
    pub fn below_conjecture_range(&self) -> bool {
        self.target_n < 4
    }
}

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
pub struct GenStats {
    /// Children handed to the visitor.
    pub outputs: u64,
    /// Parents at level `n - 1` that were expanded.
    pub batches: u64,
    pub max_batch: usize,
}

/// Runs generation and hands each parent's accepted top-level children to
/// `sink` as one batch. Batches are never empty.
pub fn generate_batches<F>(cfg: &GenConfig, mut sink: F) -> Result<GenStats>
where
    F: FnMut(&LabelledGraph, &[LabelledGraph]) -> Result<()>,
{
    cfg.validate()?;
    let directed = cfg.class.is_directed();
    let root = LabelledGraph::k1(directed);
    let mut stats = GenStats::default();
    if cfg.target_n == 1 {
        // K1 has no parent; it is reported as its own.
        if cfg.split.is_none() && cfg.class.in_class(&root) {
            stats.outputs = 1;
            stats.batches = 1;
            stats.max_batch = 1;
            sink(&root, &[root])?;
        }
        return Ok(stats);
    }
    if let Some(s) = cfg.split {
        if s.depth == 1 && s.res != 0 {
            return Ok(stats);
        }
    }
    let mut gen = Generator {
        cfg,
        gen_class: cfg.class.generation_class(),
        sink: &mut sink,
        stats,
        counter: 0,
    };
    let root_canon = canon(&root);
    gen.node(&root, &root_canon)?;
    Ok(gen.stats)
}

struct Generator<'a, F> {
    cfg: &'a GenConfig,
    gen_class: ClassSpec,
    sink: &'a mut F,
    stats: GenStats,
    counter: u64,
}

impl<F> Generator<'_, F>
where
    F: FnMut(&LabelledGraph, &[LabelledGraph]) -> Result<()>,
{
    fn node(&mut self, g: &LabelledGraph, gc: &Canon) -> Result<()> {
        let k = g.order();
        let cands = self.gen_class.extension_candidates(g);
        let reps = extension_reps(k, g.is_directed(), &gc.gens, cands);
        if k + 1 == self.cfg.target_n {
            let mut children = Vec::new();
            for w in reps {
                let h = g.extend(ExtensionPair::unpack(w, k))?;
                if !self.cfg.class.is_hereditary() && !self.cfg.class.in_class(&h) {
                    continue;
                }
                let keep = match self.cfg.top_rule {
                    TopRule::Exact => accept_mid(&h).is_some(),
                    TopRule::Recon => has_maximal_card(&h, k),
                };
                if keep {
                    children.push(h);
                }
            }
            self.stats.batches += 1;
            if !children.is_empty() {
                self.stats.outputs += children.len() as u64;
                self.stats.max_batch = self.stats.max_batch.max(children.len());
                (self.sink)(g, &children)?;
            }
            return Ok(());
        }
        for w in reps {
            let h = g.extend(ExtensionPair::unpack(w, k))?;
            if !self.cfg.class.feasible(&h, self.cfg.target_n) {
                continue;
            }
            let Some(hc) = accept_mid(&h) else { continue };
            if let Some(s) = self.cfg.split {
                if s.depth == k + 1 {
                    self.counter += 1;
                    if (self.counter - 1) % s.modulus as u64 != s.res as u64 {
                        continue;
                    }
                }
            }
            self.node(&h, &hc)?;
        }
        Ok(())
    }
}

/// Calls `visitor(parent, child)` for every accepted child at the target order.
pub fn generate<F>(cfg: &GenConfig, mut visitor: F) -> Result<GenStats>
where
    F: FnMut(&LabelledGraph, &LabelledGraph),
{
    generate_batches(cfg, |p, cs| {
        cs.iter().for_each(|c| visitor(p, c));
        Ok(())
    })
}

/// Exact-mode generation collected into a vector.
pub fn generate_all(n: usize, class: ClassSpec) -> Result<Vec<LabelledGraph>> {
    let mut out = Vec::new();
    generate(&GenConfig::new(n, class, TopRule::Exact), |_, c| out.push(*c))?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overhead {
    pub outputs: u64,
    pub classes: u64,
    pub ratio: f64,
}

/// Visitor calls versus distinct isomorphism classes in recon mode.
pub fn count_overhead(cfg: &GenConfig) -> Result<Overhead> {
    if cfg.top_rule != TopRule::Recon {
        return Err(Error::InvalidConfig("overhead is measured in recon mode".into()));
    }
    let mut classes: HashSet<CanonCode> = HashSet::new();
    let stats = generate(cfg, |_, c| {
        classes.insert(canon(c).code);
    })?;
    let classes = classes.len() as u64;
    Ok(Overhead {
        outputs: stats.outputs,
        classes,
        ratio: if classes == 0 { 0.0 } else { stats.outputs as f64 / classes as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canon_code;

    fn complete(n: usize) -> LabelledGraph {
        let mut e = vec![];
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        LabelledGraph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn m_mid_of_vertex_transitive_graph() {
        assert_eq!(m_mid(&complete(3)), VertexSet(0b111));
    }

    #[test]
    fn m_mid_is_consistent_under_relabelling() {
        let star = LabelledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let relabelled = LabelledGraph::from_edges(4, &[(2, 0), (2, 1), (2, 3)]).unwrap();
        let a = m_mid(&star);
        let b = m_mid(&relabelled);
        // same orbit type: either both the centre or both the leaves
        assert_eq!(a.len(), b.len());
        assert_eq!(a.contains(0), b.contains(2));
    }

    #[test]
    fn m_top_examples() {
        assert_eq!(m_top(&complete(4)), VertexSet(0b1111));
        let star = LabelledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(m_top(&star), VertexSet(0b1110));
        let paw = LabelledGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert_eq!(m_top(&paw), VertexSet(0b1000));
    }

    #[test]
    fn four_vertex_graphs() {
        let gs = generate_all(4, ClassSpec::All).unwrap();
        assert_eq!(gs.len(), 11);
        let codes: HashSet<_> = gs.iter().map(canon_code).collect();
        assert_eq!(codes.len(), 11);
    }

    #[test]
    fn recon_mode_covers_every_class() {
        let mut codes = HashSet::new();
        let stats = generate(&GenConfig::new(4, ClassSpec::All, TopRule::Recon), |_, c| {
            codes.insert(canon_code(c));
        })
        .unwrap();
        assert_eq!(codes.len(), 11);
        assert!(stats.outputs >= 11);
    }

    #[test]
    fn overhead_requires_recon() {
        assert!(count_overhead(&GenConfig::new(4, ClassSpec::All, TopRule::Exact)).is_err());
        let o = count_overhead(&GenConfig::new(4, ClassSpec::All, TopRule::Recon)).unwrap();
        assert!(o.ratio >= 1.0);
        assert_eq!(o.classes, 11);
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::new(17, ClassSpec::All, TopRule::Exact).validate().is_err());
        assert!(GenConfig::new(5, ClassSpec::All, TopRule::Exact)
            .with_split(2, 2, 3)
            .validate()
            .is_err());
        assert!(GenConfig::new(5, ClassSpec::All, TopRule::Exact)
            .with_split(0, 2, 5)
            .validate()
            .is_err());
        assert!(GenConfig::new(5, ClassSpec::All, TopRule::Exact)
            .with_split(1, 2, 4)
            .validate()
            .is_ok());
    }

    #[test]
    fn single_vertex_target() {
        let gs = generate_all(1, ClassSpec::Tournament).unwrap();
        assert_eq!(gs, vec![LabelledGraph::k1(true)]);
    }
}
