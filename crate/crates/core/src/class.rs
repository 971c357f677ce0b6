//! Hereditary classes of graphs and digraphs.
//!
//! Two kinds are not hereditary: [`ClassSpec::DegreeRange`] and
//! [`ClassSpec::ScoreRange`]. They are generated inside their hereditary
//! hull ([`ClassSpec::generation_class`]), pruned with a feasibility bound
//! on partial degrees, and applied as a filter at the target order only.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{low_mask, Bits, ExtensionPair, LabelledGraph, VertexSet};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ClassSpec {
    /// All simple graphs.
    All,
    TriangleFree,
    /// Girth at least 5: no triangles and no 4-cycles.
    Girth5,
    /// No 4-cycle as a subgraph.
    NoFourCycle,
    Bipartite,
    /// Bipartite with girth at least 6.
    BipartiteGirth6,
    MaxDegree(u8),
    /// All degrees in `[min, max]`.
    DegreeRange { min: u8, max: u8 },
    /// All simple digraphs.
    Digraph,
    /// Digraphs without 2-cycles, tournaments included.
    Oriented,
    Tournament,
    /// Tournaments with every score in `[min, max]`.
    ScoreRange { min: u8, max: u8 },
}

impl ClassSpec {
    pub fn is_directed(self) -> bool {
        matches!(
            self,
            ClassSpec::Digraph | ClassSpec::Oriented | ClassSpec::Tournament | ClassSpec::ScoreRange { .. }
        )
    }

    pub fn is_hereditary(self) -> bool {
        !matches!(self, ClassSpec::DegreeRange { .. } | ClassSpec::ScoreRange { .. })
    }

    /// The hereditary class that generation runs in.
    pub fn generation_class(self) -> ClassSpec {
        match self {
            ClassSpec::DegreeRange { max, .. } => ClassSpec::MaxDegree(max),
            ClassSpec::ScoreRange { .. } => ClassSpec::Tournament,
            c => c,
        }
    }

    /// Full membership test.
    pub fn in_class(self, g: &LabelledGraph) -> bool {
        if g.is_directed() != self.is_directed() {
            return false;
        }
        match self {
            ClassSpec::All | ClassSpec::Digraph => true,
            ClassSpec::TriangleFree => g.triangle_count() == 0,
            ClassSpec::Girth5 => g.girth().is_none_or(|k| k >= 5),
            ClassSpec::NoFourCycle => !has_four_cycle(g),
            ClassSpec::Bipartite => g.is_bipartite(),
            ClassSpec::BipartiteGirth6 => g.is_bipartite() && !has_four_cycle(g),
            ClassSpec::MaxDegree(k) => g.max_degree() <= k as usize,
            ClassSpec::DegreeRange { min, max } => {
                g.min_degree() >= min as usize && g.max_degree() <= max as usize
            }
            ClassSpec::Oriented => g.is_two_cycle_free(),
            ClassSpec::Tournament => g.is_tournament(),
            ClassSpec::ScoreRange { min, max } => {
                g.is_tournament() && (0..g.order()).all(|v| (min as usize..=max as usize).contains(&g.out_degree(v)))
            }
        }
    }

    /// Whether `g.extend(ext)` stays in the generation class, given that `g` is in it.
    pub fn admits(self, g: &LabelledGraph, ext: ExtensionPair) -> bool {
        let n = g.order();
        let w = ext.out_set.0;
        let at_most_one_hit = || (0..n).all(|y| (g.row(y) & w).count_ones() <= 1);
        let independent = || Bits(w as u32).all(|v| g.row(v) & w == 0);
        match self.generation_class() {
            ClassSpec::All | ClassSpec::Digraph => true,
            ClassSpec::TriangleFree => independent(),
            ClassSpec::Girth5 => independent() && at_most_one_hit(),
            ClassSpec::NoFourCycle => at_most_one_hit(),
            ClassSpec::Bipartite => bipartite_extension(g, w),
            ClassSpec::BipartiteGirth6 => at_most_one_hit() && bipartite_extension(g, w),
            ClassSpec::MaxDegree(k) => {
                w.count_ones() <= k as u32 && Bits(w as u32).all(|v| g.out_degree(v) < k as usize)
            }
            ClassSpec::Oriented => ext.out_set.0 & ext.in_set.0 == 0,
            ClassSpec::Tournament => {
                ext.out_set.0 & ext.in_set.0 == 0 && (ext.out_set.0 | ext.in_set.0) == low_mask(n)
            }
            ClassSpec::DegreeRange { .. } | ClassSpec::ScoreRange { .. } => unreachable!(),
        }
    }

    /// Necessary condition for `g` (of order `k`) to be an induced subgraph of
    /// some member of this class on `target` vertices. Always true for
    /// hereditary classes.
    pub fn feasible(self, g: &LabelledGraph, target: usize) -> bool {
        let remaining = target.saturating_sub(g.order());
        match self {
            ClassSpec::DegreeRange { min, .. } | ClassSpec::ScoreRange { min, .. } => {
                (0..g.order()).all(|v| g.out_degree(v) + remaining >= min as usize)
                    && match self {
                        ClassSpec::ScoreRange { max, .. } => (0..g.order()).all(|v| g.out_degree(v) <= max as usize),
                        _ => true,
                    }
            }
            _ => true,
        }
    }

    /// All structurally valid extensions of `g` that stay in the generation
    /// class, packed as `out | in << n`.
    pub(crate) fn extension_candidates(self, g: &LabelledGraph) -> Vec<u32> {
        let n = g.order();
        let full = low_mask(n) as u32;
        let mut out = Vec::new();
        match self.generation_class() {
            ClassSpec::Tournament => {
                for s in 0..=full {
                    out.push(s | (full & !s) << n);
                }
            }
            ClassSpec::Oriented => {
                for s in 0..=full {
                    // subsets of the complement of s
                    let comp = full & !s;
                    let mut t = comp;
                    loop {
                        out.push(s | t << n);
                        if t == 0 {
                            break;
                        }
                        t = (t - 1) & comp;
                    }
                }
                out.sort_unstable();
            }
            ClassSpec::Digraph => {
                for s in 0..=full {
                    for t in 0..=full {
                        out.push(s | t << n);
                    }
                }
                out.sort_unstable();
            }
            c => {
                for s in 0..=full {
                    if c.admits(g, ExtensionPair::undirected(VertexSet(s as u16))) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    /// Check that this class can drive generation of the requested kind.
    pub fn require_directed(self, directed: bool) -> Result<()> {
        if self.is_directed() == directed {
            Ok(())
        } else {
            Err(Error::ClassMismatch {
                class: self.to_string(),
                kind: if directed { "directed" } else { "undirected" },
            })
        }
    }
}

fn has_four_cycle(g: &LabelledGraph) -> bool {
    let n = g.order();
    (0..n).any(|a| (a + 1..n).any(|b| (g.row(a) & g.row(b)).count_ones() >= 2))
}

/// Whether some proper 2-colouring of `g` puts all of `w` on one side.
fn bipartite_extension(g: &LabelledGraph, w: u16) -> bool {
    let Some((side_a, _)) = g.two_colouring() else {
        return false;
    };
    // each component may be flipped independently
    let mut unseen = low_mask(g.order());
    while unseen != 0 {
        let s = unseen.trailing_zeros() as usize;
        let mut comp = 1u16 << s;
        loop {
            let mut grown = comp;
            for v in Bits(comp as u32) {
                grown |= g.row(v);
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        unseen &= !comp;
        let hit = w & comp;
        if hit & side_a != 0 && hit & !side_a != 0 {
            return false;
        }
    }
    true
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSpec::All => write!(f, "graphs"),
            ClassSpec::TriangleFree => write!(f, "triangle-free"),
            ClassSpec::Girth5 => write!(f, "girth5"),
            ClassSpec::NoFourCycle => write!(f, "no4cycle"),
            ClassSpec::Bipartite => write!(f, "bipartite"),
            ClassSpec::BipartiteGirth6 => write!(f, "bipartite-girth6"),
            ClassSpec::MaxDegree(k) => write!(f, "maxdeg={k}"),
            ClassSpec::DegreeRange { min, max } => write!(f, "degrees={min},{max}"),
            ClassSpec::Digraph => write!(f, "digraphs"),
            ClassSpec::Oriented => write!(f, "oriented"),
            ClassSpec::Tournament => write!(f, "tournament"),
            ClassSpec::ScoreRange { min, max } => write!(f, "scores={min},{max}"),
        }
    }
}

impl FromStr for ClassSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown class `{s}`"));
        let (name, params) = match s.split_once('=') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let nums = |p: Option<&str>| -> Result<Vec<u8>> {
            p.ok_or_else(bad)?
                .split(',')
                .map(|x| x.trim().parse::<u8>().map_err(|_| bad()))
                .collect()
        };
        let range = |p| -> Result<(u8, u8)> {
            match nums(p)?.as_slice() {
                &[a, b] if a <= b => Ok((a, b)),
                _ => Err(bad()),
            }
        };
        let spec = match name {
            "all" | "graphs" => ClassSpec::All,
            "triangle-free" | "trianglefree" | "c3free" => ClassSpec::TriangleFree,
            "girth5" => ClassSpec::Girth5,
            "no4cycle" | "c4free" => ClassSpec::NoFourCycle,
            "bipartite" => ClassSpec::Bipartite,
            "bipartite-girth6" => ClassSpec::BipartiteGirth6,
            "maxdeg" => match nums(params)?.as_slice() {
                &[k] => ClassSpec::MaxDegree(k),
                _ => return Err(bad()),
            },
            "degrees" => {
                let (min, max) = range(params)?;
                ClassSpec::DegreeRange { min, max }
            }
            "digraphs" | "digraph" => ClassSpec::Digraph,
            "oriented" => ClassSpec::Oriented,
            "tournament" | "tournaments" => ClassSpec::Tournament,
            "scores" => {
                let (min, max) = range(params)?;
                ClassSpec::ScoreRange { min, max }
            }
            _ => return Err(bad()),
        };
        if params.is_some() && !matches!(name, "maxdeg" | "degrees" | "scores") {
            return Err(bad());
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> LabelledGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        LabelledGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn girth_examples() {
        assert!(ClassSpec::Girth5.in_class(&cycle(5)));
        assert!(!ClassSpec::Girth5.in_class(&cycle(4)));
        assert!(ClassSpec::NoFourCycle.in_class(&cycle(3)));
    }

    #[test]
    fn two_cycle_is_not_oriented() {
        let g = LabelledGraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        assert!(!ClassSpec::Oriented.in_class(&g));
        assert!(ClassSpec::Digraph.in_class(&g));
    }

    #[test]
    fn names_round_trip() {
        for c in [
            ClassSpec::All,
            ClassSpec::TriangleFree,
            ClassSpec::Girth5,
            ClassSpec::NoFourCycle,
            ClassSpec::Bipartite,
            ClassSpec::BipartiteGirth6,
            ClassSpec::MaxDegree(3),
            ClassSpec::DegreeRange { min: 3, max: 4 },
            ClassSpec::Digraph,
            ClassSpec::Oriented,
            ClassSpec::Tournament,
            ClassSpec::ScoreRange { min: 6, max: 7 },
        ] {
            assert_eq!(c.to_string().parse::<ClassSpec>().unwrap(), c);
        }
        assert!("girth7".parse::<ClassSpec>().is_err());
        assert!("scores=5,2".parse::<ClassSpec>().is_err());
        assert!("bipartite=2".parse::<ClassSpec>().is_err());
    }

    #[test]
    fn score_range_feasibility() {
        let spec = ClassSpec::ScoreRange { min: 1, max: 1 };
        let tt = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        // vertex 0 already beats two others
        assert!(!spec.feasible(&tt, 3));
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(spec.feasible(&c3, 3));
        assert!(spec.in_class(&c3));
        assert!(!spec.in_class(&tt));
    }

    #[test]
    fn tournament_candidates_cover_two_to_the_k() {
        for k in 1..=6 {
            let g = LabelledGraph::empty(k, true).unwrap();
            assert_eq!(ClassSpec::Tournament.extension_candidates(&g).len(), 1 << k);
            assert_eq!(ClassSpec::Oriented.extension_candidates(&g).len(), 3usize.pow(k as u32));
            assert_eq!(ClassSpec::Digraph.extension_candidates(&g).len(), 4usize.pow(k as u32));
        }
    }
}
