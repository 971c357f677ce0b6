//! Brute-force ground truth. Enumerates every labelled object, buckets by
//! the exhaustive canonical form and compares decks directly. Nothing here
//! touches the generator or the orbit code.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::canon::{brute_canonical, canonical, CanonCode};
use crate::class::ClassSpec;
use crate::codec::encode;
use crate::deck::{search, DeckMode};
use crate::error::{Error, Result};
use crate::genx::{generate, GenConfig, TopRule};
use crate::graph::{LabelledGraph, MAX_N};

/// Largest labelled search space the oracle will walk.
pub const MAX_SPACE: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCensus {
    pub order: usize,
    pub class: String,
    pub class_count: usize,
    /// One brute canonical form per isomorphism class, sorted.
    pub representatives: Vec<LabelledGraph>,
    pub full_groups: Vec<Vec<LabelledGraph>>,
    pub reduced_groups: Vec<Vec<LabelledGraph>>,
}

fn states_per_pair(spec: ClassSpec) -> u64 {
    match spec {
        ClassSpec::Digraph => 4,
        ClassSpec::Oriented => 3,
        _ => 2,
    }
}

/// Number of labelled objects `oracle_census(n, spec)` would visit.
pub fn space_size(n: usize, spec: ClassSpec) -> Option<u64> {
    let pairs = (n * n.saturating_sub(1) / 2) as u32;
    states_per_pair(spec).checked_pow(pairs)
}

/// Sets the arcs between `i < j` for pair state `s`.
fn set_pair(g: &mut LabelledGraph, spec: ClassSpec, i: usize, j: usize, s: u8) {
    let (fwd, back) = if !spec.is_directed() {
        (s == 1, s == 1)
    } else {
        match states_per_pair(spec) {
            4 => (s & 1 == 1, s & 2 == 2),
            3 => (s == 1, s == 2),
            _ => (s == 0, s == 1),
        }
    };
    g.set_arc(i, j, fwd);
    g.set_arc(j, i, back);
}

fn keys_non_increasing(g: &LabelledGraph) -> bool {
    let n = g.order();
    let mut prev = u32::MAX;
    for v in 0..n {
        let k = g.out_degree(v) as u32 * 32 + g.in_degree(v) as u32;
        if k > prev {
            return false;
        }
        prev = k;
    }
    true
}

fn brute_code(g: &LabelledGraph) -> CanonCode {
    brute_canonical(g).expect("oracle orders are at most 8").canon_code
}

/// Groups representatives whose decks coincide, for both deck modes.
fn deck_groups(reps: &[LabelledGraph]) -> Result<(Vec<Vec<LabelledGraph>>, Vec<Vec<LabelledGraph>>)> {
    let mut full: BTreeMap<Vec<CanonCode>, Vec<LabelledGraph>> = BTreeMap::new();
    let mut reduced: BTreeMap<Vec<CanonCode>, Vec<LabelledGraph>> = BTreeMap::new();
    for g in reps {
        let mut cards = (0..g.order())
            .map(|v| g.delete_vertex(v).map(|c| brute_code(&c)))
            .collect::<Result<Vec<_>>>()?;
        cards.sort_unstable();
        full.entry(cards.clone()).or_default().push(*g);
        cards.dedup();
        reduced.entry(cards).or_default().push(*g);
    }
    let keep = |m: BTreeMap<Vec<CanonCode>, Vec<LabelledGraph>>| -> Vec<Vec<LabelledGraph>> {
        m.into_values().filter(|v| v.len() >= 2).collect()
    };
    Ok((keep(full), keep(reduced)))
}

/// Exhaustive census of `spec` at order `n`.
pub fn oracle_census(n: usize, spec: ClassSpec) -> Result<OracleCensus> {
    if n < 2 || n > 8 {
        return Err(Error::Refused(format!("oracle handles orders 2..=8, got {n}")));
    }
    let space = space_size(n, spec).unwrap_or(u64::MAX);
    if space > MAX_SPACE {
        return Err(Error::Refused(format!(
            "{spec} at n={n} has {space} labelled objects, above the oracle bound of {MAX_SPACE}"
        )));
    }
    let radix = if spec.is_directed() { states_per_pair(spec) as u8 } else { 2 };
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let mut digits = vec![0u8; pairs.len()];
    let mut g = LabelledGraph::empty(n, spec.is_directed())?;
    for (&(i, j), &d) in pairs.iter().zip(&digits) {
        set_pair(&mut g, spec, i, j, d);
    }
    let mut classes: HashSet<CanonCode> = HashSet::new();
    loop {
        if keys_non_increasing(&g) && spec.in_class(&g) {
            classes.insert(brute_code(&g));
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == digits.len() {
                return finish(n, spec.to_string(), classes);
            }
            digits[k] += 1;
            if digits[k] == radix {
                digits[k] = 0;
            }
            let (i, j) = pairs[k];
            set_pair(&mut g, spec, i, j, digits[k]);
            if digits[k] != 0 {
                break;
            }
            k += 1;
        }
    }
}

fn finish(n: usize, class: String, classes: HashSet<CanonCode>) -> Result<OracleCensus> {
    let mut reps: Vec<LabelledGraph> = classes.iter().map(CanonCode::graph).collect();
    reps.sort_unstable_by_key(|g| brute_code(g));
    let (full_groups, reduced_groups) = deck_groups(&reps)?;
    Ok(OracleCensus {
        order: n,
        class,
        class_count: reps.len(),
        representatives: reps,
        full_groups,
        reduced_groups,
    })
}

/// A strict partial order on `n` points: bit `j` of `less[i]` means `i < j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Poset {
    n: u8,
    less: [u16; MAX_N],
}

impl Poset {
    pub fn antichain(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::Capacity(n));
        }
        Ok(Poset {
            n: n as u8,
            less: [0; MAX_N],
        })
    }

    /// Accepts a digraph whose arc relation is a strict partial order.
    pub fn from_digraph(g: &LabelledGraph) -> Result<Self> {
        if !g.is_directed() {
            return Err(Error::NotDirected);
        }
        let mut p = Self::antichain(g.order())?;
        for i in 0..g.order() {
            p.less[i] = g.row(i);
        }
        if !p.is_valid() {
            return Err(Error::Malformed("relation is not a strict partial order".into()));
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.less[i] >> j & 1 == 1
    }

    /// Irreflexive, antisymmetric and transitive.
    pub fn is_valid(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| {
            !self.lt(i, i)
                && (0..n).all(|j| {
                    !(self.lt(i, j) && self.lt(j, i))
                        && (!self.lt(i, j) || self.less[j] & !self.less[i] == 0)
                })
        })
    }

    /// The transitive digraph with an arc `i -> j` for each `i < j`.
    pub fn to_digraph(&self) -> LabelledGraph {
        LabelledGraph::from_rows(self.order(), true, &self.less[..self.order()])
            .expect("poset relation is loop-free")
    }

    /// The sub-poset on the remaining points, relabelled in order.
    pub fn delete_point(&self, v: usize) -> Result<Self> {
        let g = self.to_digraph().delete_vertex(v)?;
        let mut p = Self::antichain(g.order())?;
        for i in 0..g.order() {
            p.less[i] = g.row(i);
        }
        Ok(p)
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel: Vec<String> = (0..self.order())
            .flat_map(|i| (0..self.order()).filter(move |&j| self.lt(i, j)).map(move |j| format!("{i}<{j}")))
            .collect();
        write!(f, "{}[{}]", self.n, rel.join(","))
    }
}

/// All labelled posets on `n` points. Pairs are filled vertex by vertex and
/// transitivity is checked as soon as a vertex's pairs are all set.
pub fn labelled_posets(n: usize) -> Result<Vec<Poset>> {
    if n == 0 || n > 5 {
        return Err(Error::Refused(format!("poset enumeration handles 1..=5 points, got {n}")));
    }
    fn consistent(p: &Poset, k: usize) -> bool {
        // transitivity among points 0..=k, given it held among 0..k
        let in_range = (1u16 << (k + 1)) - 1;
        (0..=k).all(|i| {
            (0..=k).filter(|&j| p.lt(i, j)).all(|j| p.less[j] & in_range & !p.less[i] == 0)
        })
    }
    fn go(p: &mut Poset, j: usize, i: usize, out: &mut Vec<Poset>) {
        let n = p.order();
        if j == n {
            out.push(*p);
            return;
        }
        if i == j {
            if consistent(p, j) {
                go(p, j + 1, 0, out);
            }
            return;
        }
        for s in 0..3 {
            p.less[i] &= !(1 << j);
            p.less[j] &= !(1 << i);
            match s {
                1 => p.less[i] |= 1 << j,
                2 => p.less[j] |= 1 << i,
                _ => {}
            }
            go(p, j, i + 1, out);
        }
        p.less[i] &= !(1 << j);
        p.less[j] &= !(1 << i);
    }
    let mut out = Vec::new();
    go(&mut Poset::antichain(n)?, 0, 0, &mut out);
    Ok(out)
}

/// Poset isomorphism classes and their deck collisions, with cards taken
/// as point-deleted sub-posets.
pub fn poset_census(n: usize) -> Result<OracleCensus> {
    if !(2..=5).contains(&n) {
        return Err(Error::Refused(format!("poset census handles 2..=5 points, got {n}")));
    }
    let mut by_code: BTreeMap<CanonCode, Poset> = BTreeMap::new();
    for p in labelled_posets(n)? {
        by_code.entry(brute_code(&p.to_digraph())).or_insert(p);
    }
    let mut reps = Vec::with_capacity(by_code.len());
    let mut full: BTreeMap<Vec<CanonCode>, Vec<LabelledGraph>> = BTreeMap::new();
    let mut reduced: BTreeMap<Vec<CanonCode>, Vec<LabelledGraph>> = BTreeMap::new();
    for (code, p) in &by_code {
        let g = code.graph();
        reps.push(g);
        let mut cards = (0..n)
            .map(|v| p.delete_point(v).map(|c| brute_code(&c.to_digraph())))
            .collect::<Result<Vec<_>>>()?;
        cards.sort_unstable();
        full.entry(cards.clone()).or_default().push(g);
        cards.dedup();
        reduced.entry(cards).or_default().push(g);
    }
    let keep = |m: BTreeMap<Vec<CanonCode>, Vec<LabelledGraph>>| -> Vec<Vec<LabelledGraph>> {
        m.into_values().filter(|v| v.len() >= 2).collect()
    };
    Ok(OracleCensus {
        order: n,
        class: "posets".into(),
        class_count: reps.len(),
        representatives: reps,
        full_groups: keep(full),
        reduced_groups: keep(reduced),
    })
}

/// Groups as sorted sets of fast-path canonical codes.
pub fn group_code_sets(groups: &[Vec<LabelledGraph>]) -> BTreeSet<Vec<CanonCode>> {
    groups
        .iter()
        .map(|g| {
            let mut v: Vec<CanonCode> = g.iter().map(|x| canonical(x).canon_code).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupComparison {
    pub mode: DeckMode,
    pub oracle: BTreeSet<Vec<CanonCode>>,
    pub search: BTreeSet<Vec<CanonCode>>,
}

impl GroupComparison {
    pub fn matches(&self) -> bool {
        self.oracle == self.search
    }

    fn divergence(&self) -> Option<String> {
        let show = |g: &Vec<CanonCode>| g.iter().map(|c| encode(&c.graph())).collect::<Vec<_>>().join(",");
        if let Some(g) = self.oracle.difference(&self.search).next() {
            return Some(format!("{} group {} found by the oracle only", self.mode, show(g)));
        }
        self.search
            .difference(&self.oracle)
            .next()
            .map(|g| format!("{} group {} found by the search only", self.mode, show(g)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub order: usize,
    pub class: ClassSpec,
    pub oracle_classes: usize,
    pub generated_classes: usize,
    /// First class present on one side only, in graph6/digraph6.
    pub class_divergence: Option<String>,
    pub full: GroupComparison,
    pub reduced: GroupComparison,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.class_divergence.is_none()
            && self.oracle_classes == self.generated_classes
            && self.full.matches()
            && self.reduced.matches()
    }

    pub fn first_divergence(&self) -> Option<String> {
        if self.oracle_classes != self.generated_classes && self.class_divergence.is_none() {
            return Some(format!(
                "generator emitted {} objects for {} classes",
                self.generated_classes, self.oracle_classes
            ));
        }
        self.class_divergence
            .clone()
            .or_else(|| self.full.divergence())
            .or_else(|| self.reduced.divergence())
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} classes oracle={} gen={} full={}/{} reduced={}/{}",
            self.class,
            self.order,
            self.oracle_classes,
            self.generated_classes,
            self.full.oracle.len(),
            self.full.search.len(),
            self.reduced.oracle.len(),
            self.reduced.search.len()
        )?;
        match self.first_divergence() {
            Some(d) => write!(f, " MISMATCH: {d}"),
            None => write!(f, " ok"),
        }
    }
}

/// Compares exact-mode generation and both deck searches with the oracle.
pub fn cross_check(n: usize, spec: ClassSpec) -> Result<CrossCheckReport> {
    let census = oracle_census(n, spec)?;
    let mut generated: Vec<CanonCode> = Vec::new();
    generate(&GenConfig::new(n, spec, TopRule::Exact), |_, g| generated.push(canonical(g).canon_code))?;
    let generated_classes = generated.len();
    let gen_set: BTreeSet<CanonCode> = generated.into_iter().collect();
    let oracle_set: BTreeSet<CanonCode> = census.representatives.iter().map(|g| canonical(g).canon_code).collect();
    let class_divergence = oracle_set
        .symmetric_difference(&gen_set)
        .next()
        .map(|c| {
            let side = if oracle_set.contains(c) { "missing from generation" } else { "not in the oracle" };
            format!("class {} {side}", encode(&c.graph()))
        });
    let cfg = GenConfig::new(n, spec, TopRule::Recon);
    let found = |mode| -> Result<BTreeSet<Vec<CanonCode>>> {
        Ok(search(&cfg, mode)?.groups.into_iter().map(|g| g.members).collect())
    };
    Ok(CrossCheckReport {
        order: n,
        class: spec,
        oracle_classes: census.class_count,
        generated_classes,
        class_divergence,
        full: GroupComparison {
            mode: DeckMode::Full,
            oracle: group_code_sets(&census.full_groups),
            search: found(DeckMode::Full)?,
        },
        reduced: GroupComparison {
            mode: DeckMode::Reduced,
            oracle: group_code_sets(&census.reduced_groups),
            search: found(DeckMode::Reduced)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(groups: &[Vec<LabelledGraph>]) -> Vec<usize> {
        let mut s: Vec<usize> = groups.iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn four_vertex_graphs() {
        let c = oracle_census(4, ClassSpec::All).unwrap();
        assert_eq!(c.class_count, 11);
        assert!(c.full_groups.is_empty() && c.reduced_groups.is_empty());
    }

    #[test]
    fn three_vertex_graphs() {
        // K2+K1 and P3 share {K2, 2K1} as a set but not as a multiset
        let c = oracle_census(3, ClassSpec::All).unwrap();
        assert_eq!(c.class_count, 4);
        assert!(c.full_groups.is_empty());
        assert_eq!(sizes(&c.reduced_groups), vec![2]);
    }

    #[test]
    fn five_vertex_tournaments() {
        let c = oracle_census(5, ClassSpec::Tournament).unwrap();
        assert_eq!(c.class_count, 12);
        assert_eq!(sizes(&c.full_groups), vec![2]);
        assert_eq!(sizes(&c.reduced_groups), vec![2, 2]);
    }

    #[test]
    fn refuses_large_spaces() {
        assert!(oracle_census(8, ClassSpec::All).is_err());
        assert!(oracle_census(6, ClassSpec::Digraph).is_err());
        assert_eq!(space_size(6, ClassSpec::Oriented), Some(3u64.pow(15)));
    }

    #[test]
    fn poset_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| labelled_posets(n).unwrap().len()).collect();
        // labelled posets: 1, 3, 19, 219, 4231
        assert_eq!(counts, vec![1, 3, 19, 219, 4231]);
        assert!(labelled_posets(4).unwrap().iter().all(Poset::is_valid));
        let classes: Vec<usize> = (2..=5).map(|n| poset_census(n).unwrap().class_count).collect();
        assert_eq!(classes, vec![2, 5, 16, 63]);
    }

    #[test]
    fn poset_collisions() {
        let p2 = poset_census(2).unwrap();
        assert_eq!(sizes(&p2.reduced_groups), vec![2]);
        let p3 = poset_census(3).unwrap();
        assert_eq!(sizes(&p3.reduced_groups), vec![3]);
        for n in [4, 5] {
            let p = poset_census(n).unwrap();
            assert!(p.reduced_groups.is_empty() && p.full_groups.is_empty());
        }
        assert!(poset_census(6).is_err());
    }

    #[test]
    fn poset_cards_commute() {
        for p in labelled_posets(4).unwrap() {
            for v in 0..4 {
                assert_eq!(p.delete_point(v).unwrap().to_digraph(), p.to_digraph().delete_vertex(v).unwrap());
            }
        }
    }

    #[test]
    fn from_digraph_rejects_non_orders() {
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(Poset::from_digraph(&c3).is_err());
        let chain = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(Poset::from_digraph(&chain).unwrap().to_string(), "3[0<1,0<2,1<2]");
    }

    #[test]
    fn cross_check_small() {
        for (n, spec) in [(4, ClassSpec::All), (4, ClassSpec::Oriented), (4, ClassSpec::Tournament)] {
            let r = cross_check(n, spec).unwrap();
            assert!(r.passed(), "{r}");
        }
        let r = cross_check(4, ClassSpec::Oriented).unwrap();
        assert_eq!(r.full.oracle.len(), 3);
    }
}
