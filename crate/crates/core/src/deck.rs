//! Decks, deck invariants and the per-parent collision pipeline.
//!
//! Children of one parent are compared in stages, each of which only
//! discards children that cannot share a reduced deck with any other child
//! of the batch:
//!
//! 1. bucket by [`DeckInvariant`] and drop singletons;
//! 2. split buckets by the canonical codes of the maximal cards;
//! 3. split by the full reduced deck;
//! 4. drop isomorphic duplicates and emit groups of two or more classes
//!    (split further by full deck in [`DeckMode::Full`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::canon::{canon, mix, CanonCode};
use crate::error::{Error, Result};
use crate::genx::{card_keys, generate_batches, GenConfig, GenStats, TopRule};
use crate::graph::{LabelledGraph, MAX_N};

/// Sorted multiset of the canonical codes of all cards.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FullDeck(pub Vec<CanonCode>);

/// Sorted set of the distinct cards.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ReducedDeck(pub Vec<CanonCode>);

impl FullDeck {
    pub fn reduced(&self) -> ReducedDeck {
        let mut v = self.0.clone();
        v.dedup();
        ReducedDeck(v)
    }
}

fn card_codes(g: &LabelledGraph) -> Result<Vec<CanonCode>> {
    (0..g.order()).map(|v| Ok(canon(&g.delete_vertex(v)?).code)).collect()
}

pub fn full_deck(g: &LabelledGraph) -> Result<FullDeck> {
    let mut cards = card_codes(g)?;
    cards.sort_unstable();
    Ok(FullDeck(cards))
}

pub fn reduced_deck(g: &LabelledGraph) -> Result<ReducedDeck> {
    Ok(full_deck(g)?.reduced())
}

/// Digest of the set of per-card (degree sequence, edges, triangles).
/// Equal reduced decks give equal digests.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DeckInvariant(pub u64);

pub fn deck_invariant(g: &LabelledGraph) -> Result<DeckInvariant> {
    let n = g.order();
    if n < 2 {
        return Err(Error::NoCardOfK1);
    }
    let inn = g.in_rows();
    let keys = card_keys(g);
    let mut digests = [0u64; MAX_N];
    let mut degs = [0u16; MAX_N];
    for v in 0..n {
        let mut k = 0;
        for u in (0..n).filter(|&u| u != v) {
            let out = g.row(u).count_ones() - (g.row(u) >> v & 1) as u32;
            let inc = inn[u].count_ones() - (inn[u] >> v & 1) as u32;
            degs[k] = (out << 5 | inc) as u16;
            k += 1;
        }
        degs[..k].sort_unstable();
        let mut h = mix(keys[v].edge_count as u64, keys[v].triangle_count as u64);
        for &d in &degs[..k] {
            h = mix(h, d as u64);
        }
        digests[v] = h;
    }
    digests[..n].sort_unstable();
    let mut h = mix(n as u64, g.is_directed() as u64);
    let mut prev = None;
    for &d in &digests[..n] {
        if prev != Some(d) {
            h = mix(h, d);
            prev = Some(d);
        }
    }
    Ok(DeckInvariant(h))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DeckMode {
    Reduced,
    Full,
}

impl fmt::Display for DeckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeckMode::Reduced => "reduced",
            DeckMode::Full => "full",
        })
    }
}

impl FromStr for DeckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reduced" => Ok(DeckMode::Reduced),
            "full" => Ok(DeckMode::Full),
            _ => Err(Error::InvalidConfig(format!("deck mode must be `full` or `reduced`, got `{s}`"))),
        }
    }
}

/// Two or more pairwise non-isomorphic graphs sharing a deck.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CollisionGroup {
    pub n: usize,
    pub deck_mode: DeckMode,
    /// Canonical codes of the members, sorted.
    pub members: Vec<CanonCode>,
    pub reduced_deck: ReducedDeck,
    /// Present in full-deck mode.
    pub full_deck: Option<FullDeck>,
    /// Canonical codes of the parents the group was seen under, sorted.
    pub parents: Vec<CanonCode>,
}

impl CollisionGroup {
    pub fn member_graphs(&self) -> Vec<LabelledGraph> {
        self.members.iter().map(CanonCode::graph).collect()
    }
}

/// A top-level child together with its parent's canonical code.
#[derive(Clone, Copy, Debug)]
pub struct BatchChild {
    pub graph: LabelledGraph,
    pub parent: CanonCode,
}

/// Per-child data filled in lazily as the stages progress.
struct Work {
    idx: usize,
    digest: u64,
    top_cards: Vec<CanonCode>,
    cards: Vec<CanonCode>,
}

/// Partitions the pairwise non-isomorphic children of a batch into maximal
/// groups sharing a deck.
pub fn process_batch(children: &[BatchChild], mode: DeckMode) -> Result<Vec<CollisionGroup>> {
    let Some(first) = children.first() else {
        return Ok(vec![]);
    };
    let n = first.graph.order();
    for c in children {
        if c.graph.order() != n {
            return Err(Error::MixedOrders(n, c.graph.order()));
        }
    }
    if n < 2 {
        return Ok(vec![]);
    }

    // stage 1: deck invariant
    let mut work: Vec<Work> = children
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            Ok(Work {
                idx,
                digest: deck_invariant(&c.graph)?.0,
                top_cards: vec![],
                cards: vec![],
            })
        })
        .collect::<Result<_>>()?;
    work.sort_by_key(|w| w.digest);

    let mut groups = Vec::new();
    for bucket in runs(work, |w| w.digest) {
        // stage 2: cards with the largest preorder key
        let mut bucket = bucket;
        for w in &mut bucket {
            let g = &children[w.idx].graph;
            let keys = card_keys(g);
            let top = *keys.iter().max().unwrap();
            let mut codes: Vec<CanonCode> = (0..n)
                .filter(|&v| keys[v] == top)
                .map(|v| Ok(canon(&g.delete_vertex(v)?).code))
                .collect::<Result<_>>()?;
            codes.sort_unstable();
            codes.dedup();
            w.top_cards = codes;
        }
        bucket.sort_by(|a, b| a.top_cards.cmp(&b.top_cards));
        for sub in runs(bucket, |w| w.top_cards.clone()) {
            // stage 3: complete reduced deck
            let mut sub = sub;
            for w in &mut sub {
                w.cards = card_codes(&children[w.idx].graph)?;
            }
            let mut keyed: Vec<(ReducedDeck, Work)> = sub
                .into_iter()
                .map(|w| {
                    let mut d = w.cards.clone();
                    d.sort_unstable();
                    d.dedup();
                    (ReducedDeck(d), w)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            for same in runs(keyed, |(d, _)| d.clone()) {
                // stage 4: drop isomorphic duplicates
                let deck = same[0].0.clone();
                let mut by_class: BTreeMap<CanonCode, (FullDeck, Vec<CanonCode>)> = BTreeMap::new();
                for (_, w) in same {
                    let code = canon(&children[w.idx].graph).code;
                    let entry = by_class.entry(code).or_insert_with(|| {
                        let mut cards = w.cards.clone();
                        cards.sort_unstable();
                        (FullDeck(cards), vec![])
                    });
                    entry.1.push(children[w.idx].parent);
                }
                if by_class.len() < 2 {
                    continue;
                }
                match mode {
                    DeckMode::Reduced => groups.push(make_group(n, mode, deck, None, by_class)),
                    DeckMode::Full => {
                        let mut by_full: BTreeMap<FullDeck, BTreeMap<CanonCode, (FullDeck, Vec<CanonCode>)>> =
                            BTreeMap::new();
                        for (code, entry) in by_class {
                            by_full.entry(entry.0.clone()).or_default().insert(code, entry);
                        }
                        for (full, members) in by_full {
                            if members.len() >= 2 {
                                groups.push(make_group(n, mode, deck.clone(), Some(full), members));
                            }
                        }
                    }
                }
            }
        }
    }
    groups.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(groups)
}

fn make_group(
    n: usize,
    deck_mode: DeckMode,
    reduced_deck: ReducedDeck,
    full_deck: Option<FullDeck>,
    members: BTreeMap<CanonCode, (FullDeck, Vec<CanonCode>)>,
) -> CollisionGroup {
    let mut parents: Vec<CanonCode> = members.values().flat_map(|(_, p)| p.iter().copied()).collect();
    parents.sort_unstable();
    parents.dedup();
    CollisionGroup {
        n,
        deck_mode,
        members: members.into_keys().collect(),
        reduced_deck,
        full_deck,
        parents,
    }
}

/// Splits a sorted vector into runs of equal key, keeping runs of length >= 2.
fn runs<T, K: PartialEq, F: Fn(&T) -> K>(items: Vec<T>, key: F) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut cur: Vec<T> = Vec::new();
    for it in items {
        if let Some(last) = cur.last() {
            if key(last) != key(&it) {
                if cur.len() >= 2 {
                    out.push(std::mem::take(&mut cur));
                } else {
                    cur.clear();
                }
            }
        }
        cur.push(it);
    }
    if cur.len() >= 2 {
        out.push(cur);
    }
    out
}

/// Children of a single parent.
pub fn process_parent_batch(
    parent: &LabelledGraph,
    children: &[LabelledGraph],
    mode: DeckMode,
) -> Result<Vec<CollisionGroup>> {
    let p = canon(parent).code;
    let batch: Vec<BatchChild> = children.iter().map(|&graph| BatchChild { graph, parent: p }).collect();
    process_batch(&batch, mode)
}

/// Merges group lists: groups with equal member sets are combined and their
/// parent lists united. Associative, commutative and idempotent.
pub fn merge_groups<I: IntoIterator<Item = CollisionGroup>>(groups: I) -> Vec<CollisionGroup> {
    let mut map: BTreeMap<Vec<CanonCode>, CollisionGroup> = BTreeMap::new();
    for g in groups {
        match map.get_mut(&g.members) {
            Some(existing) => {
                existing.parents.extend(g.parents);
                existing.parents.sort_unstable();
                existing.parents.dedup();
            }
            None => {
                map.insert(g.members.clone(), g);
            }
        }
    }
    map.into_values().collect()
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    pub groups: Vec<CollisionGroup>,
    pub stats: GenStats,
}

/// Exhaustive search for equal-deck groups in `cfg.class` at `cfg.target_n`.
pub fn search(cfg: &GenConfig, mode: DeckMode) -> Result<SearchOutcome> {
    search_with_limit(cfg, mode, None)
}

/// As [`search`], failing when a parent batch exceeds `max_batch` children.
pub fn search_with_limit(cfg: &GenConfig, mode: DeckMode, max_batch: Option<usize>) -> Result<SearchOutcome> {
    if cfg.top_rule != TopRule::Recon {
        return Err(Error::InvalidConfig("search requires the recon top-level rule".into()));
    }
    let mut found = Vec::new();
    let stats = generate_batches(cfg, |parent, children| {
        if let Some(limit) = max_batch {
            if children.len() > limit {
                return Err(Error::BatchLimit {
                    size: children.len(),
                    limit,
                });
            }
        }
        if children.len() >= 2 {
            found.extend(process_parent_batch(parent, children, mode)?);
        }
        Ok(())
    })?;
    Ok(SearchOutcome {
        groups: merge_groups(found),
        stats,
    })
}

/// Properties that the reduced deck determines, checked across a group.
/// Returns a description of the first inhomogeneity found.
pub fn check_homogeneity(group: &CollisionGroup) -> std::result::Result<(), String> {
    let gs = group.member_graphs();
    let n = group.n;
    let first = &gs[0];
    let differ = |what: &str| Err(format!("members differ in {what}"));
    if first.is_directed() {
        if n >= 3 && gs.iter().any(|g| g.is_tournament() != first.is_tournament()) {
            return differ("tournament-ness");
        }
    } else if n >= 4 {
        if gs.iter().any(|g| g.min_degree() != first.min_degree()) {
            return differ("minimum degree");
        }
        if gs.iter().any(|g| g.max_degree() != first.max_degree()) {
            return differ("maximum degree");
        }
        if gs.iter().any(|g| g.is_bipartite() != first.is_bipartite()) {
            return differ("bipartiteness");
        }
        for k in 3..n {
            if gs.iter().any(|g| g.has_cycle_of_length(k) != first.has_cycle_of_length(k)) {
                return differ(&format!("presence of {k}-cycles"));
            }
        }
    }
    if group.deck_mode == DeckMode::Full && gs.iter().any(|g| g.edge_count() != first.edge_count()) {
        return differ("edge count");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canon_code;
    use crate::class::ClassSpec;
    use crate::genx::generate_all;

    fn cycle(n: usize) -> LabelledGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        LabelledGraph::from_edges(n, &edges).unwrap()
    }

    fn path(n: usize) -> LabelledGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        LabelledGraph::from_edges(n, &edges).unwrap()
    }

    fn star3() -> LabelledGraph {
        LabelledGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn c4_deck() {
        let full = full_deck(&cycle(4)).unwrap();
        assert_eq!(full.0, vec![canon_code(&path(3)); 4]);
        assert_eq!(full.reduced().0, vec![canon_code(&path(3))]);
    }

    #[test]
    fn star_deck() {
        let e3 = canon_code(&LabelledGraph::empty(3, false).unwrap());
        let k12 = canon_code(&path(3));
        let mut expect = vec![e3, k12, k12, k12];
        expect.sort();
        assert_eq!(full_deck(&star3()).unwrap().0, expect);
        let mut red = vec![e3, k12];
        red.sort();
        assert_eq!(reduced_deck(&star3()).unwrap().0, red);
    }

    #[test]
    fn cycle_reduced_deck_is_one_path() {
        for n in 3..=9 {
            assert_eq!(reduced_deck(&cycle(n)).unwrap().0, vec![canon_code(&path(n - 1))]);
        }
    }

    #[test]
    fn deck_of_k1_is_an_error() {
        assert!(full_deck(&LabelledGraph::k1(false)).is_err());
        assert!(deck_invariant(&LabelledGraph::k1(false)).is_err());
    }

    #[test]
    fn invariant_separates_c4_and_star() {
        assert_ne!(deck_invariant(&cycle(4)).unwrap(), deck_invariant(&star3()).unwrap());
        let relabelled = LabelledGraph::from_edges(4, &[(2, 0), (2, 1), (2, 3)]).unwrap();
        assert_eq!(deck_invariant(&star3()).unwrap(), deck_invariant(&relabelled).unwrap());
    }

    #[test]
    fn four_vertex_graphs_have_no_groups() {
        let gs = generate_all(4, ClassSpec::All).unwrap();
        let k1 = canon_code(&LabelledGraph::k1(false));
        let batch: Vec<_> = gs.iter().map(|&graph| BatchChild { graph, parent: k1 }).collect();
        assert!(process_batch(&batch, DeckMode::Reduced).unwrap().is_empty());
    }

    #[test]
    fn isomorphic_duplicates_do_not_collide() {
        let t = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let t2 = LabelledGraph::from_arcs(3, &[(1, 0), (0, 2), (2, 1)]).unwrap();
        let p = canon_code(&LabelledGraph::k1(true));
        let batch = [BatchChild { graph: t, parent: p }, BatchChild { graph: t2, parent: p }];
        assert!(process_batch(&batch, DeckMode::Reduced).unwrap().is_empty());
    }

    #[test]
    fn three_vertex_tournaments_share_a_deck() {
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let tt = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = canon_code(&LabelledGraph::from_arcs(2, &[(0, 1)]).unwrap());
        let batch = [BatchChild { graph: c3, parent: p }, BatchChild { graph: tt, parent: p }];
        let groups = process_batch(&batch, DeckMode::Full).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].members.len(), 2);
        assert_eq!(groups[0].parents, vec![p]);
        assert!(groups[0].full_deck.is_some());
    }

    #[test]
    fn mixed_orders_rejected() {
        let p = canon_code(&LabelledGraph::k1(false));
        let batch = [
            BatchChild { graph: path(3), parent: p },
            BatchChild { graph: path(4), parent: p },
        ];
        assert!(matches!(process_batch(&batch, DeckMode::Reduced), Err(Error::MixedOrders(3, 4))));
    }

    #[test]
    fn merge_is_idempotent() {
        let c3 = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let tt = LabelledGraph::from_arcs(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = canon_code(&LabelledGraph::from_arcs(2, &[(0, 1)]).unwrap());
        let batch = [BatchChild { graph: c3, parent: p }, BatchChild { graph: tt, parent: p }];
        let groups = process_batch(&batch, DeckMode::Reduced).unwrap();
        let twice = merge_groups(groups.iter().cloned().chain(groups.iter().cloned()));
        assert_eq!(twice, groups);
        assert!(merge_groups(vec![]).is_empty());
    }

    #[test]
    fn deck_mode_names() {
        assert_eq!("full".parse::<DeckMode>().unwrap(), DeckMode::Full);
        assert_eq!(DeckMode::Reduced.to_string(), "reduced");
        assert!("partial".parse::<DeckMode>().is_err());
    }
}
