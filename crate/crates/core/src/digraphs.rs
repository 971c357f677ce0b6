//! Directed classes: extension enumeration, the tournament census, the
//! self-converse scan and the reduced-deck tournament fixtures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::canon::{canon, isomorphic, orbits_on_extensions, CanonCode};
use crate::class::ClassSpec;
use crate::codec::{decode_digraph6, encode};
use crate::deck::{full_deck, reduced_deck, search, CollisionGroup, DeckMode, FullDeck};
use crate::error::{Error, Result};
use crate::genx::{generate, GenConfig, TopRule};
use crate::graph::{ExtensionPair, LabelledGraph};

/// Orbit representatives of extension pairs for a directed class.
pub fn digraph_extensions(g: &LabelledGraph, spec: ClassSpec) -> Result<Vec<ExtensionPair>> {
    spec.require_directed(true)?;
    orbits_on_extensions(g, spec)
}

/// Coarse type of a digraph as used in census listings. `Oriented` excludes
/// tournaments.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DigraphKind {
    Tournament,
    Oriented,
    TwoCycles(usize),
}

impl DigraphKind {
    pub fn of(g: &LabelledGraph) -> Self {
        match g.two_cycle_count() {
            0 if g.is_tournament() => DigraphKind::Tournament,
            0 => DigraphKind::Oriented,
            k => DigraphKind::TwoCycles(k),
        }
    }
}

impl fmt::Display for DigraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigraphKind::Tournament => f.write_str("tournament"),
            DigraphKind::Oriented => f.write_str("oriented"),
            DigraphKind::TwoCycles(k) => write!(f, "{k}x2-cycle"),
        }
    }
}

/// Equal-deck groups among tournaments of order `n`.
pub fn tournament_census(n: usize, mode: DeckMode) -> Result<Vec<CollisionGroup>> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!("tournament census starts at order 3, got {n}")));
    }
    Ok(search(&GenConfig::new(n, ClassSpec::Tournament, TopRule::Recon), mode)?.groups)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfConverseReport {
    pub order: usize,
    pub tournaments: usize,
    pub self_converse: Vec<CanonCode>,
    /// Groups of self-converse tournaments sharing a reduced deck.
    pub collisions: Vec<Vec<CanonCode>>,
}

/// Tournaments isomorphic to their converse, compared by reduced deck among
/// themselves only.
pub fn self_converse_scan(n: usize) -> Result<SelfConverseReport> {
    let mut tournaments = 0;
    let mut found = Vec::new();
    generate(&GenConfig::new(n, ClassSpec::Tournament, TopRule::Exact), |_, g| {
        tournaments += 1;
        let c = canon(g).code;
        let conv = g.converse().expect("tournaments are directed");
        if canon(&conv).code == c {
            found.push((c, *g));
        }
    })?;
    let mut by_deck: BTreeMap<_, Vec<CanonCode>> = BTreeMap::new();
    for (c, g) in &found {
        by_deck.entry(reduced_deck(g)?).or_default().push(*c);
    }
    let mut collisions: Vec<Vec<CanonCode>> = by_deck
        .into_values()
        .filter(|v| v.len() >= 2)
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
    collisions.sort_unstable();
    let mut self_converse: Vec<CanonCode> = found.into_iter().map(|(c, _)| c).collect();
    self_converse.sort_unstable();
    Ok(SelfConverseReport {
        order: n,
        tournaments,
        self_converse,
        collisions,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FixtureRelation {
    EqualReducedNotFull,
    EqualFull,
}

impl fmt::Display for FixtureRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureRelation::EqualReducedNotFull => "equal_reduced_not_full",
            FixtureRelation::EqualFull => "equal_full",
        })
    }
}

impl FromStr for FixtureRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal_reduced_not_full" => Ok(FixtureRelation::EqualReducedNotFull),
            "equal_full" => Ok(FixtureRelation::EqualFull),
            _ => Err(Error::Malformed(format!("unknown fixture relation {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub order: usize,
    pub members: Vec<LabelledGraph>,
    pub relation: FixtureRelation,
}

impl Fixture {
    /// Builds a fixture from explicit 0/1 rows, one string per row.
    pub fn from_rows(name: &str, relation: FixtureRelation, members: &[&[&str]]) -> Result<Self> {
        let mut gs = Vec::with_capacity(members.len());
        for rows in members {
            let bytes: Vec<Vec<u8>> = rows
                .iter()
                .map(|r| r.bytes().map(|b| b.wrapping_sub(b'0')).collect())
                .collect();
            let refs: Vec<&[u8]> = bytes.iter().map(Vec::as_slice).collect();
            gs.push(LabelledGraph::from_matrix(true, &refs)?);
        }
        Self::new(name, relation, gs)
    }

    pub fn new(name: &str, relation: FixtureRelation, members: Vec<LabelledGraph>) -> Result<Self> {
        let order = members.first().map(LabelledGraph::order).ok_or_else(|| {
            Error::Malformed(format!("fixture {name} has no members"))
        })?;
        if let Some(g) = members.iter().find(|g| g.order() != order) {
            return Err(Error::MixedOrders(order, g.order()));
        }
        if members.iter().any(|g| !g.is_directed()) {
            return Err(Error::NotDirected);
        }
        Ok(Fixture {
            name: name.to_string(),
            order,
            members,
            relation,
        })
    }
}

const TOURNAMENT_PAIRS: &str = include_str!("../data/tournament_pairs.txt");

/// Parses `name relation code code...` lines; `#` starts a comment.
pub fn parse_fixtures(text: &str) -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next().expect("non-empty line");
        let relation: FixtureRelation = parts
            .next()
            .ok_or_else(|| Error::Malformed(format!("line {}: missing relation", lineno + 1)))?
            .parse()?;
        let members = parts
            .map(decode_digraph6)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Malformed(format!("line {}: {e}", lineno + 1)))?;
        out.push(Fixture::new(name, relation, members)?);
    }
    Ok(out)
}

/// The three 7-vertex tournament pairs with equal reduced decks.
pub fn tournament_fixtures() -> Vec<Fixture> {
    parse_fixtures(TOURNAMENT_PAIRS).expect("embedded fixture data parses")
}

/// Cards whose multiplicities differ between two full decks.
fn deck_diff(a: &FullDeck, b: &FullDeck) -> Vec<String> {
    let mut counts: BTreeMap<CanonCode, (usize, usize)> = BTreeMap::new();
    for c in &a.0 {
        counts.entry(*c).or_default().0 += 1;
    }
    for c in &b.0 {
        counts.entry(*c).or_default().1 += 1;
    }
    counts
        .into_iter()
        .filter(|(_, (x, y))| x != y)
        .map(|(c, (x, y))| format!("card {}: {x} vs {y}", encode(&c.graph())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureReport {
    pub name: String,
    pub order: usize,
    pub members: usize,
}

/// Checks that members are pairwise non-isomorphic and that their decks
/// relate as the fixture states. On failure the error names each violated
/// condition and lists the differing cards.
pub fn verify_fixture(f: &Fixture) -> Result<FixtureReport> {
    let mut problems = Vec::new();
    for i in 0..f.members.len() {
        for j in i + 1..f.members.len() {
            if isomorphic(&f.members[i], &f.members[j]) {
                problems.push(format!("members {i} and {j} are isomorphic"));
            }
        }
    }
    let decks = f.members.iter().map(full_deck).collect::<Result<Vec<_>>>()?;
    for (j, d) in decks.iter().enumerate().skip(1) {
        let reduced_eq = decks[0].reduced() == d.reduced();
        let full_eq = decks[0] == *d;
        let (want_reduced, want_full) = match f.relation {
            FixtureRelation::EqualReducedNotFull => (true, false),
            FixtureRelation::EqualFull => (true, true),
        };
        if reduced_eq != want_reduced || full_eq != want_full {
            problems.push(format!(
                "members 0 and {j}: reduced decks {}, full decks {}; differing cards: [{}]",
                if reduced_eq { "equal" } else { "differ" },
                if full_eq { "equal" } else { "differ" },
                deck_diff(&decks[0], d).join("; ")
            ));
        }
    }
    if problems.is_empty() {
        Ok(FixtureReport {
            name: f.name.clone(),
            order: f.order,
            members: f.members.len(),
        })
    } else {
        Err(Error::FixtureFailed {
            name: f.name.clone(),
            detail: problems.join(" | "),
        })
    }
}

/// Member code sets of each fixture, for comparison with search output.
pub fn fixture_member_sets(fixtures: &[Fixture]) -> Vec<Vec<CanonCode>> {
    let mut out: Vec<Vec<CanonCode>> = fixtures
        .iter()
        .map(|f| {
            let mut codes: Vec<CanonCode> = f.members.iter().map(|g| canon(g).code).collect();
            codes.sort_unstable();
            codes
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
