//! Collision report lines:
//! `<mode> n=<n> class=<spec> members=<c1>,<c2>[,...] parents=<p1>[,...]`,
//! with codes in graph6 or digraph6 and each list sorted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use recon_core::codec::encode;
use recon_core::deck::{CollisionGroup, DeckMode};
use recon_core::ClassSpec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("reports come from different runs: `{0}` vs `{1}`")]
    MixedRuns(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReportLine {
    pub mode: DeckMode,
    pub n: usize,
    pub class: String,
    pub members: Vec<String>,
    pub parents: Vec<String>,
}

impl ReportLine {
    pub fn from_group(group: &CollisionGroup, class: ClassSpec) -> Self {
        let enc = |cs: &[recon_core::CanonCode]| {
            let mut v: Vec<String> = cs.iter().map(|c| encode(&c.graph())).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        ReportLine {
            mode: group.deck_mode,
            n: group.n,
            class: class.to_string(),
            members: enc(&group.members),
            parents: enc(&group.parents),
        }
    }

    /// Mode, order and class: the fields shared by all lines of one run.
    pub fn run_key(&self) -> String {
        format!("{} n={} class={}", self.mode, self.n, self.class)
    }
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} members={} parents={}",
            self.run_key(),
            self.members.join(","),
            self.parents.join(",")
        )
    }
}

impl FromStr for ReportLine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split_whitespace();
        let mode: DeckMode = parts
            .next()
            .ok_or("empty line")?
            .parse()
            .map_err(|e: recon_core::Error| e.to_string())?;
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| format!("expected key=value, got `{p}`"))?;
            if fields.insert(k, v).is_some() {
                return Err(format!("duplicate field `{k}`"));
            }
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing field `{k}`"));
        let list = |v: &str| -> Vec<String> {
            let mut out: Vec<String> = v.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let n = get("n")?.parse().map_err(|_| "bad order".to_string())?;
        let class = get("class")?.to_string();
        class.parse::<ClassSpec>().map_err(|e| e.to_string())?;
        let members = list(get("members")?);
        if members.len() < 2 {
            return Err("a group needs at least two members".into());
        }
        for m in &members {
            recon_core::codec::decode(m).map_err(|e| format!("member `{m}`: {e}"))?;
        }
        Ok(ReportLine {
            mode,
            n,
            class,
            members,
            parents: list(get("parents")?),
        })
    }
}

/// Report lines for a group list, in canonical order.
pub fn report_lines(groups: &[CollisionGroup], class: ClassSpec) -> Vec<ReportLine> {
    let mut v: Vec<ReportLine> = groups.iter().map(|g| ReportLine::from_group(g, class)).collect();
    v.sort_unstable();
    v
}

/// Parses a report, skipping blank lines and `#` comments.
pub fn parse_report(text: &str) -> Result<Vec<ReportLine>, ReportError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| l.parse().map_err(|msg| ReportError::Parse { line: i + 1, msg }))
        .collect()
}

/// Unions reports from shards of one run: equal member sets are combined
/// and their parents united. Idempotent and order-independent.
pub fn merge_reports<I: IntoIterator<Item = Vec<ReportLine>>>(reports: I) -> Result<Vec<ReportLine>, ReportError> {
    let mut run: Option<String> = None;
    let mut map: BTreeMap<Vec<String>, ReportLine> = BTreeMap::new();
    for line in reports.into_iter().flatten() {
        let key = line.run_key();
        match &run {
            Some(r) if *r != key => return Err(ReportError::MixedRuns(r.clone(), key)),
            Some(_) => {}
            None => run = Some(key),
        }
        match map.get_mut(&line.members) {
            Some(existing) => {
                existing.parents.extend(line.parents);
                existing.parents.sort_unstable();
                existing.parents.dedup();
            }
            None => {
                map.insert(line.members.clone(), line);
            }
        }
    }
    let mut out: Vec<ReportLine> = map.into_values().collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(members: &[&str], parents: &[&str]) -> ReportLine {
        ReportLine {
            mode: DeckMode::Full,
            n: 3,
            class: "tournament".into(),
            members: members.iter().map(|s| s.to_string()).collect(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn round_trip() {
        let l = line(&["&BP_", "&BW_"], &["&AO"]);
        let s = l.to_string();
        assert_eq!(s, "full n=3 class=tournament members=&BP_,&BW_ parents=&AO");
        assert_eq!(s.parse::<ReportLine>().unwrap(), l);
    }

    #[test]
    fn merge_unions_parents() {
        let a = vec![line(&["&BP_", "&BW_"], &["&AO"])];
        let b = vec![line(&["&BP_", "&BW_"], &["&AG"])];
        let m = merge_reports([a.clone(), b]).unwrap();
        assert_eq!(m[0].parents, vec!["&AG", "&AO"]);
        assert_eq!(merge_reports([a.clone(), a.clone()]).unwrap(), a);
        assert!(merge_reports([vec![], vec![]]).unwrap().is_empty());
    }

    #[test]
    fn mixed_runs_rejected() {
        let a = vec![line(&["&BP_", "&BW_"], &[])];
        let mut b = a.clone();
        b[0].n = 4;
        assert!(matches!(merge_reports([a, b]), Err(ReportError::MixedRuns(..))));
    }

    #[test]
    fn bad_lines() {
        assert!(parse_report("full n=3 class=tournament members=&BP_ parents=").is_err());
        assert!(parse_report("sideways n=3 class=tournament members=&BP_,&BW_ parents=").is_err());
        let err = parse_report("\n# c\nfull n=3 members=&BP_,&BW_ parents=").unwrap_err();
        assert_eq!(err, ReportError::Parse { line: 3, msg: "missing field `class`".into() });
    }
}
