//! Sharded search. Each residue class of a [`Split`](crate::genx::Split) is an
//! independent job; with the `parallel` feature the jobs run on the rayon
//! pool, otherwise one after another.

use crate::deck::{merge_groups, search_with_limit, DeckMode, SearchOutcome};
use crate::error::{Error, Result};
use crate::genx::{GenConfig, GenStats};

#[cfg(feature = "parallel")]
pub use rayon::prelude;

#[cfg(not(feature = "parallel"))]
pub mod prelude {
    pub use std::iter::Iterator as ParallelIterator;

    pub trait IntoParallelIterator: Sized {
        type Item;
        type Iter: Iterator<Item = Self::Item>;

        fn into_par_iter(self) -> Self::Iter;
    }

    impl<I> IntoParallelIterator for I
    where
        I: IntoIterator,
    {
        type Item = I::Item;
        type Iter = I::IntoIter;

        fn into_par_iter(self) -> Self::Iter {
            self.into_iter()
        }
    }
}

use prelude::*;

/// A split depth that leaves enough subtrees to balance `shards` jobs.
pub fn default_depth(n: usize) -> usize {
    match n {
        0..=2 => 1,
        3..=6 => n - 2,
        _ => n - 3,
    }
}

fn shard_configs(cfg: &GenConfig, shards: usize, depth: usize) -> Result<Vec<GenConfig>> {
    if cfg.split.is_some() {
        return Err(Error::InvalidConfig("configuration is already a shard".into()));
    }
    if shards == 0 {
        return Err(Error::InvalidConfig("need at least one shard".into()));
    }
    if cfg.target_n < 2 || shards == 1 {
        return Ok(vec![*cfg]);
    }
    let cfgs: Vec<GenConfig> = (0..shards).map(|r| cfg.with_split(r, shards, depth)).collect();
    cfgs[0].validate()?;
    Ok(cfgs)
}

fn combine(outcomes: Vec<SearchOutcome>) -> SearchOutcome {
    let mut stats = GenStats::default();
    let mut groups = Vec::new();
    for o in outcomes {
        stats.outputs += o.stats.outputs;
        stats.batches += o.stats.batches;
        stats.max_batch = stats.max_batch.max(o.stats.max_batch);
        groups.extend(o.groups);
    }
    SearchOutcome {
        groups: merge_groups(groups),
        stats,
    }
}

/// Runs `shards` residue classes and merges their groups. The result equals
/// that of an unsplit [`search`](crate::deck::search).
pub fn search_sharded(
    cfg: &GenConfig,
    mode: DeckMode,
    shards: usize,
    depth: usize,
    max_batch: Option<usize>,
) -> Result<SearchOutcome> {
    let outcomes = shard_configs(cfg, shards, depth)?
        .into_par_iter()
        .map(|c| search_with_limit(&c, mode, max_batch))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(outcomes))
}

/// Same shards, always on the calling thread.
pub fn search_sharded_sequential(
    cfg: &GenConfig,
    mode: DeckMode,
    shards: usize,
    depth: usize,
    max_batch: Option<usize>,
) -> Result<SearchOutcome> {
    let outcomes = shard_configs(cfg, shards, depth)?
        .into_iter()
        .map(|c| search_with_limit(&c, mode, max_batch))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(outcomes))
}

/// Total visitor calls of a sharded run. Class counts are not additive
/// across shards, so only outputs are summed.
pub fn sharded_outputs(cfg: &GenConfig, shards: usize, depth: usize) -> Result<u64> {
    let counts = shard_configs(cfg, shards, depth)?
        .into_par_iter()
        .map(|c| crate::genx::generate(&c, |_, _| {}).map(|s| s.outputs))
        .collect::<Result<Vec<_>>>()?;
    Ok(counts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::ClassSpec;
    use crate::deck::search;
    use crate::genx::TopRule;

    #[test]
    fn sharded_matches_unsplit() {
        let cfg = GenConfig::new(6, ClassSpec::Tournament, TopRule::Recon);
        let whole = search(&cfg, DeckMode::Reduced).unwrap();
        for shards in [1, 2, 5] {
            let a = search_sharded(&cfg, DeckMode::Reduced, shards, 3, None).unwrap();
            let b = search_sharded_sequential(&cfg, DeckMode::Reduced, shards, 3, None).unwrap();
            assert_eq!(a.groups, whole.groups);
            assert_eq!(b.groups, whole.groups);
            assert_eq!(a.stats.outputs, whole.stats.outputs);
        }
    }

    #[test]
    fn outputs_add_up() {
        let cfg = GenConfig::new(7, ClassSpec::All, TopRule::Recon);
        let whole = crate::genx::generate(&cfg, |_, _| {}).unwrap().outputs;
        assert_eq!(sharded_outputs(&cfg, 4, default_depth(7)).unwrap(), whole);
    }

    #[test]
    fn bad_shards() {
        let cfg = GenConfig::new(6, ClassSpec::All, TopRule::Recon);
        assert!(search_sharded(&cfg, DeckMode::Full, 0, 3, None).is_err());
        assert!(search_sharded(&cfg, DeckMode::Full, 2, 6, None).is_err());
        assert!(search_sharded(&cfg.with_split(0, 2, 3), DeckMode::Full, 2, 3, None).is_err());
    }
}
