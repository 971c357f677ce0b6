//! Argument definitions and command implementations.

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use recon_core::codec::encode;
use recon_core::deck::{check_homogeneity, search_with_limit, DeckMode};
use recon_core::digraphs::{fixture_member_sets, self_converse_scan, tournament_fixtures, verify_fixture};
use recon_core::genx::{count_overhead, generate, GenConfig, TopRule};
use recon_core::oracle::{cross_check, poset_census};
use recon_core::par::{default_depth, search_sharded};
use recon_core::ClassSpec;
use thiserror::Error;

use crate::manifest::RunManifest;
use crate::report::{merge_reports, parse_report, report_lines, ReportError};

/// Environment variable capping the children of one parent batch.
pub const MAX_BATCH_ENV: &str = "RECON_MAX_BATCH";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Core(#[from] recon_core::Error),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use recon_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(E::Capacity(_) | E::InvalidConfig(_) | E::ClassMismatch { .. } | E::Refused(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "recon", version, about = "Isomorph-free generation and deck collision search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// One code per isomorphism class, graph6 or digraph6.
    Gen {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Report groups of non-isomorphic objects with equal decks.
    Check {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "reduced")]
        deck: DeckMode,
        /// Split the run into this many shards and search them in parallel.
        #[arg(long, conflicts_with = "res")]
        shards: Option<usize>,
    },
    /// Merge shard reports of one run; `-` reads standard input.
    Merge {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Recon-mode outputs against isomorphism classes.
    Overhead {
        #[arg(short)]
        n: usize,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Fixture, oracle and poset checks.
    Verify {
        /// Check the 7-vertex tournament pairs with equal reduced decks.
        #[arg(long)]
        fixtures: bool,
        /// Compare generation and search against brute force at `-n`.
        #[arg(long, requires = "n")]
        oracle: bool,
        /// Poset census on this many points.
        #[arg(long)]
        posets: Option<usize>,
        #[arg(short)]
        n: Option<usize>,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Self-converse tournaments and their reduced-deck collisions.
    Selfconverse {
        #[arg(short)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone, Default)]
#[group(multiple = false)]
pub struct ClassArgs {
    #[arg(long)]
    pub graphs: bool,
    #[arg(long)]
    pub digraphs: bool,
    #[arg(long)]
    pub oriented: bool,
    #[arg(long, alias = "tournaments")]
    pub tournament: bool,
    /// Class name with optional parameters, e.g. `girth5` or `maxdeg=3`.
    #[arg(long)]
    pub class: Option<ClassSpec>,
}

impl ClassArgs {
    pub fn spec(&self) -> ClassSpec {
        if let Some(c) = self.class {
            c
        } else if self.digraphs {
            ClassSpec::Digraph
        } else if self.oriented {
            ClassSpec::Oriented
        } else if self.tournament {
            ClassSpec::Tournament
        } else {
            ClassSpec::All
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(short)]
    pub n: usize,
    #[command(flatten)]
    pub class: ClassArgs,
    /// Residue of this shard.
    #[arg(long, requires = "modulus")]
    pub res: Option<usize>,
    #[arg(long = "mod", id = "modulus", requires = "res")]
    pub modulus: Option<usize>,
    /// Tree level at which subtrees are dealt out; defaults by order.
    #[arg(long, requires = "res")]
    pub depth: Option<usize>,
}

impl RunArgs {
    fn config(&self, top_rule: TopRule) -> Result<GenConfig, CliError> {
        let mut cfg = GenConfig::new(self.n, self.class.spec(), top_rule);
        if let (Some(res), Some(modulus)) = (self.res, self.modulus) {
            cfg = cfg.with_split(res, modulus, self.depth.unwrap_or_else(|| default_depth(self.n)));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn max_batch() -> Result<Option<usize>, CliError> {
    match std::env::var(MAX_BATCH_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{MAX_BATCH_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn warn_small(n: usize, err: &mut dyn Write) -> io::Result<()> {
    if n < 4 {
        writeln!(err, "warning: n={n} is below the orders the reconstruction conjectures cover; groups are expected")?;
    }
    Ok(())
}

/// Runs one command, writing data to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    match cli.command {
        Command::Gen { run } => {
            let cfg = run.config(TopRule::Exact)?;
            let mut manifest = RunManifest::new("gen", &cfg.class.to_string(), cfg.target_n);
            manifest.split = cfg.split;
            let mut io_err = None;
            let stats = generate(&cfg, |_, g| {
                if io_err.is_none() {
                    if let Err(e) = writeln!(out, "{}", encode(g)) {
                        io_err = Some(e);
                    }
                }
            })?;
            if let Some(e) = io_err {
                return Err(e.into());
            }
            manifest.outputs = Some(stats.outputs);
            manifest.classes = Some(stats.outputs);
            manifest.batches = Some(stats.batches);
            manifest.wall_time = start.elapsed();
            write!(err, "{manifest}")?;
        }
        Command::Check { run, deck, shards } => {
            let cfg = run.config(TopRule::Recon)?;
            warn_small(cfg.target_n, err)?;
            let limit = max_batch()?;
            let outcome = match shards {
                Some(k) => search_sharded(&cfg, deck, k, default_depth(cfg.target_n), limit)?,
                None => search_with_limit(&cfg, deck, limit)?,
            };
            for line in report_lines(&outcome.groups, cfg.class) {
                writeln!(out, "{line}")?;
            }
            let mut manifest = RunManifest::new("check", &cfg.class.to_string(), cfg.target_n);
            manifest.deck_mode = Some(deck.to_string());
            manifest.split = cfg.split;
            manifest.outputs = Some(outcome.stats.outputs);
            manifest.batches = Some(outcome.stats.batches);
            manifest.groups = Some(outcome.groups.len() as u64);
            manifest.wall_time = start.elapsed();
            write!(err, "{manifest}")?;
            if cfg.target_n >= 4 {
                for g in &outcome.groups {
                    check_homogeneity(g).map_err(CliError::CheckFailed)?;
                }
            }
        }
        Command::Merge { reports } => {
            let mut parsed = Vec::with_capacity(reports.len());
            for p in &reports {
                let mut text = String::new();
                if p.as_os_str() == "-" {
                    io::stdin().read_to_string(&mut text)?;
                } else {
                    text = std::fs::read_to_string(p)
                        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?;
                }
                parsed.push(parse_report(&text).map_err(|e| match e {
                    ReportError::Parse { line, msg } => CliError::Usage(format!("{}:{line}: {msg}", p.display())),
                    other => other.into(),
                })?);
            }
            for line in merge_reports(parsed)? {
                writeln!(out, "{line}")?;
            }
        }
        Command::Overhead { n, class } => {
            let cfg = GenConfig::new(n, class.spec(), TopRule::Recon);
            cfg.validate()?;
            let o = count_overhead(&cfg)?;
            writeln!(
                out,
                "overhead n={n} class={} outputs={} classes={} ratio={:.4}",
                cfg.class, o.outputs, o.classes, o.ratio
            )?;
            let mut manifest = RunManifest::new("overhead", &cfg.class.to_string(), n);
            manifest.outputs = Some(o.outputs);
            manifest.classes = Some(o.classes);
            manifest.wall_time = start.elapsed();
            write!(err, "{manifest}")?;
        }
        Command::Verify {
            fixtures,
            oracle,
            posets,
            n,
            class,
        } => {
            if !fixtures && !oracle && posets.is_none() {
                return Err(CliError::Usage("verify needs --fixtures, --oracle or --posets".into()));
            }
            let mut failures = Vec::new();
            if fixtures {
                let fs = tournament_fixtures();
                for f in &fs {
                    match verify_fixture(f) {
                        Ok(r) => writeln!(out, "fixture {} n={} members={} ok", r.name, r.order, r.members)?,
                        Err(e) => {
                            writeln!(out, "fixture {} FAILED", f.name)?;
                            failures.push(e.to_string());
                        }
                    }
                }
                let cfg = GenConfig::new(7, ClassSpec::Tournament, TopRule::Recon);
                let found: Vec<_> = search_with_limit(&cfg, DeckMode::Reduced, None)?
                    .groups
                    .into_iter()
                    .map(|g| g.members)
                    .collect();
                let expected = fixture_member_sets(&fs);
                let same = found.len() == expected.len() && expected.iter().all(|e| found.contains(e));
                writeln!(out, "fixtures match search n=7 tournament reduced: {}", if same { "yes" } else { "no" })?;
                if !same {
                    failures.push("fixture pairs differ from the 7-vertex tournament search".into());
                }
            }
            if oracle {
                let n = n.expect("clap enforces -n with --oracle");
                let r = cross_check(n, class.spec())?;
                writeln!(out, "oracle {r}")?;
                if !r.passed() {
                    failures.push(r.first_divergence().unwrap_or_default());
                }
            }
            if let Some(p) = posets {
                let c = poset_census(p)?;
                let sizes = |gs: &[Vec<recon_core::LabelledGraph>]| {
                    gs.iter().map(|g| g.len().to_string()).collect::<Vec<_>>().join(",")
                };
                writeln!(
                    out,
                    "posets n={p} classes={} full_groups=[{}] reduced_groups=[{}]",
                    c.class_count,
                    sizes(&c.full_groups),
                    sizes(&c.reduced_groups)
                )?;
            }
            if !failures.is_empty() {
                return Err(CliError::CheckFailed(failures.join("; ")));
            }
        }
        Command::Selfconverse { n } => {
            let r = self_converse_scan(n)?;
            writeln!(
                out,
                "selfconverse n={n} tournaments={} self_converse={} collisions={}",
                r.tournaments,
                r.self_converse.len(),
                r.collisions.len()
            )?;
            for group in &r.collisions {
                let mut codes: Vec<String> = group.iter().map(|c| encode(&c.graph())).collect();
                codes.sort_unstable();
                writeln!(out, "collision members={}", codes.join(","))?;
            }
        }
    }
    Ok(())
}
