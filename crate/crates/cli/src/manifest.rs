//! Run summary written to standard error as `key=value` lines.

use std::fmt;
use std::time::Duration;

use recon_core::genx::Split;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub class: String,
    pub n: usize,
    pub deck_mode: Option<String>,
    pub split: Option<Split>,
    pub outputs: Option<u64>,
    pub classes: Option<u64>,
    pub batches: Option<u64>,
    pub groups: Option<u64>,
    pub wall_time: Duration,
}

impl RunManifest {
    pub fn new(command: &str, class: &str, n: usize) -> Self {
        RunManifest {
            command: command.to_string(),
            class: class.to_string(),
            n,
            ..Default::default()
        }
    }
}

impl fmt::Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command={}", self.command)?;
        writeln!(f, "class={}", self.class)?;
        writeln!(f, "n={}", self.n)?;
        if let Some(m) = &self.deck_mode {
            writeln!(f, "deck_mode={m}")?;
        }
        match self.split {
            Some(s) => writeln!(f, "split={}/{}/{}", s.res, s.modulus, s.depth)?,
            None => writeln!(f, "split=none")?,
        }
        let counters = [
            ("outputs", self.outputs),
            ("classes", self.classes),
            ("batches", self.batches),
            ("groups", self.groups),
        ];
        for (k, v) in counters {
            if let Some(v) = v {
                writeln!(f, "{k}={v}")?;
            }
        }
        writeln!(f, "wall_time_s={:.3}", self.wall_time.as_secs_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_lines() {
        let mut m = RunManifest::new("check", "graphs", 8);
        m.deck_mode = Some("reduced".into());
        m.split = Some(Split { res: 1, modulus: 4, depth: 5 });
        m.outputs = Some(10);
        m.groups = Some(0);
        let s = m.to_string();
        assert!(s.starts_with("command=check\nclass=graphs\nn=8\ndeck_mode=reduced\nsplit=1/4/5\noutputs=10\ngroups=0\n"));
        assert!(s.lines().all(|l| l.contains('=')));
    }
}
