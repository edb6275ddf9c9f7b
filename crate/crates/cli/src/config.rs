//! Campaign configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use d4ext::bigarith::PRECISION_CAP_BITS;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Default upper limit for `a`.
pub const DEFAULT_A_MAX: u64 = 655_000_000_000;

/// Environment variable naming the default checkpoint directory.
pub const CHECKPOINT_DIR_ENV: &str = "D4EXT_CHECKPOINT_DIR";

/// File name used inside the checkpoint directory.
pub const CHECKPOINT_FILE: &str = "d4ext-checkpoint.jsonl";

/// Which `k` of each family are visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum KSample {
    /// Every in-scope `k` up to the `a_max` limit.
    All,
    /// Every `step`-th in-scope `k`, starting with the first.
    Stride { step: u64 },
    /// `count` distinct in-scope `k`, drawn with a seeded generator.
    Random { count: u64, seed: u64 },
}

impl fmt::Display for KSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KSample::All => f.write_str("all"),
            KSample::Stride { step } => write!(f, "stride:{step}"),
            KSample::Random { count, seed } => write!(f, "random:{count}:{seed}"),
        }
    }
}

impl FromStr for KSample {
    type Err = CliError;

    /// `all`, `stride:N` or `random:N:SEED`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::Usage(format!("bad k sample '{s}', expected all, stride:N or random:N:SEED"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            ["all"] => Ok(KSample::All),
            ["stride", n] => {
                let step = num(n)?;
                if step == 0 {
                    return Err(bad());
                }
                Ok(KSample::Stride { step })
            }
            ["random", n, seed] => Ok(KSample::Random {
                count: num(n)?,
                seed: num(seed)?,
            }),
            _ => Err(bad()),
        }
    }
}

/// A family key `(m, t)`, written `M:T` on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FamilyKey {
    pub m: u32,
    pub t: u32,
}

impl FromStr for FamilyKey {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, t) = s
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("bad family '{s}', expected M:T")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("bad family '{s}', expected M:T")))
        };
        Ok(FamilyKey { m: parse(m)?, t: parse(t)? })
    }
}

impl fmt::Display for FamilyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.m, self.t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub a_max: u64,
    /// `None` selects every family.
    pub family_filter: Option<Vec<FamilyKey>>,
    pub k_sample: KSample,
    pub precision_cap_bits: u32,
    pub worker_count: usize,
    pub checkpoint_path: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            a_max: DEFAULT_A_MAX,
            family_filter: None,
            k_sample: KSample::All,
            precision_cap_bits: PRECISION_CAP_BITS,
            worker_count: default_workers(),
            checkpoint_path: default_checkpoint_path(),
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: CampaignConfig =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.a_max == 0 {
            return Err(CliError::Usage("a_max must be positive".into()));
        }
        if self.precision_cap_bits == 0 {
            return Err(CliError::Usage("precision_cap_bits must be positive".into()));
        }
        if self.worker_count == 0 {
            return Err(CliError::Usage("worker_count must be positive".into()));
        }
        Ok(())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// `$D4EXT_CHECKPOINT_DIR/d4ext-checkpoint.jsonl`, or the file name alone.
pub fn default_checkpoint_path() -> PathBuf {
    match std::env::var_os(CHECKPOINT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(CHECKPOINT_FILE),
        _ => PathBuf::from(CHECKPOINT_FILE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_sample_round_trip() {
        for s in ["all", "stride:4", "random:3:17"] {
            assert_eq!(s.parse::<KSample>().unwrap().to_string(), s);
        }
        for s in ["", "stride:0", "stride", "random:3", "every:2"] {
            assert!(s.parse::<KSample>().is_err(), "{s}");
        }
    }

    #[test]
    fn config_json_mirrors_struct() {
        let cfg = CampaignConfig::from_json(
            r#"{"a_max": 1000000, "family_filter": [{"m": 1, "t": 0}],
                "k_sample": {"mode": "random", "count": 2, "seed": 5},
                "worker_count": 2, "checkpoint_path": "x.jsonl"}"#,
        )
        .unwrap();
        assert_eq!(cfg.a_max, 1_000_000);
        assert_eq!(cfg.family_filter, Some(vec![FamilyKey { m: 1, t: 0 }]));
        assert_eq!(cfg.k_sample, KSample::Random { count: 2, seed: 5 });
        assert_eq!(cfg.precision_cap_bits, PRECISION_CAP_BITS);
        let back: CampaignConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(CampaignConfig::from_json(r#"{"a_max": 0}"#).is_err());
        assert!(CampaignConfig::from_json(r#"{"amax": 5}"#).is_err());
    }

    #[test]
    fn defaults_match_scope() {
        let cfg = CampaignConfig::default();
        assert_eq!(cfg.a_max, 655_000_000_000);
        assert_eq!(cfg.k_sample, KSample::All);
        assert!(cfg.family_filter.is_none());
    }
}
