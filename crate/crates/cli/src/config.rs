// Copyright 2026 The urlpara Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use urlpara::corpus::{PairStrategy, VoteThresholds};
use urlpara::embeddings::FactorConfig;
use urlpara::identify::LogisticConfig;
use urlpara::phrasal::{AlignConfig, LmConfig, DEFAULT_MAX_PHRASE_LEN};

use crate::error::{CliError, CliResult};

/// Everything a pipeline run depends on. Loaded from one JSON file; any field
/// may be omitted and command-line flags take precedence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Seeds the random baseline and table sampling.
    pub seed: u64,
    /// Worker threads for pair scoring and alignment; `None` uses all cores.
    pub jobs: Option<usize>,
    pub paths: Paths,
    /// Accounts whose earliest tweet in a group is taken as the original.
    pub seed_accounts: Vec<String>,
    pub filter: FilterConfig,
    pub pairs: PairsConfig,
    pub votes: VoteThresholds,
    pub logistic: LogisticConfig,
    pub factor: FactorConfig,
    pub align: AlignConfig,
    pub lm: LmConfig,
    pub phrase: PhraseConfig,
    pub rank: RankConfig,
    pub overlap: OverlapConfig,
    pub mine: MineConfig,
    pub annotate: AnnotateConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Word vectors in GloVe text format.
    pub embeddings: Option<PathBuf>,
    /// Fold embedding vocabulary to lowercase on load.
    pub lowercase_embeddings: bool,
    /// `short<TAB>canonical` URL resolution table.
    pub resolver: Option<PathBuf>,
    /// JSONL page metadata for the retweet filter.
    pub pages: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            embeddings: None,
            lowercase_embeddings: true,
            resolver: None,
            pages: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Drop manual retweets and page-title copies, not only automatic retweets.
    pub manual_retweets: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { manual_retweets: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairsConfig {
    pub max_candidates: usize,
    pub strategy: PairStrategy,
}

impl Default for PairsConfig {
    fn default() -> Self {
        PairsConfig {
            max_candidates: 10,
            strategy: PairStrategy::OriginalVsRest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhraseConfig {
    pub max_len: usize,
}

impl Default for PhraseConfig {
    fn default() -> Self {
        PhraseConfig {
            max_len: DEFAULT_MAX_PHRASE_LEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankConfig {
    pub lambda: f64,
    /// Top fractions reported in the Likert table.
    pub fractions: Vec<f64>,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            lambda: 1.0,
            fractions: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverlapConfig {
    pub sample_a: usize,
    pub sample_b: usize,
}

impl Default for OverlapConfig {
    fn default() -> Self {
        OverlapConfig {
            sample_a: 1000,
            sample_b: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MineConfig {
    pub threshold: f64,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig { threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotateConfig {
    pub bind: String,
    pub snapshot_every: usize,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        AnnotateConfig {
            bind: "127.0.0.1:8080".into(),
            snapshot_every: 1000,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 42,
            jobs: None,
            paths: Paths::default(),
            seed_accounts: Vec::new(),
            filter: FilterConfig::default(),
            pairs: PairsConfig::default(),
            votes: VoteThresholds::default(),
            logistic: LogisticConfig::default(),
            factor: FactorConfig::default(),
            align: AlignConfig::default(),
            lm: LmConfig::default(),
            phrase: PhraseConfig::default(),
            rank: RankConfig::default(),
            overlap: OverlapConfig::default(),
            mine: MineConfig::default(),
            annotate: AnnotateConfig::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
    }

    /// Checks value ranges and that every configured path exists.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::validation(format!("config: {m}")));
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        if self.votes.neg_max >= self.votes.pos_min {
            return bad(format!(
                "votes.neg_max {} must be below votes.pos_min {}",
                self.votes.neg_max, self.votes.pos_min
            ));
        }
        if !(0.0..=1.0).contains(&self.mine.threshold) {
            return bad(format!("mine.threshold {} outside [0, 1]", self.mine.threshold));
        }
        if self.pairs.max_candidates == 0 || self.phrase.max_len == 0 {
            return bad("pairs.max_candidates and phrase.max_len must be positive".into());
        }
        if !(self.rank.lambda > 0.0) {
            return bad(format!("rank.lambda {} must be positive", self.rank.lambda));
        }
        if self.lm.order == 0 {
            return bad("lm.order must be at least 1".into());
        }
        if !(self.logistic.l2 >= 0.0) || self.logistic.epochs == 0 {
            return bad("logistic.l2 must be non-negative and logistic.epochs positive".into());
        }
        for p in [&self.paths.embeddings, &self.paths.resolver, &self.paths.pages]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return bad(format!("path {} does not exist", p.display()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let c: Config = serde_json::from_str(r#"{"seed": 7, "logistic": {"l2": 0.5}}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.logistic.l2, 0.5);
        assert_eq!(c.logistic.epochs, LogisticConfig::default().epochs);
        assert_eq!(c.pairs, PairsConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Config>(r#"{"sed": 7}"#).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = Config::default();
        assert!(c.validate().is_ok());
        c.votes = VoteThresholds { pos_min: 3, neg_max: 3 };
        assert!(c.validate().is_err());
        let c = Config {
            paths: Paths {
                pages: Some("/definitely/not/here.jsonl".into()),
                ..Paths::default()
            },
            ..Config::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_round_trips() {
        let c = Config::default();
        let back: Config = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
