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

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::SentencePair;
use crate::embeddings::{cosine, pair_features_vec, sentence_vector_sum, EmbeddingTable, FactorModel};
use crate::metrics::{edit_distance_score, overlap_features, OverlapFeatures};
use crate::textnorm::{lemmatize, tokenize, TokenKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeatureMode {
    Random,
    Edit,
    EmbCos,
    Lr18,
    Vec,
    Sim,
    LexVec,
    LexSim,
}

impl FeatureMode {
    pub fn needs_factors(self) -> bool {
        matches!(self, FeatureMode::Vec | FeatureMode::Sim | FeatureMode::LexVec | FeatureMode::LexSim)
    }

    pub fn needs_embeddings(self) -> bool {
        self == FeatureMode::EmbCos
    }

    /// Modes whose score comes from a trained logistic model rather than
    /// directly from a single similarity.
    pub fn is_trained(self) -> bool {
        matches!(
            self,
            FeatureMode::Lr18 | FeatureMode::Vec | FeatureMode::Sim | FeatureMode::LexVec | FeatureMode::LexSim
        )
    }

    /// Feature dimension, given the latent dimension `k` of the factor model.
    pub fn dimension(self, k: usize) -> usize {
        match self {
            FeatureMode::Random => 0,
            FeatureMode::Edit | FeatureMode::EmbCos | FeatureMode::Sim => 1,
            FeatureMode::Lr18 => OverlapFeatures::LEN,
            FeatureMode::Vec => 2 * k,
            FeatureMode::LexVec => OverlapFeatures::LEN + 2 * k,
            FeatureMode::LexSim => OverlapFeatures::LEN + 1,
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FeatureMode::Random => "RANDOM",
            FeatureMode::Edit => "EDIT",
            FeatureMode::EmbCos => "EMB_COS",
            FeatureMode::Lr18 => "LR18",
            FeatureMode::Vec => "VEC",
            FeatureMode::Sim => "SIM",
            FeatureMode::LexVec => "LEX_VEC",
            FeatureMode::LexSim => "LEX_SIM",
        };
        f.write_str(s)
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "RANDOM" => FeatureMode::Random,
            "EDIT" => FeatureMode::Edit,
            "EMB_COS" => FeatureMode::EmbCos,
            "LR18" => FeatureMode::Lr18,
            "VEC" => FeatureMode::Vec,
            "SIM" => FeatureMode::Sim,
            "LEX_VEC" => FeatureMode::LexVec,
            "LEX_SIM" => FeatureMode::LexSim,
            other => return Err(Error::Config(format!("unknown feature mode {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Resources<'a> {
    pub embeddings: Option<&'a EmbeddingTable>,
    pub factors: Option<&'a FactorModel>,
}

#[derive(Debug, Clone, Copy)]
pub struct FeatureSpec<'a> {
    pub mode: FeatureMode,
    pub resources: Resources<'a>,
}

impl<'a> FeatureSpec<'a> {
    pub fn new(mode: FeatureMode, resources: Resources<'a>) -> Result<Self> {
        if mode.needs_factors() && resources.factors.is_none() {
            return Err(Error::Config(format!("{mode} needs a factor model")));
        }
        if mode.needs_embeddings() && resources.embeddings.is_none() {
            return Err(Error::Config(format!("{mode} needs an embedding table")));
        }
        Ok(FeatureSpec { mode, resources })
    }

    pub fn dimension(&self) -> usize {
        self.mode.dimension(self.resources.factors.map_or(0, |f| f.k))
    }

    fn factors(&self) -> Result<&'a FactorModel> {
        self.resources
            .factors
            .ok_or_else(|| Error::Config(format!("{} needs a factor model", self.mode)))
    }

    fn embeddings(&self) -> Result<&'a EmbeddingTable> {
        self.resources
            .embeddings
            .ok_or_else(|| Error::Config(format!("{} needs an embedding table", self.mode)))
    }
}

/// Tokens fed to the factor model: lemmas of words, numbers and hashtags.
pub fn factor_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter_map(|t| match t.kind {
            TokenKind::Word => Some(lemmatize(&t.surface)),
            TokenKind::Number | TokenKind::Hashtag => Some(t.surface),
            _ => None,
        })
        .collect()
}

/// Per-sentence views used by the feature functions.
#[derive(Debug, Clone)]
pub struct PreparedSentence {
    pub text: String,
    pub tokens: Vec<String>,
    pub lemmas: Vec<String>,
    /// Content tokens looked up in word-vector tables (no punctuation or URLs).
    pub lookup: Vec<String>,
    pub factor_tokens: Vec<String>,
}

impl PreparedSentence {
    pub fn new(text: &str) -> Self {
        let toks = tokenize(text);
        let lemmas = toks
            .iter()
            .map(|t| match t.kind {
                TokenKind::Word => lemmatize(&t.surface),
                _ => t.surface.clone(),
            })
            .collect();
        let lookup = toks
            .iter()
            .filter(|t| !matches!(t.kind, TokenKind::Punct | TokenKind::Url))
            .map(|t| t.surface.clone())
            .collect();
        PreparedSentence {
            text: text.to_string(),
            tokens: toks.into_iter().map(|t| t.surface).collect(),
            lemmas,
            lookup,
            factor_tokens: factor_tokens(text),
        }
    }
}

fn overlap(a: &PreparedSentence, b: &PreparedSentence) -> Vec<f64> {
    overlap_features(&a.tokens, &a.lemmas, &b.tokens, &b.lemmas).to_vec()
}

fn assemble_prepared(a: &PreparedSentence, b: &PreparedSentence, spec: &FeatureSpec) -> Result<Vec<f64>> {
    Ok(match spec.mode {
        FeatureMode::Random => Vec::new(),
        FeatureMode::Edit => vec![edit_distance_score(&a.text.to_lowercase(), &b.text.to_lowercase())],
        FeatureMode::EmbCos => {
            let t = spec.embeddings()?;
            vec![cosine(&sentence_vector_sum(&a.lookup, t), &sentence_vector_sum(&b.lookup, t))]
        }
        FeatureMode::Lr18 => overlap(a, b),
        FeatureMode::Sim | FeatureMode::LexSim | FeatureMode::Vec | FeatureMode::LexVec => {
            let f = spec.factors()?;
            let (va, vb) = (f.project_sentence(&a.factor_tokens), f.project_sentence(&b.factor_tokens));
            let latent = if matches!(spec.mode, FeatureMode::Sim | FeatureMode::LexSim) {
                vec![cosine(&va, &vb)]
            } else {
                pair_features_vec(&va, &vb)?
            };
            if matches!(spec.mode, FeatureMode::LexSim | FeatureMode::LexVec) {
                let mut v = overlap(a, b);
                v.extend(latent);
                v
            } else {
                latent
            }
        }
    })
}

/// Feature vector of one pair under `spec`.
pub fn assemble_features(pair: &SentencePair, spec: &FeatureSpec) -> Result<Vec<f64>> {
    assemble_prepared(&PreparedSentence::new(&pair.s1), &PreparedSentence::new(&pair.s2), spec)
}

/// Feature vectors of many pairs, computed in parallel, in input order.
pub fn assemble_matrix(pairs: &[&SentencePair], spec: &FeatureSpec) -> Result<Vec<Vec<f64>>> {
    pairs.par_iter().map(|p| assemble_features(p, spec)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{factorize, FactorConfig, TermSentenceMatrix};

    fn pair(s1: &str, s2: &str) -> SentencePair {
        SentencePair {
            pair_id: "p".into(),
            url: None,
            s1: s1.into(),
            s2: s2.into(),
        }
    }

    fn factor_model() -> FactorModel {
        let corpus = [
            "samsung halts production of galaxy note",
            "samsung stops making the note phones",
            "battery fires force samsung recall",
            "new phone sales fall after recall",
            "production halted over battery fires",
            "galaxy note owners asked to power down",
        ];
        let sentences: Vec<Vec<String>> = corpus.iter().map(|s| factor_tokens(s)).collect();
        let x = TermSentenceMatrix::from_sentences(&sentences).unwrap();
        let cfg = FactorConfig {
            k: 3,
            lambda: 0.5,
            sweeps: 5,
            ..FactorConfig::default()
        };
        factorize(&x, &cfg).unwrap().model
    }

    #[test]
    fn lr18_identical_sentences() {
        let spec = FeatureSpec::new(FeatureMode::Lr18, Resources::default()).unwrap();
        let v = assemble_features(&pair("Samsung halts production now", "Samsung halts production now"), &spec).unwrap();
        assert_eq!(v.len(), 18);
        assert!(v.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn dimensions() {
        let f = factor_model();
        let res = Resources {
            embeddings: None,
            factors: Some(&f),
        };
        let p = pair("samsung halts production", "battery fires force recall");
        for (mode, dim) in [
            (FeatureMode::LexSim, 19),
            (FeatureMode::Sim, 1),
            (FeatureMode::Vec, 6),
            (FeatureMode::LexVec, 24),
        ] {
            let spec = FeatureSpec::new(mode, res).unwrap();
            assert_eq!(spec.dimension(), dim);
            assert_eq!(assemble_features(&p, &spec).unwrap().len(), dim);
        }
    }

    #[test]
    fn sim_of_identical_sentences_is_one() {
        let f = factor_model();
        let spec = FeatureSpec::new(
            FeatureMode::Sim,
            Resources {
                embeddings: None,
                factors: Some(&f),
            },
        )
        .unwrap();
        let v = assemble_features(&pair("samsung halts production", "Samsung halts production!"), &spec).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn missing_resource_is_config_error() {
        assert!(matches!(
            FeatureSpec::new(FeatureMode::Vec, Resources::default()),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            FeatureSpec::new(FeatureMode::EmbCos, Resources::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [
            FeatureMode::Random,
            FeatureMode::Edit,
            FeatureMode::EmbCos,
            FeatureMode::Lr18,
            FeatureMode::Vec,
            FeatureMode::Sim,
            FeatureMode::LexVec,
            FeatureMode::LexSim,
        ] {
            assert_eq!(m.to_string().parse::<FeatureMode>().unwrap(), m);
        }
        assert_eq!("lex-sim".parse::<FeatureMode>().unwrap(), FeatureMode::LexSim);
    }
}
