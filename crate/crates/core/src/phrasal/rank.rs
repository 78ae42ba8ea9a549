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

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lm::{NgramLm, BOS, EOS};
use super::table::PhraseEntry;
use crate::embeddings::{cosine, sentence_vector_sum, EmbeddingTable};
use crate::{Error, Result};

/// Two tokens either side of a phrase occurrence, padded with sentence
/// boundary symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseContext {
    pub left: [String; 2],
    pub right: [String; 2],
}

impl PhraseContext {
    /// Context of `tokens[start..end]`.
    pub fn around<S: AsRef<str>>(tokens: &[S], start: usize, end: usize) -> Self {
        let at = |k: isize, pad: &str| -> String {
            if k >= 0 && (k as usize) < tokens.len() {
                tokens[k as usize].as_ref().to_string()
            } else {
                pad.to_string()
            }
        };
        let (s, e) = (start as isize, end as isize);
        PhraseContext {
            left: [at(s - 2, BOS), at(s - 1, BOS)],
            right: [at(e, EOS), at(e + 1, EOS)],
        }
    }

    /// The window `w-2 w-1 phrase w1 w2`, with repeated boundary padding
    /// collapsed and nothing kept after the first `</s>`.
    pub fn window<S: AsRef<str>>(&self, phrase: &[S]) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for w in &self.left {
            if !(w == BOS && out.last().is_some_and(|l| l == BOS)) {
                out.push(w.clone());
            }
        }
        if out.len() == 2 && out[1] == BOS && out[0] != BOS {
            out.remove(0);
        }
        out.extend(phrase.iter().map(|p| p.as_ref().to_string()));
        for w in &self.right {
            out.push(w.clone());
            if w == EOS {
                break;
            }
        }
        out
    }
}

/// Per-token average `log10` probability of the context window with
/// `candidate` in the phrase slot.
pub fn lm_substitution_score<S: AsRef<str>>(lm: &NgramLm, context: &PhraseContext, candidate: &[S]) -> f64 {
    let (sum, n) = lm.sequence_log10(&context.window(candidate));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Cosine between the mean word vectors of the two phrases; OOV words are
/// skipped and an all-OOV side scores 0.
pub fn embedding_phrase_score<S: AsRef<str>>(p: &[S], q: &[S], table: &EmbeddingTable) -> f64 {
    // Scaling a sum to a mean leaves the cosine unchanged.
    cosine(&sentence_vector_sum(p, table), &sentence_vector_sum(q, table))
}

pub const RANK_FEATURE_NAMES: [&str; 6] = [
    "lm",
    "phi_src_given_tgt",
    "phi_tgt_given_src",
    "lex_src_given_tgt",
    "lex_tgt_given_src",
    "embedding",
];

/// The six ranking features of an entry, in [`RANK_FEATURE_NAMES`] order.
pub fn rank_features(entry: &PhraseEntry, lm_score: f64, embedding_score: f64) -> [f64; 6] {
    [
        lm_score,
        entry.phi_src_given_tgt,
        entry.phi_tgt_given_src,
        entry.lex_src_given_tgt,
        entry.lex_tgt_given_src,
        embedding_score,
    ]
}

/// Linear combiner over raw features (standardization already folded into
/// the weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    /// The ridge penalty actually used, when the requested one left the
    /// system singular.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflated_lambda: Option<f64>,
    pub feature_mean: Vec<f64>,
    pub feature_std: Vec<f64>,
}

/// Ridge regression of `targets` on z-scored `features`, solved through the
/// normal equations. The intercept is not penalized.
pub fn train_rank(features: &[Vec<f64>], targets: &[f64], lambda: f64) -> Result<RankModel> {
    let n = features.len();
    if n != targets.len() {
        return Err(Error::argument(format!("{n} feature rows but {} targets", targets.len())));
    }
    let d = features.first().map_or(0, Vec::len);
    if n < 6 || n < d {
        return Err(Error::argument(format!("need at least max(6, {d}) rated pairs, got {n}")));
    }
    if features.iter().any(|r| r.len() != d || r.iter().any(|x| !x.is_finite()))
        || targets.iter().any(|y| !y.is_finite())
    {
        return Err(Error::argument("ragged or non-finite ranking data"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::argument(format!("lambda must be non-negative, got {lambda}")));
    }
    let nf = n as f64;
    let mean: Vec<f64> = (0..d).map(|j| features.iter().map(|r| r[j]).sum::<f64>() / nf).collect();
    let std: Vec<f64> = (0..d)
        .map(|j| {
            let v = features.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / nf;
            if v.sqrt() > 1e-12 {
                v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let y_mean = targets.iter().sum::<f64>() / nf;
    let z = DMatrix::from_fn(n, d, |i, j| (features[i][j] - mean[j]) / std[j]);
    let yc = DVector::from_iterator(n, targets.iter().map(|y| y - y_mean));
    let gram = z.transpose() * &z;
    let rhs = z.transpose() * yc;

    let solve = |lam: f64| -> Option<DVector<f64>> {
        let a = &gram + DMatrix::identity(d, d) * lam;
        let beta = a.cholesky()?.solve(&rhs);
        beta.iter().all(|b| b.is_finite()).then_some(beta)
    };
    let (beta, inflated) = match solve(lambda) {
        Some(b) => (b, None),
        None => {
            let mut lam = lambda.max(1e-8);
            loop {
                lam *= 10.0;
                if let Some(b) = solve(lam) {
                    log::warn!("ranking system singular at lambda {lambda}; solved with {lam}");
                    break (b, Some(lam));
                }
                if lam > 1e12 {
                    return Err(Error::Numeric {
                        sweep: 0,
                        message: "ridge system stays singular".into(),
                    });
                }
            }
        }
    };
    let weights: Vec<f64> = (0..d).map(|j| beta[j] / std[j]).collect();
    let intercept = y_mean - weights.iter().zip(&mean).map(|(w, m)| w * m).sum::<f64>();
    Ok(RankModel {
        weights,
        intercept,
        lambda,
        inflated_lambda: inflated,
        feature_mean: mean,
        feature_std: std,
    })
}

pub fn rank_score(model: &RankModel, features: &[f64]) -> Result<f64> {
    if features.len() != model.weights.len() {
        return Err(Error::argument(format!(
            "{} features for a {}-feature model",
            features.len(),
            model.weights.len()
        )));
    }
    Ok(model.intercept + model.weights.iter().zip(features).map(|(w, x)| w * x).sum::<f64>())
}

/// Human rating of a phrase pair on the 1-5 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub source: String,
    pub target: String,
    pub score: f64,
}

/// Reads `p \t p' \t score` rows.
pub fn read_ratings<R: BufRead>(reader: R) -> Result<Vec<Rating>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::format(lineno, format!("expected 3 columns, found {}", f.len())));
        }
        let score: f64 = f[2]
            .trim()
            .parse()
            .map_err(|_| Error::format(lineno, format!("bad score {:?}", f[2])))?;
        if !(1.0..=5.0).contains(&score) {
            return Err(Error::format(lineno, format!("score {score} outside 1-5")));
        }
        out.push(Rating {
            source: f[0].to_string(),
            target: f[1].to_string(),
            score,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LikertRow {
    pub fraction: f64,
    /// Rated entries inside the top fraction.
    pub rated: usize,
    /// Percentage of those rated 5; `None` if none are rated.
    pub percent_top: Option<f64>,
}

/// For each top fraction of `ranked` (best first), the percentage of rated
/// entries in that prefix whose rating is 5.
pub fn evaluate_likert(ranked: &[(String, String)], ratings: &[Rating], fractions: &[f64]) -> Result<Vec<LikertRow>> {
    if ratings.is_empty() {
        return Err(Error::argument("no ratings to evaluate"));
    }
    let by_pair: HashMap<(&str, &str), f64> = ratings
        .iter()
        .map(|r| ((r.source.as_str(), r.target.as_str()), r.score))
        .collect();
    fractions
        .iter()
        .map(|&f| {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::argument(format!("fraction {f} outside (0, 1]")));
            }
            let k = ((f * ranked.len() as f64).ceil() as usize).min(ranked.len());
            let scores: Vec<f64> = ranked[..k]
                .iter()
                .filter_map(|(s, t)| by_pair.get(&(s.as_str(), t.as_str())).copied())
                .collect();
            let top = scores.iter().filter(|&&s| s >= 5.0).count();
            Ok(LikertRow {
                fraction: f,
                rated: scores.len(),
                percent_top: (!scores.is_empty()).then(|| 100.0 * top as f64 / scores.len() as f64),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub sample_a: usize,
    pub sample_b: usize,
    /// Percentage of the pooled sample found in table A.
    pub in_a: f64,
    pub in_b: f64,
}

fn fold(p: &(String, String)) -> (String, String) {
    (p.0.to_lowercase(), p.1.to_lowercase())
}

/// Samples up to `n_a` entries of `a` and `n_b` of `b` (seeded), pools the
/// distinct ones, and reports how much of the pool each table contains.
/// Entries match case-insensitively in either direction.
pub fn table_overlap(
    a: &[(String, String)],
    b: &[(String, String)],
    n_a: usize,
    n_b: usize,
    seed: u64,
) -> Result<Coverage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |t: &[(String, String)], n: usize, name: &str| -> Vec<(String, String)> {
        if n > t.len() {
            log::warn!("sample of {n} capped at the {} entries of table {name}", t.len());
        }
        let k = n.min(t.len());
        rand::seq::index::sample(&mut rng, t.len(), k)
            .into_iter()
            .map(|i| fold(&t[i]))
            .collect()
    };
    let sa = draw(a, n_a, "A");
    let sb = draw(b, n_b, "B");
    let set = |t: &[(String, String)]| -> HashSet<(String, String)> { t.iter().map(fold).collect() };
    let (set_a, set_b) = (set(a), set(b));
    let mut seen = HashSet::new();
    let pool: Vec<(String, String)> = sa
        .iter()
        .chain(&sb)
        .filter(|p| seen.insert(canonical(p)))
        .cloned()
        .collect();
    if pool.is_empty() {
        return Err(Error::argument("both samples are empty"));
    }
    let contains = |s: &HashSet<(String, String)>, p: &(String, String)| {
        s.contains(p) || s.contains(&(p.1.clone(), p.0.clone()))
    };
    let pct = |s: &HashSet<(String, String)>| 100.0 * pool.iter().filter(|p| contains(s, p)).count() as f64 / pool.len() as f64;
    Ok(Coverage {
        sample_a: sa.len(),
        sample_b: sb.len(),
        in_a: pct(&set_a),
        in_b: pct(&set_b),
    })
}

fn canonical(p: &(String, String)) -> (String, String) {
    if p.0 <= p.1 {
        p.clone()
    } else {
        (p.1.clone(), p.0.clone())
    }
}

/// Writes `p \t p' \t w-2 w-1 \t w1 w2` rows.
pub fn write_contexts_tsv<W: Write>(contexts: &BTreeMap<(String, String), PhraseContext>, mut w: W) -> Result<()> {
    for ((s, t), c) in contexts {
        writeln!(w, "{s}\t{t}\t{} {}\t{} {}", c.left[0], c.left[1], c.right[0], c.right[1])?;
    }
    Ok(())
}

pub fn read_contexts_tsv<R: BufRead>(reader: R) -> Result<BTreeMap<(String, String), PhraseContext>> {
    let mut out = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(Error::format(lineno, format!("expected 4 columns, found {}", f.len())));
        }
        let two = |s: &str| -> Result<[String; 2]> {
            let w: Vec<&str> = s.split(' ').collect();
            match w.as_slice() {
                [a, b] if !a.is_empty() && !b.is_empty() => Ok([a.to_string(), b.to_string()]),
                _ => Err(Error::format(lineno, format!("context {s:?} is not two tokens"))),
            }
        };
        out.insert(
            (f[0].to_string(), f[1].to_string()),
            PhraseContext {
                left: two(f[2])?,
                right: two(f[3])?,
            },
        );
    }
    Ok(out)
}
