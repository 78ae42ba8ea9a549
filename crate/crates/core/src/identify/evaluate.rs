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

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{assemble_features, FeatureSpec};
use super::logistic::{predict_prob, LogisticModel};
use crate::corpus::{Dataset, SentencePair};
use crate::metrics::{max_f1, PrPoint};
use crate::{Error, Result};

/// Anything that assigns a paraphrase score to sentence pairs.
pub trait PairScorer: Sync {
    fn name(&self) -> &str;

    /// Scores in input order.
    fn score_all(&self, pairs: &[&SentencePair]) -> Result<Vec<f64>>;
}

/// Seeded uniform scores in `[0, 1)`, drawn in input order.
#[derive(Debug, Clone)]
pub struct RandomScorer {
    pub seed: u64,
}

impl PairScorer for RandomScorer {
    fn name(&self) -> &str {
        "Random"
    }

    fn score_all(&self, pairs: &[&SentencePair]) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok(pairs.iter().map(|_| rng.random::<f64>()).collect())
    }
}

/// Uses a single-valued feature (edit score, embedding cosine, latent cosine)
/// directly as the score.
#[derive(Debug, Clone)]
pub struct RawScorer<'a> {
    pub name: String,
    pub spec: FeatureSpec<'a>,
}

impl<'a> RawScorer<'a> {
    pub fn new(name: impl Into<String>, spec: FeatureSpec<'a>) -> Result<Self> {
        if spec.dimension() != 1 {
            return Err(Error::Config(format!(
                "{} yields {} features; a raw scorer needs exactly one",
                spec.mode,
                spec.dimension()
            )));
        }
        Ok(RawScorer { name: name.into(), spec })
    }
}

impl PairScorer for RawScorer<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn score_all(&self, pairs: &[&SentencePair]) -> Result<Vec<f64>> {
        pairs
            .par_iter()
            .map(|p| Ok(assemble_features(p, &self.spec)?[0]))
            .collect()
    }
}

/// A trained logistic model together with the resources its features need.
#[derive(Debug, Clone)]
pub struct LogisticScorer<'a> {
    pub name: String,
    pub model: &'a LogisticModel,
    pub spec: FeatureSpec<'a>,
}

impl<'a> LogisticScorer<'a> {
    pub fn new(name: impl Into<String>, model: &'a LogisticModel, spec: FeatureSpec<'a>) -> Result<Self> {
        if spec.mode != model.feature_mode {
            return Err(Error::Config(format!(
                "model was trained on {} features, scorer built for {}",
                model.feature_mode, spec.mode
            )));
        }
        if spec.dimension() != model.dimension() {
            return Err(Error::Config(format!(
                "model has {} weights but the resources yield {} features",
                model.dimension(),
                spec.dimension()
            )));
        }
        Ok(LogisticScorer {
            name: name.into(),
            model,
            spec,
        })
    }
}

impl PairScorer for LogisticScorer<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn score_all(&self, pairs: &[&SentencePair]) -> Result<Vec<f64>> {
        pairs
            .par_iter()
            .map(|p| predict_prob(self.model, &assemble_features(p, &self.spec)?))
            .collect()
    }
}

/// Precision, recall and F1 at one fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ThresholdPoint {
    pub fn compute(scores: &[f64], labels: &[bool], threshold: f64) -> Self {
        let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
        for (&s, &y) in scores.iter().zip(labels) {
            match (s >= threshold, y) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                _ => {}
            }
        }
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fneg == 0 { 0.0 } else { tp as f64 / (tp + fneg) as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ThresholdPoint {
            threshold,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub max_f1: PrPoint,
    pub at_half: ThresholdPoint,
    pub pairs: usize,
    pub positives: usize,
    /// Pairs left out because their gold label is debatable.
    pub excluded: usize,
}

/// Scores the binary-labeled pairs of `dataset` and reports max-F1 along with
/// precision and recall at 0.5.
pub fn evaluate(scorer: &dyn PairScorer, dataset: &Dataset) -> Result<EvalReport> {
    let (pairs, labels): (Vec<&SentencePair>, Vec<bool>) = dataset.binary().map(|(p, y)| (&p.pair, y)).unzip();
    let scores = scorer.score_all(&pairs)?;
    let best = max_f1(&scores, &labels)?;
    Ok(EvalReport {
        model: scorer.name().to_string(),
        max_f1: best,
        at_half: ThresholdPoint::compute(&scores, &labels, 0.5),
        pairs: labels.len(),
        positives: labels.iter().filter(|&&y| y).count(),
        excluded: dataset.pairs.len() - labels.len(),
    })
}

pub const REPORT_HEADER: &str = "model\tmax_f1\tprecision\trecall\tthreshold";

/// One row per report under [`REPORT_HEADER`].
pub fn write_report_tsv<W: Write>(reports: &[EvalReport], mut w: W) -> Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{}\t{:.3}\t{:.3}\t{:.3}\t{:.4}",
            r.model, r.max_f1.f1, r.max_f1.precision, r.max_f1.recall, r.max_f1.threshold
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub pair: SentencePair,
    pub probability: f64,
}

/// Pairs scoring at least `threshold`, best first. Equal scores keep input
/// order.
pub fn mine_silver(scorer: &dyn PairScorer, candidates: &[SentencePair], threshold: f64) -> Result<Vec<ScoredPair>> {
    let refs: Vec<&SentencePair> = candidates.iter().collect();
    let scores = scorer.score_all(&refs)?;
    let mut out: Vec<ScoredPair> = candidates
        .iter()
        .zip(scores)
        .filter(|(_, s)| s.is_finite() && *s >= threshold)
        .map(|(p, s)| ScoredPair {
            pair: p.clone(),
            probability: s,
        })
        .collect();
    out.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    Ok(out)
}

/// Fraction of gold paraphrases among pairs scoring at least `threshold`;
/// `None` when nothing clears it.
pub fn silver_precision(scores: &[f64], labels: &[bool], threshold: f64) -> Option<f64> {
    let point = ThresholdPoint::compute(scores, labels, threshold);
    scores.iter().any(|&s| s >= threshold).then_some(point.precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{GoldLabel, LabeledPair, Split};
    use crate::identify::{FeatureMode, Resources};
    use proptest::prelude::*;

    struct Fixed(Vec<f64>);

    impl PairScorer for Fixed {
        fn name(&self) -> &str {
            "fixed"
        }
        fn score_all(&self, pairs: &[&SentencePair]) -> Result<Vec<f64>> {
            Ok(self.0[..pairs.len()].to_vec())
        }
    }

    fn sp(i: usize) -> SentencePair {
        SentencePair {
            pair_id: format!("p{i}"),
            url: None,
            s1: format!("left sentence {i}"),
            s2: format!("right words {}", i * 7),
        }
    }

    fn dataset(labels: &[GoldLabel]) -> Dataset {
        Dataset {
            name: "t".into(),
            split: Split::Test,
            pairs: labels
                .iter()
                .enumerate()
                .map(|(i, &gold)| LabeledPair {
                    pair: sp(i),
                    votes: None,
                    gold,
                })
                .collect(),
        }
    }

    #[test]
    fn oracle_scorer_is_perfect() {
        use GoldLabel::*;
        let d = dataset(&[Paraphrase, NonParaphrase, Debatable, Paraphrase, NonParaphrase]);
        let scores: Vec<f64> = [1.0, 0.0, 1.0, 0.0].to_vec();
        let r = evaluate(&Fixed(scores), &d).unwrap();
        assert_eq!(r.max_f1.f1, 1.0);
        assert_eq!((r.pairs, r.positives, r.excluded), (4, 2, 1));
    }

    #[test]
    fn constant_scorer_matches_closed_form() {
        let n = 1000;
        let pos = 195;
        let labels: Vec<GoldLabel> = (0..n)
            .map(|i| if i < pos { GoldLabel::Paraphrase } else { GoldLabel::NonParaphrase })
            .collect();
        let r = evaluate(&Fixed(vec![0.5; n]), &dataset(&labels)).unwrap();
        let p = pos as f64 / n as f64;
        assert!((r.max_f1.f1 - 2.0 * p / (1.0 + p)).abs() < 1e-12);
    }

    #[test]
    fn raw_scorer_requires_single_feature() {
        let spec = FeatureSpec::new(FeatureMode::Lr18, Resources::default()).unwrap();
        assert!(RawScorer::new("lr", spec).is_err());
        let spec = FeatureSpec::new(FeatureMode::Edit, Resources::default()).unwrap();
        let s = RawScorer::new("edit", spec).unwrap();
        let p = sp(1);
        let q = SentencePair {
            s2: p.s1.clone(),
            ..p.clone()
        };
        assert_eq!(s.score_all(&[&q]).unwrap(), vec![1.0]);
    }

    #[test]
    fn random_scorer_is_seeded() {
        let pairs: Vec<SentencePair> = (0..5).map(sp).collect();
        let refs: Vec<&SentencePair> = pairs.iter().collect();
        let a = RandomScorer { seed: 3 }.score_all(&refs).unwrap();
        assert_eq!(a, RandomScorer { seed: 3 }.score_all(&refs).unwrap());
        assert_ne!(a, RandomScorer { seed: 4 }.score_all(&refs).unwrap());
    }

    #[test]
    fn mining_thresholds() {
        let pairs: Vec<SentencePair> = (0..4).map(sp).collect();
        let scorer = Fixed(vec![0.2, 0.9, 0.5, 0.9]);
        assert!(mine_silver(&scorer, &pairs, 1.01).unwrap().is_empty());
        let all = mine_silver(&scorer, &pairs, 0.0).unwrap();
        let ids: Vec<&str> = all.iter().map(|s| s.pair.pair_id.as_str()).collect();
        assert_eq!(ids, ["p1", "p3", "p2", "p0"]);
        assert_eq!(mine_silver(&scorer, &pairs, 0.5).unwrap().len(), 3);
    }

    #[test]
    fn report_layout() {
        let r = EvalReport {
            model: "LR".into(),
            max_f1: PrPoint {
                threshold: 0.25,
                precision: 0.5,
                recall: 1.0,
                f1: 2.0 / 3.0,
            },
            at_half: ThresholdPoint::compute(&[], &[], 0.5),
            pairs: 0,
            positives: 0,
            excluded: 0,
        };
        let mut buf = Vec::new();
        write_report_tsv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "model\tmax_f1\tprecision\trecall\tthreshold\nLR\t0.667\t0.500\t1.000\t0.2500\n"
        );
    }

    proptest! {
        #[test]
        fn max_f1_dominates_f1_at_half(
            data in prop::collection::vec((0.0f64..1.0, any::<bool>()), 2..60)
        ) {
            let (scores, labels): (Vec<f64>, Vec<bool>) = data.into_iter().unzip();
            prop_assume!(labels.iter().any(|&y| y) && labels.iter().any(|&y| !y));
            let best = max_f1(&scores, &labels).unwrap();
            prop_assert!(best.f1 >= ThresholdPoint::compute(&scores, &labels, 0.5).f1 - 1e-12);
        }

        #[test]
        fn mined_count_non_increasing(scores in prop::collection::vec(0.0f64..1.0, 1..40), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let pairs: Vec<SentencePair> = (0..scores.len()).map(sp).collect();
            let scorer = Fixed(scores);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = mine_silver(&scorer, &pairs, lo).unwrap();
            let b = mine_silver(&scorer, &pairs, hi).unwrap();
            prop_assert!(b.len() <= a.len());
            prop_assert!(a.windows(2).all(|w| w[0].probability >= w[1].probability));
        }
    }
}
