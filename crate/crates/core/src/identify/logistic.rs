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

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::features::FeatureMode;
use crate::{Error, Result};

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct LogisticConfig {
    pub l2: f64,
    pub epochs: usize,
    /// Fixed step size. `None` uses `1/L` for the Lipschitz constant `L` of the
    /// objective's gradient, which makes every step non-increasing.
    pub learning_rate: Option<f64>,
    /// Stop once the gradient norm falls below this value.
    pub tolerance: f64,
    /// Z-score features before training. `None` picks by mode: on for the
    /// latent-vector modes, off otherwise.
    pub standardize: Option<bool>,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1.0,
            epochs: 5000,
            learning_rate: None,
            tolerance: 1e-6,
            standardize: None,
        }
    }
}

impl LogisticConfig {
    pub fn standardizes(&self, mode: FeatureMode) -> bool {
        self.standardize
            .unwrap_or(matches!(mode, FeatureMode::Vec | FeatureMode::LexVec))
    }
}

/// Per-column z-score statistics from the training split.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(features)?;
        let n = features.len() as f64;
        let mut mean = vec![0.0; d];
        for row in features {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x / n;
            }
        }
        let mut var = vec![0.0; d];
        for row in features {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m).powi(2) / n;
            }
        }
        let std = var
            .into_iter()
            .map(|v| if v.sqrt() > 1e-12 { v.sqrt() } else { 1.0 })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

fn check_matrix(features: &[Vec<f64>]) -> Result<usize> {
    let first = features
        .first()
        .ok_or_else(|| Error::argument("empty feature matrix"))?;
    let d = first.len();
    for (i, row) in features.iter().enumerate() {
        if row.len() != d {
            return Err(Error::argument(format!("row {i} has {} features, expected {d}", row.len())));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::argument(format!("row {i} has a non-finite feature")));
        }
    }
    Ok(d)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean negative log-likelihood plus `l2/(2n) * |w|^2`; the bias is not
/// regularized.
pub fn logistic_objective(features: &[Vec<f64>], labels: &[bool], weights: &[f64], bias: f64, l2: f64) -> f64 {
    let n = features.len() as f64;
    let nll: f64 = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let z = dot(weights, x) + bias;
            softplus(z) - if y { z } else { 0.0 }
        })
        .sum();
    nll / n + l2 / (2.0 * n) * dot(weights, weights)
}

/// Gradient of [`logistic_objective`] as `(d/dw, d/db)`.
pub fn logistic_gradient(
    features: &[Vec<f64>],
    labels: &[bool],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = features.len() as f64;
    let mut gw: Vec<f64> = weights.iter().map(|w| l2 / n * w).collect();
    let mut gb = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let r = (sigmoid(dot(weights, x) + bias) - if y { 1.0 } else { 0.0 }) / n;
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += r * xi;
        }
        gb += r;
    }
    (gw, gb)
}

/// Upper bound on the gradient's Lipschitz constant: a quarter of the top
/// eigenvalue of the bias-augmented Gram matrix over `n`, plus `l2/n`.
fn lipschitz_bound(features: &[Vec<f64>], l2: f64) -> f64 {
    let n = features.len() as f64;
    let d = features[0].len() + 1;
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut lambda = 0.0;
    for _ in 0..100 {
        let mut next = vec![0.0; d];
        for x in features {
            let s = dot(&v[..d - 1], x) + v[d - 1];
            for (o, xi) in next.iter_mut().zip(x) {
                *o += s * xi;
            }
            next[d - 1] += s;
        }
        let norm = dot(&next, &next).sqrt();
        if norm == 0.0 {
            break;
        }
        lambda = norm / n;
        v = next.into_iter().map(|x| x / norm).collect();
    }
    // Power iteration approaches the top eigenvalue from below.
    1.05 * lambda / 4.0 + l2 / n + 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedLinear {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub step: f64,
    pub epochs_run: usize,
    pub gradient_norm: f64,
    /// Objective before the first step and after every step.
    pub objective_trace: Vec<f64>,
}

/// Full-batch gradient descent from zero on the regularized logistic loss.
///
/// Stops when the gradient norm drops below `config.tolerance` or after
/// `config.epochs` steps.
pub fn train_logistic(features: &[Vec<f64>], labels: &[bool], config: &LogisticConfig) -> Result<TrainedLinear> {
    let d = check_matrix(features)?;
    if features.len() != labels.len() {
        return Err(Error::argument(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if !labels.iter().any(|&y| y) || labels.iter().all(|&y| y) {
        return Err(Error::argument("training labels contain a single class"));
    }
    if !(config.l2 >= 0.0 && config.l2.is_finite()) {
        return Err(Error::argument(format!("l2 must be non-negative, got {}", config.l2)));
    }
    let step = match config.learning_rate {
        Some(lr) if lr > 0.0 && lr.is_finite() => lr,
        Some(lr) => return Err(Error::argument(format!("learning rate must be positive, got {lr}"))),
        None => 1.0 / lipschitz_bound(features, config.l2),
    };
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut trace = vec![logistic_objective(features, labels, &w, b, config.l2)];
    let mut epochs_run = 0;
    let mut gnorm;
    loop {
        let (gw, gb) = logistic_gradient(features, labels, &w, b, config.l2);
        gnorm = (dot(&gw, &gw) + gb * gb).sqrt();
        if gnorm < config.tolerance || epochs_run >= config.epochs {
            break;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= step * g;
        }
        b -= step * gb;
        epochs_run += 1;
        let obj = logistic_objective(features, labels, &w, b, config.l2);
        if !obj.is_finite() {
            return Err(Error::Numeric {
                sweep: epochs_run,
                message: "logistic objective diverged".into(),
            });
        }
        trace.push(obj);
    }
    log::debug!("logistic: {epochs_run} epochs, step {step:.3e}, |grad| {gnorm:.3e}");
    Ok(TrainedLinear {
        weights: w,
        bias: b,
        step,
        epochs_run,
        gradient_norm: gnorm,
        objective_trace: trace,
    })
}

/// A trained identification model, ready for persistence.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LogisticModel {
    pub feature_mode: FeatureMode,
    pub l2: f64,
    pub weights: Vec<f64>,
    pub bias: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardizer: Option<Standardizer>,
    /// Latent dimension of the factor model the features were built with.
    #[serde(default)]
    pub factor_k: usize,
}

impl LogisticModel {
    /// Fits standardization (if configured) and trains on raw features.
    pub fn fit(
        mode: FeatureMode,
        factor_k: usize,
        features: &[Vec<f64>],
        labels: &[bool],
        config: &LogisticConfig,
    ) -> Result<(Self, TrainedLinear)> {
        let d = check_matrix(features)?;
        if d != mode.dimension(factor_k) {
            return Err(Error::argument(format!(
                "{mode} expects {} features, got {d}",
                mode.dimension(factor_k)
            )));
        }
        let standardizer = if config.standardizes(mode) {
            Some(Standardizer::fit(features)?)
        } else {
            None
        };
        let trained = match &standardizer {
            Some(s) => {
                let z: Vec<Vec<f64>> = features.iter().map(|x| s.apply(x)).collect();
                train_logistic(&z, labels, config)?
            }
            None => train_logistic(features, labels, config)?,
        };
        let model = LogisticModel {
            feature_mode: mode,
            l2: config.l2,
            weights: trained.weights.clone(),
            bias: trained.bias,
            standardizer,
            factor_k,
        };
        Ok((model, trained))
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.feature_mode.dimension(self.factor_k) {
            return Err(Error::Config(format!(
                "{} model has {} weights, expected {}",
                self.feature_mode,
                self.weights.len(),
                self.feature_mode.dimension(self.factor_k)
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) || !self.bias.is_finite() {
            return Err(Error::Config("model has non-finite parameters".into()));
        }
        if let Some(s) = &self.standardizer {
            if s.mean.len() != self.weights.len() || s.std.len() != self.weights.len() {
                return Err(Error::Config("standardization statistics do not match weights".into()));
            }
        }
        Ok(())
    }

    pub fn save<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn load<R: Read>(r: R) -> Result<Self> {
        let model: LogisticModel = serde_json::from_reader(r)?;
        model.validate()?;
        Ok(model)
    }
}

/// `sigmoid(w . x + b)`, applying the model's standardization first.
pub fn predict_prob(model: &LogisticModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.weights.len() {
        return Err(Error::argument(format!(
            "feature vector has {} entries, model expects {}",
            x.len(),
            model.weights.len()
        )));
    }
    let z = match &model.standardizer {
        Some(s) => dot(&model.weights, &s.apply(x)),
        None => dot(&model.weights, x),
    };
    Ok(sigmoid(z + model.bias))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(weights: Vec<f64>, bias: f64) -> LogisticModel {
        LogisticModel {
            feature_mode: FeatureMode::Edit,
            l2: 1.0,
            weights,
            bias,
            standardizer: None,
            factor_k: 0,
        }
    }

    #[test]
    fn predict_examples() {
        assert_eq!(predict_prob(&model(vec![0.0], 0.0), &[3.0]).unwrap(), 0.5);
        assert!(predict_prob(&model(vec![0.0], 30.0), &[1.0]).unwrap() > 0.999999);
        assert_eq!(predict_prob(&model(vec![1.0], 0.0), &[0.0]).unwrap(), 0.5);
        assert!(predict_prob(&model(vec![1.0], 0.0), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn separable_toy_set() {
        let x = vec![
            vec![0.0, 0.0],
            vec![0.2, 0.1],
            vec![0.1, 0.3],
            vec![0.3, 0.2],
            vec![1.0, 1.0],
            vec![0.8, 0.9],
            vec![0.9, 0.7],
            vec![0.7, 0.8],
        ];
        let y = [false, false, false, false, true, true, true, true];
        let cfg = LogisticConfig {
            l2: 0.01,
            ..LogisticConfig::default()
        };
        let t = train_logistic(&x, &y, &cfg).unwrap();
        let m = model(t.weights, t.bias);
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(predict_prob(&m, xi).unwrap() >= 0.5, yi);
        }
    }

    #[test]
    fn identical_features_balanced_labels() {
        let x = vec![vec![0.3, 1.0]; 6];
        let y = [true, false, true, false, true, false];
        let t = train_logistic(&x, &y, &LogisticConfig::default()).unwrap();
        let m = model(t.weights, t.bias);
        for probe in [[0.3, 1.0], [5.0, -2.0], [0.0, 0.0]] {
            assert!((predict_prob(&m, &probe).unwrap() - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            train_logistic(&x, &[true, true], &LogisticConfig::default()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn standardizer_zero_variance_column() {
        let s = Standardizer::fit(&[vec![1.0, 2.0], vec![1.0, 4.0]]).unwrap();
        assert_eq!(s.std[0], 1.0);
        assert_eq!(s.apply(&[1.0, 3.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn persistence_round_trip() {
        let x = vec![vec![0.0; 4], vec![1.0; 4], vec![0.5, 0.2, 0.1, 0.9]];
        let y = [false, true, true];
        let (m, _) = LogisticModel::fit(
            FeatureMode::Vec,
            2,
            &x,
            &y,
            &LogisticConfig {
                epochs: 50,
                ..LogisticConfig::default()
            },
        )
        .unwrap();
        assert!(m.standardizer.is_some());
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        assert_eq!(LogisticModel::load(buf.as_slice()).unwrap(), m);
        let mut bad = m.clone();
        bad.weights.pop();
        let mut buf = Vec::new();
        bad.save(&mut buf).unwrap();
        assert!(LogisticModel::load(buf.as_slice()).is_err());
    }

    proptest! {
        #[test]
        fn predict_is_monotone_in_score(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            prop_assume!(a < b);
            let m = model(vec![1.0], 0.0);
            prop_assert!(predict_prob(&m, &[a]).unwrap() <= predict_prob(&m, &[b]).unwrap());
        }

        #[test]
        fn sigmoid_strictly_increasing(z in -30.0f64..30.0) {
            prop_assert!(sigmoid(z) < sigmoid(z + 0.5));
        }
    }
}
