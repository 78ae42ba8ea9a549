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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urlpara::identify::{logistic_gradient, logistic_objective, train_logistic, LogisticConfig};

struct Instance {
    x: Vec<Vec<f64>>,
    y: Vec<bool>,
    w: Vec<f64>,
    b: f64,
    l2: f64,
}

fn instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Instance {
    let truth: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.5..1.5)).collect())
        .collect();
    let mut y: Vec<bool> = x
        .iter()
        .map(|r| {
            let z: f64 = r.iter().zip(&truth).map(|(a, b)| a * b).sum();
            rng.random::<f64>() < 1.0 / (1.0 + (-z).exp())
        })
        .collect();
    y[0] = true;
    y[1] = false;
    Instance {
        x,
        y,
        w: (0..d).map(|_| rng.random_range(-1.0..1.0)).collect(),
        b: rng.random_range(-1.0..1.0),
        l2: rng.random_range(0.0..3.0),
    }
}

/// Central differences on every coordinate, bias last.
fn numeric_gradient(inst: &Instance) -> Vec<f64> {
    let h = 1e-5;
    let f = |w: &[f64], b: f64| logistic_objective(&inst.x, &inst.y, w, b, inst.l2);
    let mut out = Vec::new();
    for j in 0..inst.w.len() {
        let mut up = inst.w.clone();
        let mut dn = inst.w.clone();
        up[j] += h;
        dn[j] -= h;
        out.push((f(&up, inst.b) - f(&dn, inst.b)) / (2.0 * h));
    }
    out.push((f(&inst.w, inst.b + h) - f(&inst.w, inst.b - h)) / (2.0 * h));
    out
}

#[test]
fn analytic_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let inst = instance(&mut rng, 30, 5);
        let (gw, gb) = logistic_gradient(&inst.x, &inst.y, &inst.w, inst.b, inst.l2);
        let analytic: Vec<f64> = gw.into_iter().chain(std::iter::once(gb)).collect();
        for (a, n) in analytic.iter().zip(numeric_gradient(&inst)) {
            worst = worst.max((a - n).abs() / a.abs().max(n.abs()).max(1e-6));
        }
    }
    assert!(worst < 1e-5, "max relative error {worst:e}");
}

#[test]
fn objective_is_monotone_under_default_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let inst = instance(&mut rng, 40, 6);
        let cfg = LogisticConfig {
            l2: inst.l2,
            epochs: 300,
            ..LogisticConfig::default()
        };
        let t = train_logistic(&inst.x, &inst.y, &cfg).unwrap();
        for w in t.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15 * w[0].abs(), "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn converges_to_stationary_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let inst = instance(&mut rng, 50, 3);
    let cfg = LogisticConfig {
        l2: 1.0,
        epochs: 200_000,
        ..LogisticConfig::default()
    };
    let t = train_logistic(&inst.x, &inst.y, &cfg).unwrap();
    assert!(t.gradient_norm < 1e-6);
    assert!(t.epochs_run < cfg.epochs);
}

#[test]
fn label_swap_negates_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let inst = instance(&mut rng, 25, 4);
        let flipped: Vec<bool> = inst.y.iter().map(|y| !y).collect();
        let cfg = LogisticConfig {
            l2: inst.l2,
            epochs: 500,
            ..LogisticConfig::default()
        };
        let a = train_logistic(&inst.x, &inst.y, &cfg).unwrap();
        let b = train_logistic(&inst.x, &flipped, &cfg).unwrap();
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            assert!((wa + wb).abs() < 1e-5);
        }
        assert!((a.bias + b.bias).abs() < 1e-5);
    }
}

#[test]
fn training_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let inst = instance(&mut rng, 30, 5);
    let cfg = LogisticConfig::default();
    assert_eq!(
        train_logistic(&inst.x, &inst.y, &cfg).unwrap(),
        train_logistic(&inst.x, &inst.y, &cfg).unwrap()
    );
}
