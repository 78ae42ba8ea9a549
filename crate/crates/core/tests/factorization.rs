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

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urlpara::embeddings::{factorize, objective, objective_gradient, FactorConfig, TermSentenceMatrix};

fn random_sparse(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> TermSentenceMatrix {
    let dense: Vec<Vec<f64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.random::<f64>() < density { rng.random_range(0.1..3.0) } else { 0.0 })
                .collect()
        })
        .collect();
    TermSentenceMatrix::from_dense(&dense).unwrap()
}

fn config(k: usize, rho: f64, sweeps: usize) -> FactorConfig {
    FactorConfig {
        k,
        lambda: 0.5,
        missing_weight: 0.05,
        ortho_weight: rho,
        sweeps,
        ortho_steps: 10,
        seed: 11,
    }
}

fn off_diagonal_mass(p: &DMatrix<f64>) -> f64 {
    let mut g = p.tr_mul(p);
    g.fill_diagonal(0.0);
    g.norm_squared()
}

/// Central finite differences of the objective, entry by entry.
fn numeric_gradient(
    x: &TermSentenceMatrix,
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    cfg: &FactorConfig,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let h = 1e-5;
    let mut gp = DMatrix::zeros(p.nrows(), p.ncols());
    for i in 0..p.nrows() {
        for r in 0..p.ncols() {
            let (mut a, mut b) = (p.clone(), p.clone());
            a[(i, r)] += h;
            b[(i, r)] -= h;
            gp[(i, r)] = (objective(x, &a, q, cfg) - objective(x, &b, q, cfg)) / (2.0 * h);
        }
    }
    let mut gq = DMatrix::zeros(q.nrows(), q.ncols());
    for j in 0..q.nrows() {
        for r in 0..q.ncols() {
            let (mut a, mut b) = (q.clone(), q.clone());
            a[(j, r)] += h;
            b[(j, r)] -= h;
            gq[(j, r)] = (objective(x, p, &a, cfg) - objective(x, p, &b, cfg)) / (2.0 * h);
        }
    }
    (gp, gq)
}

fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-12)
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for rho in [0.0, 2.0] {
        let x = random_sparse(&mut rng, 5, 5, 0.5);
        let cfg = config(2, rho, 1);
        let p = DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1.0..1.0));
        let q = DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1.0..1.0));
        let (ap, aq) = objective_gradient(&x, &p, &q, &cfg);
        let (np, nq) = numeric_gradient(&x, &p, &q, &cfg);
        assert!(rel_err(&ap, &np) < 1e-4, "P gradient, rho={rho}");
        assert!(rel_err(&aq, &nq) < 1e-4, "Q gradient, rho={rho}");
    }
}

#[test]
fn gradient_vanishes_at_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_sparse(&mut rng, 5, 5, 0.6);
    let cfg = config(2, 0.0, 400);
    let f = factorize(&x, &cfg).unwrap();
    let (gp, gq) = objective_gradient(&x, f.model.word_factors(), &f.sentence_factors, &cfg);
    let (np, nq) = numeric_gradient(&x, f.model.word_factors(), &f.sentence_factors, &cfg);
    let scale = objective(&x, f.model.word_factors(), &f.sentence_factors, &cfg).max(1.0);
    assert!(gp.norm() / scale < 1e-4 && gq.norm() / scale < 1e-4);
    // finite differences agree that the point is stationary
    assert!(np.norm() / scale < 1e-4 && nq.norm() / scale < 1e-4);
}

#[test]
fn wmf_objective_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let x = random_sparse(&mut rng, 15, 25, 0.3);
        let f = factorize(&x, &config(4, 0.0, 15)).unwrap();
        for w in f.objective.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn orthogonality_penalty_reduces_off_diagonal_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let x = random_sparse(&mut rng, 20, 30, 0.3);
        let wmf = factorize(&x, &config(5, 0.0, 10)).unwrap();
        let ormf = factorize(&x, &config(5, 10.0, 10)).unwrap();
        let (a, b) = (
            off_diagonal_mass(wmf.model.word_factors()),
            off_diagonal_mass(ormf.model.word_factors()),
        );
        assert!(b < a, "OrMF {b} vs WMF {a}");
    }
}

#[test]
fn deterministic_given_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_sparse(&mut rng, 10, 12, 0.4);
    let a = factorize(&x, &config(3, 1.0, 4)).unwrap();
    let b = factorize(&x, &config(3, 1.0, 4)).unwrap();
    assert_eq!(a.model.word_factors(), b.model.word_factors());
    assert_eq!(a.objective, b.objective);
}
