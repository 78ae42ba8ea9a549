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

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::matrix::{term_counts, TermSentenceMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FactorConfig {
    /// Latent dimension.
    pub k: usize,
    /// Ridge penalty on both factor matrices.
    pub lambda: f64,
    /// Weight of unobserved cells, in (0, 1].
    pub missing_weight: f64,
    /// Orthogonality penalty on the word factors; 0 gives plain WMF.
    pub ortho_weight: f64,
    pub sweeps: usize,
    /// Gradient steps on the word factors after each ALS update when
    /// `ortho_weight > 0`.
    pub ortho_steps: usize,
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            k: 100,
            lambda: 20.0,
            missing_weight: 0.01,
            ortho_weight: 0.0,
            sweeps: 10,
            ortho_steps: 10,
            seed: 42,
        }
    }
}

impl FactorConfig {
    fn validate(&self, x: &TermSentenceMatrix) -> Result<()> {
        if self.k == 0 || self.k > x.n_rows().min(x.n_cols()) {
            return Err(Error::argument(format!(
                "k = {} must be in 1..={} for a {}x{} matrix",
                self.k,
                x.n_rows().min(x.n_cols()),
                x.n_rows(),
                x.n_cols()
            )));
        }
        if !(self.missing_weight > 0.0 && self.missing_weight <= 1.0) {
            return Err(Error::argument("missing_weight must be in (0, 1]"));
        }
        if !(self.lambda >= 0.0) || !(self.ortho_weight >= 0.0) {
            return Err(Error::argument("lambda and ortho_weight must be non-negative"));
        }
        if self.sweeps == 0 {
            return Err(Error::argument("sweeps must be at least 1"));
        }
        Ok(())
    }
}

/// Trained word factors plus what is needed to embed new sentences.
#[derive(Debug)]
pub struct FactorModel {
    pub k: usize,
    pub lambda: f64,
    pub missing_weight: f64,
    pub ortho_weight: f64,
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
    /// |V| x k.
    word_factors: DMatrix<f64>,
    solver: OnceLock<RidgeSolver>,
}

impl Clone for FactorModel {
    fn clone(&self) -> Self {
        FactorModel {
            k: self.k,
            lambda: self.lambda,
            missing_weight: self.missing_weight,
            ortho_weight: self.ortho_weight,
            vocab: self.vocab.clone(),
            index: self.index.clone(),
            idf: self.idf.clone(),
            word_factors: self.word_factors.clone(),
            solver: OnceLock::new(),
        }
    }
}

/// Output of [`factorize`].
#[derive(Debug, Clone)]
pub struct Factorization {
    pub model: FactorModel,
    /// n_sentences x k; row j is the latent vector of training sentence j.
    pub sentence_factors: DMatrix<f64>,
    /// Objective after each sweep.
    pub objective: Vec<f64>,
}

/// Solves the weighted ridge problem for one row/column of the updated
/// factor, given the fixed factor `F` (n x k):
///
/// `(w_m FᵀF + λI + (1 - w_m) Σ_obs f_i f_iᵀ) z = Σ_obs x_i f_i`.
///
/// Sparse observations go through the Woodbury identity against the shared
/// base matrix `G = w_m FᵀF + λI`; dense ones are solved directly.
#[derive(Debug)]
struct RidgeSolver {
    base: DMatrix<f64>,
    base_chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    /// `G⁻¹ Fᵀ`, k x n.
    base_inv_ft: DMatrix<f64>,
    missing_weight: f64,
}

impl RidgeSolver {
    fn new(fixed: &DMatrix<f64>, lambda: f64, missing_weight: f64) -> Result<Self> {
        let k = fixed.ncols();
        let base = fixed.tr_mul(fixed) * missing_weight + DMatrix::identity(k, k) * lambda;
        let base_chol = base
            .clone()
            .cholesky()
            .ok_or_else(|| Error::argument("ridge system is not positive definite (lambda = 0 with rank-deficient factors?)"))?;
        let base_inv_ft = base_chol.solve(&fixed.transpose());
        Ok(RidgeSolver {
            base,
            base_chol,
            base_inv_ft,
            missing_weight,
        })
    }

    fn solve(&self, fixed: &DMatrix<f64>, obs: &[(usize, f64)]) -> DVector<f64> {
        let k = fixed.ncols();
        let m = obs.len();
        if m == 0 {
            return DVector::zeros(k);
        }
        let c = 1.0 - self.missing_weight;
        let x = DVector::from_iterator(m, obs.iter().map(|&(_, v)| v));
        // columns of G⁻¹Fᵀ at the observed indices: G⁻¹U
        let h = DMatrix::from_fn(k, m, |r, a| self.base_inv_ft[(r, obs[a].0)]);
        if c == 0.0 {
            return &h * x;
        }
        if m <= k {
            // (G + c U Uᵀ)⁻¹ U x = H (x - z), with (I/c + UᵀH) z = UᵀH x
            let u = DMatrix::from_fn(k, m, |r, a| fixed[(obs[a].0, r)]);
            let uth = u.tr_mul(&h);
            let mut s = uth.clone();
            for a in 0..m {
                s[(a, a)] += 1.0 / c;
            }
            let t = &uth * &x;
            let z = match s.clone().lu().solve(&t) {
                Some(z) => z,
                None => return self.solve_direct(fixed, obs),
            };
            return h * (x - z);
        }
        self.solve_direct(fixed, obs)
    }

    fn solve_direct(&self, fixed: &DMatrix<f64>, obs: &[(usize, f64)]) -> DVector<f64> {
        let k = fixed.ncols();
        let c = 1.0 - self.missing_weight;
        let mut a = self.base.clone();
        let mut b = DVector::zeros(k);
        for &(i, v) in obs {
            let f = fixed.row(i);
            for r in 0..k {
                b[r] += v * f[r];
                for s in 0..k {
                    a[(r, s)] += c * f[r] * f[s];
                }
            }
        }
        match a.cholesky() {
            Some(ch) => ch.solve(&b),
            None => self.base_chol.solve(&b),
        }
    }
}

fn random_factor(rng: &mut ChaCha8Rng, rows: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, k, |_, _| (rng.random::<f64>() - 0.5) / k as f64)
}

fn als_update(fixed: &DMatrix<f64>, lines: &[Vec<(usize, f64)>], lambda: f64, missing_weight: f64) -> Result<DMatrix<f64>> {
    let solver = RidgeSolver::new(fixed, lambda, missing_weight)?;
    let k = fixed.ncols();
    let solved: Vec<DVector<f64>> = lines.par_iter().map(|obs| solver.solve(fixed, obs)).collect();
    Ok(DMatrix::from_fn(lines.len(), k, |i, r| solved[i][r]))
}

fn off_diagonal_gram(p: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = p.tr_mul(p);
    m.fill_diagonal(0.0);
    m
}

/// Full weighted objective:
/// `Σ W (X - PQᵀ)² + λ(‖P‖² + ‖Q‖²) + ρ Σ_{r≠s} (PᵀP)²_rs`.
pub fn objective(x: &TermSentenceMatrix, p: &DMatrix<f64>, q: &DMatrix<f64>, cfg: &FactorConfig) -> f64 {
    let wm = cfg.missing_weight;
    let mut cross = 0.0;
    let mut observed_sq = 0.0;
    for (j, col) in x.cols.iter().enumerate() {
        let qj = q.row(j);
        for &(i, v) in col {
            let r = p.row(i).dot(&qj);
            cross += v * r;
            observed_sq += (v - r) * (v - r);
        }
    }
    let ptp = p.tr_mul(p);
    let qtq = q.tr_mul(q);
    let recon_sq = ptp.component_mul(&qtq).sum();
    let all_sq = x.squared_sum() - 2.0 * cross + recon_sq;
    let data = wm * all_sq + (1.0 - wm) * observed_sq;
    let ridge = cfg.lambda * (p.norm_squared() + q.norm_squared());
    let ortho = if cfg.ortho_weight > 0.0 {
        cfg.ortho_weight * off_diagonal_gram(p).norm_squared()
    } else {
        0.0
    };
    data + ridge + ortho
}

/// Gradient of [`objective`] with respect to `P` and `Q`.
pub fn objective_gradient(
    x: &TermSentenceMatrix,
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    cfg: &FactorConfig,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let wm = cfg.missing_weight;
    let ptp = p.tr_mul(p);
    let qtq = q.tr_mul(q);
    // sparse X Q and Xᵀ P, and the observed residual products E Q, Eᵀ P
    let mut xq = DMatrix::zeros(p.nrows(), p.ncols());
    let mut xtp = DMatrix::zeros(q.nrows(), q.ncols());
    let mut eq = DMatrix::zeros(p.nrows(), p.ncols());
    let mut etp = DMatrix::zeros(q.nrows(), q.ncols());
    for (j, col) in x.cols.iter().enumerate() {
        for &(i, v) in col {
            let e = v - p.row(i).dot(&q.row(j));
            for r in 0..p.ncols() {
                xq[(i, r)] += v * q[(j, r)];
                xtp[(j, r)] += v * p[(i, r)];
                eq[(i, r)] += e * q[(j, r)];
                etp[(j, r)] += e * p[(i, r)];
            }
        }
    }
    let mut gp = (p * &qtq - xq) * (2.0 * wm) - eq * (2.0 * (1.0 - wm)) + p * (2.0 * cfg.lambda);
    if cfg.ortho_weight > 0.0 {
        gp += p * off_diagonal_gram(p) * (4.0 * cfg.ortho_weight);
    }
    let gq = (q * &ptp - xtp) * (2.0 * wm) - etp * (2.0 * (1.0 - wm)) + q * (2.0 * cfg.lambda);
    (gp, gq)
}

/// Backtracking gradient steps on `P` for the full objective, used to push the
/// word factors toward orthogonal dimensions.
fn orthogonality_correction(
    x: &TermSentenceMatrix,
    p: &mut DMatrix<f64>,
    q: &DMatrix<f64>,
    cfg: &FactorConfig,
    step: &mut f64,
) {
    let mut current = objective(x, p, q, cfg);
    for _ in 0..cfg.ortho_steps {
        let (grad, _) = objective_gradient(x, p, q, cfg);
        let gnorm2 = grad.norm_squared();
        if gnorm2 == 0.0 {
            return;
        }
        let mut eta = *step;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = &*p - &grad * eta;
            let value = objective(x, &trial, q, cfg);
            if value <= current - 1e-4 * eta * gnorm2 {
                *p = trial;
                current = value;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            return;
        }
        *step = eta * 2.0;
    }
}

/// Alternating least squares on the weighted (and optionally orthogonality
/// penalized) objective. Each sweep solves the word factors, applies the
/// orthogonality correction when `ortho_weight > 0`, then solves the sentence
/// factors, so the returned sentence factors are exact ridge solutions for the
/// returned word factors.
pub fn factorize(x: &TermSentenceMatrix, cfg: &FactorConfig) -> Result<Factorization> {
    cfg.validate(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p = random_factor(&mut rng, x.n_rows(), cfg.k);
    let mut q = random_factor(&mut rng, x.n_cols(), cfg.k);
    let mut history = Vec::with_capacity(cfg.sweeps);
    let mut step = 1e-3;
    for sweep in 0..cfg.sweeps {
        p = als_update(&q, &x.rows, cfg.lambda, cfg.missing_weight)?;
        if cfg.ortho_weight > 0.0 {
            orthogonality_correction(x, &mut p, &q, cfg, &mut step);
        }
        q = als_update(&p, &x.cols, cfg.lambda, cfg.missing_weight)?;
        let value = objective(x, &p, &q, cfg);
        if !value.is_finite() {
            return Err(Error::Numeric {
                sweep,
                message: format!("objective is {value}"),
            });
        }
        log::debug!("factorize sweep {sweep}: objective {value}");
        history.push(value);
    }
    Ok(Factorization {
        model: FactorModel {
            k: cfg.k,
            lambda: cfg.lambda,
            missing_weight: cfg.missing_weight,
            ortho_weight: cfg.ortho_weight,
            vocab: x.vocab.clone(),
            index: x.index.clone(),
            idf: x.idf.clone(),
            word_factors: p,
            solver: OnceLock::new(),
        },
        sentence_factors: q,
        objective: history,
    })
}

impl FactorModel {
    pub fn word_factors(&self) -> &DMatrix<f64> {
        &self.word_factors
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    fn solver(&self) -> &RidgeSolver {
        self.solver.get_or_init(|| {
            RidgeSolver::new(&self.word_factors, self.lambda, self.missing_weight)
                .or_else(|_| RidgeSolver::new(&self.word_factors, self.lambda.max(1e-8), self.missing_weight))
                .expect("ridge base with positive lambda is positive definite")
        })
    }

    /// Folds a new sentence into the latent space by solving the same weighted
    /// ridge system used for training columns. Out-of-vocabulary tokens are
    /// ignored; an all-OOV sentence maps to the zero vector.
    pub fn project_sentence<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let obs: Vec<(usize, f64)> = term_counts(tokens, &self.index)
            .into_iter()
            .map(|(i, tf)| (i, tf * self.idf[i]))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        self.solver().solve(&self.word_factors, &obs).iter().copied().collect()
    }

    fn vocab_hash(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.vocab {
            h.update(w.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

const FORMAT_TAG: &str = "urlpara-factor-v1";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    k: usize,
    lambda: f64,
    missing_weight: f64,
    ortho_weight: f64,
    vocab_size: usize,
    vocab_hash: String,
}

/// Text dump: a JSON header line, then `word<TAB>idf<TAB>f_1 ... f_k` per word.
pub fn write_factor_model<W: Write>(model: &FactorModel, mut w: W) -> Result<()> {
    let header = Header {
        format: FORMAT_TAG.into(),
        k: model.k,
        lambda: model.lambda,
        missing_weight: model.missing_weight,
        ortho_weight: model.ortho_weight,
        vocab_size: model.vocab.len(),
        vocab_hash: model.vocab_hash(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for (i, word) in model.vocab.iter().enumerate() {
        let factors: Vec<String> = model.word_factors.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{word}\t{}\t{}", model.idf[i], factors.join(" "))?;
    }
    Ok(())
}

pub fn read_factor_model<R: BufRead>(reader: R) -> Result<FactorModel> {
    let mut lines = reader.lines();
    let first = lines.next().ok_or_else(|| Error::format(1, "missing header"))??;
    let header: Header = serde_json::from_str(&first).map_err(|e| Error::format(1, e.to_string()))?;
    if header.format != FORMAT_TAG {
        return Err(Error::format(1, format!("unknown format {:?}", header.format)));
    }
    if header.k == 0 {
        return Err(Error::format(1, "k must be positive"));
    }
    let (k, n) = (header.k, header.vocab_size);
    let mut vocab = Vec::with_capacity(n.min(1 << 20));
    let mut idf = Vec::with_capacity(n.min(1 << 20));
    let mut values = Vec::with_capacity(n.saturating_mul(k).min(1 << 24));
    for row in 0..n {
        let line_no = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| Error::format(line_no, "truncated model file"))??;
        let mut parts = line.splitn(3, '\t');
        let (word, idf_s, facs) = match (parts.next(), parts.next(), parts.next()) {
            (Some(w), Some(i), Some(f)) => (w, i, f),
            _ => return Err(Error::format(line_no, "expected word, idf and factors")),
        };
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::format(line_no, format!("bad number {s:?}")))
        };
        idf.push(parse(idf_s)?);
        let before = values.len();
        for f in facs.split(' ') {
            values.push(parse(f)?);
        }
        if values.len() - before != k {
            return Err(Error::format(line_no, format!("expected {k} factors")));
        }
        vocab.push(word.to_string());
    }
    let index: HashMap<String, usize> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    if index.len() != vocab.len() {
        return Err(Error::format(1, "duplicate vocabulary entries"));
    }
    let model = FactorModel {
        k,
        lambda: header.lambda,
        missing_weight: header.missing_weight,
        ortho_weight: header.ortho_weight,
        word_factors: DMatrix::from_row_slice(n, k, &values),
        vocab,
        index,
        idf,
        solver: OnceLock::new(),
    };
    if model.vocab_hash() != header.vocab_hash {
        return Err(Error::format(1, "vocabulary hash mismatch"));
    }
    if !(model.missing_weight > 0.0 && model.missing_weight <= 1.0) || !(model.lambda > 0.0) {
        return Err(Error::format(1, "lambda must be positive and missing_weight in (0, 1]"));
    }
    Ok(model)
}
