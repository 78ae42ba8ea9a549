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

//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

/// Every (source span, target span) pair, both at most `max_len` long, with
/// a link inside and no link crossing the boundary. Spans are half-open.
pub fn brute_force_spans(
    n: usize,
    m: usize,
    links: &BTreeSet<(usize, usize)>,
    max_len: usize,
) -> Vec<((usize, usize), (usize, usize))> {
    let mut out = Vec::new();
    for s0 in 0..n {
        for s1 in s0 + 1..=n {
            for t0 in 0..m {
                for t1 in t0 + 1..=m {
                    if s1 - s0 > max_len || t1 - t0 > max_len {
                        continue;
                    }
                    let in_s = |i: usize| s0 <= i && i < s1;
                    let in_t = |j: usize| t0 <= j && j < t1;
                    let any_inside = links.iter().any(|&(i, j)| in_s(i) && in_t(j));
                    let crossing = links.iter().any(|&(i, j)| in_s(i) != in_t(j));
                    if any_inside && !crossing {
                        out.push(((s0, s1), (t0, t1)));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Distinct n-grams as token-vector sets.
fn gram_set(t: &[&str], n: usize) -> HashSet<Vec<String>> {
    if t.len() < n {
        return HashSet::new();
    }
    (0..=t.len() - n)
        .map(|i| t[i..i + n].iter().map(|s| s.to_string()).collect())
        .collect()
}

/// PINC: mean over orders with candidate n-grams of the fraction of
/// candidate n-grams absent from the source.
pub fn pinc(source: &[&str], candidate: &[&str], max_n: usize) -> f64 {
    let mut sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n {
        let c = gram_set(candidate, n);
        if c.is_empty() {
            continue;
        }
        let s = gram_set(source, n);
        let shared = c.iter().filter(|g| s.contains(*g)).count();
        sum += 1.0 - shared as f64 / c.len() as f64;
        orders += 1;
    }
    if orders == 0 {
        0.0
    } else {
        sum / orders as f64
    }
}

pub fn jaccard(a: &[&str], b: &[&str]) -> f64 {
    let sa: HashSet<&str> = a.iter().copied().collect();
    let sb: HashSet<&str> = b.iter().copied().collect();
    sa.intersection(&sb).count() as f64 / sa.union(&sb).count() as f64
}

/// Textbook full-table Levenshtein distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Best F1 over every candidate threshold, recounting from scratch at each.
pub fn max_f1(scores: &[f64], labels: &[bool]) -> f64 {
    let mut best: f64 = 0.0;
    for &t in scores {
        let tp = scores.iter().zip(labels).filter(|(s, y)| **s >= t && **y).count() as f64;
        let fp = scores.iter().zip(labels).filter(|(s, y)| **s >= t && !**y).count() as f64;
        let fneg = scores.iter().zip(labels).filter(|(s, y)| **s < t && **y).count() as f64;
        if tp > 0.0 {
            best = best.max(2.0 * tp / (2.0 * tp + fp + fneg));
        }
    }
    best
}

/// Cohen's kappa from the 2x2 confusion table.
pub fn kappa(a: &[bool], b: &[bool]) -> f64 {
    let n = a.len() as f64;
    let mut t = [[0.0f64; 2]; 2];
    for (&x, &y) in a.iter().zip(b) {
        t[usize::from(x)][usize::from(y)] += 1.0;
    }
    let po = (t[0][0] + t[1][1]) / n;
    let pa1 = (t[1][0] + t[1][1]) / n;
    let pb1 = (t[0][1] + t[1][1]) / n;
    let pe = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
    if (1.0 - pe).abs() < 1e-15 {
        1.0
    } else {
        (po - pe) / (1.0 - pe)
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
