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

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One operating point on a precision-recall curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn f1_of(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// The best-F1 point over all thresholds taken from the distinct scores
/// (positive iff score >= threshold). Ties in F1 go to the higher precision,
/// then to the higher threshold.
pub fn max_f1(scores: &[f64], labels: &[bool]) -> Result<PrPoint> {
    if scores.len() != labels.len() {
        return Err(Error::argument(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::argument("scores contain NaN"));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 {
        return Err(Error::argument("max-F1 needs at least one positive label"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut best: Option<PrPoint> = None;
    let (mut tp, mut predicted) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            tp += usize::from(labels[order[i]]);
            predicted += 1;
            i += 1;
        }
        let precision = tp as f64 / predicted as f64;
        let recall = tp as f64 / positives as f64;
        let point = PrPoint {
            threshold,
            precision,
            recall,
            f1: f1_of(precision, recall),
        };
        let better = match &best {
            None => true,
            Some(b) => point.f1 > b.f1 || (point.f1 == b.f1 && point.precision > b.precision),
        };
        if better {
            best = Some(point);
        }
    }
    Ok(best.expect("non-empty since positives > 0"))
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::argument("pearson: length mismatch"));
    }
    if x.len() < 2 {
        return Err(Error::argument("pearson: need at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::argument("pearson: undefined for a constant vector"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Cohen's kappa between two binary label sequences.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::argument("cohen_kappa: need equal, non-zero lengths"));
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let p_o = agree / n;
    let p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if p_e == 1.0 {
        // both raters used a single, identical class
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

/// Fixed-width histogram over [0, 1]. Values outside the range are clamped;
/// 1.0 falls in the last bin.
pub fn histogram(values: &[f64], width: f64) -> Result<Vec<HistogramBin>> {
    if !(width > 0.0 && width <= 1.0) {
        return Err(Error::argument("histogram width must be in (0, 1]"));
    }
    let bins = (1.0 / width).round().max(1.0) as usize;
    let edge = |i: usize| ((i as f64 * width) * 1e9).round() / 1e9;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            low: edge(i),
            high: edge(i + 1).min(1.0),
            count: 0,
        })
        .collect();
    for v in values.iter().filter(|v| !v.is_nan()) {
        let i = ((v.clamp(0.0, 1.0) / width).floor() as usize).min(bins - 1);
        out[i].count += 1;
    }
    Ok(out)
}

/// CSV with header `bin_low,bin_high,count`.
pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], mut w: W) -> std::io::Result<()> {
    writeln!(w, "bin_low,bin_high,count")?;
    for b in bins {
        writeln!(w, "{},{},{}", b.low, b.high, b.count)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn separating_scores() {
        let p = max_f1(&[0.9, 0.8, 0.1, 0.2], &[true, true, false, false]).unwrap();
        assert_eq!(p.f1, 1.0);
        assert_eq!(p.threshold, 0.8);
    }

    #[test]
    fn three_point_enumeration() {
        let p = max_f1(&[0.9, 0.8, 0.2], &[true, false, true]).unwrap();
        assert_relative_eq!(p.f1, 0.8, epsilon = 1e-12);
        assert_eq!(p.threshold, 0.2);
        assert_relative_eq!(p.precision, 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(p.recall, 1.0);
    }

    #[test]
    fn constant_scores_closed_form() {
        let labels: Vec<bool> = (0..1000).map(|i| i % 1000 < 195).collect();
        let p = max_f1(&vec![0.5; 1000], &labels).unwrap();
        let rate = 0.195;
        assert_relative_eq!(p.f1, 2.0 * rate / (1.0 + rate), epsilon = 1e-12);
        assert!((p.f1 - 0.327).abs() < 1e-3);
    }

    #[test]
    fn tie_prefers_precision() {
        // threshold 0.9 -> P=1, R=0.5, F=2/3; threshold 0.5 -> P=0.5, R=1, F=2/3
        let p = max_f1(&[0.9, 0.5, 0.5, 0.5], &[true, true, false, false]).unwrap();
        assert_eq!(p.threshold, 0.9);
    }

    #[test]
    fn max_f1_errors() {
        assert!(max_f1(&[0.1], &[false]).is_err());
        assert!(max_f1(&[0.1, 0.2], &[true]).is_err());
        assert!(max_f1(&[f64::NAN], &[true]).is_err());
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_relative_eq!(pearson(&x, &y).unwrap(), 1.0, epsilon = 1e-12);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_relative_eq!(pearson(&x, &y).unwrap(), -1.0, epsilon = 1e-12);
        assert_relative_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 0.5, epsilon = 1e-12);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn kappa_examples() {
        let a = [true, false, true, false];
        assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
        assert_relative_eq!(
            cohen_kappa(&[true, true, false, false], &[true, false, false, true]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_eq!(cohen_kappa(&[true, true], &[true, true]).unwrap(), 1.0);
        assert!(cohen_kappa(&[], &[]).is_err());
    }

    #[test]
    fn histogram_bins() {
        let bins = histogram(&[0.0, 0.04, 0.05, 0.5, 1.0, 0.99], 0.05).unwrap();
        assert_eq!(bins.len(), 20);
        assert_eq!(bins[0].count, 2);
        assert_eq!(bins[1].count, 1);
        assert_eq!(bins[10].count, 1);
        assert_eq!(bins[19].count, 2);
        assert_eq!(bins[3].low, 0.15);
        let mut out = Vec::new();
        write_histogram_csv(&bins[..2], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "bin_low,bin_high,count\n0,0.05,2\n0.05,0.1,1\n");
    }
}
