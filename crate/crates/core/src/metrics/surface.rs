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

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const PINC_MAX_N: usize = 4;

/// Contiguous n-grams of `tokens` with their multiplicities.
pub fn ngrams<T: Hash + Eq>(tokens: &[T], n: usize) -> Result<HashMap<&[T], usize>> {
    if n == 0 {
        return Err(Error::argument("n-gram order must be at least 1"));
    }
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

fn ngram_set<T: Hash + Eq>(tokens: &[T], n: usize) -> HashSet<&[T]> {
    if tokens.len() < n {
        HashSet::new()
    } else {
        tokens.windows(n).collect()
    }
}

/// PINC: the mean, over n = 1..=min(max_n, |candidate|), of the fraction of
/// the candidate's distinct n-grams absent from the source.
pub fn pinc<T: Hash + Eq>(source: &[T], candidate: &[T], max_n: usize) -> Result<f64> {
    if candidate.is_empty() {
        return Err(Error::argument("PINC candidate must be non-empty"));
    }
    if max_n == 0 {
        return Err(Error::argument("PINC max_n must be at least 1"));
    }
    let top = max_n.min(candidate.len());
    let total: f64 = (1..=top)
        .map(|n| {
            let cand = ngram_set(candidate, n);
            let src = ngram_set(source, n);
            let shared = cand.intersection(&src).count();
            1.0 - shared as f64 / cand.len() as f64
        })
        .sum();
    Ok(total / top as f64)
}

/// Intersection over union of the two token sets.
pub fn jaccard<T: Hash + Eq>(a: &[T], b: &[T]) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::argument("Jaccard of two empty sequences is undefined"));
    }
    let sa: HashSet<&T> = a.iter().collect();
    let sb: HashSet<&T> = b.iter().collect();
    let inter = sa.intersection(&sb).count();
    let union = sa.len() + sb.len() - inter;
    Ok(inter as f64 / union as f64)
}

/// Precision, recall and F1 of clipped n-gram matches for n = 1..3, on surface
/// tokens and on lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapFeatures {
    /// `[n-1][0..3]` = (precision, recall, F) over surface tokens.
    pub surface: [[f64; 3]; 3],
    /// Same layout over lemmas.
    pub lemma: [[f64; 3]; 3],
}

impl OverlapFeatures {
    pub const LEN: usize = 18;

    /// Flattened as surface p1 r1 f1 p2 r2 f2 p3 r3 f3, then the lemma block.
    pub fn to_vec(&self) -> Vec<f64> {
        self.surface
            .iter()
            .chain(self.lemma.iter())
            .flat_map(|prf| prf.iter().copied())
            .collect()
    }
}

fn prf<T: Hash + Eq>(s1: &[T], s2: &[T], n: usize) -> [f64; 3] {
    let (c1, c2) = match (ngrams(s1, n), ngrams(s2, n)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return [0.0; 3],
    };
    let total1: usize = c1.values().sum();
    let total2: usize = c2.values().sum();
    if total1 == 0 || total2 == 0 {
        return [0.0; 3];
    }
    let matches: usize = c1
        .iter()
        .map(|(g, &k)| k.min(c2.get(g).copied().unwrap_or(0)))
        .sum();
    let p = matches as f64 / total1 as f64;
    let r = matches as f64 / total2 as f64;
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    [p, r, f]
}

/// The 18 n-gram overlap features. Precision normalizes the clipped match
/// count by the n-grams of `s1`, recall by those of `s2`; orders longer than a
/// sentence yield zeros.
pub fn overlap_features<T: Hash + Eq>(
    s1_tokens: &[T],
    s1_lemmas: &[T],
    s2_tokens: &[T],
    s2_lemmas: &[T],
) -> OverlapFeatures {
    let block = |a: &[T], b: &[T]| [prf(a, b, 1), prf(a, b, 2), prf(a, b, 3)];
    OverlapFeatures {
        surface: block(s1_tokens, s2_tokens),
        lemma: block(s1_lemmas, s2_lemmas),
    }
}

/// Character-level Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - levenshtein / max(len)`, over characters. Two empty strings score 1.
pub fn edit_distance_score(s1: &str, s2: &str) -> f64 {
    let longest = s1.chars().count().max(s2.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(s1, s2) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn ngram_counts() {
        let aba = toks("a b a");
        let c = ngrams(&aba, 1).unwrap();
        assert_eq!(c[&["a"][..]], 2);
        assert_eq!(c[&["b"][..]], 1);
        let abc = toks("a b c");
        let c = ngrams(&abc, 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[&["a", "b"][..]], 1);
        assert!(ngrams(&toks("a"), 2).unwrap().is_empty());
        assert!(ngrams(&toks("a"), 0).is_err());
    }

    #[test]
    fn pinc_examples() {
        let s = toks("the cat sat down");
        assert_eq!(pinc(&s, &s, 4).unwrap(), 0.0);
        assert_eq!(pinc(&toks("a b"), &toks("c d e"), 4).unwrap(), 1.0);
        assert_relative_eq!(
            pinc(&toks("a b c"), &toks("a b d"), 2).unwrap(),
            (1.0 / 3.0 + 0.5) / 2.0,
            epsilon = 1e-12
        );
        assert!(pinc(&toks("a"), &[], 4).is_err());
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&toks("a b"), &toks("b a")).unwrap(), 1.0);
        assert_eq!(jaccard(&toks("a b"), &toks("c")).unwrap(), 0.0);
        assert_eq!(jaccard(&toks("a b c"), &toks("b c d")).unwrap(), 0.5);
        assert!(jaccard::<&str>(&[], &[]).is_err());
    }

    #[test]
    fn overlap_examples() {
        let (a, b) = (toks("a b"), toks("a c"));
        let f = overlap_features(&a, &a, &b, &b);
        assert_eq!(f.surface[0], [0.5, 0.5, 0.5]);
        assert_eq!(f.surface[1], [0.0; 3]);
        assert_eq!(f.surface[2], [0.0; 3]);

        let s = toks("x y");
        let f = overlap_features(&s, &s, &s, &s);
        assert_eq!(f.surface[0], [1.0; 3]);
        assert_eq!(f.surface[1], [1.0; 3]);
        assert_eq!(f.surface[2], [0.0; 3]);

        let (a, b) = (toks("a a"), toks("a"));
        let f = overlap_features(&a, &a, &b, &b);
        assert_eq!(f.surface[0][0], 0.5);
        assert_eq!(f.surface[0][1], 1.0);
        assert_relative_eq!(f.surface[0][2], 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(f.to_vec().len(), OverlapFeatures::LEN);
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance_score("ab", "ab"), 1.0);
        assert_eq!(edit_distance_score("ab", "cd"), 0.0);
        assert_relative_eq!(edit_distance_score("kitten", "sitting"), 1.0 - 3.0 / 7.0, epsilon = 1e-12);
        assert_eq!(edit_distance_score("", ""), 1.0);
        assert_eq!(levenshtein("", "abc"), 3);
    }
}
