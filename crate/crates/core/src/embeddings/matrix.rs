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

use crate::{Error, Result};

/// Sparse word-by-sentence matrix. Stored cells are exactly the observed
/// (non-zero) entries; every other cell is an unobserved zero.
#[derive(Debug, Clone)]
pub struct TermSentenceMatrix {
    pub(crate) vocab: Vec<String>,
    pub(crate) index: HashMap<String, usize>,
    pub(crate) idf: Vec<f64>,
    /// Per sentence: (word row, value), rows ascending.
    pub(crate) cols: Vec<Vec<(usize, f64)>>,
    /// Per word: (sentence column, value), columns ascending.
    pub(crate) rows: Vec<Vec<(usize, f64)>>,
}

/// Raw term frequencies of a token list against a vocabulary index.
pub(crate) fn term_counts<S: AsRef<str>>(tokens: &[S], index: &HashMap<String, usize>) -> Vec<(usize, f64)> {
    let mut counts: HashMap<usize, f64> = HashMap::new();
    for t in tokens {
        if let Some(&i) = index.get(t.as_ref()) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let mut v: Vec<(usize, f64)> = counts.into_iter().collect();
    v.sort_unstable_by_key(|&(i, _)| i);
    v
}

impl TermSentenceMatrix {
    /// tf-idf matrix with tf = raw count and idf = ln(N / df). Vocabulary rows
    /// are sorted alphabetically. A word present in every sentence has idf 0,
    /// so its row holds no observed cells.
    pub fn from_sentences<S: AsRef<str>>(sentences: &[Vec<S>]) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::argument("cannot build a term-sentence matrix from no sentences"));
        }
        let mut df: HashMap<&str, usize> = HashMap::new();
        for s in sentences {
            let mut seen: Vec<&str> = s.iter().map(AsRef::as_ref).collect();
            seen.sort_unstable();
            seen.dedup();
            for w in seen {
                *df.entry(w).or_insert(0) += 1;
            }
        }
        let mut vocab: Vec<String> = df.keys().map(|w| w.to_string()).collect();
        vocab.sort();
        let n = sentences.len() as f64;
        let idf: Vec<f64> = vocab.iter().map(|w| (n / df[w.as_str()] as f64).ln()).collect();
        let index: HashMap<String, usize> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let cols = sentences
            .iter()
            .map(|s| {
                term_counts(s, &index)
                    .into_iter()
                    .map(|(i, tf)| (i, tf * idf[i]))
                    .filter(|&(_, v)| v != 0.0)
                    .collect()
            })
            .collect();
        Ok(Self::assemble(vocab, index, idf, cols))
    }

    /// A matrix from dense rows (rows = words). Non-zero cells are observed.
    /// Words are named `w0, w1, ...` and idf is 1.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n_cols == 0 || rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::argument("dense matrix must be non-empty and rectangular"));
        }
        let vocab: Vec<String> = (0..rows.len()).map(|i| format!("w{i}")).collect();
        let index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let cols = (0..n_cols)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .filter(|(_, r)| r[j] != 0.0)
                    .map(|(i, r)| (i, r[j]))
                    .collect()
            })
            .collect();
        Ok(Self::assemble(vocab, index, vec![1.0; rows.len()], cols))
    }

    fn assemble(
        vocab: Vec<String>,
        index: HashMap<String, usize>,
        idf: Vec<f64>,
        cols: Vec<Vec<(usize, f64)>>,
    ) -> Self {
        let mut rows = vec![Vec::new(); vocab.len()];
        for (j, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                rows[i].push((j, v));
            }
        }
        TermSentenceMatrix {
            vocab,
            index,
            idf,
            cols,
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.vocab.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn idf(&self, word: &str) -> Option<f64> {
        self.index.get(word).map(|&i| self.idf[i])
    }

    /// Value of a cell (0 when unobserved).
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cols[col]
            .binary_search_by_key(&row, |&(i, _)| i)
            .map_or(0.0, |k| self.cols[col][k].1)
    }

    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.cols[col].binary_search_by_key(&row, |&(i, _)| i).is_ok()
    }

    /// Observation weight of a cell: 1 when observed, `missing_weight` otherwise.
    pub fn weight(&self, row: usize, col: usize, missing_weight: f64) -> f64 {
        if self.is_observed(row, col) {
            1.0
        } else {
            missing_weight
        }
    }

    pub(crate) fn squared_sum(&self) -> f64 {
        self.cols.iter().flatten().map(|&(_, v)| v * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sentence_dense_and_observed() {
        // N = 1: every word appears in the only sentence, so idf = ln(1) = 0.
        let m = TermSentenceMatrix::from_sentences(&[vec!["a", "b"]]).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (2, 1));
        assert_eq!(m.idf("a"), Some(0.0));
        assert!(!m.is_observed(0, 0));
    }

    #[test]
    fn tf_idf_and_weights() {
        let m = TermSentenceMatrix::from_sentences(&[vec!["a", "b", "b"], vec!["a", "c"]]).unwrap();
        let b = m.index["b"];
        let c = m.index["c"];
        let ln2 = 2f64.ln();
        assert!((m.get(b, 0) - 2.0 * ln2).abs() < 1e-12);
        assert_eq!(m.get(c, 0), 0.0);
        assert_eq!(m.weight(c, 0, 0.01), 0.01);
        assert_eq!(m.weight(b, 0, 0.01), 1.0);
        // "a" occurs everywhere: zero row
        let a = m.index["a"];
        assert!(m.rows[a].is_empty());
        assert_eq!(m.idf("a"), Some(0.0));
    }

    #[test]
    fn empty_corpus_is_error() {
        assert!(TermSentenceMatrix::from_sentences::<&str>(&[]).is_err());
    }

    #[test]
    fn dense_construction() {
        let m = TermSentenceMatrix::from_dense(&[vec![2.0, 0.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(m.get(0, 0), 2.0);
        assert!(!m.is_observed(0, 1));
        assert_eq!(m.rows[1], vec![(0, 1.0), (1, 2.0)]);
        assert!(TermSentenceMatrix::from_dense(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
