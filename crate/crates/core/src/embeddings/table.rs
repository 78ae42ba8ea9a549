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
use std::io::BufRead;

use crate::{Error, Result};

/// Word vectors sharing one dimension. Stored as `f32` to keep large public
/// tables in memory; arithmetic is done in `f64`.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: HashMap<String, Vec<f32>>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Fold words to lowercase; the first spelling seen wins.
    pub lowercase: bool,
    /// Keep only these words (after lowercasing, if enabled).
    pub vocabulary: Option<HashSet<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    /// Lines whose word had already been loaded.
    pub duplicates: usize,
    /// Whether a `count dimension` header line was skipped.
    pub header_skipped: bool,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        EmbeddingTable {
            dimension,
            vectors: HashMap::new(),
        }
    }

    /// Adds a vector; an existing word keeps its first vector.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f64]) -> Result<bool> {
        if vector.len() != self.dimension {
            return Err(Error::argument(format!(
                "vector has dimension {}, table has {}",
                vector.len(),
                self.dimension
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument("vector has non-finite entries"));
        }
        let word = word.into();
        if self.vectors.contains_key(&word) {
            return Ok(false);
        }
        self.vectors.insert(word, vector.iter().map(|&v| v as f32).collect());
        Ok(true)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }
}

fn is_header(fields: &[&str]) -> bool {
    fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok())
}

/// Reads the whitespace-separated text format (`word v1 ... vd` per line, an
/// optional `count dimension` header first). The dimension comes from the
/// first vector line; any later line with a different number of values is a
/// format error naming that line. Once the dimension is known, extra leading
/// fields are treated as part of a multi-token word.
pub fn load_embeddings<R: BufRead>(reader: R, options: &LoadOptions) -> Result<(EmbeddingTable, LoadReport)> {
    let mut table: Option<EmbeddingTable> = None;
    let mut report = LoadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if table.is_none() && !report.header_skipped && is_header(&fields) {
            report.header_skipped = true;
            let dim: usize = fields[1].parse().unwrap_or(0);
            if dim > 0 {
                table = Some(EmbeddingTable::new(dim));
            }
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::format(line_no, "expected a word followed by values"));
        }
        let dim = table.as_ref().map_or(fields.len() - 1, EmbeddingTable::dimension);
        if fields.len() < dim + 1 || (table.is_some() && fields.len() != dim + 1 && !is_multiword(&fields, dim)) {
            return Err(Error::format(
                line_no,
                format!("expected {dim} values, found {}", fields.len() - 1),
            ));
        }
        let split = fields.len() - dim;
        let values: Vec<f64> = fields[split..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format(line_no, format!("bad value: {e}")))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::format(line_no, "non-finite value"));
        }
        let mut word = fields[..split].join(" ");
        if options.lowercase {
            word = word.to_lowercase();
        }
        let table = table.get_or_insert_with(|| EmbeddingTable::new(dim));
        if options.vocabulary.as_ref().is_some_and(|v| !v.contains(&word)) {
            continue;
        }
        if !table.insert(word, &values)? {
            report.duplicates += 1;
        }
    }
    Ok((table.unwrap_or_default(), report))
}

/// A line with more than `dim + 1` fields is a multi-token word only if the
/// surplus leading fields are not numbers; otherwise the row has the wrong
/// dimension.
fn is_multiword(fields: &[&str], dim: usize) -> bool {
    let split = fields.len() - dim;
    fields[1..split].iter().any(|f| f.parse::<f64>().is_err())
}

/// Elementwise sum of the in-vocabulary token vectors (zeros if none).
pub fn sentence_vector_sum<S: AsRef<str>>(tokens: &[S], table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dimension()];
    for v in tokens.iter().filter_map(|t| table.get(t.as_ref())) {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += f64::from(*x);
        }
    }
    sum
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}
