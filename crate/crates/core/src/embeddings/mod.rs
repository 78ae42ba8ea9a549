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

//! Word-vector tables and weighted / orthogonal matrix factorization of the
//! word-sentence matrix.

mod factor;
mod matrix;
mod table;

pub use factor::{
    factorize, objective, objective_gradient, read_factor_model, write_factor_model, FactorConfig, FactorModel,
    Factorization,
};
pub use matrix::TermSentenceMatrix;
pub use table::{cosine, load_embeddings, sentence_vector_sum, EmbeddingTable, LoadOptions, LoadReport};

use crate::{Error, Result};

/// `[v1 + v2, |v1 - v2|]`.
pub fn pair_features_vec(v1: &[f64], v2: &[f64]) -> Result<Vec<f64>> {
    if v1.len() != v2.len() {
        return Err(Error::argument(format!(
            "vector dimensions differ: {} vs {}",
            v1.len(),
            v2.len()
        )));
    }
    let sum = v1.iter().zip(v2).map(|(a, b)| a + b);
    let diff = v1.iter().zip(v2).map(|(a, b)| (a - b).abs());
    Ok(sum.chain(diff).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_vec_examples() {
        assert_eq!(pair_features_vec(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), vec![2.0, 4.0, 0.0, 0.0]);
        assert_eq!(pair_features_vec(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), vec![1.0, 1.0, 1.0, 1.0]);
        assert!(pair_features_vec(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pair_vec_swap_invariant() {
        let (a, b) = ([0.3, -1.5, 2.0], [1.1, 0.2, -0.7]);
        assert_eq!(pair_features_vec(&a, &b).unwrap(), pair_features_vec(&b, &a).unwrap());
    }
}
