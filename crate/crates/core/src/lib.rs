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

//! Paraphrase mining from URL-linked short-text posts.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] ingests posts, groups them by shared URL and turns groups into
//!   candidate sentence pairs and labeled datasets.
//! * [`textnorm`] tokenizes, splits, stems and removes manual retweets.
//! * [`metrics`] holds surface metrics (PINC, Jaccard, n-gram overlap) and
//!   evaluation statistics (max-F1, Pearson, Cohen's kappa).
//! * [`embeddings`] loads word vectors and trains weighted / orthogonal matrix
//!   factorization models for sentence embeddings.
//! * [`identify`] assembles pair features, trains logistic regression, evaluates
//!   the model zoo and mines silver-standard pairs.
//! * [`phrasal`] aligns sentence pairs, extracts and scores phrasal paraphrases.
//! * [`annotate`] is the crowd-labeling store behind the annotation service.

pub mod annotate;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod identify;
pub mod metrics;
pub mod phrasal;
pub mod textnorm;
pub(crate) mod util;

pub use error::{Error, Result};
