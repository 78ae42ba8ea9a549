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

//! Surface similarity metrics and evaluation statistics.

mod eval;
mod surface;

pub use eval::{cohen_kappa, histogram, max_f1, pearson, write_histogram_csv, HistogramBin, PrPoint};
pub use surface::{
    edit_distance_score, jaccard, levenshtein, ngrams, overlap_features, pinc, OverlapFeatures, PINC_MAX_N,
};
