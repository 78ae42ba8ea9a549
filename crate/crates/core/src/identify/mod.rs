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

//! Paraphrase identification: pair features, logistic regression, the model
//! zoo, max-F1 evaluation and silver-standard mining.

mod evaluate;
mod features;
mod logistic;

pub use evaluate::{
    evaluate, mine_silver, silver_precision, write_report_tsv, EvalReport, LogisticScorer, PairScorer,
    RandomScorer, RawScorer, ScoredPair, ThresholdPoint, REPORT_HEADER,
};
pub use features::{
    assemble_features, assemble_matrix, factor_tokens, FeatureMode, FeatureSpec, PreparedSentence, Resources,
};
pub use logistic::{
    logistic_gradient, logistic_objective, predict_prob, sigmoid, train_logistic, LogisticConfig, LogisticModel,
    Standardizer, TrainedLinear,
};
