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

//! Tweet ingestion, URL grouping, candidate-pair generation, labeled datasets
//! and crowd-vote aggregation.

mod dataset;
mod group;
mod ingest;
mod stats;

use serde::{Deserialize, Serialize};

pub use dataset::{
    aggregate_votes, export_labeled_tsv, import_labeled_tsv, import_msrp, import_pit2015, read_labeled_tsv,
    write_labeled_tsv, Dataset, GoldLabel, ImportReport, LabeledPair, Split, VoteThresholds, Votes,
};
pub use group::{generate_pairs, group_by_url, normalize_whitespace, PairStrategy};
pub use ingest::{ingest_jsonl, load_resolver_tsv, resolve_urls, IngestReport, SkippedLine, UrlResolver};
pub use stats::{group_similarity, group_statistics, GroupStats};

/// A short-text post with its canonical URLs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub author: String,
    pub text: String,
    pub urls: Vec<String>,
    pub timestamp: i64,
    pub is_auto_retweet: bool,
}

/// All tweets sharing one canonical URL, in ascending timestamp order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlGroup {
    pub url: String,
    pub seed_account: Option<String>,
    pub tweets: Vec<Tweet>,
}

/// An ordered sentence pair: `s1` is the original/reference side, `s2` the
/// candidate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentencePair {
    pub pair_id: String,
    pub url: Option<String>,
    pub s1: String,
    pub s2: String,
}
