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

use serde::{Deserialize, Serialize};

use super::UrlGroup;
use crate::metrics::{jaccard, pinc, PINC_MAX_N};
use crate::textnorm::{tokenize, TokenKind};

/// Corpus-level summary of URL groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub groups: usize,
    pub tweets: usize,
    pub mean_group_size: f64,
    /// Mean over groups of the mean PINC over ordered tweet pairs.
    pub mean_pinc: f64,
    /// Mean over groups of the mean Jaccard over tweet pairs.
    pub mean_jaccard: f64,
}

fn comparison_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Url)
        .map(|t| t.surface)
        .collect()
}

/// Within-group (PINC, Jaccard) means, or `None` for groups with fewer than
/// two non-auto-retweet tweets.
pub fn group_similarity(group: &UrlGroup) -> Option<(f64, f64)> {
    let toks: Vec<Vec<String>> = group
        .tweets
        .iter()
        .filter(|t| !t.is_auto_retweet)
        .map(|t| comparison_tokens(&t.text))
        .collect();
    let (mut p_sum, mut p_n, mut j_sum, mut j_n) = (0.0, 0usize, 0.0, 0usize);
    for a in 0..toks.len() {
        for b in 0..toks.len() {
            if a == b {
                continue;
            }
            if let Ok(v) = pinc(&toks[a], &toks[b], PINC_MAX_N) {
                p_sum += v;
                p_n += 1;
            }
            if a < b {
                if let Ok(v) = jaccard(&toks[a], &toks[b]) {
                    j_sum += v;
                    j_n += 1;
                }
            }
        }
    }
    (p_n > 0 && j_n > 0).then(|| (p_sum / p_n as f64, j_sum / j_n as f64))
}

pub fn group_statistics(groups: &[UrlGroup]) -> GroupStats {
    let tweets: usize = groups.iter().map(|g| g.tweets.len()).sum();
    let sims: Vec<(f64, f64)> = groups.iter().filter_map(group_similarity).collect();
    let mean = |f: fn(&(f64, f64)) -> f64| {
        if sims.is_empty() {
            0.0
        } else {
            sims.iter().map(f).sum::<f64>() / sims.len() as f64
        }
    };
    GroupStats {
        groups: groups.len(),
        tweets,
        mean_group_size: if groups.is_empty() { 0.0 } else { tweets as f64 / groups.len() as f64 },
        mean_pinc: mean(|s| s.0),
        mean_jaccard: mean(|s| s.1),
    }
}
