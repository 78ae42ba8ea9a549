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

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{SentencePair, Tweet, UrlGroup};
use crate::textnorm::split_sentences;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStrategy {
    /// One original sentence against up to `max_candidates` candidates.
    OriginalVsRest,
    /// Every unordered pair of tweets, capped at `max_candidates` pairs.
    AllPairs,
}

/// Groups resolved tweets by canonical URL.
///
/// A tweet with k URLs lands in k groups. Groups with fewer than two
/// non-auto-retweet tweets are dropped. Tweets are ordered by timestamp (ties
/// by id) and groups by URL. `seed_account` is the author of the earliest
/// tweet written by one of `seed_accounts`, if any.
pub fn group_by_url(tweets: &[Tweet], seed_accounts: &HashSet<String>) -> Vec<UrlGroup> {
    let mut by_url: BTreeMap<&str, Vec<&Tweet>> = BTreeMap::new();
    for t in tweets {
        for u in &t.urls {
            by_url.entry(u.as_str()).or_default().push(t);
        }
    }
    by_url
        .into_iter()
        .filter(|(_, ts)| ts.iter().filter(|t| !t.is_auto_retweet).count() >= 2)
        .map(|(url, mut ts)| {
            ts.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
            let seed_account = ts
                .iter()
                .find(|t| seed_accounts.contains(&t.author))
                .map(|t| t.author.clone());
            UrlGroup {
                url: url.to_string(),
                seed_account,
                tweets: ts.into_iter().cloned().collect(),
            }
        })
        .collect()
}

/// Collapses runs of whitespace to single spaces and trims.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn first_sentence(text: &str) -> Option<String> {
    split_sentences(text).into_iter().next()
}

/// Builds candidate sentence pairs from a (retweet-filtered) group. Each tweet
/// contributes its first sentence; pairs whose sides are equal after
/// whitespace normalization are skipped, as are repeated candidates.
///
/// Under [`PairStrategy::OriginalVsRest`] the original is the earliest tweet
/// by the group's seed account (or the earliest tweet overall) and candidates
/// follow in timestamp order. Pair ids are `"{original id}-{candidate id}"`.
pub fn generate_pairs(group: &UrlGroup, max_candidates: usize, strategy: PairStrategy) -> Vec<SentencePair> {
    let tweets: Vec<&Tweet> = group.tweets.iter().filter(|t| !t.is_auto_retweet).collect();
    if tweets.len() < 2 {
        return Vec::new();
    }
    let sentences: Vec<Option<String>> = tweets.iter().map(|t| first_sentence(&t.text)).collect();
    let make = |i: usize, j: usize| -> Option<SentencePair> {
        let (s1, s2) = (sentences[i].as_ref()?, sentences[j].as_ref()?);
        (normalize_whitespace(s1) != normalize_whitespace(s2)).then(|| SentencePair {
            pair_id: format!("{}-{}", tweets[i].id, tweets[j].id),
            url: Some(group.url.clone()),
            s1: s1.clone(),
            s2: s2.clone(),
        })
    };
    let mut seen = HashSet::new();
    let mut fresh = |p: &SentencePair| seen.insert((normalize_whitespace(&p.s1), normalize_whitespace(&p.s2)));
    match strategy {
        PairStrategy::OriginalVsRest => {
            let original = group
                .seed_account
                .as_ref()
                .and_then(|seed| tweets.iter().position(|t| &t.author == seed))
                .unwrap_or(0);
            (0..tweets.len())
                .filter(|&j| j != original)
                .filter_map(|j| make(original, j))
                .filter(|p| fresh(p))
                .take(max_candidates)
                .collect()
        }
        PairStrategy::AllPairs => (0..tweets.len())
            .flat_map(|i| (i + 1..tweets.len()).map(move |j| (i, j)))
            .filter_map(|(i, j)| make(i, j))
            .filter(|p| fresh(p))
            .take(max_candidates)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(id: &str, author: &str, ts: i64, text: &str, urls: &[&str]) -> Tweet {
        Tweet {
            id: id.into(),
            author: author.into(),
            text: text.into(),
            urls: urls.iter().map(|s| s.to_string()).collect(),
            timestamp: ts,
            is_auto_retweet: false,
        }
    }

    #[test]
    fn size_two_floor() {
        let ts = vec![
            tweet("1", "a", 3, "x", &["u"]),
            tweet("2", "a", 1, "y", &["u"]),
            tweet("3", "a", 2, "z", &["u"]),
            tweet("4", "a", 0, "w", &["v"]),
        ];
        let groups = group_by_url(&ts, &HashSet::new());
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].url, "u");
        let ids: Vec<&str> = groups[0].tweets.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["2", "3", "1"]);
    }

    #[test]
    fn multi_membership() {
        let ts = vec![
            tweet("1", "a", 0, "x", &["u", "v"]),
            tweet("2", "a", 1, "y", &["u"]),
            tweet("3", "a", 2, "z", &["v"]),
        ];
        let groups = group_by_url(&ts, &HashSet::new());
        let sizes: Vec<(&str, usize)> = groups.iter().map(|g| (g.url.as_str(), g.tweets.len())).collect();
        assert_eq!(sizes, vec![("u", 2), ("v", 2)]);
    }

    #[test]
    fn empty_input() {
        assert!(group_by_url(&[], &HashSet::new()).is_empty());
    }

    #[test]
    fn auto_retweets_do_not_count_toward_floor() {
        let mut ts = vec![tweet("1", "a", 0, "x", &["u"]), tweet("2", "a", 1, "y", &["u"])];
        ts[1].is_auto_retweet = true;
        assert!(group_by_url(&ts, &HashSet::new()).is_empty());
    }

    #[test]
    fn seed_account_chooses_original() {
        let ts = vec![
            tweet("1", "fan", 0, "first words", &["u"]),
            tweet("2", "nytimes", 5, "The headline. More text.", &["u"]),
            tweet("3", "fan2", 9, "a rephrasing", &["u"]),
        ];
        let seeds: HashSet<String> = ["nytimes".to_string()].into();
        let g = &group_by_url(&ts, &seeds)[0];
        assert_eq!(g.seed_account.as_deref(), Some("nytimes"));
        let pairs = generate_pairs(g, 10, PairStrategy::OriginalVsRest);
        assert_eq!(pairs.len(), 2);
        assert!(pairs.iter().all(|p| p.s1 == "The headline."));
        assert_eq!(pairs[0].pair_id, "2-1");
        assert_eq!(pairs[1].s2, "a rephrasing");
    }

    fn group_of(n: usize) -> UrlGroup {
        UrlGroup {
            url: "u".into(),
            seed_account: None,
            tweets: (0..n)
                .map(|i| tweet(&i.to_string(), "a", i as i64, &format!("sentence number {i}"), &["u"]))
                .collect(),
        }
    }

    #[test]
    fn ten_candidates_share_original() {
        let pairs = generate_pairs(&group_of(11), 10, PairStrategy::OriginalVsRest);
        assert_eq!(pairs.len(), 10);
        assert!(pairs.iter().all(|p| p.s1 == "sentence number 0"));
    }

    #[test]
    fn all_pairs_of_three() {
        assert_eq!(generate_pairs(&group_of(3), 100, PairStrategy::AllPairs).len(), 3);
        assert_eq!(generate_pairs(&group_of(5), 4, PairStrategy::AllPairs).len(), 4);
    }

    #[test]
    fn singleton_group() {
        assert!(generate_pairs(&group_of(1), 10, PairStrategy::OriginalVsRest).is_empty());
    }

    #[test]
    fn identical_sides_skipped() {
        let mut g = group_of(3);
        g.tweets[1].text = "sentence  number 0".into();
        let pairs = generate_pairs(&g, 10, PairStrategy::OriginalVsRest);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].pair_id, "0-2");
    }
}
