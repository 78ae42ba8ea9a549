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

use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use proptest::prelude::*;
use urlpara::corpus::{group_by_url, group_similarity, group_statistics, ingest_jsonl, Tweet, UrlGroup};
use urlpara::textnorm::{filter_group, load_page_meta, PageMeta};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn fixture_groups() -> Vec<UrlGroup> {
    let report = ingest_jsonl(BufReader::new(File::open(fixture("tweets.jsonl")).unwrap())).unwrap();
    assert!(report.skipped.is_empty());
    group_by_url(&report.tweets, &HashSet::new())
}

fn filtered(groups: &[UrlGroup]) -> Vec<UrlGroup> {
    let (meta, _) = load_page_meta(BufReader::new(File::open(fixture("pages.jsonl")).unwrap())).unwrap();
    groups
        .iter()
        .map(|g| filter_group(g, meta.get(&g.url).unwrap_or(&PageMeta::default())))
        .collect()
}

#[test]
fn note7_group_keeps_the_enumerated_survivors() {
    let groups = fixture_groups();
    let note7 = filtered(&groups)
        .into_iter()
        .find(|g| g.url.ends_with("note7"))
        .unwrap();
    let expected: Vec<String> = std::fs::read_to_string(fixture("note7_survivors.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(String::from)
        .collect();
    let got: Vec<String> = note7.tweets.iter().map(|t| t.id.clone()).collect();
    assert_eq!(got, expected);
}

#[test]
fn filtering_moves_statistics_in_the_expected_direction() {
    let before = fixture_groups();
    let after = filtered(&before);
    let (b, a) = (group_statistics(&before), group_statistics(&after));
    assert!(a.mean_group_size < b.mean_group_size);
    assert!(a.mean_pinc > b.mean_pinc);
    assert!(a.mean_jaccard < b.mean_jaccard);
}

#[test]
fn filtering_is_idempotent_on_the_fixture() {
    let once = filtered(&fixture_groups());
    assert_eq!(filtered(&once), once);
}

const WORDS: &[&str] = &[
    "phone", "fire", "recall", "battery", "samsung", "note", "owners", "stores", "sales", "stock", "market", "shares",
    "rates", "bank", "quake", "rescue", "city", "storm", "power", "flight", "airline", "delay", "vote", "senate",
];

fn tweet(i: usize, text: String) -> Tweet {
    Tweet {
        id: format!("t{i:03}"),
        author: format!("u{i}"),
        text,
        urls: vec!["u".into()],
        timestamp: i as i64,
        is_auto_retweet: false,
    }
}

/// Distinct base sentences plus copies made by adding punctuation, a
/// hashtag or a trailing link, or by keeping a prefix.
fn near_duplicate_group() -> impl Strategy<Value = UrlGroup> {
    let base = prop::collection::vec(prop::sample::select(WORDS), 4..9);
    (
        prop::collection::vec(base, 2..6),
        prop::collection::vec((any::<prop::sample::Index>(), 0u8..4), 1..6),
    )
        .prop_map(|(bases, copies)| {
            let mut texts: Vec<String> = bases.iter().map(|b| b.join(" ")).collect();
            for (which, how) in copies {
                let b = &bases[which.index(bases.len())];
                texts.push(match how {
                    0 => format!("{}!", b.join(" ")),
                    1 => format!("{} #news", b.join(" ")),
                    2 => format!("{} https://t.co/x", b.join(" ")),
                    _ => b[..b.len() - 1].join(" "),
                });
            }
            UrlGroup {
                url: "u".into(),
                seed_account: None,
                tweets: texts.into_iter().enumerate().map(|(i, t)| tweet(i, t)).collect(),
            }
        })
}

proptest! {
    #[test]
    fn removing_copies_raises_pinc_and_lowers_jaccard(group in near_duplicate_group()) {
        let out = filter_group(&group, &PageMeta::default());
        prop_assert!(!out.tweets.is_empty());
        prop_assert_eq!(filter_group(&out, &PageMeta::default()), out.clone());
        if out.tweets.len() < group.tweets.len() {
            let (pb, jb) = group_similarity(&group).unwrap();
            if let Some((pa, ja)) = group_similarity(&out) {
                prop_assert!(pa >= pb - 1e-12, "PINC {} -> {}", pb, pa);
                prop_assert!(ja <= jb + 1e-12, "Jaccard {} -> {}", jb, ja);
            }
        }
    }
}
