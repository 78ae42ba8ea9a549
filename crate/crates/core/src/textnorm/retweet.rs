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
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, Token, TokenKind};
use crate::corpus::UrlGroup;
use crate::Result;

/// The `twitter:title` / `twitter:description` meta tags of a linked page.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageMeta {
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
}

impl PageMeta {
    pub fn is_empty(&self) -> bool {
        self.title.is_none() && self.description.is_none()
    }
}

/// Page metadata keyed by canonical URL.
pub type PageMetaIndex = HashMap<String, PageMeta>;

#[derive(Deserialize)]
struct MetaRecord {
    url: String,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    description: Option<String>,
}

/// Reads the JSONL sidecar of page metadata (`{"url", "title", "description"}`
/// per line). Lines that fail to parse, lack a URL, or carry neither tag are
/// skipped and counted. A later record for the same URL replaces an earlier one.
pub fn load_page_meta<R: BufRead>(reader: R) -> Result<(PageMetaIndex, usize)> {
    let mut index = PageMetaIndex::new();
    let mut skipped = 0;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<MetaRecord>(&line) {
            Ok(rec) if !rec.url.is_empty() && (rec.title.is_some() || rec.description.is_some()) => {
                index.insert(
                    rec.url,
                    PageMeta {
                        title: rec.title,
                        description: rec.description,
                    },
                );
            }
            _ => skipped += 1,
        }
    }
    Ok((index, skipped))
}

/// Token sequence used for retweet comparison: a leading `RT @user:` is
/// removed, then all mentions and hashtags, then any trailing URLs.
pub fn strip_for_comparison(text: &str) -> Vec<Token> {
    let mut tokens = tokenize(text);
    if tokens.len() >= 2
        && tokens[0].kind == TokenKind::Word
        && tokens[0].surface == "rt"
        && tokens[1].kind == TokenKind::Mention
    {
        let cut = if tokens.get(2).is_some_and(|t| t.surface == ":") { 3 } else { 2 };
        tokens.drain(..cut);
    }
    tokens.retain(|t| !matches!(t.kind, TokenKind::Mention | TokenKind::Hashtag));
    while tokens.last().is_some_and(|t| t.kind == TokenKind::Url) {
        tokens.pop();
    }
    tokens
}

fn surfaces(tokens: &[Token]) -> Vec<&str> {
    tokens.iter().map(|t| t.surface.as_str()).collect()
}

fn without_punct(tokens: &[Token]) -> Vec<&str> {
    tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Punct)
        .map(|t| t.surface.as_str())
        .collect()
}

fn is_contiguous_subsequence(needle: &[&str], haystack: &[&str]) -> bool {
    needle.is_empty() || haystack.windows(needle.len()).any(|w| w == needle)
}

/// Removes a trailing `| Site Name` (or ` - Site Name`) from a page title.
fn strip_site_suffix(title: &str) -> &str {
    match title.rfind(" | ").or_else(|| title.rfind(" - ")) {
        Some(i) if i > 0 => &title[..i],
        _ => title,
    }
}

fn matches_meta(candidate: &[Token], meta: &PageMeta) -> bool {
    let cand = without_punct(candidate);
    let title = meta
        .title
        .as_deref()
        .map(|t| strip_for_comparison(strip_site_suffix(t)));
    let description = meta.description.as_deref().map(strip_for_comparison);
    [title, description]
        .into_iter()
        .flatten()
        .any(|m| !m.is_empty() && without_punct(&m) == cand)
}

/// True when `candidate` is a manual retweet of `original` or of the linked
/// page's title/description.
///
/// After [`strip_for_comparison`], the candidate is a retweet if one token
/// sequence is a contiguous subsequence of the other, if the two differ only
/// in punctuation tokens, or if it equals the page title or description
/// (punctuation ignored).
pub fn is_manual_retweet(candidate: &str, original: &str, meta: &PageMeta) -> bool {
    let cand = strip_for_comparison(candidate);
    let orig = strip_for_comparison(original);
    is_retweet_pair(&cand, &orig) || matches_meta(&cand, meta)
}

/// Removes automatic and manual retweets from a URL group.
///
/// Tweets are visited in timestamp order. The first tweet that is not an
/// automatic retweet is always kept; every later tweet is dropped if it is a
/// manual retweet of an already retained tweet or matches the page metadata.
pub fn filter_group(group: &UrlGroup, meta: &PageMeta) -> UrlGroup {
    let mut kept: Vec<(Vec<Token>, &crate::corpus::Tweet)> = Vec::new();
    for tweet in group.tweets.iter().filter(|t| !t.is_auto_retweet) {
        let stripped = strip_for_comparison(&tweet.text);
        let dup = !kept.is_empty()
            && (matches_meta(&stripped, meta)
                || kept.iter().any(|(k, _)| is_retweet_pair(&stripped, k)));
        if !dup {
            kept.push((stripped, tweet));
        }
    }
    UrlGroup {
        url: group.url.clone(),
        seed_account: group.seed_account.clone(),
        tweets: kept.into_iter().map(|(_, t)| t.clone()).collect(),
    }
}

fn is_retweet_pair(a: &[Token], b: &[Token]) -> bool {
    let (sa, sb) = (surfaces(a), surfaces(b));
    is_contiguous_subsequence(&sa, &sb)
        || is_contiguous_subsequence(&sb, &sa)
        || without_punct(a) == without_punct(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tweet;

    fn tweet(id: &str, ts: i64, text: &str) -> Tweet {
        Tweet {
            id: id.into(),
            author: "a".into(),
            text: text.into(),
            urls: vec!["u".into()],
            timestamp: ts,
            is_auto_retweet: false,
        }
    }

    fn group(texts: &[&str]) -> UrlGroup {
        UrlGroup {
            url: "u".into(),
            seed_account: None,
            tweets: texts
                .iter()
                .enumerate()
                .map(|(i, t)| tweet(&i.to_string(), i as i64, t))
                .collect(),
        }
    }

    #[test]
    fn rt_prefix_is_subsequence() {
        assert!(is_manual_retweet(
            "RT @cnnbrk: Samsung halts production",
            "Samsung halts production",
            &PageMeta::default()
        ));
    }

    #[test]
    fn punctuation_only_difference() {
        assert!(is_manual_retweet(
            "Samsung halts production!",
            "Samsung halts production",
            &PageMeta::default()
        ));
        assert!(is_manual_retweet(
            "Samsung, halts production",
            "Samsung halts - production",
            &PageMeta::default()
        ));
    }

    #[test]
    fn genuine_rephrasing_is_kept() {
        assert!(!is_manual_retweet(
            "in which a phone bonfire in 1995...",
            "Samsung halts production of its Galaxy Note 7",
            &PageMeta::default()
        ));
    }

    #[test]
    fn token_level_not_character_level() {
        assert!(!is_manual_retweet("art", "parties tonight", &PageMeta::default()));
    }

    #[test]
    fn meta_title_match() {
        let meta = PageMeta {
            title: Some("Samsung Halts Note 7 Production | Reuters".into()),
            description: None,
        };
        assert!(is_manual_retweet(
            "Samsung halts Note 7 production http://t.co/abc",
            "Something unrelated entirely",
            &meta
        ));
        assert!(!is_manual_retweet(
            "Samsung stops making the Note 7",
            "Something unrelated entirely",
            &meta
        ));
    }

    #[test]
    fn strip_removes_rt_mentions_hashtags_trailing_urls() {
        let s: Vec<String> = strip_for_comparison("RT @a: big news @b #tag http://x.co/1 http://y.co/2")
            .into_iter()
            .map(|t| t.surface)
            .collect();
        assert_eq!(s, vec!["big", "news"]);
    }

    #[test]
    fn identical_texts_collapse_to_one() {
        let g = group(&["same text here"; 5]);
        let f = filter_group(&g, &PageMeta::default());
        assert_eq!(f.tweets.len(), 1);
        assert_eq!(f.tweets[0].id, "0");
    }

    #[test]
    fn auto_retweets_removed() {
        let mut g = group(&["one thing", "another thing entirely"]);
        g.tweets[1].is_auto_retweet = true;
        assert_eq!(filter_group(&g, &PageMeta::default()).tweets.len(), 1);
    }

    #[test]
    fn first_tweet_survives_meta_match() {
        let meta = PageMeta {
            title: Some("Big storm hits coast".into()),
            description: None,
        };
        let g = group(&["Big storm hits coast", "Big storm hits coast!", "A hurricane makes landfall"]);
        let f = filter_group(&g, &meta);
        let ids: Vec<&str> = f.tweets.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, vec!["0", "2"]);
    }

    #[test]
    fn meta_sidecar_parsing() {
        let input = "{\"url\":\"u\",\"title\":\"T\"}\nnot json\n{\"url\":\"v\"}\n\n";
        let (index, skipped) = load_page_meta(input.as_bytes()).unwrap();
        assert_eq!(index.len(), 1);
        assert_eq!(index["u"].title.as_deref(), Some("T"));
        assert_eq!(skipped, 2);
    }
}
