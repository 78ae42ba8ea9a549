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

use serde::Deserialize;
use serde_json::Value;

use super::Tweet;
use crate::{Error, Result};

/// Maps a (possibly shortened) URL to its canonical form.
pub trait UrlResolver {
    /// `None` means "unknown": the URL passes through unchanged.
    fn resolve(&self, url: &str) -> Option<String>;
}

impl UrlResolver for HashMap<String, String> {
    fn resolve(&self, url: &str) -> Option<String> {
        self.get(url).cloned()
    }
}

impl<F> UrlResolver for F
where
    F: Fn(&str) -> Option<String>,
{
    fn resolve(&self, url: &str) -> Option<String> {
        self(url)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct IngestReport {
    pub tweets: Vec<Tweet>,
    pub skipped: Vec<SkippedLine>,
}

#[derive(Deserialize)]
struct RawTweet {
    id: Value,
    text: String,
    #[serde(default)]
    urls: Vec<String>,
    #[serde(default)]
    timestamp: i64,
    #[serde(default)]
    author: String,
    #[serde(default)]
    retweeted: bool,
}

fn parse_record(line: &str) -> std::result::Result<Tweet, String> {
    let raw: RawTweet = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let id = match raw.id {
        Value::String(s) => s,
        Value::Number(n) => n.to_string(),
        other => return Err(format!("id must be a string or number, got {other}")),
    };
    if id.is_empty() {
        return Err("empty id".into());
    }
    if raw.text.trim().is_empty() {
        return Err("empty text".into());
    }
    let is_auto_retweet = raw.retweeted || raw.text.trim_start().starts_with("RT @");
    Ok(Tweet {
        id,
        author: raw.author,
        is_auto_retweet,
        urls: dedup_preserving_order(raw.urls),
        timestamp: raw.timestamp,
        text: raw.text,
    })
}

/// Parses line-delimited JSON tweet records. Bad lines are reported in
/// [`IngestReport::skipped`] and never stop the stream; only I/O errors do.
pub fn ingest_jsonl<R: BufRead>(reader: R) -> Result<IngestReport> {
    let mut report = IngestReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(&line) {
            Ok(t) => report.tweets.push(t),
            Err(reason) => report.skipped.push(SkippedLine { line: i + 1, reason }),
        }
    }
    Ok(report)
}

fn dedup_preserving_order(urls: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::new();
    urls.into_iter().filter(|u| seen.insert(u.clone())).collect()
}

/// Replaces each URL with its canonical form and removes duplicates that the
/// resolution introduces, keeping first-occurrence order.
pub fn resolve_urls(tweet: &Tweet, resolver: &dyn UrlResolver) -> Tweet {
    let urls = tweet
        .urls
        .iter()
        .map(|u| resolver.resolve(u).unwrap_or_else(|| u.clone()))
        .collect();
    Tweet {
        urls: dedup_preserving_order(urls),
        ..tweet.clone()
    }
}

/// Reads a `short<TAB>canonical` resolution table.
pub fn load_resolver_tsv<R: BufRead>(reader: R) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (short, canonical) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(i + 1, "expected two tab-separated columns"))?;
        map.entry(short.to_string())
            .or_insert_with(|| canonical.trim_end().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_fields() {
        let r = ingest_jsonl(r#"{"id":"1","text":"hello","urls":["u"]}"#.as_bytes()).unwrap();
        assert_eq!(r.tweets.len(), 1);
        assert!(!r.tweets[0].is_auto_retweet);
        assert_eq!(r.tweets[0].urls, vec!["u"]);
    }

    #[test]
    fn rt_marker_flags_auto_retweet() {
        let r = ingest_jsonl(r#"{"id":"2","text":"RT @a: hello"}"#.as_bytes()).unwrap();
        assert!(r.tweets[0].is_auto_retweet);
        let r = ingest_jsonl(r#"{"id":3,"text":"hello","retweeted":true}"#.as_bytes()).unwrap();
        assert!(r.tweets[0].is_auto_retweet);
        assert_eq!(r.tweets[0].id, "3");
    }

    #[test]
    fn bad_lines_are_skipped_not_fatal() {
        let input = "not json\n{\"id\":\"\",\"text\":\"x\"}\n{\"id\":\"4\",\"text\":\"  \"}\n{\"id\":\"5\",\"text\":\"ok\"}\n";
        let r = ingest_jsonl(input.as_bytes()).unwrap();
        assert_eq!(r.tweets.len(), 1);
        let lines: Vec<usize> = r.skipped.iter().map(|s| s.line).collect();
        assert_eq!(lines, vec![1, 2, 3]);
    }

    #[test]
    fn only_bad_line() {
        let r = ingest_jsonl("not json".as_bytes()).unwrap();
        assert!(r.tweets.is_empty());
        assert_eq!(r.skipped.len(), 1);
    }

    fn with_urls(urls: &[&str]) -> Tweet {
        Tweet {
            id: "1".into(),
            author: String::new(),
            text: "x".into(),
            urls: urls.iter().map(|s| s.to_string()).collect(),
            timestamp: 0,
            is_auto_retweet: false,
        }
    }

    #[test]
    fn resolution() {
        let map: HashMap<String, String> =
            [("t.co/x".to_string(), "nytimes.com/a".to_string())].into();
        assert_eq!(resolve_urls(&with_urls(&["t.co/x"]), &map).urls, vec!["nytimes.com/a"]);
        assert_eq!(resolve_urls(&with_urls(&["a", "a"]), &map).urls, vec!["a"]);
        assert_eq!(
            resolve_urls(&with_urls(&["t.co/x", "nytimes.com/a"]), &map).urls,
            vec!["nytimes.com/a"]
        );
        let closure = |u: &str| (u == "b").then(|| "c".to_string());
        assert_eq!(resolve_urls(&with_urls(&["b", "d"]), &closure).urls, vec!["c", "d"]);
    }

    #[test]
    fn resolver_tsv() {
        let map = load_resolver_tsv("t.co/x\tnyt.com/a\n\nt.co/x\tother\n".as_bytes()).unwrap();
        assert_eq!(map["t.co/x"], "nyt.com/a");
        assert!(matches!(
            load_resolver_tsv("nocolumns\n".as_bytes()),
            Err(Error::Format { line: 1, .. })
        ));
    }
}
