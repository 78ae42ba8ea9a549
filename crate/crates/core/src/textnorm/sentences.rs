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
use std::sync::LazyLock;

use crate::util::table_lines;

static ABBREVIATIONS: LazyLock<HashSet<&'static str>> = LazyLock::new(|| {
    table_lines(include_str!("../../data/abbreviations.txt"))
        .map(str::trim)
        .collect()
});

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}'];

/// True iff the lowercased chunk is in the shipped abbreviation list.
pub fn is_abbreviation(chunk: &str) -> bool {
    ABBREVIATIONS.contains(chunk.to_lowercase().as_str())
}

/// Splits text into sentences at whitespace-delimited chunks ending in `.`, `!`
/// or `?` (optionally followed by closing quotes or brackets).
///
/// Dots inside a chunk (URLs, decimals, `U.S.`) never split, and a chunk that
/// is a listed abbreviation does not end a sentence. Sentences are slices of
/// the input with surrounding whitespace removed; empty sentences are never
/// returned.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut end = 0;
    for (offset, chunk) in chunks(text) {
        start.get_or_insert(offset);
        end = offset + chunk.len();
        if ends_sentence(chunk) {
            out.push(text[start.take().unwrap()..end].to_string());
        }
    }
    if let Some(s) = start {
        out.push(text[s..end].to_string());
    }
    out
}

fn ends_sentence(chunk: &str) -> bool {
    let core = chunk.trim_end_matches(CLOSERS);
    if !core.ends_with(['.', '!', '?']) {
        return false;
    }
    if core.ends_with('.') && !core.ends_with("..") && is_abbreviation(core) {
        return false;
    }
    // a chunk made only of punctuation (e.g. a lone "...") still ends a sentence
    true
}

/// Whitespace-separated chunks with their byte offsets.
fn chunks(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut pos = 0;
    std::iter::from_fn(move || {
        let rest = &text[pos..];
        let skip = rest.len() - rest.trim_start().len();
        let rest = &rest[skip..];
        if rest.is_empty() {
            return None;
        }
        let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let start = pos + skip;
        pos = start + len;
        Some((start, &text[start..start + len]))
    })
}
