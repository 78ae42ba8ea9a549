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

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::util::table_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Mention,
    Hashtag,
    Url,
    Number,
    Emoticon,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    fn new(surface: impl Into<String>, kind: TokenKind) -> Self {
        Token {
            surface: surface.into(),
            kind,
        }
    }
}

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?i:https?://[^\s/?#]+[^\s]*|www\.[^\s.]+\.[^\s]+)").unwrap());

static EMOTICONS: LazyLock<Vec<&'static str>> = LazyLock::new(|| {
    let mut v: Vec<&str> = table_lines(include_str!("../../data/emoticons.txt"))
        .map(str::trim)
        .collect();
    v.sort_by_key(|e| std::cmp::Reverse(e.len()));
    v
});

/// Characters stripped from the end of a URL chunk and emitted as punctuation.
const URL_TRAILERS: &[char] = &['.', ',', '!', '?', ';', ':', '\'', '"', ')', ']', '}'];

/// Clitics split off the end of a word, checked longest first. `n't` keeps the
/// Penn Treebank convention of attaching the negation to the clitic.
const CLITICS: &[&str] = &["n't", "'ll", "'re", "'ve", "'s", "'d", "'m"];

/// True iff the whole string is a URL under the tokenizer's URL rule.
pub fn is_url(s: &str) -> bool {
    URL_RE.find(s).is_some_and(|m| m.end() == s.len()) && !s.ends_with(URL_TRAILERS)
}

/// Splits `text` into typed tokens.
///
/// URLs, mentions, hashtags, emoticons and numbers each form one token. Other
/// text breaks at whitespace and punctuation, with English clitics split off
/// (`haven't` → `have`, `n't`). Words, mentions and hashtags are lowercased;
/// every other surface is kept verbatim. Runs of one repeated punctuation
/// character (`...`, `!!!`) form a single token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut out);
    }
    out
}

fn tokenize_chunk(chunk: &str, out: &mut Vec<Token>) {
    let mut rest = chunk;
    while !rest.is_empty() {
        if let Some(m) = URL_RE.find(rest) {
            let url = m.as_str().trim_end_matches(URL_TRAILERS);
            if is_url(url) {
                out.push(Token::new(url, TokenKind::Url));
                rest = &rest[url.len()..];
                continue;
            }
        }
        if let Some(emo) = match_emoticon(rest) {
            out.push(Token::new(emo, TokenKind::Emoticon));
            rest = &rest[emo.len()..];
            continue;
        }
        let mut chars = rest.chars();
        let first = chars.next().unwrap();
        if first == '@' || first == '#' {
            let body_len: usize = rest[1..]
                .chars()
                .take_while(|c| c.is_alphanumeric() || *c == '_')
                .map(char::len_utf8)
                .sum();
            if body_len > 0 {
                let kind = if first == '@' {
                    TokenKind::Mention
                } else {
                    TokenKind::Hashtag
                };
                out.push(Token::new(rest[..1 + body_len].to_lowercase(), kind));
                rest = &rest[1 + body_len..];
                continue;
            }
        }
        if first.is_alphanumeric() {
            let len = word_len(rest);
            push_word(&rest[..len], out);
            rest = &rest[len..];
            continue;
        }
        // punctuation: a run of the same character
        let len: usize = rest
            .chars()
            .take_while(|c| *c == first)
            .map(char::len_utf8)
            .sum();
        out.push(Token::new(&rest[..len], TokenKind::Punct));
        rest = &rest[len..];
    }
}

fn match_emoticon(s: &str) -> Option<&str> {
    EMOTICONS.iter().find_map(|e| {
        let tail = s.strip_prefix(e)?;
        // `:Dog` is not an emoticon followed by "og"
        let boundary = tail
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        boundary.then(|| &s[..e.len()])
    })
}

/// Byte length of the word or number starting at `s`: alphanumerics, internal
/// apostrophes followed by a letter, and digit-group separators inside numbers.
fn word_len(s: &str) -> usize {
    let bytes: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    let all_digits_so_far = |upto: usize| bytes[..upto].iter().all(|(_, c)| c.is_ascii_digit());
    while i < bytes.len() {
        let c = bytes[i].1;
        if c.is_alphanumeric() {
            i += 1;
            continue;
        }
        let next = bytes.get(i + 1).map(|(_, c)| *c);
        if (c == '\'' || c == '\u{2019}') && next.is_some_and(char::is_alphabetic) {
            i += 1;
            continue;
        }
        if (c == '.' || c == ',')
            && next.is_some_and(|n| n.is_ascii_digit())
            && all_digits_so_far(i)
        {
            i += 1;
            continue;
        }
        break;
    }
    bytes.get(i).map_or(s.len(), |(off, _)| *off)
}

fn push_word(word: &str, out: &mut Vec<Token>) {
    if is_number(word) {
        out.push(Token::new(word, TokenKind::Number));
        return;
    }
    let lower = word.to_lowercase().replace('\u{2019}', "'");
    for clitic in CLITICS {
        if let Some(stem) = lower.strip_suffix(clitic) {
            if !stem.is_empty() {
                out.push(Token::new(stem, TokenKind::Word));
                out.push(Token::new(*clitic, TokenKind::Word));
                return;
            }
        }
    }
    // other internal apostrophes (o'clock, rock'n'roll) stay inside the word
    out.push(Token::new(lower, TokenKind::Word));
}

fn is_number(word: &str) -> bool {
    word.starts_with(|c: char| c.is_ascii_digit())
        && word.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<(String, TokenKind)> {
        tokenize(text).into_iter().map(|t| (t.surface, t.kind)).collect()
    }

    fn tok(s: &str, k: TokenKind) -> (String, TokenKind) {
        (s.to_string(), k)
    }

    #[test]
    fn mention_word_url() {
        assert_eq!(
            kinds("@NBCNews posted http://t.co/x"),
            vec![
                tok("@nbcnews", TokenKind::Mention),
                tok("posted", TokenKind::Word),
                tok("http://t.co/x", TokenKind::Url),
            ]
        );
    }

    #[test]
    fn hashtag_then_punct() {
        assert_eq!(
            kinds("#GalaxyNote7!"),
            vec![tok("#galaxynote7", TokenKind::Hashtag), tok("!", TokenKind::Punct)]
        );
    }

    #[test]
    fn contraction_split() {
        assert_eq!(
            kinds("CO2 levels haven't"),
            vec![
                tok("co2", TokenKind::Word),
                tok("levels", TokenKind::Word),
                tok("have", TokenKind::Word),
                tok("n't", TokenKind::Word),
            ]
        );
        assert_eq!(
            kinds("It's"),
            vec![tok("it", TokenKind::Word), tok("'s", TokenKind::Word)]
        );
    }

    #[test]
    fn url_trailing_punctuation_is_split() {
        assert_eq!(
            kinds("see http://a.b/c."),
            vec![
                tok("see", TokenKind::Word),
                tok("http://a.b/c", TokenKind::Url),
                tok(".", TokenKind::Punct),
            ]
        );
    }

    #[test]
    fn numbers_and_emoticons() {
        assert_eq!(
            kinds("3.5 million :) 1,000"),
            vec![
                tok("3.5", TokenKind::Number),
                tok("million", TokenKind::Word),
                tok(":)", TokenKind::Emoticon),
                tok("1,000", TokenKind::Number),
            ]
        );
        assert_eq!(
            kinds("wow... ok"),
            vec![
                tok("wow", TokenKind::Word),
                tok("...", TokenKind::Punct),
                tok("ok", TokenKind::Word),
            ]
        );
    }

    #[test]
    fn bare_sigils_are_punct() {
        assert_eq!(
            kinds("@ #"),
            vec![tok("@", TokenKind::Punct), tok("#", TokenKind::Punct)]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("   ").is_empty());
    }
}
