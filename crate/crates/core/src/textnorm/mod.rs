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

//! Twitter-aware text normalization: tokenization, sentence splitting,
//! suffix-stripping lemmatization and manual-retweet filtering.

mod retweet;
mod sentences;
mod stem;
mod tokenize;

pub use retweet::{filter_group, is_manual_retweet, load_page_meta, strip_for_comparison, PageMeta, PageMetaIndex};
pub use sentences::{is_abbreviation, split_sentences};
pub use stem::lemmatize;
pub use tokenize::{is_url, tokenize, Token, TokenKind};

/// Lowercased surfaces of `tokenize(text)`.
pub fn token_surfaces(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.surface).collect()
}

/// Surfaces paired with their lemmas (word tokens lemmatized, others unchanged).
pub fn tokens_and_lemmas(text: &str) -> (Vec<String>, Vec<String>) {
    let tokens = tokenize(text);
    let lemmas = tokens
        .iter()
        .map(|t| match t.kind {
            TokenKind::Word => lemmatize(&t.surface),
            _ => t.surface.clone(),
        })
        .collect();
    (tokens.into_iter().map(|t| t.surface).collect(), lemmas)
}
