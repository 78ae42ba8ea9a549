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

use crate::util::table_lines;

struct Rule {
    suffix: &'static str,
    replacement: &'static str,
    min_stem: usize,
    undouble: bool,
}

static RULES: LazyLock<Vec<Rule>> = LazyLock::new(|| {
    table_lines(include_str!("../../data/stem_rules.txt"))
        .map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            assert_eq!(f.len(), 4, "malformed stem rule: {line:?}");
            Rule {
                suffix: f[0],
                replacement: f[1],
                min_stem: f[2].parse().expect("min_stem"),
                undouble: f[3] == "1",
            }
        })
        .collect()
});

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| "aeiouy".contains(c))
}

fn apply_once(word: &str) -> Option<String> {
    let rule = RULES.iter().find(|r| word.ends_with(r.suffix))?;
    let stem = &word[..word.len() - rule.suffix.len()];
    let stem_len = stem.chars().count();
    if stem_len < rule.min_stem || (rule.min_stem >= 3 && !has_vowel(stem)) {
        return None;
    }
    let mut out = format!("{stem}{}", rule.replacement);
    if rule.undouble {
        let mut rev = out.chars().rev();
        if let (Some(a), Some(b)) = (rev.next(), rev.next()) {
            if a == b && a.is_ascii_alphabetic() && !"aeiouylsz".contains(a) {
                out.pop();
            }
        }
    }
    (out != word).then_some(out)
}

/// Suffix-stripping stem following the shipped rule table, applied until no
/// rule fires. The result is therefore a fixpoint: `lemmatize(lemmatize(x)) ==
/// lemmatize(x)`.
pub fn lemmatize(token: &str) -> String {
    let mut current = token.to_string();
    while let Some(next) = apply_once(&current) {
        current = next;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn documented_examples() {
        assert_eq!(lemmatize("halts"), "halt");
        assert_eq!(lemmatize("batteries"), "batteri");
        assert_eq!(lemmatize("run"), "run");
    }

    #[test]
    fn other_rules() {
        assert_eq!(lemmatize("running"), "run");
        assert_eq!(lemmatize("stopped"), "stop");
        assert_eq!(lemmatize("caresses"), "caress");
        assert_eq!(lemmatize("status"), "status");
        assert_eq!(lemmatize("was"), "was");
        assert_eq!(lemmatize("sing"), "sing");
        assert_eq!(lemmatize("needed"), "need");
        assert_eq!(lemmatize("hissed"), "hiss");
    }

    proptest! {
        #[test]
        fn idempotent(word in "[a-z']{0,14}") {
            let once = lemmatize(&word);
            prop_assert_eq!(lemmatize(&once), once);
        }
    }
}
