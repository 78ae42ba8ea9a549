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

use super::align::Alignment;

pub const DEFAULT_MAX_PHRASE_LEN: usize = 4;

/// A source/target span pair, inclusive-exclusive token ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanPair {
    pub src: (usize, usize),
    pub tgt: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhrasePair {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub count: u64,
}

impl PhrasePair {
    pub fn source_text(&self) -> String {
        self.source.join(" ")
    }

    pub fn target_text(&self) -> String {
        self.target.join(" ")
    }
}

/// All span pairs consistent with `alignment` with both sides at most
/// `max_len` tokens long: at least one link inside and none crossing the
/// boundary. Target spans are grown over unaligned target words. Output is
/// sorted.
pub fn consistent_spans(src_len: usize, tgt_len: usize, alignment: &Alignment, max_len: usize) -> Vec<SpanPair> {
    let mut tgt_aligned = vec![false; tgt_len];
    for &(_, j) in &alignment.links {
        tgt_aligned[j] = true;
    }
    let mut out = Vec::new();
    for s0 in 0..src_len {
        for s1 in s0 + 1..=(s0 + max_len).min(src_len) {
            let inside: Vec<usize> = alignment
                .links
                .iter()
                .filter(|&&(i, _)| (s0..s1).contains(&i))
                .map(|&(_, j)| j)
                .collect();
            let (Some(&t0), Some(&t_last)) = (inside.iter().min(), inside.iter().max()) else {
                continue;
            };
            let t1 = t_last + 1;
            if t1 - t0 > max_len {
                continue;
            }
            let crosses = alignment
                .links
                .iter()
                .any(|&(i, j)| (t0..t1).contains(&j) && !(s0..s1).contains(&i));
            if crosses {
                continue;
            }
            let mut lo = t0;
            loop {
                let mut hi = t1;
                loop {
                    out.push(SpanPair {
                        src: (s0, s1),
                        tgt: (lo, hi),
                    });
                    if hi >= tgt_len || tgt_aligned[hi] || hi + 1 - lo > max_len {
                        break;
                    }
                    hi += 1;
                }
                if lo == 0 || tgt_aligned[lo - 1] || t1 - (lo - 1) > max_len {
                    break;
                }
                lo -= 1;
            }
        }
    }
    out.sort_unstable();
    out
}

/// Phrase pairs (count 1 each) from one aligned sentence pair, dropping pairs
/// whose two sides are the same string.
pub fn extract_phrases<S: AsRef<str>>(src: &[S], tgt: &[S], alignment: &Alignment, max_len: usize) -> Vec<PhrasePair> {
    consistent_spans(src.len(), tgt.len(), alignment, max_len)
        .into_iter()
        .filter_map(|sp| {
            let source: Vec<String> = src[sp.src.0..sp.src.1].iter().map(|t| t.as_ref().to_string()).collect();
            let target: Vec<String> = tgt[sp.tgt.0..sp.tgt.1].iter().map(|t| t.as_ref().to_string()).collect();
            (source != target).then_some(PhrasePair {
                source,
                target,
                count: 1,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(p: &[PhrasePair]) -> Vec<(String, String)> {
        let mut v: Vec<_> = p.iter().map(|p| (p.source_text(), p.target_text())).collect();
        v.sort();
        v
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        let mut v: Vec<_> = v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        v.sort();
        v
    }

    #[test]
    fn monotone_links() {
        let a = Alignment::from_links([(0, 0), (1, 1)]);
        let got = extract_phrases(&["a", "b"], &["x", "y"], &a, 4);
        assert_eq!(texts(&got), pairs(&[("a", "x"), ("b", "y"), ("a b", "x y")]));
    }

    #[test]
    fn crossing_links() {
        let a = Alignment::from_links([(0, 1), (1, 0)]);
        let got = extract_phrases(&["a", "b"], &["x", "y"], &a, 4);
        assert_eq!(texts(&got), pairs(&[("a", "y"), ("b", "x"), ("a b", "x y")]));
    }

    #[test]
    fn empty_alignment() {
        assert!(extract_phrases(&["a", "b"], &["x", "y"], &Alignment::default(), 4).is_empty());
    }

    #[test]
    fn unaligned_target_words_extend_spans() {
        let a = Alignment::from_links([(0, 0)]);
        let got = extract_phrases(&["a"], &["x", "y"], &a, 4);
        assert_eq!(texts(&got), pairs(&[("a", "x"), ("a", "x y")]));
    }

    #[test]
    fn identical_sides_dropped() {
        let a = Alignment::from_links([(0, 0), (1, 1)]);
        let got = extract_phrases(&["a", "b"], &["a", "c"], &a, 4);
        assert_eq!(texts(&got), pairs(&[("b", "c"), ("a b", "a c")]));
    }
}
