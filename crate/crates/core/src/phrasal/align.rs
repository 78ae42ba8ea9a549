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

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::embeddings::{cosine, EmbeddingTable};
use crate::util::table_lines;
use crate::{Error, Result};

/// Word links between a source and a target token sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub links: BTreeSet<(usize, usize)>,
}

impl Alignment {
    pub fn from_links(links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Alignment {
            links: links.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// Checks index ranges, and that no index is linked twice when
    /// `one_to_one` is set.
    pub fn validate(&self, src_len: usize, tgt_len: usize, one_to_one: bool) -> Result<()> {
        let mut src = HashSet::new();
        let mut tgt = HashSet::new();
        for &(i, j) in &self.links {
            if i >= src_len || j >= tgt_len {
                return Err(Error::argument(format!(
                    "link ({i}, {j}) outside a {src_len}x{tgt_len} alignment"
                )));
            }
            if one_to_one && (!src.insert(i) || !tgt.insert(j)) {
                return Err(Error::argument(format!("link ({i}, {j}) reuses an index")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignConfig {
    /// Minimum embedding cosine for linking two different content words.
    pub tau: f64,
    pub window: usize,
    /// Weight of the linked-neighbour fraction in the similarity stage.
    pub context_weight: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            tau: 0.7,
            window: 3,
            context_weight: 0.5,
        }
    }
}

/// The bundled English stop-word list.
pub fn default_stopwords() -> &'static HashSet<String> {
    static WORDS: OnceLock<HashSet<String>> = OnceLock::new();
    WORDS.get_or_init(|| {
        table_lines(include_str!("../../data/stopwords.txt"))
            .map(|l| l.trim().to_lowercase())
            .collect()
    })
}

struct State<'a> {
    src: Vec<String>,
    tgt: Vec<String>,
    src_used: Vec<bool>,
    tgt_used: Vec<bool>,
    links: BTreeSet<(usize, usize)>,
    stopwords: &'a HashSet<String>,
}

impl State<'_> {
    fn link(&mut self, i: usize, j: usize) {
        debug_assert!(!self.src_used[i] && !self.tgt_used[j]);
        self.src_used[i] = true;
        self.tgt_used[j] = true;
        self.links.insert((i, j));
    }

    fn is_content(&self, w: &str) -> bool {
        !self.stopwords.contains(w) && w.chars().any(char::is_alphanumeric)
    }

    /// Longest run of identical, unlinked tokens (length >= 2); leftmost in
    /// the source, then in the target, on ties.
    fn longest_common_run(&self) -> Option<(usize, usize, usize)> {
        let (n, m) = (self.src.len(), self.tgt.len());
        let mut best: Option<(usize, usize, usize)> = None;
        // run[j + 1] holds the run length ending at (i, j).
        let mut prev = vec![0usize; m + 1];
        for i in 0..n {
            let mut cur = vec![0usize; m + 1];
            for j in 0..m {
                if !self.src_used[i] && !self.tgt_used[j] && self.src[i] == self.tgt[j] {
                    cur[j + 1] = prev[j] + 1;
                }
            }
            prev = cur;
            for j in 0..m {
                let len = prev[j + 1];
                if len >= 2 {
                    let start = (i + 1 - len, j + 1 - len);
                    let better = match best {
                        None => true,
                        Some((bi, bj, bl)) => len > bl || (len == bl && start < (bi, bj)),
                    };
                    if better {
                        best = Some((start.0, start.1, len));
                    }
                }
            }
        }
        best
    }

    fn neighbour_fraction(&self, i: usize, j: usize, window: usize) -> f64 {
        let src_n = i.saturating_sub(window)..(i + window + 1).min(self.src.len());
        let tgt_n = j.saturating_sub(window)..(j + window + 1).min(self.tgt.len());
        let slots = (src_n.len() - 1).min(tgt_n.len() - 1);
        if slots == 0 {
            return 0.0;
        }
        let linked = self
            .links
            .iter()
            .filter(|&&(a, b)| a != i && b != j && src_n.contains(&a) && tgt_n.contains(&b))
            .count();
        linked as f64 / slots as f64
    }
}

/// Staged one-to-one monolingual aligner.
///
/// 1. identical token runs of length two or more, longest first;
/// 2. identical content words, closest positions first;
/// 3. content words whose vectors have cosine at least `tau`, greedily by
///    cosine plus a bonus for already-linked neighbours;
/// 4. stop words whose two neighbours are linked to the two neighbours of a
///    free target position.
///
/// Tokens are compared case-insensitively.
pub fn align<S: AsRef<str>>(
    src: &[S],
    tgt: &[S],
    table: Option<&EmbeddingTable>,
    stopwords: &HashSet<String>,
    config: &AlignConfig,
) -> Alignment {
    let mut st = State {
        src: src.iter().map(|t| t.as_ref().to_lowercase()).collect(),
        tgt: tgt.iter().map(|t| t.as_ref().to_lowercase()).collect(),
        src_used: vec![false; src.len()],
        tgt_used: vec![false; tgt.len()],
        links: BTreeSet::new(),
        stopwords,
    };

    while let Some((i, j, len)) = st.longest_common_run() {
        for k in 0..len {
            st.link(i + k, j + k);
        }
    }

    let mut same: Vec<(usize, usize, usize)> = Vec::new();
    for (i, a) in st.src.iter().enumerate() {
        for (j, b) in st.tgt.iter().enumerate() {
            if a == b && st.is_content(a) && !st.src_used[i] && !st.tgt_used[j] {
                same.push((i.abs_diff(j), i, j));
            }
        }
    }
    same.sort_unstable();
    for (_, i, j) in same {
        if !st.src_used[i] && !st.tgt_used[j] {
            st.link(i, j);
        }
    }

    if let Some(table) = table {
        let vec_of = |w: &str| table.get(w).map(|v| v.iter().map(|&x| f64::from(x)).collect::<Vec<f64>>());
        let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
        for (i, a) in st.src.iter().enumerate() {
            if st.src_used[i] || !st.is_content(a) {
                continue;
            }
            let Some(va) = vec_of(a) else { continue };
            for (j, b) in st.tgt.iter().enumerate() {
                if st.tgt_used[j] || !st.is_content(b) {
                    continue;
                }
                if let Some(vb) = vec_of(b) {
                    let c = cosine(&va, &vb);
                    if c >= config.tau {
                        candidates.push((i, j, c));
                    }
                }
            }
        }
        loop {
            let mut best: Option<(usize, usize, f64)> = None;
            for &(i, j, c) in &candidates {
                if st.src_used[i] || st.tgt_used[j] {
                    continue;
                }
                let score = c + config.context_weight * st.neighbour_fraction(i, j, config.window);
                if best.is_none_or(|(_, _, s)| score > s) {
                    best = Some((i, j, score));
                }
            }
            match best {
                Some((i, j, _)) => st.link(i, j),
                None => break,
            }
        }
    }

    let (n, m) = (st.src.len(), st.tgt.len());
    for i in 1..n.saturating_sub(1) {
        if st.src_used[i] || st.is_content(&st.src[i]) {
            continue;
        }
        let left = st.links.iter().find(|l| l.0 == i - 1).map(|l| l.1);
        let right = st.links.iter().find(|l| l.0 == i + 1).map(|l| l.1);
        if let (Some(l), Some(r)) = (left, right) {
            if r == l + 2 && l + 1 < m && !st.tgt_used[l + 1] {
                st.link(i, l + 1);
            }
        }
    }

    Alignment { links: st.links }
}
