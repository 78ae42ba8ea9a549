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

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

const BOS_ID: u32 = 0;

/// Discount for orders without any count-one n-grams.
pub const FALLBACK_DISCOUNT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmConfig {
    pub order: usize,
    /// Words seen fewer times are mapped to the unknown symbol.
    pub min_count: u64,
    /// Replaces the per-order discounts estimated from counts-of-counts.
    pub discount: Option<f64>,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            order: 3,
            min_count: 1,
            discount: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    prob: f64,
    /// Set on n-grams that occur as a history.
    backoff: Option<f64>,
}

/// Backoff n-gram model. Trained models hold interpolated Kneser-Ney
/// estimates in backoff form, which is also what the ARPA format stores.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLm {
    order: usize,
    vocab: Vec<String>,
    index: HashMap<String, u32>,
    /// `tables[n - 1]` holds the n-grams.
    tables: Vec<HashMap<Vec<u32>, Entry>>,
    discounts: Vec<f64>,
}

fn discount_from_counts(counts: impl Iterator<Item = u64>) -> f64 {
    let (mut n1, mut n2) = (0u64, 0u64);
    for c in counts {
        match c {
            1 => n1 += 1,
            2 => n2 += 1,
            _ => {}
        }
    }
    if n1 == 0 {
        // No singletons to estimate from; keep some mass for unseen events.
        FALLBACK_DISCOUNT
    } else {
        n1 as f64 / (n1 + 2 * n2) as f64
    }
}

/// Trains an interpolated Kneser-Ney model on tokenized sentences.
///
/// Sentences are wrapped in `<s>`/`</s>`. The highest order uses raw counts;
/// lower orders use continuation counts, except for n-grams starting with
/// `<s>`, which have no left context and keep raw counts. Each order's
/// discount is `n1 / (n1 + 2 n2)` over the counts it uses, or
/// [`FALLBACK_DISCOUNT`] when `n1` is zero. The unigram level
/// interpolates with a uniform distribution over the vocabulary, so unseen
/// words receive `<unk>` mass.
pub fn train_lm<S: AsRef<str>>(corpus: &[Vec<S>], config: &LmConfig) -> Result<NgramLm> {
    if corpus.is_empty() {
        return Err(Error::argument("language model corpus is empty"));
    }
    if config.order == 0 {
        return Err(Error::argument("language model order must be at least 1"));
    }
    if let Some(d) = config.discount {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::argument(format!("discount must lie in [0, 1], got {d}")));
        }
    }
    let n_max = config.order;

    let mut word_counts: HashMap<&str, u64> = HashMap::new();
    for s in corpus {
        for w in s {
            *word_counts.entry(w.as_ref()).or_default() += 1;
        }
    }
    let kept: BTreeSet<&str> = word_counts
        .iter()
        .filter(|(w, &c)| c >= config.min_count && ![BOS, EOS, UNK].contains(*w))
        .map(|(w, _)| *w)
        .collect();
    let mut vocab: Vec<String> = vec![BOS.into(), EOS.into(), UNK.into()];
    vocab.extend(kept.iter().map(|w| w.to_string()));
    let index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    let unk = index[UNK];

    let mut raw: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); n_max];
    for s in corpus {
        let mut ids = vec![BOS_ID];
        ids.extend(s.iter().map(|w| index.get(w.as_ref()).copied().unwrap_or(unk)));
        ids.push(index[EOS]);
        for n in 1..=n_max {
            for g in ids.windows(n) {
                if g[n - 1] != BOS_ID {
                    *raw[n - 1].entry(g.to_vec()).or_default() += 1;
                }
            }
        }
    }

    let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); n_max];
    counts[n_max - 1] = raw[n_max - 1].clone();
    for n in 1..n_max {
        let mut cont: HashMap<Vec<u32>, u64> = HashMap::new();
        for g in raw[n].keys() {
            *cont.entry(g[1..].to_vec()).or_default() += 1;
        }
        for (g, &c) in &raw[n - 1] {
            let v = if g[0] == BOS_ID { c } else { cont.get(g).copied().unwrap_or(0) };
            if v > 0 {
                counts[n - 1].insert(g.clone(), v);
            }
        }
    }

    let discounts: Vec<f64> = counts
        .iter()
        .map(|c| config.discount.unwrap_or_else(|| discount_from_counts(c.values().copied())))
        .collect();

    let mut lm = NgramLm {
        order: n_max,
        vocab,
        index,
        tables: vec![HashMap::new(); n_max],
        discounts: discounts.clone(),
    };
    let predictable = (lm.vocab.len() - 1) as f64;

    for n in 1..=n_max {
        let d = discounts[n - 1];
        let mut hist: HashMap<&[u32], (u64, u64)> = HashMap::new();
        for (g, &c) in &counts[n - 1] {
            let e = hist.entry(&g[..n - 1]).or_default();
            e.0 += c;
            e.1 += 1;
        }
        let mut table: HashMap<Vec<u32>, Entry> = HashMap::new();
        let mut grams: Vec<(Vec<u32>, u64)> = counts[n - 1].iter().map(|(g, &c)| (g.clone(), c)).collect();
        if n == 1 {
            for id in 1..lm.vocab.len() as u32 {
                if !counts[0].contains_key(&vec![id]) {
                    grams.push((vec![id], 0));
                }
            }
        }
        for (g, c) in grams {
            let h = &g[..n - 1];
            let (total, types) = hist[h];
            let lower = if n == 1 {
                1.0 / predictable
            } else {
                lm.prob_ids(&h[1..], g[n - 1])
            };
            let prob = ((c as f64 - d).max(0.0) + d * types as f64 * lower) / total as f64;
            table.insert(g, Entry { prob, backoff: None });
        }
        if n == 1 {
            table.insert(vec![BOS_ID], Entry { prob: 0.0, backoff: None });
        }
        lm.tables[n - 1] = table;
        if n >= 2 {
            for (h, &(total, types)) in &hist {
                let alpha = d * types as f64 / total as f64;
                let e = lm.tables[n - 2]
                    .get_mut(*h)
                    .expect("every history occurs as a lower-order n-gram");
                e.backoff = Some(alpha);
            }
        }
    }
    Ok(lm)
}

impl NgramLm {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Discounts per order, lowest first (empty for models read from ARPA).
    pub fn discounts(&self) -> &[f64] {
        &self.discounts
    }

    fn id(&self, w: &str) -> u32 {
        self.index
            .get(w)
            .or_else(|| self.index.get(UNK))
            .copied()
            .unwrap_or(u32::MAX)
    }

    fn prob_ids(&self, hist: &[u32], w: u32) -> f64 {
        let hist = &hist[hist.len().saturating_sub(self.order - 1)..];
        let mut key = hist.to_vec();
        key.push(w);
        if let Some(e) = self.tables[key.len() - 1].get(&key) {
            return e.prob;
        }
        if hist.is_empty() {
            return 0.0;
        }
        let alpha = self.tables[hist.len() - 1]
            .get(hist)
            .and_then(|e| e.backoff)
            .unwrap_or(1.0);
        alpha * self.prob_ids(&hist[1..], w)
    }

    /// `p(word | history)`; out-of-vocabulary words map to `<unk>`.
    pub fn prob<S: AsRef<str>>(&self, history: &[S], word: &str) -> f64 {
        let h: Vec<u32> = history.iter().map(|w| self.id(w.as_ref())).collect();
        self.prob_ids(&h, self.id(word))
    }

    /// Sum of `log10 p` over `tokens`, each conditioned on the tokens before
    /// it, plus the number of predicted tokens. Leading `<s>` tokens are
    /// context only.
    pub fn sequence_log10<S: AsRef<str>>(&self, tokens: &[S]) -> (f64, usize) {
        let ids: Vec<u32> = tokens.iter().map(|w| self.id(w.as_ref())).collect();
        let start = ids.iter().take_while(|&&i| i == BOS_ID).count().min(ids.len());
        let mut sum = 0.0;
        for k in start..ids.len() {
            sum += self.prob_ids(&ids[..k], ids[k]).log10();
        }
        (sum, ids.len() - start)
    }

    /// `log10 p(</s>, tokens | <s>)`.
    pub fn sentence_log10<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let mut seq: Vec<&str> = vec![BOS];
        seq.extend(tokens.iter().map(|t| t.as_ref()));
        seq.push(EOS);
        self.sequence_log10(&seq).0
    }

    pub fn perplexity<S: AsRef<str>>(&self, sentences: &[Vec<S>]) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for s in sentences {
            sum += self.sentence_log10(s);
            n += s.len() + 1;
        }
        10f64.powf(-sum / n.max(1) as f64)
    }

    /// Every n-gram that serves as a history, as token strings.
    pub fn histories(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .tables
            .iter()
            .flat_map(|t| t.iter())
            .filter(|(_, e)| e.backoff.is_some())
            .map(|(g, _)| g.iter().map(|&i| self.vocab[i as usize].clone()).collect())
            .collect();
        out.sort();
        out
    }

    /// `sum_w p(w | history)` over every predictable word.
    pub fn history_mass<S: AsRef<str>>(&self, history: &[S]) -> f64 {
        let h: Vec<u32> = history.iter().map(|w| self.id(w.as_ref())).collect();
        (0..self.vocab.len() as u32)
            .filter(|&w| w != BOS_ID)
            .map(|w| self.prob_ids(&h, w))
            .sum()
    }

    pub fn write_arpa<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "\\data\\")?;
        for (n, t) in self.tables.iter().enumerate() {
            writeln!(w, "ngram {}={}", n + 1, t.len())?;
        }
        for (n, t) in self.tables.iter().enumerate() {
            writeln!(w, "\n\\{}-grams:", n + 1)?;
            let mut rows: Vec<(Vec<&str>, &Entry)> = t
                .iter()
                .map(|(g, e)| (g.iter().map(|&i| self.vocab[i as usize].as_str()).collect(), e))
                .collect();
            rows.sort_by(|a, b| a.0.cmp(&b.0));
            for (g, e) in rows {
                let lp = if e.prob > 0.0 { e.prob.log10() } else { -99.0 };
                match e.backoff {
                    Some(b) if n + 1 < self.order => {
                        let lb = if b > 0.0 { b.log10() } else { -99.0 };
                        writeln!(w, "{lp}\t{}\t{lb}", g.join(" "))?
                    }
                    _ => writeln!(w, "{lp}\t{}", g.join(" "))?,
                }
            }
        }
        writeln!(w, "\n\\end\\")?;
        Ok(())
    }

    pub fn read_arpa<R: BufRead>(reader: R) -> Result<Self> {
        let mut declared: Vec<usize> = Vec::new();
        let mut section: Option<usize> = None;
        let mut raw_tables: Vec<Vec<(Vec<String>, f64, Option<f64>)>> = Vec::new();
        let mut in_data = false;
        let mut ended = false;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if ended {
                return Err(Error::format(lineno, "content after \\end\\"));
            }
            if line == "\\data\\" {
                in_data = true;
                continue;
            }
            if line == "\\end\\" {
                ended = true;
                continue;
            }
            if let Some(rest) = line.strip_prefix('\\').and_then(|l| l.strip_suffix("-grams:")) {
                let n: usize = rest
                    .parse()
                    .map_err(|_| Error::format(lineno, format!("bad section header {line:?}")))?;
                if n == 0 || n > declared.len() || n != raw_tables.len() + 1 {
                    return Err(Error::format(lineno, format!("unexpected section {n}")));
                }
                in_data = false;
                raw_tables.push(Vec::new());
                section = Some(n);
                continue;
            }
            if in_data {
                let spec = line
                    .strip_prefix("ngram ")
                    .ok_or_else(|| Error::format(lineno, format!("bad data line {line:?}")))?;
                let (n, c) = spec
                    .split_once('=')
                    .ok_or_else(|| Error::format(lineno, format!("bad data line {line:?}")))?;
                let n: usize = n.trim().parse().map_err(|_| Error::format(lineno, "bad order"))?;
                let c: usize = c.trim().parse().map_err(|_| Error::format(lineno, "bad count"))?;
                if n != declared.len() + 1 {
                    return Err(Error::format(lineno, "orders must be declared in sequence"));
                }
                declared.push(c);
                continue;
            }
            let n = section.ok_or_else(|| Error::format(lineno, "entry outside a section"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != n + 1 && fields.len() != n + 2 {
                return Err(Error::format(lineno, format!("expected {n} words with a probability")));
            }
            let parse = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| Error::format(lineno, format!("bad number {s:?}")))?;
                if v.is_nan() || v > 1e-9 {
                    return Err(Error::format(lineno, format!("log probability {v} out of range")));
                }
                Ok(v)
            };
            let lp = parse(fields[0])?;
            let bo = if fields.len() == n + 2 {
                Some(fields[n + 1].parse::<f64>().map_err(|_| {
                    Error::format(lineno, format!("bad backoff {:?}", fields[n + 1]))
                })?)
            } else {
                None
            };
            if bo.is_some_and(|b| !b.is_finite()) {
                return Err(Error::format(lineno, "non-finite backoff"));
            }
            raw_tables[n - 1].push((fields[1..=n].iter().map(|s| s.to_string()).collect(), lp, bo));
        }
        if !ended {
            return Err(Error::format(0, "missing \\end\\"));
        }
        if declared.is_empty() || raw_tables.len() != declared.len() {
            return Err(Error::format(0, "sections do not match the \\data\\ header"));
        }
        for (n, (t, &c)) in raw_tables.iter().zip(&declared).enumerate() {
            if t.len() != c {
                return Err(Error::format(
                    0,
                    format!("{}-grams: header says {c}, found {}", n + 1, t.len()),
                ));
            }
        }
        let mut vocab: Vec<String> = vec![BOS.into(), EOS.into(), UNK.into()];
        let mut extra: Vec<String> = raw_tables[0]
            .iter()
            .map(|(g, _, _)| g[0].clone())
            .filter(|w| ![BOS, EOS, UNK].contains(&w.as_str()))
            .collect();
        extra.sort();
        extra.dedup();
        vocab.extend(extra);
        let index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let mut tables = Vec::new();
        for t in raw_tables {
            let mut table = HashMap::new();
            for (g, lp, bo) in t {
                let key = g
                    .iter()
                    .map(|w| {
                        index
                            .get(w)
                            .copied()
                            .ok_or_else(|| Error::format(0, format!("word {w:?} missing from the unigrams")))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                let prob = if lp <= -99.0 { 0.0 } else { 10f64.powf(lp) };
                table.insert(
                    key,
                    Entry {
                        prob,
                        backoff: bo.map(|b| 10f64.powf(b)),
                    },
                );
            }
            tables.push(table);
        }
        Ok(NgramLm {
            order: tables.len(),
            vocab,
            index,
            tables,
            discounts: Vec::new(),
        })
    }
}
