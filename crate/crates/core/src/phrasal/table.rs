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

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::align::Alignment;
use super::extract::{consistent_spans, PhrasePair};
use super::rank::PhraseContext;
use crate::{Error, Result};

/// Lexical weights never drop below this floor.
pub const LEX_FLOOR: f64 = 1e-7;

/// Placeholder for the partner of an unaligned word.
const NULL: &str = "";

/// Word-level link counts from which word translation probabilities derive.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordLexicon {
    links: HashMap<(String, String), u64>,
    src_totals: HashMap<String, u64>,
    tgt_totals: HashMap<String, u64>,
}

impl WordLexicon {
    pub fn add_link(&mut self, src: &str, tgt: &str, count: u64) {
        *self.links.entry((src.to_string(), tgt.to_string())).or_default() += count;
        *self.src_totals.entry(src.to_string()).or_default() += count;
        *self.tgt_totals.entry(tgt.to_string()).or_default() += count;
    }

    /// Counts the links of one aligned sentence pair; unaligned words are
    /// linked to an empty placeholder.
    pub fn add_alignment<S: AsRef<str>>(&mut self, src: &[S], tgt: &[S], alignment: &Alignment) {
        let mut src_seen = vec![false; src.len()];
        let mut tgt_seen = vec![false; tgt.len()];
        for &(i, j) in &alignment.links {
            self.add_link(src[i].as_ref(), tgt[j].as_ref(), 1);
            src_seen[i] = true;
            tgt_seen[j] = true;
        }
        for (w, _) in src.iter().zip(&src_seen).filter(|(_, s)| !**s) {
            self.add_link(w.as_ref(), NULL, 1);
        }
        for (w, _) in tgt.iter().zip(&tgt_seen).filter(|(_, s)| !**s) {
            self.add_link(NULL, w.as_ref(), 1);
        }
    }

    /// `t(tgt | src)`.
    pub fn t_tgt_given_src(&self, src: &str, tgt: &str) -> f64 {
        let c = self.links.get(&(src.to_string(), tgt.to_string())).copied().unwrap_or(0);
        match self.src_totals.get(src) {
            Some(&n) if n > 0 => c as f64 / n as f64,
            _ => 0.0,
        }
    }

    /// `t(src | tgt)`.
    pub fn t_src_given_tgt(&self, src: &str, tgt: &str) -> f64 {
        let c = self.links.get(&(src.to_string(), tgt.to_string())).copied().unwrap_or(0);
        match self.tgt_totals.get(tgt) {
            Some(&n) if n > 0 => c as f64 / n as f64,
            _ => 0.0,
        }
    }

    /// Geometric mean over the target words of their best translation
    /// probability from any source word (or the placeholder), floored.
    pub fn lex_tgt_given_src(&self, source: &[String], target: &[String]) -> f64 {
        geometric_mean(target.iter().map(|w2| {
            source
                .iter()
                .map(String::as_str)
                .chain([NULL])
                .map(|w1| self.t_tgt_given_src(w1, w2))
                .fold(0.0, f64::max)
        }))
    }

    pub fn lex_src_given_tgt(&self, source: &[String], target: &[String]) -> f64 {
        geometric_mean(source.iter().map(|w1| {
            target
                .iter()
                .map(String::as_str)
                .chain([NULL])
                .map(|w2| self.t_src_given_tgt(w1, w2))
                .fold(0.0, f64::max)
        }))
    }
}

fn geometric_mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut log_sum, mut n) = (0.0, 0usize);
    for v in values {
        log_sum += v.max(LEX_FLOOR).ln();
        n += 1;
    }
    if n == 0 {
        return LEX_FLOOR;
    }
    (log_sum / n as f64).exp().clamp(LEX_FLOOR, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhraseEntry {
    pub count: u64,
    /// `phi(p' | p)`.
    pub phi_tgt_given_src: f64,
    /// `phi(p | p')`.
    pub phi_src_given_tgt: f64,
    pub lex_tgt_given_src: f64,
    pub lex_src_given_tgt: f64,
}

/// Phrase pairs keyed by (source text, target text).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhraseTable {
    pub entries: BTreeMap<(String, String), PhraseEntry>,
}

/// Aggregates phrase pairs by their text and scores them.
///
/// Phrase translation probabilities are relative frequencies of the pair
/// counts; lexical weights come from `lexicon`.
pub fn build_phrase_table(pairs: &[PhrasePair], lexicon: &WordLexicon) -> Result<PhraseTable> {
    if pairs.is_empty() {
        return Err(Error::argument("no phrase pairs to build a table from"));
    }
    let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut words: HashMap<(String, String), (Vec<String>, Vec<String>)> = HashMap::new();
    for p in pairs {
        if p.count == 0 || p.source.is_empty() || p.target.is_empty() {
            return Err(Error::argument("phrase pairs need non-empty sides and a positive count"));
        }
        let key = (p.source_text(), p.target_text());
        *counts.entry(key.clone()).or_default() += p.count;
        words.entry(key).or_insert_with(|| (p.source.clone(), p.target.clone()));
    }
    let mut src_totals: HashMap<&str, u64> = HashMap::new();
    let mut tgt_totals: HashMap<&str, u64> = HashMap::new();
    for ((s, t), &c) in &counts {
        *src_totals.entry(s).or_default() += c;
        *tgt_totals.entry(t).or_default() += c;
    }
    let mut entries = BTreeMap::new();
    for ((s, t), &c) in &counts {
        let (sw, tw) = &words[&(s.clone(), t.clone())];
        entries.insert(
            (s.clone(), t.clone()),
            PhraseEntry {
                count: c,
                phi_tgt_given_src: c as f64 / src_totals[s.as_str()] as f64,
                phi_src_given_tgt: c as f64 / tgt_totals[t.as_str()] as f64,
                lex_tgt_given_src: lexicon.lex_tgt_given_src(sw, tw),
                lex_src_given_tgt: lexicon.lex_src_given_tgt(sw, tw),
            },
        );
    }
    Ok(PhraseTable { entries })
}

/// Accumulates phrase pairs, word links and one example context per pair over
/// a stream of aligned sentence pairs.
#[derive(Debug, Clone, Default)]
pub struct PhraseTableBuilder {
    pub max_len: usize,
    pairs: Vec<PhrasePair>,
    lexicon: WordLexicon,
    contexts: BTreeMap<(String, String), PhraseContext>,
}

impl PhraseTableBuilder {
    pub fn new(max_len: usize) -> Self {
        PhraseTableBuilder {
            max_len,
            ..Default::default()
        }
    }

    pub fn add<S: AsRef<str>>(&mut self, src: &[S], tgt: &[S], alignment: &Alignment) {
        self.lexicon.add_alignment(src, tgt, alignment);
        for sp in consistent_spans(src.len(), tgt.len(), alignment, self.max_len) {
            let source: Vec<String> = src[sp.src.0..sp.src.1].iter().map(|t| t.as_ref().to_string()).collect();
            let target: Vec<String> = tgt[sp.tgt.0..sp.tgt.1].iter().map(|t| t.as_ref().to_string()).collect();
            if source == target {
                continue;
            }
            let pair = PhrasePair {
                source,
                target,
                count: 1,
            };
            self.contexts
                .entry((pair.source_text(), pair.target_text()))
                .or_insert_with(|| PhraseContext::around(src, sp.src.0, sp.src.1));
            self.pairs.push(pair);
        }
    }

    pub fn lexicon(&self) -> &WordLexicon {
        &self.lexicon
    }

    /// First-seen source-side context of every pair.
    pub fn contexts(&self) -> &BTreeMap<(String, String), PhraseContext> {
        &self.contexts
    }

    pub fn build(&self) -> Result<PhraseTable> {
        build_phrase_table(&self.pairs, &self.lexicon)
    }
}

impl PhraseTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, source: &str, target: &str) -> Option<&PhraseEntry> {
        self.entries.get(&(source.to_string(), target.to_string()))
    }

    /// Entries sorted by source phrase, then by descending count, then by
    /// target phrase.
    pub fn sorted(&self) -> Vec<(&(String, String), &PhraseEntry)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|(ka, ea), (kb, eb)| ka.0.cmp(&kb.0).then(eb.count.cmp(&ea.count)).then(ka.1.cmp(&kb.1)));
        v
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for ((s, t), e) in self.sorted() {
            writeln!(
                w,
                "{s}\t{t}\t{}\t{}\t{}\t{}\t{}",
                e.count, e.phi_tgt_given_src, e.phi_src_given_tgt, e.lex_tgt_given_src, e.lex_src_given_tgt
            )?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                return Err(Error::format(lineno, format!("expected 7 columns, found {}", f.len())));
            }
            if f[0].trim().is_empty() || f[1].trim().is_empty() {
                return Err(Error::format(lineno, "empty phrase"));
            }
            let count: u64 = f[2]
                .parse()
                .map_err(|_| Error::format(lineno, format!("bad count {:?}", f[2])))?;
            if count == 0 {
                return Err(Error::format(lineno, "count must be positive"));
            }
            let mut probs = [0.0; 4];
            for (k, p) in probs.iter_mut().enumerate() {
                let v: f64 = f[3 + k]
                    .parse()
                    .map_err(|_| Error::format(lineno, format!("bad probability {:?}", f[3 + k])))?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(Error::format(lineno, format!("probability {v} outside (0, 1]")));
                }
                *p = v;
            }
            let key = (f[0].to_string(), f[1].to_string());
            let entry = PhraseEntry {
                count,
                phi_tgt_given_src: probs[0],
                phi_src_given_tgt: probs[1],
                lex_tgt_given_src: probs[2],
                lex_src_given_tgt: probs[3],
            };
            if entries.insert(key, entry).is_some() {
                return Err(Error::format(lineno, "duplicate phrase pair"));
            }
        }
        Ok(PhraseTable { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(s: &str, t: &str, count: u64) -> PhrasePair {
        PhrasePair {
            source: s.split(' ').map(String::from).collect(),
            target: t.split(' ').map(String::from).collect(),
            count,
        }
    }

    #[test]
    fn relative_frequencies() {
        let t = build_phrase_table(&[pp("p", "x", 3), pp("p", "y", 1)], &WordLexicon::default()).unwrap();
        assert_eq!(t.get("p", "x").unwrap().phi_tgt_given_src, 0.75);
        assert_eq!(t.get("p", "y").unwrap().phi_tgt_given_src, 0.25);
        assert_eq!(t.get("p", "y").unwrap().phi_src_given_tgt, 1.0);
    }

    #[test]
    fn single_pair() {
        let t = build_phrase_table(&[pp("a b", "c", 2)], &WordLexicon::default()).unwrap();
        let e = t.get("a b", "c").unwrap();
        assert_eq!((e.phi_tgt_given_src, e.phi_src_given_tgt), (1.0, 1.0));
        assert_eq!(e.lex_tgt_given_src, LEX_FLOOR);
    }

    #[test]
    fn lexical_weights_from_links() {
        let mut lex = WordLexicon::default();
        lex.add_link("halts", "stops", 3);
        lex.add_link("halts", "suspends", 1);
        lex.add_link("production", "production", 2);
        let src = vec!["halts".to_string(), "production".to_string()];
        let tgt = vec!["stops".to_string(), "production".to_string()];
        // t(stops|halts) = 3/4, t(production|production) = 1.
        assert!((lex.lex_tgt_given_src(&src, &tgt) - (0.75f64).sqrt()).abs() < 1e-12);
        // t(halts|stops) = 1, t(production|production) = 1.
        assert!((lex.lex_src_given_tgt(&src, &tgt) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(build_phrase_table(&[], &WordLexicon::default()).is_err());
    }

    #[test]
    fn tsv_round_trip_and_order() {
        let t = build_phrase_table(
            &[pp("b", "x", 1), pp("a", "y", 1), pp("a", "z", 2), pp("a", "w", 1)],
            &WordLexicon::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let order: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
        assert_eq!(order, ["z", "w", "y", "x"]);
        assert_eq!(PhraseTable::read_tsv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn tsv_errors_carry_line_numbers() {
        let err = PhraseTable::read_tsv("a\tb\t1\t0.5\t0.5\t0.5\t0.5\na\tc\t1\t1.5\t1\t1\t1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
        assert!(PhraseTable::read_tsv("a\tb\t0\t1\t1\t1\t1\n".as_bytes()).is_err());
    }

    #[test]
    fn builder_collects_pairs_and_contexts() {
        let mut b = PhraseTableBuilder::new(4);
        let src = ["samsung", "halts", "production"];
        let tgt = ["samsung", "stops", "production"];
        b.add(&src, &tgt, &Alignment::from_links([(0, 0), (1, 1), (2, 2)]));
        let t = b.build().unwrap();
        assert!(t.get("halts", "stops").is_some());
        assert!(t.get("samsung", "samsung").is_none());
        let ctx = &b.contexts()[&("halts".to_string(), "stops".to_string())];
        assert_eq!(ctx.left, ["<s>".to_string(), "samsung".to_string()]);
        assert_eq!(ctx.right, ["production".to_string(), "</s>".to_string()]);
        assert_eq!(b.lexicon().t_tgt_given_src("halts", "stops"), 1.0);
    }
}
