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
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::group::normalize_whitespace;
use super::{SentencePair, SkippedLine};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldLabel {
    Paraphrase,
    NonParaphrase,
    Debatable,
}

impl GoldLabel {
    /// `Some(true)` for paraphrase, `Some(false)` for non-paraphrase.
    pub fn as_binary(self) -> Option<bool> {
        match self {
            GoldLabel::Paraphrase => Some(true),
            GoldLabel::NonParaphrase => Some(false),
            GoldLabel::Debatable => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteThresholds {
    /// Minimum positive votes for a paraphrase.
    pub pos_min: u32,
    /// Maximum positive votes for a non-paraphrase.
    pub neg_max: u32,
}

impl Default for VoteThresholds {
    fn default() -> Self {
        VoteThresholds { pos_min: 4, neg_max: 2 }
    }
}

/// Majority-vote gold label from a vote tally.
pub fn aggregate_votes(positive: u32, total: u32, thresholds: VoteThresholds) -> Result<GoldLabel> {
    if positive > total {
        return Err(Error::argument(format!(
            "positive votes {positive} exceed total {total}"
        )));
    }
    if thresholds.neg_max >= thresholds.pos_min {
        return Err(Error::argument(format!(
            "neg_max {} must be below pos_min {}",
            thresholds.neg_max, thresholds.pos_min
        )));
    }
    Ok(if positive >= thresholds.pos_min {
        GoldLabel::Paraphrase
    } else if positive <= thresholds.neg_max {
        GoldLabel::NonParaphrase
    } else {
        GoldLabel::Debatable
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Votes {
    pub positive: u32,
    pub total: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair: SentencePair,
    /// Absent when the source only carried a binary label.
    pub votes: Option<Votes>,
    pub gold: GoldLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub pairs: Vec<LabeledPair>,
    pub split: Split,
}

impl Dataset {
    /// Pairs with a binary gold label, paired with that label.
    pub fn binary(&self) -> impl Iterator<Item = (&LabeledPair, bool)> {
        self.pairs
            .iter()
            .filter_map(|p| p.gold.as_binary().map(|b| (p, b)))
    }

    /// Fraction of paraphrases among binary-labeled pairs.
    pub fn positive_rate(&self) -> f64 {
        let (pos, n) = self
            .binary()
            .fold((0usize, 0usize), |(p, n), (_, b)| (p + b as usize, n + 1));
        if n == 0 {
            0.0
        } else {
            pos as f64 / n as f64
        }
    }

    pub(crate) fn check_unique_ids(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for p in &self.pairs {
            if !seen.insert(p.pair.pair_id.as_str()) {
                return Err(Error::argument(format!("duplicate pair_id {}", p.pair.pair_id)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct ImportReport {
    pub skipped: Vec<SkippedLine>,
}

static VOTE_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$").unwrap());

fn parse_vote_pair(label: &str) -> Option<(u32, u32)> {
    let c = VOTE_RE.captures(label.trim())?;
    Some((c[1].parse().ok()?, c[2].parse().ok()?))
}

enum RowLabel {
    Binary(bool),
    Votes(u32, u32),
}

fn parse_label(label: &str) -> Option<RowLabel> {
    match label.trim() {
        "1" => Some(RowLabel::Binary(true)),
        "0" => Some(RowLabel::Binary(false)),
        other => parse_vote_pair(other).map(|(k, m)| RowLabel::Votes(k, m)),
    }
}

fn distinct_sides(s1: &str, s2: &str) -> bool {
    normalize_whitespace(s1) != normalize_whitespace(s2)
}

/// Parses the labeled TSV format: `s1 <TAB> s2 <TAB> label [<TAB> url]`, where
/// label is `0`, `1` or a vote tally `(k, m)` (k positive of m votes).
///
/// Rows with an unparseable label, too few columns, or identical sides are
/// skipped and reported. Pair ids are `{name}-{line}`.
pub fn read_labeled_tsv<R: BufRead>(
    reader: R,
    name: &str,
    split: Split,
    thresholds: VoteThresholds,
) -> Result<(Dataset, ImportReport)> {
    let mut pairs = Vec::new();
    let mut report = ImportReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let skip = |reason: &str| SkippedLine {
            line: i + 1,
            reason: reason.to_string(),
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 {
            report.skipped.push(skip("expected at least 3 columns"));
            continue;
        }
        let (s1, s2) = (cols[0], cols[1]);
        if !distinct_sides(s1, s2) {
            report.skipped.push(skip("identical sentences"));
            continue;
        }
        let (votes, gold) = match parse_label(cols[2]) {
            Some(RowLabel::Binary(b)) => (
                None,
                if b { GoldLabel::Paraphrase } else { GoldLabel::NonParaphrase },
            ),
            Some(RowLabel::Votes(k, m)) => match aggregate_votes(k, m, thresholds) {
                Ok(g) => (Some(Votes { positive: k, total: m }), g),
                Err(e) => {
                    report.skipped.push(skip(&e.to_string()));
                    continue;
                }
            },
            None => {
                report.skipped.push(skip(&format!("unparseable label {:?}", cols[2])));
                continue;
            }
        };
        let url = cols.get(3).filter(|u| !u.is_empty()).map(|u| u.to_string());
        pairs.push(LabeledPair {
            pair: SentencePair {
                pair_id: format!("{name}-{}", i + 1),
                url,
                s1: s1.to_string(),
                s2: s2.to_string(),
            },
            votes,
            gold,
        });
    }
    Ok((
        Dataset {
            name: name.to_string(),
            pairs,
            split,
        },
        report,
    ))
}

pub fn import_labeled_tsv(
    path: &Path,
    split: Split,
    thresholds: VoteThresholds,
) -> Result<(Dataset, ImportReport)> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    read_labeled_tsv(BufReader::new(File::open(path)?), &name, split, thresholds)
}

fn clean_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Writes the canonical TSV: vote tallies as `(k, m)`, binary labels as
/// `0`/`1`, a fourth URL column only when the pair has one. Debatable pairs
/// without votes cannot be represented and are rejected.
pub fn write_labeled_tsv<W: Write>(dataset: &Dataset, mut w: W) -> Result<()> {
    dataset.check_unique_ids()?;
    for p in &dataset.pairs {
        let label = match (p.votes, p.gold) {
            (Some(v), _) => format!("({}, {})", v.positive, v.total),
            (None, GoldLabel::Paraphrase) => "1".into(),
            (None, GoldLabel::NonParaphrase) => "0".into(),
            (None, GoldLabel::Debatable) => {
                return Err(Error::argument(format!(
                    "pair {} is debatable but has no votes",
                    p.pair.pair_id
                )))
            }
        };
        write!(w, "{}\t{}\t{}", clean_field(&p.pair.s1), clean_field(&p.pair.s2), label)?;
        if let Some(url) = &p.pair.url {
            write!(w, "\t{}", clean_field(url))?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn export_labeled_tsv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_labeled_tsv(dataset, &mut buf)?;
    crate::util::write_atomic(path, &buf)?;
    Ok(())
}

/// Reads the MSRP release format (`Quality, #1 ID, #2 ID, #1 String, #2
/// String`, header row first).
pub fn import_msrp<R: BufRead>(reader: R, name: &str, split: Split) -> Result<(Dataset, ImportReport)> {
    let mut pairs = Vec::new();
    let mut report = ImportReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_start_matches('\u{feff}').trim_end_matches('\r');
        if i == 0 && line.starts_with("Quality") || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let skip = |reason: &str| SkippedLine {
            line: i + 1,
            reason: reason.into(),
        };
        if cols.len() < 5 {
            report.skipped.push(skip("expected 5 columns"));
            continue;
        }
        let gold = match cols[0].trim() {
            "1" => GoldLabel::Paraphrase,
            "0" => GoldLabel::NonParaphrase,
            _ => {
                report.skipped.push(skip("unparseable quality"));
                continue;
            }
        };
        if !distinct_sides(cols[3], cols[4]) {
            report.skipped.push(skip("identical sentences"));
            continue;
        }
        pairs.push(LabeledPair {
            pair: SentencePair {
                pair_id: format!("{}-{}", cols[1], cols[2]),
                url: None,
                s1: cols[3].to_string(),
                s2: cols[4].to_string(),
            },
            votes: None,
            gold,
        });
    }
    let mut seen = HashSet::new();
    pairs.retain(|p: &LabeledPair| seen.insert(p.pair.pair_id.clone()));
    Ok((
        Dataset {
            name: name.into(),
            pairs,
            split,
        },
        report,
    ))
}

/// Reads the PIT-2015 release format (`Topic_Id, Topic_Name, Sent_1, Sent_2,
/// Label, ...`). Crowd labels `(a, b)` count a positive and b negative votes of
/// five (paraphrase at a >= 3, non-paraphrase at a <= 1); expert labels 0-5
/// are paraphrase at >= 4 and non-paraphrase at <= 2.
pub fn import_pit2015<R: BufRead>(reader: R, name: &str, split: Split) -> Result<(Dataset, ImportReport)> {
    let crowd = VoteThresholds { pos_min: 3, neg_max: 1 };
    let expert = VoteThresholds { pos_min: 4, neg_max: 2 };
    let mut pairs = Vec::new();
    let mut report = ImportReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let skip = |reason: &str| SkippedLine {
            line: i + 1,
            reason: reason.into(),
        };
        if cols.len() < 5 {
            report.skipped.push(skip("expected at least 5 columns"));
            continue;
        }
        let label = cols[4].trim();
        let (votes, gold) = if let Some((a, b)) = parse_vote_pair(label) {
            let total = a + b;
            match aggregate_votes(a, total, crowd) {
                Ok(g) => (Some(Votes { positive: a, total }), g),
                Err(e) => {
                    report.skipped.push(skip(&e.to_string()));
                    continue;
                }
            }
        } else if let Ok(score) = label.parse::<u32>() {
            match aggregate_votes(score.min(5), 5, expert) {
                Ok(g) => (None, g),
                Err(e) => {
                    report.skipped.push(skip(&e.to_string()));
                    continue;
                }
            }
        } else {
            report.skipped.push(skip("unparseable label"));
            continue;
        };
        if !distinct_sides(cols[2], cols[3]) {
            report.skipped.push(skip("identical sentences"));
            continue;
        }
        pairs.push(LabeledPair {
            pair: SentencePair {
                pair_id: format!("{name}-{}", i + 1),
                url: None,
                s1: cols[2].to_string(),
                s2: cols[3].to_string(),
            },
            votes,
            gold,
        });
    }
    Ok((
        Dataset {
            name: name.into(),
            pairs,
            split,
        },
        report,
    ))
}
