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

//! File helpers shared by the subcommands: input checks, resumable atomic
//! outputs, and the small TSV/JSONL formats that only the pipeline uses.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use urlpara::corpus::{
    import_msrp, import_pit2015, normalize_whitespace, read_labeled_tsv, Dataset, SentencePair, Split, VoteThresholds,
};
use urlpara::embeddings::{load_embeddings, read_factor_model, EmbeddingTable, FactorModel, LoadOptions};
use urlpara::textnorm::{tokenize, TokenKind};

use crate::error::{CliError, CliResult, Context};

/// Fails with a validation error unless every path exists.
pub fn require_inputs<'a>(paths: impl IntoIterator<Item = &'a Path>) -> CliResult<()> {
    for p in paths {
        if !p.exists() {
            return Err(CliError::validation(format!("input {} does not exist", p.display())));
        }
    }
    Ok(())
}

pub fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    require_inputs([path])?;
    File::open(path)
        .map(BufReader::new)
        .ctx(path.display())
}

/// True when every output already exists and `force` is off, in which case
/// the caller should leave them alone.
pub fn skip_existing(outputs: &[&Path], force: bool) -> bool {
    if force || outputs.is_empty() || !outputs.iter().all(|p| p.exists()) {
        return false;
    }
    for p in outputs {
        log::info!("{} exists, skipping (pass --force to rebuild)", p.display());
    }
    true
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so an interrupted run never leaves a partial output. `None` means stdout.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).ctx(dir.display())?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).ctx(dir.display())?;
    tmp.write_all(bytes)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        // Temporary files are private; outputs get ordinary file permissions.
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CliError::runtime(format!("{}: {}", path.display(), e.error)))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in open_input(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| CliError::validation(format!("{} line {}: {e}", path.display(), idx + 1)))?;
        out.push(item);
    }
    Ok(out)
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item)?;
        buf.push(b'\n');
    }
    Ok(buf)
}

fn clean(s: &str) -> String {
    normalize_whitespace(&s.replace(['\t', '\n', '\r'], " "))
}

/// Candidate pairs as `pair_id <TAB> url <TAB> s1 <TAB> s2`; an empty url
/// column means none.
pub fn write_pairs_tsv(pairs: &[SentencePair]) -> Vec<u8> {
    let mut buf = Vec::new();
    for p in pairs {
        let url = p.url.as_deref().unwrap_or("");
        let _ = writeln!(buf, "{}\t{}\t{}\t{}", clean(&p.pair_id), clean(url), clean(&p.s1), clean(&p.s2));
    }
    buf
}

pub fn read_pairs_tsv(path: &Path) -> CliResult<Vec<SentencePair>> {
    let mut out = Vec::new();
    for (idx, line) in open_input(path)?.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 || f[0].is_empty() {
            return Err(CliError::validation(format!(
                "{} line {}: expected pair_id, url, s1, s2",
                path.display(),
                idx + 1
            )));
        }
        out.push(SentencePair {
            pair_id: f[0].to_string(),
            url: (!f[1].is_empty()).then(|| f[1].to_string()),
            s1: f[2].to_string(),
            s2: f[3].to_string(),
        });
    }
    Ok(out)
}

/// Labeled corpus formats understood by `train`, `eval` and `stats`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum CorpusFormat {
    /// `s1 <TAB> s2 <TAB> label [<TAB> url]` with 0/1 or `(k, m)` labels.
    #[default]
    Labeled,
    Msrp,
    Pit,
}

pub fn load_dataset(path: &Path, format: CorpusFormat, split: Split, votes: VoteThresholds) -> CliResult<Dataset> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    let reader = open_input(path)?;
    let (dataset, report) = match format {
        CorpusFormat::Labeled => read_labeled_tsv(reader, &name, split, votes),
        CorpusFormat::Msrp => import_msrp(reader, &name, split),
        CorpusFormat::Pit => import_pit2015(reader, &name, split),
    }
    .ctx(path.display())?;
    if !report.skipped.is_empty() {
        log::warn!("{}: skipped {} malformed rows", path.display(), report.skipped.len());
        for s in report.skipped.iter().take(5) {
            log::debug!("  line {}: {}", s.line, s.reason);
        }
    }
    log::info!(
        "{}: {} pairs, positive rate {:.3}",
        path.display(),
        dataset.pairs.len(),
        dataset.positive_rate()
    );
    Ok(dataset)
}

pub fn load_embedding_table(path: &Path, lowercase: bool) -> CliResult<EmbeddingTable> {
    let options = LoadOptions {
        lowercase,
        vocabulary: None,
    };
    let (table, report) = load_embeddings(open_input(path)?, &options).ctx(path.display())?;
    log::info!(
        "{}: {} vectors of dimension {} ({} duplicates)",
        path.display(),
        table.len(),
        table.dimension(),
        report.duplicates
    );
    Ok(table)
}

pub fn load_factor_model(path: &Path) -> CliResult<FactorModel> {
    read_factor_model(open_input(path)?).ctx(path.display())
}

/// Tokens used by the phrasal stages: lowercased tokenizer output without URLs.
pub fn phrase_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Url)
        .map(|t| t.surface)
        .collect()
}

/// One line of the `align` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub pair_id: String,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub links: Vec<(usize, usize)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_tsv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        let pairs = vec![
            SentencePair {
                pair_id: "1-2".into(),
                url: Some("http://x.org/a".into()),
                s1: "a\tb".into(),
                s2: "c".into(),
            },
            SentencePair {
                pair_id: "1-3".into(),
                url: None,
                s1: "a b".into(),
                s2: "d  e".into(),
            },
        ];
        write_output(Some(&path), &write_pairs_tsv(&pairs)).unwrap();
        let back = read_pairs_tsv(&path).unwrap();
        assert_eq!(back[0].s1, "a b");
        assert_eq!(back[1].url, None);
        assert_eq!(back[1].s2, "d e");
    }

    #[test]
    fn skip_needs_every_output() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        std::fs::write(&a, "x").unwrap();
        assert!(!skip_existing(&[&a, &b], false));
        std::fs::write(&b, "x").unwrap();
        assert!(skip_existing(&[&a, &b], false));
        assert!(!skip_existing(&[&a, &b], true));
    }

    #[test]
    fn phrase_tokens_drop_urls() {
        assert_eq!(phrase_tokens("Read THIS http://t.co/x now"), vec!["read", "this", "now"]);
    }
}
