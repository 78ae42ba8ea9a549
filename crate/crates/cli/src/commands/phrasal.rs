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

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use urlpara::phrasal::{
    align as align_pair, default_stopwords, embedding_phrase_score, evaluate_likert, lm_substitution_score,
    rank_features, rank_score, read_contexts_tsv, read_ratings, table_overlap, train_lm, train_rank,
    write_contexts_tsv, Alignment, NgramLm, PhraseContext, PhraseTable, PhraseTableBuilder, RankModel, BOS, EOS,
    RANK_FEATURE_NAMES,
};

use super::Ctx;
use crate::error::{CliError, CliResult, Context};
use crate::io::{
    load_embedding_table, open_input, phrase_tokens, read_jsonl, read_pairs_tsv, require_inputs, skip_existing,
    to_jsonl, write_output, AlignedPair,
};

#[derive(Debug, Args)]
pub struct AlignArgs {
    /// Four-column pairs TSV from `pairs` or `mine`; only the id and the
    /// two sentences are used.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Alignments (JSONL).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn align(ctx: &Ctx, args: &AlignArgs) -> CliResult<()> {
    let emb_path = args.embeddings.clone().or_else(|| ctx.config.paths.embeddings.clone());
    require_inputs(std::iter::once(args.pairs.as_path()).chain(emb_path.as_deref()))?;
    if skip_existing(&[&args.out], ctx.force) {
        return Ok(());
    }
    let pairs = read_pairs_tsv(&args.pairs)?;
    let table = match &emb_path {
        Some(p) => Some(load_embedding_table(p, ctx.config.paths.lowercase_embeddings)?),
        None => {
            log::warn!("no word vectors: aligning identical words only");
            None
        }
    };
    let stopwords = default_stopwords();
    let cfg = ctx.config.align;
    let aligned: Vec<AlignedPair> = pairs
        .par_iter()
        .map(|p| {
            let (src, tgt) = (phrase_tokens(&p.s1), phrase_tokens(&p.s2));
            let al = align_pair(&src, &tgt, table.as_ref(), stopwords, &cfg);
            AlignedPair {
                pair_id: p.pair_id.clone(),
                links: al.links.into_iter().collect(),
                source: src,
                target: tgt,
            }
        })
        .collect();
    let links: usize = aligned.iter().map(|a| a.links.len()).sum();
    log::info!("aligned {} pairs with {links} links", aligned.len());
    write_output(Some(&args.out), &to_jsonl(&aligned)?)
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Alignments from `align`.
    #[arg(long)]
    pub alignments: PathBuf,
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Phrase table TSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Example source context per phrase pair, used by `rank`.
    #[arg(long)]
    pub contexts_out: Option<PathBuf>,
}

pub fn extract(ctx: &Ctx, args: &ExtractArgs) -> CliResult<()> {
    require_inputs([args.alignments.as_path()])?;
    let mut outputs = vec![args.out.as_path()];
    outputs.extend(args.contexts_out.as_deref());
    if skip_existing(&outputs, ctx.force) {
        return Ok(());
    }
    let max_len = args.max_len.unwrap_or(ctx.config.phrase.max_len);
    if max_len == 0 {
        return Err(CliError::validation("--max-len must be positive"));
    }
    let aligned: Vec<AlignedPair> = read_jsonl(&args.alignments)?;
    let mut builder = PhraseTableBuilder::new(max_len);
    for a in &aligned {
        let al = Alignment::from_links(a.links.iter().copied());
        al.validate(a.source.len(), a.target.len(), false)
            .ctx(format!("pair {}", a.pair_id))?;
        builder.add(&a.source, &a.target, &al);
    }
    let table = builder.build()?;
    log::info!("{} phrase pairs from {} alignments", table.len(), aligned.len());
    let mut buf = Vec::new();
    table.write_tsv(&mut buf)?;
    write_output(Some(&args.out), &buf)?;
    if let Some(p) = &args.contexts_out {
        let mut buf = Vec::new();
        write_contexts_tsv(builder.contexts(), &mut buf)?;
        write_output(Some(p), &buf)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct LmArgs {
    /// Training text, one sentence per line.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Model in ARPA format.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn lm(ctx: &Ctx, args: &LmArgs) -> CliResult<()> {
    require_inputs([args.corpus.as_path()])?;
    if skip_existing(&[&args.out], ctx.force) {
        return Ok(());
    }
    let mut cfg = ctx.config.lm;
    if let Some(o) = args.order {
        cfg.order = o;
    }
    if let Some(m) = args.min_count {
        cfg.min_count = m;
    }
    let mut sentences = Vec::new();
    for line in open_input(&args.corpus)?.lines() {
        let toks = phrase_tokens(&line?);
        if !toks.is_empty() {
            sentences.push(toks);
        }
    }
    let model = train_lm(&sentences, &cfg)?;
    log::info!(
        "{}-gram model over {} sentences, vocabulary {}, training perplexity {:.2}",
        model.order(),
        sentences.len(),
        model.vocab().len(),
        model.perplexity(&sentences)
    );
    let mut buf = Vec::new();
    model.write_arpa(&mut buf)?;
    write_output(Some(&args.out), &buf)
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Phrase table from `extract`.
    #[arg(long)]
    pub table: PathBuf,
    /// Contexts sidecar from `extract --contexts-out`.
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    /// Language model (ARPA).
    #[arg(long)]
    pub lm: PathBuf,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Human ratings (`p, p', score`): train the combiner on them.
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    /// Combiner weights (JSON): written after training on --ratings, read otherwise.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Likert table for the rated pairs; standard output when absent.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    /// Ranked phrase pairs TSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub const RANKED_HEADER_PREFIX: &str = "source\ttarget\tscore";

pub fn rank(ctx: &Ctx, args: &RankArgs) -> CliResult<()> {
    let emb_path = args.embeddings.clone().or_else(|| ctx.config.paths.embeddings.clone());
    require_inputs(
        [args.table.as_path(), args.lm.as_path()]
            .into_iter()
            .chain(args.contexts.as_deref())
            .chain(args.ratings.as_deref())
            .chain(emb_path.as_deref()),
    )?;
    if args.ratings.is_none() && !args.model.as_deref().is_some_and(|p| p.exists()) {
        return Err(CliError::validation("rank needs --ratings to train on or an existing --model"));
    }
    let mut outputs = vec![args.out.as_path()];
    outputs.extend(args.report_out.as_deref());
    if args.ratings.is_some() {
        outputs.extend(args.model.as_deref());
    }
    if skip_existing(&outputs, ctx.force) {
        return Ok(());
    }
    let lambda = args.lambda.unwrap_or(ctx.config.rank.lambda);
    let table = PhraseTable::read_tsv(open_input(&args.table)?).ctx(args.table.display())?;
    let lm = NgramLm::read_arpa(open_input(&args.lm)?).ctx(args.lm.display())?;
    let contexts: BTreeMap<(String, String), PhraseContext> = match &args.contexts {
        Some(p) => read_contexts_tsv(open_input(p)?).ctx(p.display())?,
        None => BTreeMap::new(),
    };
    let emb = match &emb_path {
        Some(p) => Some(load_embedding_table(p, ctx.config.paths.lowercase_embeddings)?),
        None => None,
    };
    let bare = PhraseContext {
        left: [BOS.to_string(), BOS.to_string()],
        right: [EOS.to_string(), EOS.to_string()],
    };
    let entries = table.sorted();
    let missing = entries.iter().filter(|(k, _)| !contexts.contains_key(*k)).count();
    if missing > 0 {
        log::warn!("{missing} phrase pairs have no context; scoring them at sentence boundaries");
    }
    let features: Vec<Vec<f64>> = entries
        .par_iter()
        .map(|((s, t), e)| {
            let src: Vec<&str> = s.split(' ').collect();
            let tgt: Vec<&str> = t.split(' ').collect();
            let ctx_for = contexts.get(&(s.clone(), t.clone())).unwrap_or(&bare);
            let lm_score = lm_substitution_score(&lm, ctx_for, &tgt);
            let emb_score = emb.as_ref().map_or(0.0, |e| embedding_phrase_score(&src, &tgt, e));
            rank_features(e, lm_score, emb_score).to_vec()
        })
        .collect();

    let ratings = match &args.ratings {
        Some(p) => Some(read_ratings(open_input(p)?).ctx(p.display())?),
        None => None,
    };
    let model: RankModel = match &ratings {
        Some(ratings) => {
            let index: BTreeMap<(&str, &str), usize> = entries
                .iter()
                .enumerate()
                .map(|(i, ((s, t), _))| ((s.as_str(), t.as_str()), i))
                .collect();
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for r in ratings {
                if let Some(&i) = index.get(&(r.source.as_str(), r.target.as_str())) {
                    x.push(features[i].clone());
                    y.push(r.score);
                }
            }
            log::info!("{} of {} ratings match table entries", x.len(), ratings.len());
            let model = train_rank(&x, &y, lambda)?;
            if let Some(l) = model.inflated_lambda {
                log::warn!("ridge system singular at lambda {lambda}; used {l}");
            }
            if let Some(p) = &args.model {
                let mut buf = serde_json::to_vec_pretty(&model)?;
                buf.push(b'\n');
                write_output(Some(p), &buf)?;
            }
            model
        }
        None => {
            let p = args.model.as_ref().expect("checked above");
            serde_json::from_reader(open_input(p)?).ctx(p.display())?
        }
    };

    let mut scored: Vec<(usize, f64)> = features
        .iter()
        .enumerate()
        .map(|(i, f)| rank_score(&model, f).map(|s| (i, s)))
        .collect::<urlpara::Result<_>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut buf = Vec::new();
    writeln!(buf, "{RANKED_HEADER_PREFIX}\t{}", RANK_FEATURE_NAMES.join("\t"))?;
    for &(i, score) in &scored {
        let ((s, t), _) = entries[i];
        write!(buf, "{s}\t{t}\t{score:.6}")?;
        for f in &features[i] {
            write!(buf, "\t{f:.6}")?;
        }
        buf.push(b'\n');
    }
    write_output(Some(&args.out), &buf)?;

    if let Some(ratings) = &ratings {
        let ranked: Vec<(String, String)> = scored.iter().map(|&(i, _)| entries[i].0.clone()).collect();
        let rows = evaluate_likert(&ranked, ratings, &ctx.config.rank.fractions)?;
        let mut rep = Vec::new();
        writeln!(rep, "fraction\trated\tpercent_top")?;
        for r in rows {
            let pct = r.percent_top.map_or_else(|| "NA".to_string(), |p| format!("{p:.1}"));
            writeln!(rep, "{:.2}\t{}\t{pct}", r.fraction, r.rated)?;
        }
        write_output(args.report_out.as_deref(), &rep)?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub sample_a: Option<usize>,
    #[arg(long)]
    pub sample_b: Option<usize>,
    /// Coverage TSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn overlap(ctx: &Ctx, args: &OverlapArgs) -> CliResult<()> {
    require_inputs([args.a.as_path(), args.b.as_path()])?;
    if let Some(out) = &args.out {
        if skip_existing(&[out], ctx.force) {
            return Ok(());
        }
    }
    let keys = |p: &PathBuf| -> CliResult<Vec<(String, String)>> {
        let t = PhraseTable::read_tsv(open_input(p)?).ctx(p.display())?;
        Ok(t.sorted().into_iter().map(|(k, _)| k.clone()).collect())
    };
    let (a, b) = (keys(&args.a)?, keys(&args.b)?);
    let cov = table_overlap(
        &a,
        &b,
        args.sample_a.unwrap_or(ctx.config.overlap.sample_a),
        args.sample_b.unwrap_or(ctx.config.overlap.sample_b),
        ctx.config.seed,
    )?;
    let mut buf = Vec::new();
    writeln!(buf, "sample_a\tsample_b\tin_a\tin_b")?;
    writeln!(buf, "{}\t{}\t{:.1}\t{:.1}", cov.sample_a, cov.sample_b, cov.in_a, cov.in_b)?;
    write_output(args.out.as_deref(), &buf)
}
