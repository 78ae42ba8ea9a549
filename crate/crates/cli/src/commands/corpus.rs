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

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use urlpara::corpus::{
    generate_pairs, group_by_url, group_statistics, ingest_jsonl, load_resolver_tsv, resolve_urls, PairStrategy,
    Split, Tweet, UrlGroup,
};
use urlpara::metrics::{histogram, pinc, write_histogram_csv, PINC_MAX_N};
use urlpara::textnorm::{filter_group, load_page_meta, PageMeta, PageMetaIndex};

use super::Ctx;
use crate::error::{CliError, CliResult, Context};
use crate::io::{
    load_dataset, open_input, phrase_tokens, read_jsonl, require_inputs, skip_existing, to_jsonl, write_output,
    write_pairs_tsv, CorpusFormat,
};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Raw tweets, one JSON object per line.
    #[arg(long)]
    pub input: PathBuf,
    /// URL resolution table (`short<TAB>canonical`).
    #[arg(long)]
    pub resolver: Option<PathBuf>,
    /// Normalized tweets (JSONL).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn ingest(ctx: &Ctx, args: &IngestArgs) -> CliResult<()> {
    let resolver_path = args.resolver.clone().or_else(|| ctx.config.paths.resolver.clone());
    require_inputs(std::iter::once(args.input.as_path()).chain(resolver_path.as_deref()))?;
    if skip_existing(&[&args.out], ctx.force) {
        return Ok(());
    }
    let report = ingest_jsonl(open_input(&args.input)?).ctx(args.input.display())?;
    for s in report.skipped.iter().take(10) {
        log::warn!("{} line {}: {}", args.input.display(), s.line, s.reason);
    }
    let resolver = match &resolver_path {
        Some(p) => load_resolver_tsv(open_input(p)?).ctx(p.display())?,
        None => HashMap::new(),
    };
    let tweets: Vec<Tweet> = report.tweets.iter().map(|t| resolve_urls(t, &resolver)).collect();
    log::info!("ingested {} tweets, skipped {} lines", tweets.len(), report.skipped.len());
    write_output(Some(&args.out), &to_jsonl(&tweets)?)
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Normalized tweets from `ingest`.
    #[arg(long)]
    pub tweets: PathBuf,
    /// Page metadata sidecar (JSONL).
    #[arg(long)]
    pub pages: Option<PathBuf>,
    /// Seed account; repeat for several. Replaces the configured list.
    #[arg(long = "seed-account")]
    pub seed_accounts: Vec<String>,
    /// Remove only automatic retweets.
    #[arg(long)]
    pub no_manual_filter: bool,
    /// Also write the groups before retweet filtering.
    #[arg(long)]
    pub raw_out: Option<PathBuf>,
    /// Filtered URL groups (JSONL).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn filter(ctx: &Ctx, args: &FilterArgs) -> CliResult<()> {
    let pages = args.pages.clone().or_else(|| ctx.config.paths.pages.clone());
    require_inputs(std::iter::once(args.tweets.as_path()).chain(pages.as_deref()))?;
    let mut outputs = vec![args.out.as_path()];
    outputs.extend(args.raw_out.as_deref());
    if skip_existing(&outputs, ctx.force) {
        return Ok(());
    }
    let tweets: Vec<Tweet> = read_jsonl(&args.tweets)?;
    let seeds: HashSet<String> = if args.seed_accounts.is_empty() {
        ctx.config.seed_accounts.iter().cloned().collect()
    } else {
        args.seed_accounts.iter().cloned().collect()
    };
    let meta: PageMetaIndex = match &pages {
        Some(p) => {
            let (index, skipped) = load_page_meta(open_input(p)?).ctx(p.display())?;
            if skipped > 0 {
                log::warn!("{}: skipped {skipped} records", p.display());
            }
            index
        }
        None => PageMetaIndex::new(),
    };
    let raw = group_by_url(&tweets, &seeds);
    let manual = ctx.config.filter.manual_retweets && !args.no_manual_filter;
    let empty = PageMeta::default();
    let filtered: Vec<UrlGroup> = raw
        .iter()
        .map(|g| {
            if manual {
                filter_group(g, meta.get(&g.url).unwrap_or(&empty))
            } else {
                UrlGroup {
                    tweets: g.tweets.iter().filter(|t| !t.is_auto_retweet).cloned().collect(),
                    ..g.clone()
                }
            }
        })
        .filter(|g| g.tweets.len() >= 2)
        .collect();
    log::info!(
        "{} groups ({} tweets) before filtering, {} groups ({} tweets) after",
        raw.len(),
        raw.iter().map(|g| g.tweets.len()).sum::<usize>(),
        filtered.len(),
        filtered.iter().map(|g| g.tweets.len()).sum::<usize>()
    );
    if let Some(p) = &args.raw_out {
        write_output(Some(p), &to_jsonl(&raw)?)?;
    }
    write_output(Some(&args.out), &to_jsonl(&filtered)?)
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// URL groups from `filter`.
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long)]
    pub max_candidates: Option<usize>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    /// Candidate pairs TSV (`pair_id, url, s1, s2`).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum StrategyArg {
    OriginalVsRest,
    AllPairs,
}

impl From<StrategyArg> for PairStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::OriginalVsRest => PairStrategy::OriginalVsRest,
            StrategyArg::AllPairs => PairStrategy::AllPairs,
        }
    }
}

pub fn pairs(ctx: &Ctx, args: &PairsArgs) -> CliResult<()> {
    require_inputs([args.groups.as_path()])?;
    if skip_existing(&[&args.out], ctx.force) {
        return Ok(());
    }
    let max = args.max_candidates.unwrap_or(ctx.config.pairs.max_candidates);
    if max == 0 {
        return Err(CliError::validation("--max-candidates must be positive"));
    }
    let strategy = args.strategy.map(Into::into).unwrap_or(ctx.config.pairs.strategy);
    let groups: Vec<UrlGroup> = read_jsonl(&args.groups)?;
    let pairs: Vec<_> = groups.iter().flat_map(|g| generate_pairs(g, max, strategy)).collect();
    log::info!("{} candidate pairs from {} groups", pairs.len(), groups.len());
    write_output(Some(&args.out), &write_pairs_tsv(&pairs))
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["groups", "corpus"])))]
pub struct StatsArgs {
    /// URL groups: prints group count, size, mean PINC and mean Jaccard.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Labeled corpus: writes a PINC histogram (CSV) of its pairs.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: CorpusFormat,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const GROUP_STATS_HEADER: &str = "groups\ttweets\tmean_group_size\tmean_pinc\tmean_jaccard";

pub fn stats(ctx: &Ctx, args: &StatsArgs) -> CliResult<()> {
    if let Some(out) = &args.out {
        if skip_existing(&[out], ctx.force) {
            return Ok(());
        }
    }
    let mut buf = Vec::new();
    if let Some(path) = &args.groups {
        let groups: Vec<UrlGroup> = read_jsonl(path)?;
        let s = group_statistics(&groups);
        writeln!(buf, "{GROUP_STATS_HEADER}")?;
        writeln!(
            buf,
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}",
            s.groups, s.tweets, s.mean_group_size, s.mean_pinc, s.mean_jaccard
        )?;
    } else if let Some(path) = &args.corpus {
        let dataset = load_dataset(path, args.format, Split::Test, ctx.config.votes)?;
        let values: Vec<f64> = dataset
            .pairs
            .iter()
            .filter_map(|p| {
                let (a, b) = (phrase_tokens(&p.pair.s1), phrase_tokens(&p.pair.s2));
                pinc(&a, &b, PINC_MAX_N).ok()
            })
            .collect();
        let bins = histogram(&values, args.bin_width)?;
        write_histogram_csv(&bins, &mut buf)?;
    }
    write_output(args.out.as_deref(), &buf)
}
