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

//! Command-line front end: one subcommand per pipeline stage, a shared JSON
//! config, and the annotation HTTP service.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod server;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{annotate, corpus, identify, phrasal, Ctx};
use config::Config;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "urlpara", version, about = "Paraphrase mining from URL-linked tweets")]
pub struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for pair scoring and alignment (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Rebuild outputs that already exist.
    #[arg(long, global = true)]
    pub force: bool,
    /// Overrides the config seed (and the factorization seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse raw tweet JSONL and resolve URLs.
    Ingest(corpus::IngestArgs),
    /// Group tweets by URL and remove retweets.
    Filter(corpus::FilterArgs),
    /// Generate candidate sentence pairs from URL groups.
    Pairs(corpus::PairsArgs),
    /// Group statistics or a PINC histogram.
    Stats(corpus::StatsArgs),
    /// Train a paraphrase classifier.
    Train(identify::TrainArgs),
    /// Evaluate scorers on a labeled corpus (max-F1 report).
    Eval(identify::EvalArgs),
    /// Score candidate pairs and keep those above a threshold.
    Mine(identify::MineArgs),
    /// Word-align sentence pairs.
    Align(phrasal::AlignArgs),
    /// Extract a phrase table from alignments.
    Extract(phrasal::ExtractArgs),
    /// Train a Kneser-Ney n-gram language model.
    Lm(phrasal::LmArgs),
    /// Score and rank phrase pairs.
    Rank(phrasal::RankArgs),
    /// Sampled coverage of two phrase tables.
    Overlap(phrasal::OverlapArgs),
    /// Run the annotation HTTP service.
    AnnotateServe(annotate::ServeArgs),
    /// Withdraw a worker's labels so their pairs are republished.
    ReopenTasks(annotate::ReopenArgs),
}

/// Loads the config and applies the global flag overrides.
pub fn resolve_config(cli: &Cli) -> CliResult<Config> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(j) = cli.jobs {
        config.jobs = Some(j);
    }
    if let Some(s) = cli.seed {
        config.seed = s;
        config.factor.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(ctx: &Ctx, command: &Command) -> CliResult<()> {
    match command {
        Command::Ingest(a) => corpus::ingest(ctx, a),
        Command::Filter(a) => corpus::filter(ctx, a),
        Command::Pairs(a) => corpus::pairs(ctx, a),
        Command::Stats(a) => corpus::stats(ctx, a),
        Command::Train(a) => identify::train(ctx, a),
        Command::Eval(a) => identify::eval(ctx, a),
        Command::Mine(a) => identify::mine(ctx, a),
        Command::Align(a) => phrasal::align(ctx, a),
        Command::Extract(a) => phrasal::extract(ctx, a),
        Command::Lm(a) => phrasal::lm(ctx, a),
        Command::Rank(a) => phrasal::rank(ctx, a),
        Command::Overlap(a) => phrasal::overlap(ctx, a),
        Command::AnnotateServe(a) => annotate::serve_cmd(ctx, a),
        Command::ReopenTasks(a) => annotate::reopen(ctx, a),
    }
}

/// Runs a parsed command line inside a thread pool of the configured width.
pub fn execute(cli: Cli) -> CliResult<()> {
    let config = resolve_config(&cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::runtime(format!("thread pool: {e}")))?;
    let ctx = Ctx {
        config,
        force: cli.force,
    };
    pool.install(|| dispatch(&ctx, &cli.command))
}

/// Parses `args` (program name first) and runs; returns the exit status:
/// 0 on success, 1 on usage or validation errors, 2 on runtime errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
