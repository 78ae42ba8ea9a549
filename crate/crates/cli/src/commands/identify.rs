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
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use urlpara::corpus::{Dataset, SentencePair, Split};
use urlpara::embeddings::{factorize, write_factor_model, EmbeddingTable, FactorModel, TermSentenceMatrix};
use urlpara::identify::{
    assemble_matrix, evaluate, factor_tokens, mine_silver, write_report_tsv, EvalReport, FeatureMode, FeatureSpec,
    LogisticModel, LogisticScorer, PairScorer, RandomScorer, RawScorer, Resources,
};

use super::Ctx;
use crate::error::{CliError, CliResult, Context};
use crate::io::{
    load_dataset, load_embedding_table, load_factor_model, open_input, read_pairs_tsv, require_inputs, skip_existing,
    write_output, CorpusFormat,
};

/// Accepts the feature-mode names plus the short aliases `lr` and `glove`.
pub fn parse_mode(name: &str) -> CliResult<FeatureMode> {
    match name.to_ascii_lowercase().as_str() {
        "lr" => Ok(FeatureMode::Lr18),
        "glove" => Ok(FeatureMode::EmbCos),
        _ => name.parse().map_err(CliError::from),
    }
}

/// Optional resources, owned for the duration of a command.
#[derive(Default)]
struct Loaded {
    embeddings: Option<EmbeddingTable>,
    factors: Option<FactorModel>,
}

impl Loaded {
    fn resources(&self) -> Resources<'_> {
        Resources {
            embeddings: self.embeddings.as_ref(),
            factors: self.factors.as_ref(),
        }
    }
}

fn embeddings_path(ctx: &Ctx, flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| ctx.config.paths.embeddings.clone())
}

fn load_embeddings_for(ctx: &Ctx, modes: &[FeatureMode], path: Option<&Path>) -> CliResult<Option<EmbeddingTable>> {
    if !modes.iter().any(|m| m.needs_embeddings()) {
        return Ok(None);
    }
    let path = path.ok_or_else(|| CliError::validation("this model needs word vectors; pass --embeddings"))?;
    load_embedding_table(path, ctx.config.paths.lowercase_embeddings).map(Some)
}

fn read_lines(path: &Path) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for line in open_input(path)?.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}

/// Loads the factor model at `path`, or trains one on the distinct sentences
/// of `datasets` plus `unlabeled` and saves it there.
fn factor_model_for(
    ctx: &Ctx,
    path: Option<&Path>,
    datasets: &[&Dataset],
    unlabeled: Option<&Path>,
    k: Option<usize>,
) -> CliResult<FactorModel> {
    if let Some(p) = path {
        if p.exists() && !ctx.force {
            log::info!("loading factor model {}", p.display());
            return load_factor_model(p);
        }
    }
    let mut seen = HashSet::new();
    let mut texts: Vec<String> = Vec::new();
    for d in datasets {
        for p in &d.pairs {
            for s in [&p.pair.s1, &p.pair.s2] {
                if seen.insert(s.clone()) {
                    texts.push(s.clone());
                }
            }
        }
    }
    if let Some(u) = unlabeled {
        for s in read_lines(u)? {
            if seen.insert(s.clone()) {
                texts.push(s);
            }
        }
    }
    let sentences: Vec<Vec<String>> = texts.iter().map(|t| factor_tokens(t)).collect();
    let matrix = TermSentenceMatrix::from_sentences(&sentences)?;
    let mut cfg = ctx.config.factor;
    if let Some(k) = k {
        cfg.k = k;
    }
    log::info!(
        "factorizing {}x{} term-sentence matrix (k = {})",
        matrix.n_rows(),
        matrix.n_cols(),
        cfg.k
    );
    let fit = factorize(&matrix, &cfg)?;
    if let Some(p) = path {
        let mut buf = Vec::new();
        write_factor_model(&fit.model, &mut buf)?;
        write_output(Some(p), &buf)?;
    }
    Ok(fit.model)
}

fn fit_model(
    ctx: &Ctx,
    mode: FeatureMode,
    train: &Dataset,
    res: Resources<'_>,
    l2: Option<f64>,
) -> CliResult<LogisticModel> {
    if !mode.is_trained() {
        return Err(CliError::validation(format!("{mode} is not a trained model")));
    }
    let spec = FeatureSpec::new(mode, res)?;
    let (pairs, labels): (Vec<&SentencePair>, Vec<bool>) = train.binary().map(|(p, y)| (&p.pair, y)).unzip();
    let x = assemble_matrix(&pairs, &spec)?;
    let mut cfg = ctx.config.logistic.clone();
    if let Some(l2) = l2 {
        cfg.l2 = l2;
    }
    let k = res.factors.map_or(0, |f| f.k);
    let (model, trained) = LogisticModel::fit(mode, k, &x, &labels, &cfg)?;
    log::info!(
        "trained {mode} on {} pairs: {} epochs, gradient norm {:.2e}",
        labels.len(),
        trained.epochs_run,
        trained.gradient_norm
    );
    Ok(model)
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled training corpus.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: CorpusFormat,
    /// lr, vec, sim, lex-vec or lex-sim.
    #[arg(long, default_value = "lr")]
    pub mode: String,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Factor model for the latent modes: loaded if present, else trained and saved here.
    #[arg(long)]
    pub factor_model: Option<PathBuf>,
    /// Extra sentences (one per line) for training the factor model.
    #[arg(long)]
    pub unlabeled: Option<PathBuf>,
    /// Latent dimension when training a factor model.
    #[arg(long)]
    pub factor_k: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    /// Trained model (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn train(ctx: &Ctx, args: &TrainArgs) -> CliResult<()> {
    let mode = parse_mode(&args.mode)?;
    let emb_path = embeddings_path(ctx, &args.embeddings);
    require_inputs(
        [args.train.as_path()]
            .into_iter()
            .chain(args.unlabeled.as_deref())
            .chain(emb_path.as_deref().filter(|_| mode.needs_embeddings())),
    )?;
    if mode.needs_factors() && args.factor_model.is_none() {
        return Err(CliError::validation(format!("{mode} needs --factor-model")));
    }
    if !mode.is_trained() {
        return Err(CliError::validation(format!("{mode} is not a trained model")));
    }
    if skip_existing(&[&args.out], ctx.force) {
        return Ok(());
    }
    let train = load_dataset(&args.train, args.format, Split::Train, ctx.config.votes)?;
    let mut loaded = Loaded {
        embeddings: load_embeddings_for(ctx, &[mode], emb_path.as_deref())?,
        factors: None,
    };
    if mode.needs_factors() {
        loaded.factors = Some(factor_model_for(
            ctx,
            args.factor_model.as_deref(),
            &[&train],
            args.unlabeled.as_deref(),
            args.factor_k,
        )?);
    }
    let model = fit_model(ctx, mode, &train, loaded.resources(), args.l2)?;
    let mut buf = Vec::new();
    model.save(&mut buf)?;
    buf.push(b'\n');
    write_output(Some(&args.out), &buf)
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// A model file from `train`, or one of random, edit, glove/emb-cos
    /// (untrained) and lr, vec, sim, lex-vec, lex-sim (trained on --train).
    /// Repeat for one report row each.
    #[arg(long, required = true)]
    pub model: Vec<String>,
    /// Labeled test corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: CorpusFormat,
    /// Training corpus for model names that need fitting.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub train_format: CorpusFormat,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub factor_model: Option<PathBuf>,
    #[arg(long)]
    pub unlabeled: Option<PathBuf>,
    #[arg(long)]
    pub factor_k: Option<usize>,
    /// Report TSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum ModelRef {
    Named(String, FeatureMode),
    File(PathBuf, LogisticModel),
}

impl ModelRef {
    fn mode(&self) -> FeatureMode {
        match self {
            ModelRef::Named(_, m) => *m,
            ModelRef::File(_, m) => m.feature_mode,
        }
    }
}

fn resolve_model(spec: &str) -> CliResult<ModelRef> {
    let path = Path::new(spec);
    if path.exists() || spec.ends_with(".json") {
        let model = LogisticModel::load(open_input(path)?).ctx(path.display())?;
        return Ok(ModelRef::File(path.to_path_buf(), model));
    }
    Ok(ModelRef::Named(spec.to_string(), parse_mode(spec)?))
}

/// Reports under a caller-chosen name.
struct Named<'a> {
    name: String,
    inner: &'a dyn PairScorer,
}

impl PairScorer for Named<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn score_all(&self, pairs: &[&SentencePair]) -> urlpara::Result<Vec<f64>> {
        self.inner.score_all(pairs)
    }
}

fn model_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn eval(ctx: &Ctx, args: &EvalArgs) -> CliResult<()> {
    let models: Vec<ModelRef> = args.model.iter().map(|m| resolve_model(m)).collect::<CliResult<_>>()?;
    let modes: Vec<FeatureMode> = models.iter().map(ModelRef::mode).collect();
    let emb_path = embeddings_path(ctx, &args.embeddings);
    let needs_training = models
        .iter()
        .any(|m| matches!(m, ModelRef::Named(_, mode) if mode.is_trained()));
    if needs_training && args.train.is_none() {
        return Err(CliError::validation("trained model names need --train"));
    }
    let file_needs_factors = models
        .iter()
        .any(|m| matches!(m, ModelRef::File(_, model) if model.feature_mode.needs_factors()));
    if file_needs_factors && !args.factor_model.as_deref().is_some_and(Path::exists) {
        return Err(CliError::validation("a saved latent-space model needs an existing --factor-model"));
    }
    require_inputs(
        [args.corpus.as_path()]
            .into_iter()
            .chain(args.train.as_deref())
            .chain(args.unlabeled.as_deref())
            .chain(emb_path.as_deref().filter(|_| modes.iter().any(|m| m.needs_embeddings()))),
    )?;
    if let Some(out) = &args.out {
        if skip_existing(&[out], ctx.force) {
            return Ok(());
        }
    }
    let test = load_dataset(&args.corpus, args.format, Split::Test, ctx.config.votes)?;
    let train = match &args.train {
        Some(p) if needs_training => Some(load_dataset(p, args.train_format, Split::Train, ctx.config.votes)?),
        _ => None,
    };
    let mut loaded = Loaded {
        embeddings: load_embeddings_for(ctx, &modes, emb_path.as_deref())?,
        factors: None,
    };
    if modes.iter().any(|m| m.needs_factors()) {
        let sources: Vec<&Dataset> = train.iter().chain(std::iter::once(&test)).collect();
        loaded.factors = Some(factor_model_for(
            ctx,
            args.factor_model.as_deref(),
            &sources,
            args.unlabeled.as_deref(),
            args.factor_k,
        )?);
    }
    let res = loaded.resources();
    let mut reports: Vec<EvalReport> = Vec::new();
    for m in &models {
        let report = match m {
            ModelRef::Named(name, FeatureMode::Random) => {
                let scorer = RandomScorer { seed: ctx.config.seed };
                evaluate(&Named { name: name.clone(), inner: &scorer }, &test)?
            }
            ModelRef::Named(name, mode) if !mode.is_trained() => {
                let scorer = RawScorer::new(name.clone(), FeatureSpec::new(*mode, res)?)?;
                evaluate(&scorer, &test)?
            }
            ModelRef::Named(name, mode) => {
                let model = fit_model(ctx, *mode, train.as_ref().expect("checked above"), res, None)?;
                let scorer = LogisticScorer::new(name.clone(), &model, FeatureSpec::new(*mode, res)?)?;
                evaluate(&scorer, &test)?
            }
            ModelRef::File(path, model) => {
                let scorer = LogisticScorer::new(model_label(path), model, FeatureSpec::new(model.feature_mode, res)?)?;
                evaluate(&scorer, &test)?
            }
        };
        log::info!(
            "{}: max F1 {:.3} over {} pairs ({} positive, {} debatable excluded)",
            report.model,
            report.max_f1.f1,
            report.pairs,
            report.positives,
            report.excluded
        );
        reports.push(report);
    }
    let mut buf = Vec::new();
    write_report_tsv(&reports, &mut buf)?;
    write_output(args.out.as_deref(), &buf)
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Trained model (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Candidate pairs TSV from `pairs`.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub factor_model: Option<PathBuf>,
    /// Scored pairs TSV (`pair_id, probability, s1, s2`), best first;
    /// standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn mine(ctx: &Ctx, args: &MineArgs) -> CliResult<()> {
    let threshold = args.threshold.unwrap_or(ctx.config.mine.threshold);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(CliError::validation(format!("threshold {threshold} outside [0, 1]")));
    }
    let emb_path = embeddings_path(ctx, &args.embeddings);
    require_inputs([args.model.as_path(), args.pairs.as_path()])?;
    let model = LogisticModel::load(open_input(&args.model)?).ctx(args.model.display())?;
    let mode = model.feature_mode;
    if mode.needs_factors() && !args.factor_model.as_deref().is_some_and(Path::exists) {
        return Err(CliError::validation(format!("{mode} needs an existing --factor-model")));
    }
    if let Some(out) = &args.out {
        if skip_existing(&[out], ctx.force) {
            return Ok(());
        }
    }
    let loaded = Loaded {
        embeddings: load_embeddings_for(ctx, &[mode], emb_path.as_deref())?,
        factors: match &args.factor_model {
            Some(p) if mode.needs_factors() => Some(load_factor_model(p)?),
            _ => None,
        },
    };
    let scorer = LogisticScorer::new(model_label(&args.model), &model, FeatureSpec::new(mode, loaded.resources())?)?;
    let candidates = read_pairs_tsv(&args.pairs)?;
    let mined = mine_silver(&scorer, &candidates, threshold)?;
    log::info!("{} of {} candidates at or above {threshold}", mined.len(), candidates.len());
    let mut buf = Vec::new();
    for m in &mined {
        writeln!(buf, "{}\t{:.6}\t{}\t{}", m.pair.pair_id, m.probability, m.pair.s1, m.pair.s2)?;
    }
    write_output(args.out.as_deref(), &buf)
}
