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

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use urlpara::annotate::{tasks_from_pairs, Store, StoreConfig, TASKS_FILE};

use super::Ctx;
use crate::error::{CliError, CliResult, Context};
use crate::io::{open_input, read_pairs_tsv, require_inputs, write_output};
use crate::server::{router, serve, AppState};

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Project directory holding tasks, workers and the vote log.
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Candidate pairs TSV; required the first time, to create the tasks.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Worker id to register; repeat for several.
    #[arg(long)]
    pub worker: Vec<String>,
    /// File of worker ids, one per line.
    #[arg(long)]
    pub workers_file: Option<PathBuf>,
    #[arg(long)]
    pub bind: Option<String>,
    /// Directory of static files (the annotation UI) served at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

fn store_config(ctx: &Ctx) -> StoreConfig {
    StoreConfig {
        snapshot_every: ctx.config.annotate.snapshot_every,
    }
}

/// Opens the project in `data_dir`, creating it from `pairs` when it does not
/// exist yet, and registers `workers`.
pub fn open_or_create_store(
    ctx: &Ctx,
    data_dir: &Path,
    pairs: Option<&Path>,
    workers: &[String],
) -> CliResult<Store> {
    let mut store = if data_dir.join(TASKS_FILE).exists() {
        if pairs.is_some() {
            log::info!("{} already has tasks; ignoring --pairs", data_dir.display());
        }
        Store::open(data_dir, store_config(ctx)).ctx(data_dir.display())?
    } else {
        let pairs = pairs.ok_or_else(|| {
            CliError::validation(format!("{} has no tasks yet; pass --pairs", data_dir.display()))
        })?;
        let tasks = tasks_from_pairs(&read_pairs_tsv(pairs)?);
        log::info!("creating {} tasks in {}", tasks.len(), data_dir.display());
        Store::create(data_dir, &tasks, &[], store_config(ctx)).ctx(data_dir.display())?
    };
    for w in workers {
        store.register_worker(w)?;
    }
    Ok(store)
}

fn read_worker_file(path: &Path) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for line in open_input(path)?.lines() {
        let line = line?;
        let id = line.trim();
        if !id.is_empty() && !id.starts_with('#') {
            out.push(id.to_string());
        }
    }
    Ok(out)
}

pub fn serve_cmd(ctx: &Ctx, args: &ServeArgs) -> CliResult<()> {
    require_inputs(
        args.pairs
            .as_deref()
            .into_iter()
            .chain(args.workers_file.as_deref())
            .chain(args.static_dir.as_deref()),
    )?;
    let mut workers = args.worker.clone();
    if let Some(f) = &args.workers_file {
        workers.extend(read_worker_file(f)?);
    }
    let store = open_or_create_store(ctx, &args.data_dir, args.pairs.as_deref(), &workers)?;
    log::info!(
        "{} tasks, {} workers, {} logged events",
        store.tasks().len(),
        store.workers().len(),
        store.event_count()
    );
    let bind = args.bind.clone().unwrap_or_else(|| ctx.config.annotate.bind.clone());
    let state = AppState::new(store);
    let app = router(state.clone(), args.static_dir.as_deref());
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&bind)
            .await
            .map_err(|e| CliError::validation(format!("cannot bind {bind}: {e}")))?;
        log::info!("listening on http://{}", listener.local_addr()?);
        serve(listener, app).await.map_err(CliError::from)
    })?;
    let mut store = state.store.write().map_err(|_| CliError::runtime("store lock poisoned"))?;
    store.snapshot()?;
    Ok(())
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("who").required(true).args(["worker", "flagged"])))]
pub struct ReopenArgs {
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Worker whose labels are withdrawn; repeat for several.
    #[arg(long)]
    pub worker: Vec<String>,
    /// Withdraw the labels of every worker whose kappa is below the flag line.
    #[arg(long)]
    pub flagged: bool,
    /// Per-worker summary TSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const REOPEN_HEADER: &str = "worker\tlabeled\tshared\tkappa\treopened";

pub fn reopen(ctx: &Ctx, args: &ReopenArgs) -> CliResult<()> {
    if !args.data_dir.join(TASKS_FILE).exists() {
        return Err(CliError::validation(format!(
            "{} is not an annotation project",
            args.data_dir.display()
        )));
    }
    let mut store = Store::open(&args.data_dir, store_config(ctx)).ctx(args.data_dir.display())?;
    let mut targets = Vec::new();
    for w in &args.worker {
        targets.push(store.worker_kappa(w)?);
    }
    if args.flagged {
        for s in store.flagged_workers()? {
            if !targets.iter().any(|t| t.worker_id == s.worker_id) {
                targets.push(s);
            }
        }
    }
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs() as i64);
    let mut buf = Vec::new();
    writeln!(buf, "{REOPEN_HEADER}")?;
    for s in &targets {
        let reopened = store.reopen_worker(&s.worker_id, ts)?;
        let kappa = s.kappa_vs_majority.map_or_else(|| "NA".to_string(), |k| format!("{k:.4}"));
        writeln!(
            buf,
            "{}\t{}\t{}\t{kappa}\t{reopened}",
            s.worker_id, s.labeled_count, s.shared_pairs
        )?;
        log::info!("{}: reopened {reopened} pairs", s.worker_id);
    }
    store.snapshot()?;
    write_output(args.out.as_deref(), &buf)
}
