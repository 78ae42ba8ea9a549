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

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    AnnotationTask, Event, LabelEvent, KAPPA_FLAG_BELOW, KAPPA_MIN_OTHERS, KAPPA_MIN_SHARED, WORKERS_PER_TASK,
};
use crate::corpus::{aggregate_votes, Dataset, GoldLabel, LabeledPair, Split, VoteThresholds, Votes};
use crate::metrics::cohen_kappa;
use crate::util::write_atomic;
use crate::{Error, Result};

pub const TASKS_FILE: &str = "tasks.jsonl";
pub const WORKERS_FILE: &str = "workers.txt";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

const SNAPSHOT_FORMAT: &str = "urlpara-annotate-snapshot-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StoreConfig {
    /// Write a snapshot after this many new events.
    pub snapshot_every: usize,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig { snapshot_every: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct LabelState {
    label: bool,
    timestamp: i64,
    revoked: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct State {
    events: usize,
    /// pair id -> worker id -> label.
    labels: BTreeMap<String, BTreeMap<String, LabelState>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    format: String,
    state: State,
}

/// Events parsed from a log, plus whether a torn final line was dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportedEvents {
    pub events: Vec<Event>,
    /// Bytes up to the end of the last complete event.
    pub valid_bytes: u64,
    pub truncated_tail: bool,
}

/// Parses a vote log. A final line without a newline that fails to parse is
/// treated as an interrupted write and dropped; any other bad line is an
/// error.
pub fn read_events<R: Read>(mut reader: R) -> Result<ImportedEvents> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    let mut events = Vec::new();
    let mut offset = 0usize;
    let mut lineno = 0usize;
    let mut truncated_tail = false;
    while offset < buf.len() {
        lineno += 1;
        let (line, next, complete) = match buf[offset..].iter().position(|&b| b == b'\n') {
            Some(p) => (&buf[offset..offset + p], offset + p + 1, true),
            None => (&buf[offset..], buf.len(), false),
        };
        let text = std::str::from_utf8(line).map_err(|_| Error::format(lineno, "invalid UTF-8"));
        let parsed = text.and_then(|t| {
            if t.trim().is_empty() {
                Ok(None)
            } else {
                serde_json::from_str::<Event>(t)
                    .map(Some)
                    .map_err(|e| Error::format(lineno, e.to_string()))
            }
        });
        match parsed {
            Ok(Some(e)) if complete => events.push(e),
            Ok(None) if complete => {}
            Ok(_) | Err(_) if !complete => {
                truncated_tail = true;
                break;
            }
            Err(e) => return Err(e),
            Ok(_) => unreachable!(),
        }
        offset = next;
    }
    Ok(ImportedEvents {
        events,
        valid_bytes: offset as u64,
        truncated_tail,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub pair_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmitReport {
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerStats {
    pub worker_id: String,
    pub labeled_count: usize,
    pub shared_pairs: usize,
    pub kappa_vs_majority: Option<f64>,
    pub flagged: bool,
}

/// Tasks, registered workers and the vote log of one annotation project,
/// persisted in a directory.
#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    config: StoreConfig,
    tasks: Vec<AnnotationTask>,
    pair_task: HashMap<String, usize>,
    workers: BTreeSet<String>,
    state: State,
    events_since_snapshot: usize,
    log: File,
}

fn read_tasks(path: &Path) -> Result<Vec<AnnotationTask>> {
    let mut tasks = Vec::new();
    for (idx, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: AnnotationTask = serde_json::from_str(&line).map_err(|e| Error::format(idx + 1, e.to_string()))?;
        tasks.push(t);
    }
    Ok(tasks)
}

fn read_workers(path: &Path) -> Result<BTreeSet<String>> {
    if !path.exists() {
        return Ok(BTreeSet::new());
    }
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn check_worker_id(id: &str) -> Result<()> {
    if id.is_empty() || id.chars().any(char::is_whitespace) || id.starts_with('#') {
        return Err(Error::argument(format!("invalid worker id {id:?}")));
    }
    Ok(())
}

impl Store {
    /// Starts a project in `dir` with the given tasks and workers. Refuses
    /// to overwrite a directory that already holds votes.
    pub fn create(dir: &Path, tasks: &[AnnotationTask], workers: &[String], config: StoreConfig) -> Result<Self> {
        let events = dir.join(EVENTS_FILE);
        if events.exists() && fs::metadata(&events)?.len() > 0 {
            return Err(Error::Config(format!("{} already holds votes", dir.display())));
        }
        fs::create_dir_all(dir)?;
        let mut seen = BTreeSet::new();
        let mut ids = BTreeSet::new();
        let mut text = String::new();
        for t in tasks {
            t.validate()?;
            if !ids.insert(t.task_id.clone()) {
                return Err(Error::argument(format!("duplicate task id {}", t.task_id)));
            }
            for c in &t.candidates {
                if !seen.insert(c.pair_id.clone()) {
                    return Err(Error::argument(format!("pair {} appears in two tasks", c.pair_id)));
                }
            }
            let stored = AnnotationTask {
                assigned_workers: BTreeSet::new(),
                ..t.clone()
            };
            text.push_str(&serde_json::to_string(&stored)?);
            text.push('\n');
        }
        write_atomic(&dir.join(TASKS_FILE), text.as_bytes())?;
        let mut wtext = String::new();
        for w in workers {
            check_worker_id(w)?;
            wtext.push_str(w);
            wtext.push('\n');
        }
        write_atomic(&dir.join(WORKERS_FILE), wtext.as_bytes())?;
        File::create(&events)?;
        let snap = dir.join(SNAPSHOT_FILE);
        if snap.exists() {
            fs::remove_file(snap)?;
        }
        Store::open(dir, config)
    }

    /// Loads a project, resuming from the snapshot when it is consistent with
    /// the log and repairing a torn final log line.
    pub fn open(dir: &Path, config: StoreConfig) -> Result<Self> {
        let tasks = read_tasks(&dir.join(TASKS_FILE))?;
        let mut pair_task = HashMap::new();
        for (i, t) in tasks.iter().enumerate() {
            t.validate()?;
            for c in &t.candidates {
                if pair_task.insert(c.pair_id.clone(), i).is_some() {
                    return Err(Error::Config(format!("pair {} appears in two tasks", c.pair_id)));
                }
            }
        }
        let workers = read_workers(&dir.join(WORKERS_FILE))?;
        let events_path = dir.join(EVENTS_FILE);
        let imported = if events_path.exists() {
            read_events(File::open(&events_path)?)?
        } else {
            ImportedEvents {
                events: Vec::new(),
                valid_bytes: 0,
                truncated_tail: false,
            }
        };
        if imported.truncated_tail {
            log::warn!("dropping an incomplete final line from {}", events_path.display());
            OpenOptions::new()
                .write(true)
                .open(&events_path)?
                .set_len(imported.valid_bytes)?;
        }
        let log = OpenOptions::new().create(true).append(true).open(&events_path)?;
        let mut store = Store {
            dir: dir.to_path_buf(),
            config,
            tasks,
            pair_task,
            workers,
            state: State::default(),
            events_since_snapshot: 0,
            log,
        };
        let snap_path = dir.join(SNAPSHOT_FILE);
        if snap_path.exists() {
            match serde_json::from_slice::<Snapshot>(&fs::read(&snap_path)?) {
                Ok(s) if s.format == SNAPSHOT_FORMAT && s.state.events <= imported.events.len() => {
                    store.state = s.state;
                }
                _ => log::warn!("ignoring stale or unreadable snapshot {}", snap_path.display()),
            }
        }
        let start = store.state.events;
        for (k, e) in imported.events[start..].iter().enumerate() {
            store
                .apply(e)
                .map_err(|err| Error::format(start + k + 1, format!("replaying event: {err}")))?;
        }
        Ok(store)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn tasks(&self) -> &[AnnotationTask] {
        &self.tasks
    }

    pub fn workers(&self) -> &BTreeSet<String> {
        &self.workers
    }

    pub fn event_count(&self) -> usize {
        self.state.events
    }

    fn apply(&mut self, e: &Event) -> Result<()> {
        match e {
            Event::Label(l) => {
                if !self.pair_task.contains_key(&l.pair_id) {
                    return Err(Error::argument(format!("unknown pair {}", l.pair_id)));
                }
                let slot = self.state.labels.entry(l.pair_id.clone()).or_default();
                if slot.contains_key(&l.worker_id) {
                    return Err(Error::argument(format!("{} already labeled {}", l.worker_id, l.pair_id)));
                }
                slot.insert(
                    l.worker_id.clone(),
                    LabelState {
                        label: l.label,
                        timestamp: l.timestamp,
                        revoked: false,
                    },
                );
            }
            Event::Revoke { worker_id, pair_id, .. } => {
                let s = self
                    .state
                    .labels
                    .get_mut(pair_id)
                    .and_then(|m| m.get_mut(worker_id))
                    .filter(|s| !s.revoked)
                    .ok_or_else(|| Error::argument(format!("no live label by {worker_id} on {pair_id}")))?;
                s.revoked = true;
            }
        }
        self.state.events += 1;
        Ok(())
    }

    /// Appends events in one write, then applies them.
    fn append(&mut self, events: &[Event]) -> Result<()> {
        if events.is_empty() {
            return Ok(());
        }
        let mut text = String::new();
        for e in events {
            text.push_str(&serde_json::to_string(e)?);
            text.push('\n');
        }
        self.log.write_all(text.as_bytes())?;
        self.log.sync_data()?;
        for e in events {
            self.apply(e)?;
        }
        self.events_since_snapshot += events.len();
        if self.events_since_snapshot >= self.config.snapshot_every.max(1) {
            self.snapshot()?;
        }
        Ok(())
    }

    pub fn snapshot(&mut self) -> Result<()> {
        let snap = Snapshot {
            format: SNAPSHOT_FORMAT.into(),
            state: self.state.clone(),
        };
        write_atomic(&self.dir.join(SNAPSHOT_FILE), &serde_json::to_vec(&snap)?)?;
        self.events_since_snapshot = 0;
        Ok(())
    }

    pub fn register_worker(&mut self, worker_id: &str) -> Result<bool> {
        check_worker_id(worker_id)?;
        if self.workers.contains(worker_id) {
            return Ok(false);
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(WORKERS_FILE))?;
        writeln!(f, "{worker_id}")?;
        f.sync_data()?;
        self.workers.insert(worker_id.to_string());
        Ok(true)
    }

    fn require_worker(&self, worker_id: &str) -> Result<()> {
        if self.workers.contains(worker_id) {
            Ok(())
        } else {
            Err(Error::Auth(format!("unknown worker {worker_id:?}")))
        }
    }

    fn live(&self, pair_id: &str) -> impl Iterator<Item = (&String, &LabelState)> {
        self.state
            .labels
            .get(pair_id)
            .into_iter()
            .flat_map(|m| m.iter())
            .filter(|(_, s)| !s.revoked)
    }

    /// Workers with a live label on any pair of the task.
    fn task_workers(&self, task: usize) -> BTreeSet<String> {
        self.tasks[task]
            .candidates
            .iter()
            .flat_map(|c| self.live(&c.pair_id).map(|(w, _)| w.clone()))
            .collect()
    }

    fn has_touched(&self, worker_id: &str, task: usize) -> bool {
        self.tasks[task].candidates.iter().any(|c| {
            self.state
                .labels
                .get(&c.pair_id)
                .is_some_and(|m| m.contains_key(worker_id))
        })
    }

    /// Distinct workers who ever labeled the pair, revoked or not.
    pub fn total_workers(&self, pair_id: &str) -> usize {
        self.state.labels.get(pair_id).map_or(0, BTreeMap::len)
    }

    /// Up to `batch` tasks this worker has not labeled and that still have a
    /// free worker slot, least-covered first, then in task order.
    pub fn next_tasks(&self, worker_id: &str, batch: usize) -> Result<Vec<AnnotationTask>> {
        self.require_worker(worker_id)?;
        let mut open: Vec<(usize, usize, BTreeSet<String>)> = (0..self.tasks.len())
            .filter(|&t| !self.has_touched(worker_id, t))
            .map(|t| {
                let w = self.task_workers(t);
                (w.len(), t, w)
            })
            .filter(|(n, _, _)| *n < WORKERS_PER_TASK)
            .collect();
        open.sort_by_key(|(n, t, _)| (*n, *t));
        Ok(open
            .into_iter()
            .take(batch)
            .map(|(_, t, assigned)| AnnotationTask {
                assigned_workers: assigned,
                ..self.tasks[t].clone()
            })
            .collect())
    }

    /// Records a batch of labels. Each item is accepted or rejected on its
    /// own; accepted items are written to the log together.
    pub fn submit_labels(&mut self, worker_id: &str, labels: &[(String, bool)], timestamp: i64) -> Result<SubmitReport> {
        self.require_worker(worker_id)?;
        let mut report = SubmitReport::default();
        let mut batch_pairs: BTreeSet<&str> = BTreeSet::new();
        let mut joined: HashMap<usize, BTreeSet<String>> = HashMap::new();
        let mut events = Vec::new();
        for (pair_id, label) in labels {
            let reject = |reason: &str| Rejection {
                pair_id: pair_id.clone(),
                reason: reason.to_string(),
            };
            let Some(&task) = self.pair_task.get(pair_id) else {
                report.rejected.push(reject("unknown pair"));
                continue;
            };
            let dup = batch_pairs.contains(pair_id.as_str())
                || self
                    .state
                    .labels
                    .get(pair_id)
                    .is_some_and(|m| m.contains_key(worker_id));
            if dup {
                report.rejected.push(reject("already labeled by this worker"));
                continue;
            }
            let workers = joined.entry(task).or_insert_with(|| self.task_workers(task));
            if !workers.contains(worker_id) && workers.len() >= WORKERS_PER_TASK {
                report.rejected.push(reject("task already has its full set of workers"));
                continue;
            }
            workers.insert(worker_id.to_string());
            batch_pairs.insert(pair_id);
            events.push(Event::Label(LabelEvent {
                worker_id: worker_id.to_string(),
                pair_id: pair_id.clone(),
                label: *label,
                timestamp,
            }));
        }
        report.accepted = events.len();
        self.append(&events)?;
        Ok(report)
    }

    /// Revokes every live label of `worker_id`, freeing their task slots.
    /// Returns the number of labels revoked.
    pub fn reopen_worker(&mut self, worker_id: &str, timestamp: i64) -> Result<usize> {
        self.require_worker(worker_id)?;
        let events: Vec<Event> = self
            .state
            .labels
            .iter()
            .filter(|(_, m)| m.get(worker_id).is_some_and(|s| !s.revoked))
            .map(|(pair_id, _)| Event::Revoke {
                worker_id: worker_id.to_string(),
                pair_id: pair_id.clone(),
                timestamp,
            })
            .collect();
        let n = events.len();
        self.append(&events)?;
        Ok(n)
    }

    /// Majority-vote gold labels over live votes, in task order. Pairs with
    /// fewer than the full worker count are exported as debatable.
    pub fn export_gold(&self, thresholds: VoteThresholds) -> Result<Dataset> {
        aggregate_votes(0, 0, thresholds)?;
        let mut pairs = Vec::new();
        for t in &self.tasks {
            for c in &t.candidates {
                let (mut positive, mut total) = (0u32, 0u32);
                for (_, s) in self.live(&c.pair_id) {
                    total += 1;
                    positive += u32::from(s.label);
                }
                if total == 0 {
                    continue;
                }
                let gold = if (total as usize) < WORKERS_PER_TASK {
                    GoldLabel::Debatable
                } else {
                    aggregate_votes(positive, total, thresholds)?
                };
                pairs.push(LabeledPair {
                    pair: c.clone(),
                    votes: Some(Votes { positive, total }),
                    gold,
                });
            }
        }
        Ok(Dataset {
            name: "annotations".into(),
            pairs,
            split: Split::Train,
        })
    }

    /// Agreement between the worker and the strict majority of the other
    /// workers, over pairs where at least three others voted.
    pub fn worker_kappa(&self, worker_id: &str) -> Result<WorkerStats> {
        self.require_worker(worker_id)?;
        let mut mine = Vec::new();
        let mut majority = Vec::new();
        let mut labeled = 0;
        for (pair_id, m) in &self.state.labels {
            let Some(own) = m.get(worker_id).filter(|s| !s.revoked) else {
                continue;
            };
            labeled += 1;
            let others: Vec<bool> = self
                .live(pair_id)
                .filter(|(w, _)| w.as_str() != worker_id)
                .map(|(_, s)| s.label)
                .collect();
            let pos = others.iter().filter(|&&b| b).count();
            if others.len() < KAPPA_MIN_OTHERS || 2 * pos == others.len() {
                continue;
            }
            mine.push(own.label);
            majority.push(2 * pos > others.len());
        }
        let kappa = if mine.len() >= KAPPA_MIN_SHARED {
            Some(cohen_kappa(&mine, &majority)?)
        } else {
            None
        };
        Ok(WorkerStats {
            worker_id: worker_id.to_string(),
            labeled_count: labeled,
            shared_pairs: mine.len(),
            kappa_vs_majority: kappa,
            flagged: kappa.is_some_and(|k| k < KAPPA_FLAG_BELOW),
        })
    }

    /// Stats of every worker whose agreement falls below the flag line.
    pub fn flagged_workers(&self) -> Result<Vec<WorkerStats>> {
        let mut out = Vec::new();
        for w in &self.workers {
            let s = self.worker_kappa(w)?;
            if s.flagged {
                out.push(s);
            }
        }
        Ok(out)
    }
}
