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

//! Crowd annotation: one original sentence against up to ten candidates,
//! an append-only vote log, majority-vote export and worker agreement.

mod store;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::SentencePair;
use crate::{Error, Result};

pub use store::{
    read_events, ImportedEvents, Rejection, Store, StoreConfig, SubmitReport, WorkerStats, EVENTS_FILE, SNAPSHOT_FILE,
    TASKS_FILE, WORKERS_FILE,
};

/// Workers whose labels count for any one task.
pub const WORKERS_PER_TASK: usize = 6;
pub const MAX_CANDIDATES: usize = 10;
/// Agreement below this flags a worker.
pub const KAPPA_FLAG_BELOW: f64 = 0.4;
/// Shared pairs needed before a worker's agreement is defined.
pub const KAPPA_MIN_SHARED: usize = 20;
/// Other workers' votes needed on a pair before it counts as shared.
pub const KAPPA_MIN_OTHERS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationTask {
    pub task_id: String,
    pub original: String,
    pub candidates: Vec<SentencePair>,
    /// Workers with live labels on this task; filled in when serving.
    #[serde(default)]
    pub assigned_workers: BTreeSet<String>,
}

impl AnnotationTask {
    pub fn validate(&self) -> Result<()> {
        if self.candidates.is_empty() || self.candidates.len() > MAX_CANDIDATES {
            return Err(Error::argument(format!(
                "task {} has {} candidates, expected 1 to {MAX_CANDIDATES}",
                self.task_id,
                self.candidates.len()
            )));
        }
        if let Some(c) = self.candidates.iter().find(|c| c.s1 != self.original) {
            return Err(Error::argument(format!(
                "pair {} in task {} does not share the original sentence",
                c.pair_id, self.task_id
            )));
        }
        Ok(())
    }
}

/// One worker's vote on one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelEvent {
    pub worker_id: String,
    pub pair_id: String,
    pub label: bool,
    pub timestamp: i64,
}

/// A line of the vote log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Label(LabelEvent),
    /// Withdraws a worker's label from aggregation and from the task's
    /// worker cap, reopening the slot. The label stays in the log and still
    /// blocks the same worker from relabeling the pair.
    Revoke {
        worker_id: String,
        pair_id: String,
        timestamp: i64,
    },
}

/// Groups pairs by their original sentence, in first-seen order, into tasks
/// of at most [`MAX_CANDIDATES`] candidates.
pub fn tasks_from_pairs(pairs: &[SentencePair]) -> Vec<AnnotationTask> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: std::collections::HashMap<&str, Vec<&SentencePair>> = std::collections::HashMap::new();
    for p in pairs {
        let g = groups.entry(p.s1.as_str()).or_default();
        if g.is_empty() {
            order.push(p.s1.as_str());
        }
        g.push(p);
    }
    let mut tasks = Vec::new();
    for original in order {
        for chunk in groups[original].chunks(MAX_CANDIDATES) {
            tasks.push(AnnotationTask {
                task_id: format!("task-{}", tasks.len() + 1),
                original: original.to_string(),
                candidates: chunk.iter().map(|p| (*p).clone()).collect(),
                assigned_workers: BTreeSet::new(),
            });
        }
    }
    tasks
}
