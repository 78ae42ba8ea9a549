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

mod common;

use std::collections::HashMap;
use std::path::Path;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urlpara::annotate::{tasks_from_pairs, Store, StoreConfig, WORKERS_PER_TASK};
use urlpara::corpus::{SentencePair, VoteThresholds};

fn one_pair_tasks(n: usize) -> Vec<SentencePair> {
    (0..n)
        .map(|t| SentencePair {
            pair_id: format!("p{t}"),
            url: None,
            s1: format!("original {t}"),
            s2: format!("candidate {t}"),
        })
        .collect()
}

fn new_store(dir: &Path, n_pairs: usize, workers: &[&str]) -> Store {
    let workers: Vec<String> = workers.iter().map(|w| w.to_string()).collect();
    Store::create(dir, &tasks_from_pairs(&one_pair_tasks(n_pairs)), &workers, StoreConfig::default()).unwrap()
}

fn vote(store: &mut Store, worker: &str, pair: usize, label: bool) {
    let r = store.submit_labels(worker, &[(format!("p{pair}"), label)], 0).unwrap();
    assert_eq!(r.accepted, 1, "{r:?}");
}

#[test]
fn random_worker_has_near_zero_kappa() {
    let d = tempfile::tempdir().unwrap();
    let mut s = new_store(d.path(), 200, &["a", "b", "c", "rand"]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut own = Vec::new();
    let mut maj = Vec::new();
    for p in 0..200 {
        let truth = p % 2 == 0;
        for w in ["a", "b", "c"] {
            vote(&mut s, w, p, truth);
        }
        let guess = rng.random::<bool>();
        vote(&mut s, "rand", p, guess);
        own.push(guess);
        maj.push(truth);
    }
    let st = s.worker_kappa("rand").unwrap();
    let k = st.kappa_vs_majority.unwrap();
    assert!((k - common::kappa(&own, &maj)).abs() < 1e-12);
    assert!(k.abs() < 0.15, "kappa {k}");
    assert!(st.flagged);
}

#[test]
fn kappa_of_035_is_flagged() {
    let d = tempfile::tempdir().unwrap();
    let mut s = new_store(d.path(), 80, &["a", "b", "c", "x"]);
    let mut own = Vec::new();
    let mut maj = Vec::new();
    for p in 0..80 {
        let truth = p < 40;
        // 27 of 40 agreements in each class: p_o = 0.675, p_e = 0.5.
        let agree = (p % 40) < 27;
        let label = if agree { truth } else { !truth };
        for w in ["a", "b", "c"] {
            vote(&mut s, w, p, truth);
        }
        vote(&mut s, "x", p, label);
        own.push(label);
        maj.push(truth);
    }
    let st = s.worker_kappa("x").unwrap();
    let k = st.kappa_vs_majority.unwrap();
    assert!((k - 0.35).abs() < 1e-12);
    assert!((common::kappa(&own, &maj) - 0.35).abs() < 1e-12);
    assert!(st.flagged);
}

#[derive(Debug, Clone)]
enum Op {
    Submit { worker: usize, pairs: Vec<(usize, bool)> },
    Reopen { worker: usize },
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0usize..9, prop::collection::vec((0usize..4, any::<bool>()), 1..4))
            .prop_map(|(worker, pairs)| Op::Submit { worker, pairs }),
        1 => (0usize..9).prop_map(|worker| Op::Reopen { worker }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn store_invariants_hold(ops in prop::collection::vec(op(), 1..60)) {
        let d = tempfile::tempdir().unwrap();
        let names: Vec<String> = (0..9).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut s = new_store(d.path(), 4, &refs);
        let mut totals: HashMap<usize, usize> = HashMap::new();
        for (step, op) in ops.iter().enumerate() {
            match op {
                Op::Submit { worker, pairs } => {
                    let items: Vec<(String, bool)> = pairs.iter().map(|(p, l)| (format!("p{p}"), *l)).collect();
                    s.submit_labels(&names[*worker], &items, step as i64).unwrap();
                }
                Op::Reopen { worker } => {
                    s.reopen_worker(&names[*worker], step as i64).unwrap();
                }
            }
            let ds = s.export_gold(VoteThresholds::default()).unwrap();
            for lp in &ds.pairs {
                prop_assert!(lp.votes.unwrap().total as usize <= WORKERS_PER_TASK);
            }
            for p in 0..4 {
                let now = s.total_workers(&format!("p{p}"));
                let before = totals.insert(p, now).unwrap_or(0);
                prop_assert!(now >= before);
            }
        }
        let export = s.export_gold(VoteThresholds::default()).unwrap();
        drop(s);
        let replayed = Store::open(d.path(), StoreConfig::default()).unwrap();
        prop_assert_eq!(replayed.export_gold(VoteThresholds::default()).unwrap(), export);
    }
}
