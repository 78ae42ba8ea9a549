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

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use urlpara::phrasal::{
    build_phrase_table, consistent_spans, rank_score, train_lm, train_rank, Alignment, LmConfig, PhrasePair,
    WordLexicon,
};

fn links_strategy() -> impl Strategy<Value = (usize, usize, BTreeSet<(usize, usize)>)> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(n, m)| {
        (
            Just(n),
            Just(m),
            prop::collection::btree_set((0..n, 0..m), 0..=(n * m).min(8)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn extraction_matches_brute_force((n, m, links) in links_strategy(), max_len in 1usize..=4) {
        let a = Alignment { links: links.clone() };
        let fast: Vec<_> = consistent_spans(n, m, &a, max_len).into_iter().map(|s| (s.src, s.tgt)).collect();
        prop_assert_eq!(fast, common::brute_force_spans(n, m, &links, max_len));
    }

    #[test]
    fn phrase_table_normalizes(raw in prop::collection::vec((0u8..5, 0u8..5, 1u64..6), 1..40)) {
        let pairs: Vec<PhrasePair> = raw
            .iter()
            .map(|&(s, t, c)| PhrasePair {
                source: vec![format!("s{s}")],
                target: vec![format!("t{t}")],
                count: c,
            })
            .collect();
        let table = build_phrase_table(&pairs, &WordLexicon::default()).unwrap();
        let mut by_src: HashMap<&str, (f64, u64)> = HashMap::new();
        let mut by_tgt: HashMap<&str, f64> = HashMap::new();
        for ((s, t), e) in &table.entries {
            let v = by_src.entry(s).or_default();
            v.0 += e.phi_tgt_given_src;
            v.1 += e.count;
            *by_tgt.entry(t).or_default() += e.phi_src_given_tgt;
            prop_assert!(e.phi_tgt_given_src > 0.0 && e.phi_tgt_given_src <= 1.0);
            prop_assert!(e.lex_tgt_given_src > 0.0 && e.lex_tgt_given_src <= 1.0);
        }
        for (s, (mass, _)) in &by_src {
            prop_assert!((mass - 1.0).abs() < 1e-9, "{} sums to {}", s, mass);
        }
        for mass in by_tgt.values() {
            prop_assert!((mass - 1.0).abs() < 1e-9);
        }
        for ((s, _), e) in &table.entries {
            let total = by_src[s.as_str()].1;
            prop_assert_eq!((e.phi_tgt_given_src * total as f64).round() as u64, e.count);
        }
    }

    #[test]
    fn lm_histories_normalize(
        corpus in prop::collection::vec(prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 1..7), 1..12),
        order in 1usize..=4,
    ) {
        let lm = train_lm(&corpus, &LmConfig { order, ..LmConfig::default() }).unwrap();
        let mut hs = lm.histories();
        hs.push(Vec::new());
        for h in hs {
            let m = lm.history_mass(&h);
            prop_assert!((m - 1.0).abs() < 1e-6, "history {:?} sums to {}", h, m);
        }
        let held_out = vec![vec!["a", "z", "b"], vec!["e"]];
        prop_assert!(lm.perplexity(&held_out).is_finite());
    }

    #[test]
    fn ridge_nests_single_features(
        rows in prop::collection::vec((prop::array::uniform6(-3.0f64..3.0), 1.0f64..5.0), 8..40)
    ) {
        let x: Vec<Vec<f64>> = rows.iter().map(|(f, _)| f.to_vec()).collect();
        let y: Vec<f64> = rows.iter().map(|(_, y)| *y).collect();
        let model = train_rank(&x, &y, 1e-6).unwrap();
        let pred: Vec<f64> = x.iter().map(|r| rank_score(&model, r).unwrap()).collect();
        let combined = common::pearson(&pred, &y);
        for j in 0..6 {
            let col: Vec<f64> = x.iter().map(|r| r[j]).collect();
            let single = common::pearson(&col, &y);
            prop_assert!(combined >= single - 1e-6, "combined {} < feature {} at {}", combined, j, single);
        }
    }
}
