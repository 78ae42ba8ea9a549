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

#![no_main]

use libfuzzer_sys::fuzz_target;
use urlpara::corpus::{read_labeled_tsv, write_labeled_tsv, Split, VoteThresholds};

fuzz_target!(|data: &[u8]| {
    let Ok((dataset, _)) = read_labeled_tsv(data, "fuzz", Split::Train, VoteThresholds::default()) else {
        return;
    };
    // Whatever parses must write back out and parse to the same labels.
    let mut buf = Vec::new();
    write_labeled_tsv(&dataset, &mut buf).unwrap();
    let (again, _) = read_labeled_tsv(buf.as_slice(), "fuzz", Split::Train, VoteThresholds::default()).unwrap();
    let gold = |d: &urlpara::corpus::Dataset| d.pairs.iter().map(|p| (p.gold, p.votes)).collect::<Vec<_>>();
    assert_eq!(gold(&dataset), gold(&again));
});
