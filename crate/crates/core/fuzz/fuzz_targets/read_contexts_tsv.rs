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
use urlpara::phrasal::{read_contexts_tsv, write_contexts_tsv};

fuzz_target!(|data: &[u8]| {
    let Ok(contexts) = read_contexts_tsv(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_contexts_tsv(&contexts, &mut buf).unwrap();
    assert_eq!(read_contexts_tsv(buf.as_slice()).unwrap(), contexts);
});
