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
use urlpara::embeddings::{load_embeddings, LoadOptions};

fuzz_target!(|data: &[u8]| {
    let options = LoadOptions {
        lowercase: data.first().is_some_and(|b| b & 1 == 1),
        vocabulary: None,
    };
    if let Ok((table, _)) = load_embeddings(data, &options) {
        assert!(table.is_empty() || table.dimension() > 0);
    }
});
