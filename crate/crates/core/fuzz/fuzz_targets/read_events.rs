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
use urlpara::annotate::read_events;

fuzz_target!(|data: &[u8]| {
    if let Ok(imported) = read_events(data) {
        assert!(imported.valid_bytes as usize <= data.len());
        // The valid prefix alone parses to the same events, with no torn tail.
        let prefix = read_events(&data[..imported.valid_bytes as usize]).unwrap();
        assert_eq!(prefix.events, imported.events);
        assert!(!prefix.truncated_tail);
    }
});
