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

//! Phrasal paraphrases: monolingual word alignment, consistent phrase-pair
//! extraction, phrase tables, a Kneser-Ney language model and the scores
//! used to rank extracted pairs.

mod align;
mod extract;
mod lm;
mod rank;
mod table;

pub use align::{align, default_stopwords, AlignConfig, Alignment};
pub use extract::{consistent_spans, extract_phrases, PhrasePair, SpanPair, DEFAULT_MAX_PHRASE_LEN};
pub use lm::{train_lm, LmConfig, NgramLm, BOS, EOS, FALLBACK_DISCOUNT, UNK};
pub use rank::{
    embedding_phrase_score, evaluate_likert, lm_substitution_score, rank_features, rank_score, read_contexts_tsv,
    read_ratings, table_overlap, train_rank, write_contexts_tsv, Coverage, LikertRow, PhraseContext, RankModel,
    Rating, RANK_FEATURE_NAMES,
};
pub use table::{build_phrase_table, PhraseEntry, PhraseTable, PhraseTableBuilder, WordLexicon, LEX_FLOOR};
