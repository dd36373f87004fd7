//! Edit-rate scoring against a reference, detection F1, cumulative stage
//! reports and the synthetic evaluation corpus.

mod corpus;
mod f1;
mod stages;
mod suber;
mod tokens;

pub use corpus::{bundled_reference, make_synthetic_corpus, CorpusError, CorpusPaths, CueAssets, FaultSpec, SyntheticCorpus};
pub use f1::{f1, f1_by_kind, label_predictions, Confusion, DetectionLabel, KindScore, TruthLabel};
pub use stages::{stage_report, StageRow};
pub use suber::{align_tokens, edit_counts, pair_cues, suber, suber_with, EditCounts, EditOp, MetricError, SuberReport};
pub use tokens::{tokenize_cue, tokenize_doc, MetricToken};
