//! Text and audio detectors: contextual spelling, harmful words, time sync,
//! non-word audio events and line-length segmentation.

pub mod harmful;
pub mod nonword;
mod normalize;
mod pass;
pub mod segmentation;
pub mod spelling;
pub mod timesync;

pub use harmful::{detect_harmful, mask_spans, HarmError};
pub use nonword::detect_non_word;
pub use normalize::{cosine_bow, normalize_tokens};
pub use pass::{run_language_pass, LanguageConfig, PassOutput};
pub use segmentation::{detect_segmentation, split_cue, SplitError, SplitOutcome};
pub use spelling::{detect_contextual_spelling, spelling_issue, validate_spell_rules, RuleCheck, SpellRule};
pub use timesync::detect_time_sync;
