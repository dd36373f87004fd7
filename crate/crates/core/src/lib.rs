//! Subtitle quality checking: parsing, language and image issue detection,
//! fix application, review and scoring.

pub mod backends;
pub mod eval;
pub mod fixes;
pub mod image;
pub mod issue;
pub mod lang;
pub mod media;
pub mod pipeline;
mod pool;
pub mod region;
pub mod review;
pub mod scalar;
pub mod subtitle;

pub use issue::{Issue, IssueKind, Suggestion};
pub use region::Region;
pub use scalar::Scalar;
pub use subtitle::{Cue, SubtitleDoc, SubtitleFormat, Timecode};

/// Saliency map in double precision.
pub type SaliencyMap = image::SaliencyMap<f64>;
/// Saliency map in single precision.
pub type SaliencyMapF32 = image::SaliencyMap<f32>;
