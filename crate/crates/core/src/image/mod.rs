//! Frame-based checks: subtitle placement against visual saliency and font
//! colour against background brightness.

mod color;
mod pass;
mod placement;
mod saliency;

pub use color::{average_brightness, choose_font_color, font_color_for, DEFAULT_BRIGHTNESS_THRESHOLD};
pub use pass::{run_image_pass, ImageConfig};
pub use placement::{
    default_ladder, detect_positioning, exceeds_overlap, place, NamedRegion, PlacementResult,
    DEFAULT_OVERLAP_THRESHOLD,
};
pub use saliency::{grayscale, resize_bilinear, saliency_spectral_residual, SaliencyError, SaliencyMap, WORK_SIZE};
