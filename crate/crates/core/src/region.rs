use serde::{Deserialize, Serialize};

/// Resolution of stored region coordinates (one hundredth of a percent).
pub const REGION_GRID: f64 = 10_000.0;

/// Normalized rectangle, top-left origin, all fields in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Region {
    /// Builds a region snapped to the 1e-4 grid, or `None` if it violates
    /// the bounds.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Option<Self> {
        let r = Region {
            x: snap(x),
            y: snap(y),
            w: snap(w),
            h: snap(h),
        };
        r.is_valid().then_some(r)
    }

    pub fn is_valid(&self) -> bool {
        let eps = 1e-9;
        [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite())
            && self.x >= 0.0
            && self.y >= 0.0
            && self.w > 0.0
            && self.h > 0.0
            && self.x + self.w <= 1.0 + eps
            && self.y + self.h <= 1.0 + eps
    }

    /// Bottom-center band used when a cue carries no placement of its own.
    pub fn default_band() -> Self {
        Region {
            x: 0.2,
            y: 0.85,
            w: 0.6,
            h: 0.1,
        }
    }

    pub fn full() -> Self {
        Region {
            x: 0.0,
            y: 0.0,
            w: 1.0,
            h: 1.0,
        }
    }

    pub fn contains_point(&self, px: f64, py: f64) -> bool {
        px >= self.x && px < self.x + self.w && py >= self.y && py < self.y + self.h
    }

    pub fn contains(&self, other: &Region) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.w <= self.x + self.w
            && other.y + other.h <= self.y + self.h
    }

    /// Pixel bounds `[x0, x1) × [y0, y1)` of the region on a `width × height`
    /// raster. Always at least one pixel wide and tall.
    pub fn pixel_bounds(&self, width: usize, height: usize) -> (usize, usize, usize, usize) {
        let to_px = |v: f64, n: usize| ((v * n as f64).round() as usize).min(n);
        let x0 = to_px(self.x, width).min(width.saturating_sub(1));
        let y0 = to_px(self.y, height).min(height.saturating_sub(1));
        let x1 = to_px(self.x + self.w, width).max(x0 + 1);
        let y1 = to_px(self.y + self.h, height).max(y0 + 1);
        (x0, y0, x1.min(width), y1.min(height))
    }
}

pub(crate) fn snap(v: f64) -> f64 {
    (v * REGION_GRID).round() / REGION_GRID
}
