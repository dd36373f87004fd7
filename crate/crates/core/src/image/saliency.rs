use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::Frame;
use crate::region::Region;
use crate::scalar::Scalar;

/// Working resolution of the saliency computation.
pub const WORK_SIZE: usize = 64;

/// Spectral bins weaker than this fraction of the strongest bin are treated
/// as empty.
pub const RELATIVE_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SaliencyError {
    #[error("map of {width}x{height} needs {expected} values, got {got}")]
    Shape {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
    #[error("saliency values must be finite and non-negative")]
    Negative,
}

/// Saliency mass over a `width x height` grid, row-major, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaliencyMap<T> {
    pub width: usize,
    pub height: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> SaliencyMap<T> {
    pub fn uniform(width: usize, height: usize) -> Self {
        let v = T::one() / T::from_usize_lossy(width * height);
        SaliencyMap {
            width,
            height,
            values: vec![v; width * height],
        }
    }

    /// Builds a map from raw values as given, without normalizing.
    pub fn from_values(width: usize, height: usize, values: Vec<T>) -> Result<Self, SaliencyError> {
        if values.len() != width * height || values.is_empty() {
            return Err(SaliencyError::Shape {
                width,
                height,
                expected: width * height,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(SaliencyError::Negative);
        }
        Ok(SaliencyMap { width, height, values })
    }

    /// Scales the values to unit mass; a massless map becomes uniform.
    pub fn normalized(width: usize, height: usize, values: Vec<T>) -> Self {
        let total: T = values.iter().copied().sum();
        if !total.is_finite() || total <= T::zero() || values.iter().any(|v| !v.is_finite()) {
            return Self::uniform(width, height);
        }
        SaliencyMap {
            width,
            height,
            values: values.into_iter().map(|v| (v / total).max(T::zero())).collect(),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.values[y * self.width + x]
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Cell with the largest value; the first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    /// Saliency mass of cells whose centres lie inside the region.
    pub fn overlap_score(&self, region: &Region) -> T {
        let mut sum = T::zero();
        for y in 0..self.height {
            let cy = (y as f64 + 0.5) / self.height as f64;
            if cy < region.y || cy >= region.y + region.h {
                continue;
            }
            for x in 0..self.width {
                let cx = (x as f64 + 0.5) / self.width as f64;
                if region.contains_point(cx, cy) {
                    sum += self.get(x, y);
                }
            }
        }
        sum
    }
}

/// Luma of every pixel, row-major.
pub fn grayscale<T: Scalar>(frame: &Frame) -> Vec<T> {
    let (r, g, b) = (T::from_f64_lossy(0.299), T::from_f64_lossy(0.587), T::from_f64_lossy(0.114));
    frame
        .pixels
        .chunks_exact(3)
        .map(|p| r * T::from(p[0]).unwrap() + g * T::from(p[1]).unwrap() + b * T::from(p[2]).unwrap())
        .collect()
}

/// Bilinear resampling with pixel-centre alignment and clamped borders.
pub fn resize_bilinear<T: Scalar>(src: &[T], sw: usize, sh: usize, dw: usize, dh: usize) -> Vec<T> {
    let half = T::from_f64_lossy(0.5);
    let axis = |d: usize, s: usize, n_dst: usize| -> (usize, usize, T) {
        let pos = (T::from_usize_lossy(d) + half) * T::from_usize_lossy(s) / T::from_usize_lossy(n_dst) - half;
        let pos = pos.max(T::zero()).min(T::from_usize_lossy(s - 1));
        let i0 = pos.floor().to_usize().unwrap_or(0);
        let i1 = (i0 + 1).min(s - 1);
        (i0, i1, pos - T::from_usize_lossy(i0))
    };
    let mut out = Vec::with_capacity(dw * dh);
    for y in 0..dh {
        let (y0, y1, fy) = axis(y, sh, dh);
        for x in 0..dw {
            let (x0, x1, fx) = axis(x, sw, dw);
            let top = src[y0 * sw + x0] * (T::one() - fx) + src[y0 * sw + x1] * fx;
            let bottom = src[y1 * sw + x0] * (T::one() - fx) + src[y1 * sw + x1] * fx;
            out.push(top * (T::one() - fy) + bottom * fy);
        }
    }
    out
}

fn fft2<T: Scalar>(data: &mut [Complex<T>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    fft.process(data);
    transpose(data, n);
    fft.process(data);
    transpose(data, n);
    if inverse {
        let scale = T::one() / T::from_usize_lossy(n * n);
        data.iter_mut().for_each(|c| *c = *c * scale);
    }
}

fn transpose<V: Copy>(data: &mut [V], n: usize) {
    for y in 0..n {
        for x in y + 1..n {
            data.swap(y * n + x, x * n + y);
        }
    }
}

/// 3x3 mean over live cells only, with wrap-around indexing.
fn masked_box_wrap<T: Scalar>(src: &[T], live: &[bool], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for y in 0..n {
        for x in 0..n {
            let (mut s, mut count) = (T::zero(), 0usize);
            for dy in [n - 1, 0, 1] {
                for dx in [n - 1, 0, 1] {
                    let i = ((y + dy) % n) * n + (x + dx) % n;
                    if live[i] {
                        s += src[i];
                        count += 1;
                    }
                }
            }
            if count > 0 {
                out[y * n + x] = s / T::from_usize_lossy(count);
            }
        }
    }
    out
}

/// 3x3 mean with replicated edges.
fn box_replicate<T: Scalar>(src: &[T], n: usize) -> Vec<T> {
    let ninth = T::one() / T::from_usize_lossy(9);
    let clamp = |v: isize| v.clamp(0, n as isize - 1) as usize;
    let mut out = vec![T::zero(); n * n];
    for y in 0..n {
        for x in 0..n {
            let mut s = T::zero();
            for dy in -1..=1 {
                for dx in -1..=1 {
                    s += src[clamp(y as isize + dy) * n + clamp(x as isize + dx)];
                }
            }
            out[y * n + x] = s * ninth;
        }
    }
    out
}

/// Spectral-residual saliency of a frame at the 64x64 working size.
///
/// The zero-frequency bin and empty bins are left out of the residual, so
/// the map does not change when a constant is added to the frame.
pub fn saliency_spectral_residual<T: Scalar>(frame: &Frame) -> SaliencyMap<T> {
    let n = WORK_SIZE;
    let gray = resize_bilinear(&grayscale::<T>(frame), frame.width, frame.height, n, n);
    let (lo, hi) = gray
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo <= T::epsilon() * (T::one() + hi.abs()) {
        return SaliencyMap::uniform(n, n);
    }

    let mut spectrum: Vec<Complex<T>> = gray.iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft2(&mut spectrum, n, false);
    let amp: Vec<T> = spectrum.iter().map(|c| c.norm()).collect();
    let relative = T::from_f64_lossy(RELATIVE_FLOOR).max(T::epsilon() * T::from_usize_lossy(n));
    let floor = amp.iter().copied().fold(T::zero(), T::max) * relative;
    let mut live: Vec<bool> = amp.iter().map(|&a| a > floor).collect();
    live[0] = false;
    let log_amp: Vec<T> = amp
        .iter()
        .zip(&live)
        .map(|(&a, &l)| if l { a.ln() } else { T::zero() })
        .collect();
    let local_mean = masked_box_wrap(&log_amp, &live, n);
    let mut residual: Vec<Complex<T>> = (0..n * n)
        .map(|i| {
            if live[i] {
                Complex::from_polar((log_amp[i] - local_mean[i]).exp(), spectrum[i].arg())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
        .collect();
    fft2(&mut residual, n, true);
    let energy: Vec<T> = residual.iter().map(|c| c.norm_sqr()).collect();
    let smoothed = box_replicate(&box_replicate(&energy, n), n);
    SaliencyMap::normalized(n, n, smoothed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_frame_is_uniform() {
        let map: SaliencyMap<f64> = saliency_spectral_residual(&Frame::filled(1, 50, 30, [128, 128, 128]));
        assert!(map.values.iter().all(|&v| v == 1.0 / 4096.0));
    }

    #[test]
    fn bilinear_identity_and_upscale() {
        let src: Vec<f64> = (0..12).map(f64::from).collect();
        assert_eq!(resize_bilinear(&src, 4, 3, 4, 3), src);
        let up = resize_bilinear(&[0.0, 4.0], 2, 1, 4, 1);
        assert_eq!(up, vec![0.0, 1.0, 3.0, 4.0]);
    }

    #[test]
    fn overlap_of_uniform_map() {
        let map = SaliencyMap::<f64>::uniform(64, 64);
        assert_abs_diff_eq!(map.overlap_score(&Region::full()), 1.0, epsilon = 1e-12);
        let bottom = Region::new(0.0, 0.8, 1.0, 0.2).unwrap();
        // rows 51..63 have centres at or below 0.8: 13 of 64 rows
        assert_abs_diff_eq!(map.overlap_score(&bottom), 13.0 / 64.0, epsilon = 1e-12);
        assert!((map.overlap_score(&bottom) - 0.2).abs() <= 1.0 / 64.0);
        let band = map.overlap_score(&Region::default_band());
        assert_abs_diff_eq!(band, 7.0 * 38.0 / 4096.0, epsilon = 1e-12);
    }

    #[test]
    fn f32_and_f64_agree() {
        let mut frame = Frame::filled(1, 64, 64, [0, 0, 0]);
        frame.fill_rect(20, 30, 28, 38, [255, 255, 255]);
        let a: SaliencyMap<f64> = saliency_spectral_residual(&frame);
        let b: SaliencyMap<f32> = saliency_spectral_residual(&frame);
        let inside = |(x, y): (usize, usize)| (20..28).contains(&x) && (30..38).contains(&y);
        assert!(inside(a.argmax()), "{:?}", a.argmax());
        assert!(inside(b.argmax()), "{:?}", b.argmax());
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - *y as f64).abs() < 1e-5);
        }
        assert!((b.total() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SaliencyMap::from_values(2, 2, vec![0.0; 3]).is_err());
        assert_eq!(SaliencyMap::from_values(1, 1, vec![-1.0]), Err(SaliencyError::Negative));
    }
}
