use crate::issue::FontColor;
use crate::media::Frame;
use crate::region::Region;
use crate::scalar::Scalar;

pub const DEFAULT_BRIGHTNESS_THRESHOLD: f64 = 128.0;

/// Mean luma over the region's pixels on the full-resolution frame.
pub fn average_brightness<T: Scalar>(frame: &Frame, region: &Region) -> T {
    let (x0, y0, x1, y1) = region.pixel_bounds(frame.width, frame.height);
    // Luma in thousandths, accumulated exactly.
    let mut sum: u64 = 0;
    for y in y0..y1 {
        for x in x0..x1 {
            let [r, g, b] = frame.pixel(x, y);
            sum += 299 * r as u64 + 587 * g as u64 + 114 * b as u64;
        }
    }
    let n = ((x1 - x0) * (y1 - y0)) as u64;
    T::from_u64(sum).unwrap() / T::from_u64(n * 1000).unwrap()
}

/// Black text over backgrounds strictly brighter than the threshold.
pub fn font_color_for(brightness: f64, threshold: f64) -> FontColor {
    if brightness > threshold {
        FontColor::Black
    } else {
        FontColor::White
    }
}

pub fn choose_font_color(frame: &Frame, region: &Region) -> FontColor {
    font_color_for(average_brightness(frame, region), DEFAULT_BRIGHTNESS_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solid_frames() {
        let white = Frame::filled(1, 40, 30, [255, 255, 255]);
        let black = Frame::filled(1, 40, 30, [0, 0, 0]);
        assert_eq!(average_brightness::<f64>(&white, &Region::full()), 255.0);
        assert_eq!(average_brightness::<f64>(&black, &Region::full()), 0.0);
        assert_eq!(choose_font_color(&white, &Region::default_band()), FontColor::Black);
        assert_eq!(choose_font_color(&black, &Region::default_band()), FontColor::White);
    }

    #[test]
    fn half_and_half() {
        let mut frame = Frame::filled(1, 40, 20, [0, 0, 0]);
        frame.fill_rect(0, 0, 20, 20, [255, 255, 255]);
        assert_eq!(average_brightness::<f64>(&frame, &Region::full()), 127.5);
    }

    #[test]
    fn boundary() {
        let gray = Frame::filled(1, 8, 8, [128, 128, 128]);
        assert_eq!(average_brightness::<f64>(&gray, &Region::full()), 128.0);
        assert_eq!(choose_font_color(&gray, &Region::full()), FontColor::White);
        assert_eq!(font_color_for(128.0, 128.0), FontColor::White);
        assert_eq!(font_color_for(128.01, 128.0), FontColor::Black);
    }

    proptest! {
        #[test]
        fn inversion_flips_decision(pixels in prop::collection::vec(any::<u8>(), 16 * 9 * 3)) {
            let frame = Frame::new(1, 16, 9, pixels.clone()).unwrap();
            let inverted = Frame::new(1, 16, 9, pixels.iter().map(|v| 255 - v).collect()).unwrap();
            let b: f64 = average_brightness(&frame, &Region::full());
            let bi: f64 = average_brightness(&inverted, &Region::full());
            prop_assert!((b + bi - 255.0).abs() < 1e-9);
            if (b - 127.5).abs() > 0.5 {
                prop_assert_ne!(choose_font_color(&frame, &Region::full()), choose_font_color(&inverted, &Region::full()));
            }
        }
    }
}
