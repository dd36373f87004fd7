//! Saliency values frozen from the numpy implementation in
//! `oracles/saliency.py`.

use proptest::prelude::*;
use vsat_core::image::{saliency_spectral_residual, SaliencyMap};
use vsat_core::media::Frame;
use vsat_core::Region;

fn textured() -> Frame {
    let (w, h) = (80usize, 48usize);
    let mut f = Frame::filled(1, w, h, [0, 0, 0]);
    for y in 0..h {
        for x in 0..w {
            let r = ((x * 13 + y * 29 + x * y) % 256) as u8;
            let g = ((x * 7 + y * 3) % 256) as u8;
            let b = ((x * y) % 256) as u8;
            f.set_pixel(x, y, [r, g, b]);
        }
    }
    f.fill_rect(10, 30, 30, 40, [255, 255, 255]);
    f
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1e-12)
}

#[test]
fn textured_fixture_matches_oracle() {
    let m: SaliencyMap<f64> = saliency_spectral_residual(&textured());
    assert_eq!(m.argmax(), (23, 40));
    for (x, y, want) in [
        (0, 0, 0.0013717497740053665),
        (10, 20, 0.0001788615061100378),
        (31, 33, 0.00016554118879509824),
        (63, 63, 0.0016109948292869446),
        (23, 40, 0.0020133729773827405),
    ] {
        assert!(close(m.get(x, y), want), "cell ({x},{y}) = {} want {want}", m.get(x, y));
    }
    assert!(close(m.overlap_score(&Region::default_band()), 0.07165025070383334));
}

#[test]
fn white_block_argmax_inside_block() {
    let mut f = Frame::filled(1, 64, 64, [0, 0, 0]);
    f.fill_rect(20, 30, 28, 38, [255, 255, 255]);
    let m: SaliencyMap<f64> = saliency_spectral_residual(&f);
    // The block's corners tie, so only the footprint is checked.
    let (ax, ay) = m.argmax();
    assert!((20..28).contains(&ax) && (30..38).contains(&ay));
    let mass: f64 = (30..38).flat_map(|y| (20..28).map(move |x| (x, y))).map(|(x, y)| m.get(x, y)).sum();
    assert!(close(mass, 0.33831182437377644));
}

#[test]
fn translation_moves_argmax() {
    for (dx, dy) in [(8, 0), (0, 8), (8, 8), (16, -8)] {
        let mut f = Frame::filled(1, 64, 64, [0, 0, 0]);
        let (x0, y0) = ((20 + dx) as usize, (30 + dy) as usize);
        f.fill_rect(x0, y0, x0 + 8, y0 + 8, [255, 255, 255]);
        let (ax, ay) = saliency_spectral_residual::<f64>(&f).argmax();
        let (ax, ay) = (ax as i64, ay as i64);
        assert!((19 + dx..=28 + dx).contains(&ax) && (29 + dy..=38 + dy).contains(&ay), "{dx},{dy}: {ax},{ay}");
    }
}

#[test]
fn uniform_partition_sums_to_one() {
    let m = SaliencyMap::<f64>::uniform(64, 64);
    let mut total = 0.0;
    for row in 0..10 {
        for col in 0..4 {
            let r = Region::new(col as f64 * 0.25, row as f64 * 0.1, 0.25, 0.1).unwrap();
            total += m.overlap_score(&r);
        }
    }
    assert!((total - 1.0).abs() < 1e-6);
}

#[test]
fn brightness_offset_does_not_change_map() {
    let mut a = Frame::filled(1, 40, 30, [20, 20, 20]);
    a.fill_rect(5, 5, 15, 12, [120, 120, 120]);
    let mut b = Frame::filled(1, 40, 30, [120, 120, 120]);
    b.fill_rect(5, 5, 15, 12, [220, 220, 220]);
    let ma: SaliencyMap<f64> = saliency_spectral_residual(&a);
    let mb: SaliencyMap<f64> = saliency_spectral_residual(&b);
    for (x, y) in ma.values.iter().zip(&mb.values) {
        assert!((x - y).abs() < 1e-12);
    }
}

fn region() -> impl Strategy<Value = Region> {
    (0.0f64..0.9, 0.0f64..0.9, 0.05f64..1.0, 0.05f64..1.0)
        .prop_filter_map("fits", |(x, y, w, h)| Region::new(x, y, w.min(1.0 - x), h.min(1.0 - y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn overlap_monotone_under_containment(
        values in prop::collection::vec(0.0f64..1.0, 64 * 64),
        outer in region(),
        f in (0.0f64..1.0, 0.0f64..1.0, 0.1f64..1.0, 0.1f64..1.0),
    ) {
        let map = SaliencyMap::normalized(64, 64, values);
        let w = outer.w * f.2;
        let h = outer.h * f.3;
        let x = outer.x + (outer.w - w) * f.0;
        let y = outer.y + (outer.h - h) * f.1;
        if let Some(inner) = Region::new(x, y, w, h).filter(|r| outer.contains(r)) {
            prop_assert!(map.overlap_score(&inner) <= map.overlap_score(&outer) + 1e-15);
        }
    }

    #[test]
    fn random_frames_have_unit_mass(pixels in prop::collection::vec(any::<u8>(), 24 * 16 * 3)) {
        let frame = Frame::new(1, 24, 16, pixels).unwrap();
        let m: SaliencyMap<f64> = saliency_spectral_residual(&frame);
        prop_assert!((m.total() - 1.0).abs() < 1e-9);
        prop_assert!(m.values.iter().all(|v| *v >= 0.0));
    }
}
