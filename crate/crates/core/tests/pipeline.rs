//! Cross-module pipeline invariants on arbitrary inputs.

use proptest::prelude::*;

use wmark_core::metrics::{psnr, PeakMode};
use wmark_core::synth;
use wmark_core::watermark::{embed, embed_float, extract, extract_float, EmbedParams};
use wmark_core::{GrayImage, WatermarkBits};

fn cover_and_logo() -> impl Strategy<Value = (GrayImage, WatermarkBits)> {
    // at least 6 blocks: the PCA fit needs as many feature rows as band
    // coefficients
    (2usize..=4, 3usize..=4)
        .prop_flat_map(|(bw, bh)| {
            let (w, h) = (bw * 8, bh * 8);
            (
                Just(w),
                Just(h),
                proptest::collection::vec(any::<u8>(), w * h),
                proptest::collection::vec(0u8..2, bw * bh),
            )
        })
        .prop_map(|(w, h, pixels, mut bits)| {
            // an all-zero logo makes NC undefined; pin one bit
            bits[0] = 1;
            (
                GrayImage::new(w, h, pixels).unwrap(),
                WatermarkBits::new(w / 8, h / 8, bits).unwrap(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Quantized and float-domain roundtrips recover the exact bits for
    /// arbitrary covers, including degenerate (flat, saturated) ones.
    #[test]
    fn roundtrip_recovers_bits_on_arbitrary_covers((cover, wm) in cover_and_logo()) {
        let params = EmbedParams::default();
        let marked = embed(&cover, &wm, &params).unwrap();
        let rec = extract(&cover, &marked, &params).unwrap();
        prop_assert_eq!(rec.bits.bits(), wm.bits());

        let plane = embed_float(&cover, &wm, &params).unwrap();
        let rec_f = extract_float(&cover, &plane, &params).unwrap();
        for (v, &bit) in rec_f.values.iter().zip(wm.bits()) {
            prop_assert!((v - bit as f64).abs() < 1e-6);
        }
    }
}

#[test]
fn covers_with_fewer_blocks_than_band_coefficients_are_rejected() {
    // 16x8 has two blocks; the 6-coefficient band needs at least six rows
    let cover = GrayImage::constant(16, 8, 100).unwrap();
    let wm = WatermarkBits::new(2, 1, vec![1, 0]).unwrap();
    assert!(embed(&cover, &wm, &EmbedParams::default()).is_err());
    assert!(extract(&cover, &cover, &EmbedParams::default()).is_err());
}

#[test]
fn psnr_is_non_increasing_in_alpha() {
    let cover = synth::synthetic_cover(128, 128, 2).unwrap();
    let logo = synth::synthetic_logo(16, 16).unwrap();
    let mut last = f64::INFINITY;
    for alpha in [5.0, 10.0, 20.0, 30.0, 40.0, 60.0] {
        let params = EmbedParams::with_alpha(alpha);
        let marked = embed(&cover, &logo, &params).unwrap();
        let p = psnr(&cover, &marked, PeakMode::Fixed255).unwrap();
        assert!(p <= last, "PSNR rose from {last} to {p} at alpha={alpha}");
        last = p;

        let rec = extract(&cover, &marked, &params).unwrap();
        if alpha >= 20.0 {
            assert_eq!(rec.bits.bits(), logo.bits(), "bits lost at alpha={alpha}");
        }
    }
}

#[test]
fn embedding_distortion_is_invisible_range_preserving() {
    // output stays a valid 8-bit image and close to the cover
    let cover = synth::synthetic_cover(128, 128, 4).unwrap();
    let logo = synth::synthetic_logo(16, 16).unwrap();
    let marked = embed(&cover, &logo, &EmbedParams::default()).unwrap();
    assert_eq!(marked.width(), cover.width());
    assert_eq!(marked.height(), cover.height());
    let p = psnr(&cover, &marked, PeakMode::Fixed255).unwrap();
    assert!(p > 35.0, "embedding unexpectedly destructive: {p} dB");
}
