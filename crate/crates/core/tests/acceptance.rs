//! Acceptance suite: runs every gate criterion end to end at desk scale and
//! prints one pass/fail line per criterion (run with `--nocapture` to see
//! them). Expected values and tolerances are pinned in the constants below.
//!
//! Criterion 4 asserts the reference JPEG robustness windows as stated.
//! Detection here fits a single PCA model on the cover and reuses it for the
//! suspect, which bounds the score error by the quantization step; at low
//! quality factors that makes extraction strictly more robust than the
//! reference curve, and the upper edges of those windows are not reachable.
//! The criterion is asserted unmodified rather than relaxed; see the test
//! output for the measured points.

use std::time::Instant;

use wmark_core::attacks::{crop, rotate, AttackSpec, Rect};
use wmark_core::metrics::{nc, psnr, PeakMode};
use wmark_core::pca;
use wmark_core::synth;
use wmark_core::transforms::{dct2, idct2, PixelBlock};
use wmark_core::watermark::{embed, embed_float, extract, EmbedParams};
use wmark_core::{GrayImage, WatermarkBits};

const COVER_SEED: u64 = 1;

fn test_assets() -> (GrayImage, WatermarkBits) {
    let cover = synth::synthetic_cover(512, 512, COVER_SEED).unwrap();
    let logo = synth::synthetic_logo(64, 64).unwrap();
    (cover, logo)
}

fn report(criterion: &str, detail: &str, pass: bool) -> bool {
    println!(
        "criterion {criterion}: {detail} -> {}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

#[test]
fn c1_no_attack_fidelity() {
    let (cover, logo) = test_assets();
    let params = EmbedParams::default();

    let start = Instant::now();
    let marked = embed(&cover, &logo, &params).unwrap();
    let rec = extract(&cover, &marked, &params).unwrap();
    let elapsed = start.elapsed();

    let corr = nc(&logo, &rec.bits).unwrap();
    let pass = corr == 1.0 && elapsed.as_secs_f64() < 2.0;
    assert!(
        report(
            "1 (no-attack fidelity)",
            &format!("NC={corr} runtime={:.0}ms", elapsed.as_secs_f64() * 1e3),
            pass
        ),
        "expected NC exactly 1.0 in under 2s, got NC={corr} in {elapsed:?}"
    );
    assert_eq!(rec.bits.bits(), logo.bits());
}

#[test]
fn c2_alpha_sweep_matches_reference_table() {
    let (cover, logo) = test_assets();
    // (alpha, reference PSNR dB); tolerance 1.5 dB
    let table = [
        (10.0, 47.8),
        (15.0, 44.0),
        (20.0, 42.0),
        (30.0, 40.1),
        (40.0, 36.56),
    ];
    let mut all = true;
    for (alpha, ref_psnr) in table {
        let params = EmbedParams::with_alpha(alpha);
        let marked = embed(&cover, &logo, &params).unwrap();
        let p = psnr(&cover, &marked, PeakMode::Fixed255).unwrap();
        let corr = nc(&logo, &extract(&cover, &marked, &params).unwrap().bits).unwrap();

        let psnr_ok = (p - ref_psnr).abs() <= 1.5;
        let nc_ok = if alpha >= 20.0 {
            corr == 1.0
        } else {
            corr >= 0.97
        };
        all &= report(
            "2 (alpha sweep)",
            &format!("alpha={alpha} PSNR={p:.2} (ref {ref_psnr} +-1.5) NC={corr:.4}"),
            psnr_ok && nc_ok,
        );
    }
    assert!(all, "alpha sweep outside the reference window");
}

#[test]
fn c3_distortion_budget_is_exact_in_float_domain() {
    let (cover, logo) = test_assets();
    let alpha = 30.0;
    let plane = embed_float(&cover, &logo, &EmbedParams::with_alpha(alpha)).unwrap();
    let n = plane.len() as f64;
    let mse: f64 = cover
        .data()
        .iter()
        .zip(&plane)
        .map(|(&p, &q)| (p as f64 - q) * (p as f64 - q))
        .sum::<f64>()
        / n;
    let budget = alpha * alpha * logo.ones() as f64 / n;
    let rel = (mse - budget).abs() / budget;
    assert!(
        report(
            "3 (distortion budget)",
            &format!("MSE={mse:.9} budget={budget:.9} rel-err={rel:.2e}"),
            rel <= 1e-6
        ),
        "float-domain MSE deviates from alpha^2*k/N by {rel:.2e}"
    );
}

#[test]
fn c4_jpeg_robustness_trend() {
    let (cover, logo) = test_assets();
    let params = EmbedParams::default();
    let marked = embed(&cover, &logo, &params).unwrap();

    let reference = [
        (90u8, 1.0),
        (70, 0.9837),
        (50, 0.9602),
        (30, 0.8994),
        (20, 0.8143),
        (10, 0.5363),
    ];
    let mut measured = Vec::new();
    for (q, _) in reference {
        let attacked = AttackSpec::parse(&format!("jpeg:q={q}"), 0)
            .unwrap()
            .apply(&marked)
            .unwrap();
        let corr = nc(&logo, &extract(&cover, &attacked, &params).unwrap().bits).unwrap();
        measured.push(corr);
    }

    let monotone = measured.windows(2).all(|w| w[0] >= w[1]);
    let mut in_window = true;
    for ((q, target), corr) in reference.iter().zip(&measured) {
        in_window &= report(
            "4 (jpeg robustness)",
            &format!("Q={q} NC={corr:.4} (ref {target:.4} +-0.08)"),
            (corr - target).abs() <= 0.08,
        );
    }
    report(
        "4 (jpeg robustness)",
        &format!("monotone non-increasing over Q=90..10: {monotone}"),
        monotone,
    );
    assert!(monotone, "NC must not increase as quality drops");
    assert!(
        in_window,
        "measured NC curve {measured:.4?} outside the +-0.08 reference window; \
         single-model detection caps the bit-error rate below the reference collapse \
         at low quality factors"
    );
}

#[test]
fn c5_gaussian_filter_robustness() {
    let (cover, logo) = test_assets();
    let params = EmbedParams::default();
    let marked = embed(&cover, &logo, &params).unwrap();
    let attacked = AttackSpec::parse("gauss-filter:n=3,sigma=0.5", 0)
        .unwrap()
        .apply(&marked)
        .unwrap();
    let corr = nc(&logo, &extract(&cover, &attacked, &params).unwrap().bits).unwrap();
    assert!(
        report(
            "5 (3x3 gaussian filter)",
            &format!("NC={corr:.4} (need >= 0.99)"),
            corr >= 0.99
        ),
        "gaussian filter NC {corr}"
    );
}

#[test]
fn c6_median_filter_robustness() {
    let (cover, logo) = test_assets();
    let params = EmbedParams::default();
    let marked = embed(&cover, &logo, &params).unwrap();
    let attacked = AttackSpec::parse("median:n=3", 0)
        .unwrap()
        .apply(&marked)
        .unwrap();
    let corr = nc(&logo, &extract(&cover, &attacked, &params).unwrap().bits).unwrap();
    let pass = (corr - 0.977).abs() <= 0.04;
    assert!(
        report(
            "6 (3x3 median filter)",
            &format!("NC={corr:.4} (ref 0.9770 +-0.04)"),
            pass
        ),
        "median filter NC {corr}"
    );
}

/// Direct evaluation of the 2D DCT definition, kept independent of the
/// separable implementation under test.
#[allow(clippy::needless_range_loop)]
fn dct2_reference(block: &PixelBlock) -> [[f64; 8]; 8] {
    let c = |z: usize| if z == 0 { (2.0f64).sqrt() / 2.0 } else { 1.0 };
    let mut out = [[0.0; 8]; 8];
    for u in 0..8 {
        for v in 0..8 {
            let mut acc = 0.0;
            for i in 0..8 {
                for j in 0..8 {
                    acc += ((2 * i + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos()
                        * ((2 * j + 1) as f64 * v as f64 * std::f64::consts::PI / 16.0).cos()
                        * block[i][j];
                }
            }
            out[u][v] = 0.25 * c(u) * c(v) * acc;
        }
    }
    out
}

#[test]
fn c7_property_dct_roundtrip_and_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
    let mut worst_rt = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for _ in 0..1000 {
        let mut block = [[0.0; 8]; 8];
        for row in &mut block {
            for v in row.iter_mut() {
                *v = rng.random_range(-300.0..300.0);
            }
        }
        let coef = dct2(&block);
        let back = idct2(&coef);
        let oracle = dct2_reference(&block);
        for i in 0..8 {
            for j in 0..8 {
                worst_rt = worst_rt.max((back[i][j] - block[i][j]).abs());
                worst_oracle = worst_oracle.max((coef.coeffs[i][j] - oracle[i][j]).abs());
            }
        }
    }
    let pass = worst_rt < 1e-9 && worst_oracle < 1e-9;
    assert!(
        report(
            "7 (dct properties)",
            &format!("roundtrip max-abs={worst_rt:.2e} oracle max-abs={worst_oracle:.2e}"),
            pass
        ),
        "dct property failure"
    );
}

#[test]
fn c7_property_pca_model() {
    let (cover, _) = test_assets();
    let params = EmbedParams::default();
    let model = wmark_core::watermark::fit_cover_model(&cover, &params.band).unwrap();
    let m = model.dim();

    let mut ortho = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let dot: f64 = (0..m)
                .map(|i| model.eigvec(i, a) * model.eigvec(i, b))
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            ortho = ortho.max((dot - want).abs());
        }
    }

    // covariance of the fitted scores must be diag(lambda)
    let blocks = wmark_core::transforms::partition_blocks(&cover).unwrap();
    let rows: Vec<Vec<f64>> = blocks
        .iter()
        .map(|b| wmark_core::transforms::extract_low_band(&dct2(b), &params.band))
        .collect();
    let x = pca::Matrix::from_rows(&rows).unwrap();
    let y = pca::project(&model, &x).unwrap();
    let n = y.rows() as f64;
    let mut off_diag = 0.0f64;
    let mut trace_cov = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let cov: f64 = (0..y.rows())
                .map(|r| y.get(r, a) * y.get(r, b))
                .sum::<f64>()
                / n;
            if a == b {
                trace_cov += cov;
            } else {
                off_diag = off_diag.max(cov.abs());
            }
        }
    }
    let lambda_sum: f64 = model.eigvals().iter().sum();
    let trace_rel = (trace_cov - lambda_sum).abs() / lambda_sum;

    let back = pca::inverse_project(&model, &y).unwrap();
    let mut rt = 0.0f64;
    for r in 0..x.rows() {
        for c in 0..m {
            rt = rt.max((back.get(r, c) - x.get(r, c)).abs());
        }
    }

    let pass = ortho < 1e-9 && off_diag < 1e-8 && trace_rel < 1e-8 && rt < 1e-8;
    assert!(
        report(
            "7 (pca properties)",
            &format!(
                "orthonormality={ortho:.2e} score-cov-offdiag={off_diag:.2e} \
                 trace-rel={trace_rel:.2e} roundtrip={rt:.2e}"
            ),
            pass
        ),
        "pca property failure"
    );
}

#[test]
fn c7_property_full_pipeline_determinism() {
    let (cover, logo) = test_assets();
    let params = EmbedParams::default();
    let run = || {
        let marked = embed(&cover, &logo, &params).unwrap();
        let attacked = AttackSpec::parse("gauss-noise:v=0.01,seed=11", 0)
            .unwrap()
            .apply(&marked)
            .unwrap();
        let rec = extract(&cover, &attacked, &params).unwrap();
        (marked, attacked, rec)
    };
    let (m1, a1, r1) = run();
    let (m2, a2, r2) = run();
    let pass = m1 == m2 && a1 == a2 && r1.values == r2.values && r1.bits == r2.bits;
    assert!(
        report(
            "7 (pipeline determinism)",
            "two seeded runs byte-identical",
            pass
        ),
        "pipeline is not deterministic"
    );
}

#[test]
fn c7_property_nc_popcount_identity() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(123);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(1..256usize);
        let a: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let b: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let ka = a.iter().filter(|&&v| v == 1).count();
        let kb = b.iter().filter(|&&v| v == 1).count();
        if ka == 0 || kb == 0 {
            continue;
        }
        let and = a.iter().zip(&b).filter(|(&x, &y)| x == 1 && y == 1).count();
        let popcount = and as f64 / ((ka * kb) as f64).sqrt();
        let wa = WatermarkBits::new(n, 1, a).unwrap();
        let wb = WatermarkBits::new(n, 1, b).unwrap();
        assert_eq!(
            nc(&wa, &wb).unwrap(),
            popcount,
            "NC formula and popcount identity disagree"
        );
        checked += 1;
    }
    report(
        "7 (nc popcount identity)",
        "1000 random binary pairs agree exactly",
        true,
    );
}

#[test]
fn c8_unparameterized_attacks_run_with_identity_sanity() {
    let (cover, logo) = test_assets();
    let params = EmbedParams::default();
    let marked = embed(&cover, &logo, &params).unwrap();

    // these run and report; the reference table values for them are not
    // reproduction targets because their parameters are unpublished
    for spec_str in ["rotate:angle=1", "crop", "sharpen"] {
        let attacked = AttackSpec::parse(spec_str, 0)
            .unwrap()
            .apply(&marked)
            .unwrap();
        let p = psnr(&marked, &attacked, PeakMode::Fixed255).unwrap();
        let corr = nc(&logo, &extract(&cover, &attacked, &params).unwrap().bits).unwrap();
        println!("criterion 8 (reference row) {spec_str}: PSNR={p:.2} NC={corr:.4} (recorded)");
    }

    // identity-parameter sanity must be exact
    let rot0 = rotate(&marked, 0.0).unwrap();
    let full = crop(
        &marked,
        &Rect {
            x: 0,
            y: 0,
            width: marked.width(),
            height: marked.height(),
        },
    )
    .unwrap();
    let rot_nc = nc(&logo, &extract(&cover, &rot0, &params).unwrap().bits).unwrap();
    let crop_nc = nc(&logo, &extract(&cover, &full, &params).unwrap().bits).unwrap();
    let pass = rot0 == marked && full == marked && rot_nc == 1.0 && crop_nc == 1.0;
    assert!(
        report(
            "8 (identity-parameter sanity)",
            &format!(
                "rotate0 exact={} crop-full exact={} NC=1",
                rot0 == marked,
                full == marked
            ),
            pass
        ),
        "identity-parameter attacks must be exact"
    );
}
