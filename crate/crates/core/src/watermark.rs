//! Watermark embedding and non-blind extraction.
//!
//! Embedding: partition the cover into 8x8 blocks, DCT each block, collect
//! the low-band coefficients of block k into feature row k, fit PCA on that
//! matrix, add `alpha * bit_k` to the first principal-component score of row
//! k, then invert the chain back to pixels.
//!
//! Extraction recomputes the feature matrices of cover and suspect, fits the
//! PCA model on the cover's features only, projects both through that single
//! model, and recovers `bit_k` from the PC1 score difference divided by
//! alpha. The scheme is non-blind: the cover is required at detection.

use crate::error::{Error, Result};
use crate::image::{GrayImage, WatermarkBits};
use crate::pca::{self, FeatureMatrix, Matrix, PcaModel};
use crate::transforms::{
    assemble_image, assemble_plane, dct2, extract_low_band, idct2, insert_low_band,
    partition_blocks, partition_plane, BandSelector, CoefBlock, PixelBlock,
};

/// Embedding strength and band selection.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedParams {
    /// Strength added to PC1 per 1-bit. Trades invisibility against robustness.
    pub alpha: f64,
    pub band: BandSelector,
}

pub const DEFAULT_ALPHA: f64 = 30.0;

impl Default for EmbedParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            band: BandSelector::low_band(),
        }
    }
}

impl EmbedParams {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }
}

/// Raw extraction output: real-valued recovered bits and their thresholding.
#[derive(Debug, Clone)]
pub struct RawExtraction {
    pub values: Vec<f64>,
    pub bits: WatermarkBits,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    Ok(())
}

/// DCT every block and stack the band coefficients into an N x M matrix.
fn features_of_blocks(
    blocks: &[PixelBlock],
    band: &BandSelector,
) -> (Vec<CoefBlock>, FeatureMatrix) {
    let m = band.band_len();
    let mut x = Matrix::zeros(blocks.len(), m);
    let mut coefs = Vec::with_capacity(blocks.len());
    for (k, block) in blocks.iter().enumerate() {
        let coef = dct2(block);
        for (c, v) in extract_low_band(&coef, band).into_iter().enumerate() {
            x.set(k, c, v);
        }
        coefs.push(coef);
    }
    (coefs, x)
}

/// Run the full embedding chain, stopping before pixel quantization.
fn embed_blocks(
    cover: &GrayImage,
    wm: &WatermarkBits,
    params: &EmbedParams,
) -> Result<Vec<PixelBlock>> {
    check_alpha(params.alpha)?;
    let blocks = partition_blocks(cover)?;
    if blocks.len() != wm.len() {
        return Err(Error::InvalidDimensions(format!(
            "cover has {} blocks but watermark has {} bits",
            blocks.len(),
            wm.len()
        )));
    }

    let (coefs, x) = features_of_blocks(&blocks, &params.band);
    let model = pca::fit(&x)?;
    let mut y = pca::project(&model, &x)?;
    for (k, &bit) in wm.bits().iter().enumerate() {
        if bit == 1 {
            y.set(k, 0, y.get(k, 0) + params.alpha);
        }
    }
    let x_marked = pca::inverse_project(&model, &y)?;

    let mut out = Vec::with_capacity(coefs.len());
    for (k, coef) in coefs.iter().enumerate() {
        let marked = insert_low_band(coef, x_marked.row(k), &params.band)?;
        out.push(idct2(&marked));
    }
    Ok(out)
}

/// Embed a watermark; the output is quantized back to 8-bit pixels.
pub fn embed(cover: &GrayImage, wm: &WatermarkBits, params: &EmbedParams) -> Result<GrayImage> {
    let blocks = embed_blocks(cover, wm, params)?;
    assemble_image(&blocks, cover.width(), cover.height())
}

/// Embed without pixel quantization; returns the real-valued plane.
///
/// In this float domain the chain is exactly invertible, which makes the
/// distortion budget exact: MSE against the cover equals
/// `alpha^2 * ones(wm) / pixel_count`.
pub fn embed_float(
    cover: &GrayImage,
    wm: &WatermarkBits,
    params: &EmbedParams,
) -> Result<Vec<f64>> {
    let blocks = embed_blocks(cover, wm, params)?;
    assemble_plane(&blocks, cover.width(), cover.height())
}

/// Threshold recovered real values into bits: 1 iff value >= threshold.
pub fn binarize(
    values: &[f64],
    threshold: f64,
    width: usize,
    height: usize,
) -> Result<WatermarkBits> {
    let bits: Vec<u8> = values
        .iter()
        .map(|&v| if v >= threshold { 1 } else { 0 })
        .collect();
    WatermarkBits::new(width, height, bits)
}

fn extraction_from_features(
    model: &PcaModel,
    x_cover: &FeatureMatrix,
    x_suspect: &FeatureMatrix,
    alpha: f64,
    logo_width: usize,
    logo_height: usize,
) -> Result<RawExtraction> {
    let y = pca::project(model, x_cover)?;
    let y_suspect = pca::project(model, x_suspect)?;
    let values: Vec<f64> = (0..y.rows())
        .map(|k| (y_suspect.get(k, 0) - y.get(k, 0)) / alpha)
        .collect();
    let bits = binarize(&values, 0.5, logo_width, logo_height)?;
    Ok(RawExtraction { values, bits })
}

/// Dimensions of the recovered logo: one bit per block, blocks row-major,
/// so the logo grid mirrors the cover's block grid.
fn logo_dims(cover: &GrayImage) -> (usize, usize) {
    (cover.width() / 8, cover.height() / 8)
}

/// Non-blind extraction. Fits the PCA model on the cover's features and
/// projects both images through it.
pub fn extract(
    cover: &GrayImage,
    suspect: &GrayImage,
    params: &EmbedParams,
) -> Result<RawExtraction> {
    if params.alpha == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    check_alpha(params.alpha)?;
    if !cover.same_dimensions(suspect) {
        return Err(Error::InvalidDimensions(format!(
            "cover is {}x{} but suspect is {}x{}",
            cover.width(),
            cover.height(),
            suspect.width(),
            suspect.height()
        )));
    }
    let cover_blocks = partition_blocks(cover)?;
    let suspect_blocks = partition_blocks(suspect)?;
    let (_, x) = features_of_blocks(&cover_blocks, &params.band);
    let (_, x_suspect) = features_of_blocks(&suspect_blocks, &params.band);
    let model = pca::fit(&x)?;
    let (lw, lh) = logo_dims(cover);
    extraction_from_features(&model, &x, &x_suspect, params.alpha, lw, lh)
}

/// Extraction against a real-valued suspect plane (float-domain pipeline).
pub fn extract_float(
    cover: &GrayImage,
    suspect: &[f64],
    params: &EmbedParams,
) -> Result<RawExtraction> {
    if params.alpha == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    check_alpha(params.alpha)?;
    let cover_blocks = partition_blocks(cover)?;
    let suspect_blocks = partition_plane(suspect, cover.width(), cover.height())?;
    let (_, x) = features_of_blocks(&cover_blocks, &params.band);
    let (_, x_suspect) = features_of_blocks(&suspect_blocks, &params.band);
    let model = pca::fit(&x)?;
    let (lw, lh) = logo_dims(cover);
    extraction_from_features(&model, &x, &x_suspect, params.alpha, lw, lh)
}

/// Extraction with a previously fitted (or deserialized) model instead of
/// refitting on the cover.
pub fn extract_with_model(
    model: &PcaModel,
    cover: &GrayImage,
    suspect: &GrayImage,
    params: &EmbedParams,
) -> Result<RawExtraction> {
    if params.alpha == 0.0 {
        return Err(Error::ZeroAlpha);
    }
    check_alpha(params.alpha)?;
    if !cover.same_dimensions(suspect) {
        return Err(Error::InvalidDimensions(
            "cover and suspect dimensions differ".into(),
        ));
    }
    let cover_blocks = partition_blocks(cover)?;
    let suspect_blocks = partition_blocks(suspect)?;
    let (_, x) = features_of_blocks(&cover_blocks, &params.band);
    let (_, x_suspect) = features_of_blocks(&suspect_blocks, &params.band);
    let (lw, lh) = logo_dims(cover);
    extraction_from_features(model, &x, &x_suspect, params.alpha, lw, lh)
}

/// Fit the PCA model the pipeline would use for this cover and band.
pub fn fit_cover_model(cover: &GrayImage, band: &BandSelector) -> Result<PcaModel> {
    let blocks = partition_blocks(cover)?;
    let (_, x) = features_of_blocks(&blocks, band);
    pca::fit(&x)
}
