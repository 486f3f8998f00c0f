//! Image-quality and watermark-fidelity measures.

use crate::error::{Error, Result};
use crate::image::{GrayImage, WatermarkBits};
use crate::transforms::BLOCK_SIZE;

/// Peak convention for PSNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakMode {
    /// Fixed 8-bit peak of 255 (the convention used across the literature).
    #[default]
    Fixed255,
    /// Peak taken as the maximum intensity of the reference image.
    CoverMax,
}

/// Summary emitted after embedding or per evaluated attack row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr_db: f64,
    pub nc: Option<f64>,
    pub capacity_bits: usize,
}

/// Mean squared intensity difference.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if !a.same_dimensions(b) {
        return Err(Error::InvalidDimensions(format!(
            "mse needs equal dimensions, got {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&p, &q)| {
            let d = p as f64 - q as f64;
            d * d
        })
        .sum();
    Ok(sum / (a.width() * a.height()) as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical images.
/// `reference` supplies the peak in [`PeakMode::CoverMax`].
pub fn psnr(reference: &GrayImage, other: &GrayImage, mode: PeakMode) -> Result<f64> {
    let err = mse(reference, other)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    let peak = match mode {
        PeakMode::Fixed255 => 255.0,
        PeakMode::CoverMax => reference.data().iter().copied().max().unwrap_or(0) as f64,
    };
    Ok(10.0 * (peak * peak / err).log10())
}

/// Normalized correlation between two binary watermarks.
///
/// Undefined (and rejected) when either vector has no 1-bits: the formula
/// divides by the vector norms, and coercing the result would hide a dead
/// extraction.
pub fn nc(original: &WatermarkBits, extracted: &WatermarkBits) -> Result<f64> {
    if original.len() != extracted.len() {
        return Err(Error::ShapeMismatch(format!(
            "watermark lengths differ: {} vs {}",
            original.len(),
            extracted.len()
        )));
    }
    let ones_a = original.ones();
    let ones_b = extracted.ones();
    if ones_a == 0 || ones_b == 0 {
        return Err(Error::UndefinedNc);
    }
    let dot: usize = original
        .bits()
        .iter()
        .zip(extracted.bits())
        .map(|(&x, &y)| (x & y) as usize)
        .sum();
    Ok(dot as f64 / ((ones_a as f64) * (ones_b as f64)).sqrt())
}

/// Watermark capacity of a cover: one bit per block.
pub fn capacity_bits(width: usize, height: usize, block_size: usize) -> Result<usize> {
    if block_size == 0
        || width == 0
        || height == 0
        || !width.is_multiple_of(block_size)
        || !height.is_multiple_of(block_size)
    {
        return Err(Error::InvalidDimensions(format!(
            "capacity needs dimensions in multiples of {block_size}, got {width}x{height}"
        )));
    }
    Ok((width / block_size) * (height / block_size))
}

/// Capacity with the pipeline's 8x8 blocks.
pub fn capacity_bits_default(width: usize, height: usize) -> Result<usize> {
    capacity_bits(width, height, BLOCK_SIZE)
}
