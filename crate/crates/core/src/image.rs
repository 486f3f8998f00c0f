//! In-memory grayscale images and binary watermark logos.

use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major.
///
/// Any positive size is representable; the embedding/extraction pipeline
/// additionally requires both dimensions to be multiples of 8 and rejects
/// other inputs at its entry points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidDimensions(format!(
                "pixel buffer has {} bytes, expected {}x{} = {}",
                data.len(),
                width,
                height,
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with a single intensity.
    pub fn constant(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    /// Pixel fetch with replicate-edge semantics for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    /// Pixels as f64, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&p| p as f64).collect()
    }

    /// True when both dimensions are positive multiples of 8.
    pub fn is_block_aligned(&self) -> bool {
        self.width.is_multiple_of(8) && self.height.is_multiple_of(8)
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Clamp a real-valued sample to [0,255] and round half away from zero.
#[inline]
pub fn quantize_pixel(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}

/// Binary watermark logo flattened row-major, one bit per cover block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkBits {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl WatermarkBits {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions(format!(
                "logo dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::InvalidDimensions(format!(
                "logo has {} bits, expected {}x{} = {}",
                bits.len(),
                width,
                height,
                width * height
            )));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "logo bits must be 0 or 1, found {b}"
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of 1-bits.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}
