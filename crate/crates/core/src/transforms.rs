//! Block partitioning, 8x8 orthonormal DCT, and zig-zag low-band access.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::image::{quantize_pixel, GrayImage};

pub const BLOCK_SIZE: usize = 8;

/// 8x8 spatial-domain block, real valued.
pub type PixelBlock = [[f64; BLOCK_SIZE]; BLOCK_SIZE];

/// 8x8 block of DCT coefficients, indexed `coeffs[u][v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefBlock {
    pub coeffs: [[f64; BLOCK_SIZE]; BLOCK_SIZE],
}

/// Zig-zag scan order of an 8x8 grid as (row, col) pairs, DC first.
#[rustfmt::skip]
pub const ZIGZAG: [(usize, usize); 64] = [
    (0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2), (0, 3), (1, 2),
    (2, 1), (3, 0), (4, 0), (3, 1), (2, 2), (1, 3), (0, 4), (0, 5),
    (1, 4), (2, 3), (3, 2), (4, 1), (5, 0), (6, 0), (5, 1), (4, 2),
    (3, 3), (2, 4), (1, 5), (0, 6), (0, 7), (1, 6), (2, 5), (3, 4),
    (4, 3), (5, 2), (6, 1), (7, 0), (7, 1), (6, 2), (5, 3), (4, 4),
    (3, 5), (2, 6), (1, 7), (2, 7), (3, 6), (4, 5), (5, 4), (6, 3),
    (7, 2), (7, 3), (6, 4), (5, 5), (4, 6), (3, 7), (4, 7), (5, 6),
    (6, 5), (7, 4), (7, 5), (6, 6), (5, 7), (6, 7), (7, 6), (7, 7),
];

/// Default number of low-band coefficients carried into the feature vector.
pub const DEFAULT_BAND_LEN: usize = 6;

/// Selects which coefficient positions of a block form the embedding band.
///
/// The default band is the first 6 zig-zag positions after the DC term; any
/// duplicate-free list of zig-zag ranks can be substituted. Keeping DC out
/// of the band matters twice over: the DC variance across blocks dwarfs the
/// AC variances, so a DC-bearing band locks PC1 onto DC alone, which both
/// flattens the per-pixel embedding change into a uniform (and heavily
/// quantized) alpha/8 shift and concentrates the mark in the coefficient
/// least useful for hiding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSelector {
    indices: Vec<(usize, usize)>,
}

impl BandSelector {
    /// The standard low-frequency band: zig-zag ranks 1..=6 (AC only).
    pub fn low_band() -> Self {
        let ranks: Vec<usize> = (1..=DEFAULT_BAND_LEN).collect();
        Self::from_zigzag_ranks(&ranks).expect("default band is valid")
    }

    /// First `len` entries of the zig-zag scan, DC included.
    pub fn from_zigzag_prefix(len: usize) -> Result<Self> {
        let ranks: Vec<usize> = (0..len).collect();
        Self::from_zigzag_ranks(&ranks)
    }

    /// Arbitrary zig-zag ranks (0 = DC). Ranks must be unique and < 64.
    pub fn from_zigzag_ranks(ranks: &[usize]) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::InvalidParameter("band must be non-empty".into()));
        }
        let mut seen = [false; 64];
        let mut indices = Vec::with_capacity(ranks.len());
        for &r in ranks {
            if r >= 64 {
                return Err(Error::InvalidParameter(format!(
                    "zig-zag rank {r} out of range 0..64"
                )));
            }
            if seen[r] {
                return Err(Error::InvalidParameter(format!(
                    "duplicate zig-zag rank {r} in band"
                )));
            }
            seen[r] = true;
            indices.push(ZIGZAG[r]);
        }
        Ok(Self { indices })
    }

    pub fn band_len(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[(usize, usize)] {
        &self.indices
    }
}

impl Default for BandSelector {
    fn default() -> Self {
        Self::low_band()
    }
}

fn require_block_aligned(width: usize, height: usize) -> Result<()> {
    if width == 0
        || height == 0
        || !width.is_multiple_of(BLOCK_SIZE)
        || !height.is_multiple_of(BLOCK_SIZE)
    {
        return Err(Error::InvalidDimensions(format!(
            "dimensions must be positive multiples of {BLOCK_SIZE}, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Split an image into 8x8 blocks in row-major block order.
pub fn partition_blocks(img: &GrayImage) -> Result<Vec<PixelBlock>> {
    require_block_aligned(img.width(), img.height())?;
    Ok(partition_plane_unchecked(
        &img.to_f64(),
        img.width(),
        img.height(),
    ))
}

/// Split a real-valued plane into 8x8 blocks. Used by the float-domain pipeline.
pub fn partition_plane(data: &[f64], width: usize, height: usize) -> Result<Vec<PixelBlock>> {
    require_block_aligned(width, height)?;
    if data.len() != width * height {
        return Err(Error::InvalidDimensions(format!(
            "plane has {} samples, expected {}",
            data.len(),
            width * height
        )));
    }
    Ok(partition_plane_unchecked(data, width, height))
}

fn partition_plane_unchecked(data: &[f64], width: usize, height: usize) -> Vec<PixelBlock> {
    let bw = width / BLOCK_SIZE;
    let bh = height / BLOCK_SIZE;
    let mut blocks = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            let mut block = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
            for (i, row) in block.iter_mut().enumerate() {
                let base = (by * BLOCK_SIZE + i) * width + bx * BLOCK_SIZE;
                for (j, v) in row.iter_mut().enumerate() {
                    *v = data[base + j];
                }
            }
            blocks.push(block);
        }
    }
    blocks
}

/// Reassemble blocks into an 8-bit image: clamp to [0,255], round half away from zero.
pub fn assemble_image(blocks: &[PixelBlock], width: usize, height: usize) -> Result<GrayImage> {
    let plane = assemble_plane(blocks, width, height)?;
    let data = plane.into_iter().map(quantize_pixel).collect();
    GrayImage::new(width, height, data)
}

/// Reassemble blocks into a real-valued plane without pixel quantization.
pub fn assemble_plane(blocks: &[PixelBlock], width: usize, height: usize) -> Result<Vec<f64>> {
    require_block_aligned(width, height)?;
    let bw = width / BLOCK_SIZE;
    let bh = height / BLOCK_SIZE;
    if blocks.len() != bw * bh {
        return Err(Error::InvalidDimensions(format!(
            "got {} blocks, expected {} for {}x{}",
            blocks.len(),
            bw * bh,
            width,
            height
        )));
    }
    let mut data = vec![0.0; width * height];
    for (k, block) in blocks.iter().enumerate() {
        let bx = k % bw;
        let by = k / bw;
        for (i, row) in block.iter().enumerate() {
            let base = (by * BLOCK_SIZE + i) * width + bx * BLOCK_SIZE;
            data[base..base + BLOCK_SIZE].copy_from_slice(row);
        }
    }
    Ok(data)
}

/// Orthonormal 1D DCT-II basis: `basis[u][i] = c(u) * 0.5 * cos((2i+1)u*pi/16)`,
/// c(0) = 1/sqrt(2), c(u) = 1 otherwise. Rows are orthonormal.
fn dct_basis() -> &'static [[f64; BLOCK_SIZE]; BLOCK_SIZE] {
    static BASIS: OnceLock<[[f64; BLOCK_SIZE]; BLOCK_SIZE]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut t = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
        let n = BLOCK_SIZE as f64;
        for (u, row) in t.iter_mut().enumerate() {
            let c = if u == 0 { (0.5f64).sqrt() } else { 1.0 };
            for (i, v) in row.iter_mut().enumerate() {
                let angle = (2.0 * i as f64 + 1.0) * u as f64 * std::f64::consts::PI / (2.0 * n);
                *v = c * (2.0 / n).sqrt() * angle.cos();
            }
        }
        t
    })
}

/// Forward 2D DCT of a block, computed as two separable orthonormal passes.
pub fn dct2(block: &PixelBlock) -> CoefBlock {
    let t = dct_basis();
    // rows: tmp = block * T^t
    let mut tmp = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for i in 0..BLOCK_SIZE {
        for v in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for j in 0..BLOCK_SIZE {
                acc += block[i][j] * t[v][j];
            }
            tmp[i][v] = acc;
        }
    }
    // cols: coeffs = T * tmp
    let mut coeffs = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for u in 0..BLOCK_SIZE {
        for v in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for i in 0..BLOCK_SIZE {
                acc += t[u][i] * tmp[i][v];
            }
            coeffs[u][v] = acc;
        }
    }
    CoefBlock { coeffs }
}

/// Inverse 2D DCT; exact inverse of [`dct2`] up to floating-point error.
#[allow(clippy::needless_range_loop)]
pub fn idct2(coef: &CoefBlock) -> PixelBlock {
    let t = dct_basis();
    // tmp = T^t * coeffs
    let mut tmp = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for i in 0..BLOCK_SIZE {
        for v in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for u in 0..BLOCK_SIZE {
                acc += t[u][i] * coef.coeffs[u][v];
            }
            tmp[i][v] = acc;
        }
    }
    // block = tmp * T
    let mut block = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for i in 0..BLOCK_SIZE {
        for j in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for v in 0..BLOCK_SIZE {
                acc += tmp[i][v] * t[v][j];
            }
            block[i][j] = acc;
        }
    }
    block
}

/// Read the band coefficients of a block in zig-zag order.
pub fn extract_low_band(coef: &CoefBlock, sel: &BandSelector) -> Vec<f64> {
    sel.indices()
        .iter()
        .map(|&(u, v)| coef.coeffs[u][v])
        .collect()
}

/// Write band coefficients back; every other position is left untouched.
pub fn insert_low_band(coef: &CoefBlock, band: &[f64], sel: &BandSelector) -> Result<CoefBlock> {
    if band.len() != sel.band_len() {
        return Err(Error::ShapeMismatch(format!(
            "band vector has {} entries, selector expects {}",
            band.len(),
            sel.band_len()
        )));
    }
    let mut out = *coef;
    for (&(u, v), &value) in sel.indices().iter().zip(band) {
        out.coeffs[u][v] = value;
    }
    Ok(out)
}
