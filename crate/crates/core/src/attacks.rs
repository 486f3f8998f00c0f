//! Image-processing attacks for the robustness benchmark.
//!
//! All attacks preserve the image dimensions and 8-bit range. Stochastic
//! attacks take an explicit seed and are bit-reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::image::{quantize_pixel, GrayImage};
use crate::transforms::{dct2, idct2, CoefBlock, BLOCK_SIZE};

/// Axis-aligned region kept by the crop attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    /// Centered rectangle covering half the image area (side factor 1/sqrt 2).
    pub fn center_half_area(img_width: usize, img_height: usize) -> Self {
        let w = (img_width as f64 / 2.0f64.sqrt()).round() as usize;
        let h = (img_height as f64 / 2.0f64.sqrt()).round() as usize;
        Self {
            x: (img_width - w) / 2,
            y: (img_height - h) / 2,
            width: w,
            height: h,
        }
    }
}

/// One attack with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackKind {
    Jpeg {
        quality: u8,
    },
    GaussianNoise {
        variance: f64,
    },
    SaltPepper {
        density: f64,
    },
    Sharpen,
    Rotate {
        angle_degrees: f64,
    },
    Median {
        size: usize,
    },
    Average {
        size: usize,
    },
    GaussianFilter {
        size: usize,
        sigma: f64,
    },
    /// `None` means the default center half-area region, resolved per image.
    Crop {
        rect: Option<Rect>,
    },
}

/// Parsed attack plus the seed driving its PRNG (stochastic kinds only).
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub seed: u64,
}

impl AttackSpec {
    /// Parse a CLI spec string such as `jpeg:q=50`, `gauss-noise:v=0.01,seed=7`,
    /// `median:n=3`, or `crop:x=128,y=128,w=256,h=256`. `default_seed` applies
    /// when a stochastic spec carries no `seed=` key.
    pub fn parse(spec: &str, default_seed: u64) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r),
            None => (spec.trim(), ""),
        };
        let mut params: Vec<(&str, &str)> = Vec::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in `{spec}`")))?;
            params.push((k.trim(), v.trim()));
        }

        let mut take = |key: &str| -> Option<&str> {
            params
                .iter()
                .position(|&(k, _)| k == key)
                .map(|i| params.remove(i).1)
        };
        let parse_f64 = |key: &str, v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad numeric value for `{key}` in `{spec}`")))
        };
        let parse_usize = |key: &str, v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad integer value for `{key}` in `{spec}`")))
        };

        let mut seed = default_seed;
        let kind = match name {
            "jpeg" => {
                let q = take("q").ok_or_else(|| Error::Parse(format!("`{spec}` needs q=")))?;
                AttackKind::Jpeg {
                    quality: parse_usize("q", q)?
                        .try_into()
                        .map_err(|_| Error::Parse(format!("quality out of range in `{spec}`")))?,
                }
            }
            "gauss-noise" => {
                let v = take("v").ok_or_else(|| Error::Parse(format!("`{spec}` needs v=")))?;
                if let Some(s) = take("seed") {
                    seed = parse_usize("seed", s)? as u64;
                }
                AttackKind::GaussianNoise {
                    variance: parse_f64("v", v)?,
                }
            }
            "salt-pepper" => {
                let d = take("d").ok_or_else(|| Error::Parse(format!("`{spec}` needs d=")))?;
                if let Some(s) = take("seed") {
                    seed = parse_usize("seed", s)? as u64;
                }
                AttackKind::SaltPepper {
                    density: parse_f64("d", d)?,
                }
            }
            "sharpen" => AttackKind::Sharpen,
            "rotate" => {
                let angle = match take("angle") {
                    Some(a) => parse_f64("angle", a)?,
                    None => 1.0,
                };
                AttackKind::Rotate {
                    angle_degrees: angle,
                }
            }
            "median" => AttackKind::Median {
                size: match take("n") {
                    Some(n) => parse_usize("n", n)?,
                    None => 3,
                },
            },
            "average" => AttackKind::Average {
                size: match take("n") {
                    Some(n) => parse_usize("n", n)?,
                    None => 3,
                },
            },
            "gauss-filter" => {
                let size = match take("n") {
                    Some(n) => parse_usize("n", n)?,
                    None => 3,
                };
                let sigma = match take("sigma") {
                    Some(s) => parse_f64("sigma", s)?,
                    None => 0.5,
                };
                AttackKind::GaussianFilter { size, sigma }
            }
            "crop" => {
                let coords = [take("x"), take("y"), take("w"), take("h")];
                if coords.iter().all(Option::is_none) {
                    AttackKind::Crop { rect: None }
                } else if coords.iter().all(Option::is_some) {
                    AttackKind::Crop {
                        rect: Some(Rect {
                            x: parse_usize("x", coords[0].unwrap())?,
                            y: parse_usize("y", coords[1].unwrap())?,
                            width: parse_usize("w", coords[2].unwrap())?,
                            height: parse_usize("h", coords[3].unwrap())?,
                        }),
                    }
                } else {
                    return Err(Error::Parse(format!(
                        "`{spec}` needs all of x=,y=,w=,h= or none"
                    )));
                }
            }
            other => {
                return Err(Error::Parse(format!("unknown attack kind `{other}`")));
            }
        };

        if let Some(&(k, _)) = params.first() {
            return Err(Error::Parse(format!("unknown key `{k}` in `{spec}`")));
        }
        Ok(Self { kind, seed })
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            AttackKind::Jpeg { .. } => "jpeg",
            AttackKind::GaussianNoise { .. } => "gauss-noise",
            AttackKind::SaltPepper { .. } => "salt-pepper",
            AttackKind::Sharpen => "sharpen",
            AttackKind::Rotate { .. } => "rotate",
            AttackKind::Median { .. } => "median",
            AttackKind::Average { .. } => "average",
            AttackKind::GaussianFilter { .. } => "gauss-filter",
            AttackKind::Crop { .. } => "crop",
        }
    }

    /// Human-readable parameter list for report rows.
    pub fn params_string(&self) -> String {
        match &self.kind {
            AttackKind::Jpeg { quality } => format!("q={quality}"),
            AttackKind::GaussianNoise { variance } => {
                format!("v={variance},seed={}", self.seed)
            }
            AttackKind::SaltPepper { density } => format!("d={density},seed={}", self.seed),
            AttackKind::Sharpen => String::new(),
            AttackKind::Rotate { angle_degrees } => format!("angle={angle_degrees}"),
            AttackKind::Median { size } => format!("n={size}"),
            AttackKind::Average { size } => format!("n={size}"),
            AttackKind::GaussianFilter { size, sigma } => format!("n={size},sigma={sigma}"),
            AttackKind::Crop { rect: Some(r) } => {
                format!("x={},y={},w={},h={}", r.x, r.y, r.width, r.height)
            }
            AttackKind::Crop { rect: None } => "center-half-area".into(),
        }
    }

    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage> {
        match &self.kind {
            AttackKind::Jpeg { quality } => jpeg_compress(img, *quality),
            AttackKind::GaussianNoise { variance } => add_gaussian_noise(img, *variance, self.seed),
            AttackKind::SaltPepper { density } => salt_pepper(img, *density, self.seed),
            AttackKind::Sharpen => Ok(convolve_filter(img, &Kernel::sharpen())),
            AttackKind::Rotate { angle_degrees } => rotate(img, *angle_degrees),
            AttackKind::Median { size } => median_filter(img, *size),
            AttackKind::Average { size } => Ok(convolve_filter(img, &Kernel::average(*size)?)),
            AttackKind::GaussianFilter { size, sigma } => {
                Ok(convolve_filter(img, &Kernel::gaussian(*size, *sigma)?))
            }
            AttackKind::Crop { rect } => {
                let r = rect.unwrap_or_else(|| Rect::center_half_area(img.width(), img.height()));
                crop(img, &r)
            }
        }
    }
}

/// Standard JPEG luminance quantization table (quality 50 base).
#[rustfmt::skip]
const LUMA_QUANT_50: [u16; 64] = [
    16, 11, 10, 16,  24,  40,  51,  61,
    12, 12, 14, 19,  26,  58,  60,  55,
    14, 13, 16, 24,  40,  57,  69,  56,
    14, 17, 22, 29,  51,  87,  80,  62,
    18, 22, 37, 56,  68, 109, 103,  77,
    24, 35, 55, 64,  81, 104, 113,  92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103,  99,
];

/// Scale the base table with the conventional quality-factor law.
fn scaled_quant_table(quality: u8) -> [f64; 64] {
    let q = quality.clamp(1, 100) as u32;
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut table = [0.0; 64];
    for (t, &base) in table.iter_mut().zip(&LUMA_QUANT_50) {
        *t = ((base as u32 * scale + 50) / 100).clamp(1, 255) as f64;
    }
    table
}

/// Simulated baseline JPEG: per-block DCT, luminance-table quantization,
/// dequantization, inverse DCT. The entropy-coding stage is lossless and
/// skipped. Images whose dimensions are not multiples of 8 are processed on
/// an edge-replicated canvas and cropped back.
pub fn jpeg_compress(img: &GrayImage, quality: u8) -> Result<GrayImage> {
    if !(1..=100).contains(&quality) {
        return Err(Error::InvalidParameter(format!(
            "JPEG quality must be in [1,100], got {quality}"
        )));
    }
    let table = scaled_quant_table(quality);
    let (w, h) = (img.width(), img.height());
    let wp = w.div_ceil(BLOCK_SIZE) * BLOCK_SIZE;
    let hp = h.div_ceil(BLOCK_SIZE) * BLOCK_SIZE;

    let mut out = vec![0u8; w * h];
    let mut block = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for by in 0..hp / BLOCK_SIZE {
        for bx in 0..wp / BLOCK_SIZE {
            for (i, row) in block.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    let x = (bx * BLOCK_SIZE + j) as isize;
                    let y = (by * BLOCK_SIZE + i) as isize;
                    // level shift as in the baseline codec
                    *v = img.get_clamped(x, y) as f64 - 128.0;
                }
            }
            let mut coef = dct2(&block);
            quantize_block(&mut coef, &table);
            let restored = idct2(&coef);
            for (i, row) in restored.iter().enumerate() {
                let y = by * BLOCK_SIZE + i;
                if y >= h {
                    break;
                }
                for (j, &v) in row.iter().enumerate() {
                    let x = bx * BLOCK_SIZE + j;
                    if x < w {
                        out[y * w + x] = quantize_pixel(v + 128.0);
                    }
                }
            }
        }
    }
    GrayImage::new(w, h, out)
}

fn quantize_block(coef: &mut CoefBlock, table: &[f64; 64]) {
    for u in 0..BLOCK_SIZE {
        for v in 0..BLOCK_SIZE {
            let step = table[u * BLOCK_SIZE + v];
            coef.coeffs[u][v] = (coef.coeffs[u][v] / step).round() * step;
        }
    }
}

/// Additive Gaussian noise with variance `v` in normalized intensity units
/// (std 255*sqrt(v) in 8-bit levels).
pub fn add_gaussian_noise(img: &GrayImage, variance: f64, seed: u64) -> Result<GrayImage> {
    if !(variance >= 0.0 && variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be finite and >= 0, got {variance}"
        )));
    }
    let std = 255.0 * variance.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let data = img
        .data()
        .iter()
        .map(|&p| {
            let z: f64 = rng.sample(StandardNormal);
            quantize_pixel(p as f64 + std * z)
        })
        .collect();
    GrayImage::new(img.width(), img.height(), data)
}

/// Replace each pixel with 0 or 255 (equal odds) with probability `density`.
pub fn salt_pepper(img: &GrayImage, density: f64, seed: u64) -> Result<GrayImage> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!(
            "salt & pepper density must be in [0,1], got {density}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let data = img
        .data()
        .iter()
        .map(|&p| {
            if rng.random::<f64>() < density {
                if rng.random::<bool>() {
                    255
                } else {
                    0
                }
            } else {
                p
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), data)
}

/// Square convolution kernel with odd side length.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) || size == 0 {
            return Err(Error::InvalidParameter(format!(
                "kernel size must be odd, got {size}"
            )));
        }
        if weights.len() != size * size {
            return Err(Error::ShapeMismatch(format!(
                "kernel has {} weights, expected {}",
                weights.len(),
                size * size
            )));
        }
        Ok(Self { size, weights })
    }

    /// Box filter: all weights equal, summing to 1.
    pub fn average(size: usize) -> Result<Self> {
        let w = 1.0 / (size * size) as f64;
        Self::new(size, vec![w; size * size])
    }

    /// Gaussian filter, normalized to unit sum.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian sigma must be positive, got {sigma}"
            )));
        }
        if size.is_multiple_of(2) || size == 0 {
            return Err(Error::InvalidParameter(format!(
                "kernel size must be odd, got {size}"
            )));
        }
        let r = (size / 2) as isize;
        let mut weights = Vec::with_capacity(size * size);
        for dy in -r..=r {
            for dx in -r..=r {
                let d2 = (dx * dx + dy * dy) as f64;
                weights.push((-d2 / (2.0 * sigma * sigma)).exp());
            }
        }
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        Self::new(size, weights)
    }

    /// Standard 3x3 sharpening kernel.
    pub fn sharpen() -> Self {
        Self::new(3, vec![0.0, -1.0, 0.0, -1.0, 5.0, -1.0, 0.0, -1.0, 0.0])
            .expect("static kernel is valid")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Spatial convolution with replicate-edge padding, then clamp/round.
pub fn convolve_filter(img: &GrayImage, kernel: &Kernel) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let r = (kernel.size / 2) as isize;
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            let mut k = 0;
            for dy in -r..=r {
                for dx in -r..=r {
                    acc += kernel.weights[k] * img.get_clamped(x + dx, y + dy) as f64;
                    k += 1;
                }
            }
            data.push(quantize_pixel(acc));
        }
    }
    GrayImage::new(w, h, data).expect("dimensions preserved")
}

/// Window median with replicate-edge padding.
pub fn median_filter(img: &GrayImage, size: usize) -> Result<GrayImage> {
    if size.is_multiple_of(2) || size == 0 {
        return Err(Error::InvalidParameter(format!(
            "median window must be odd, got {size}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let r = (size / 2) as isize;
    let mut window = Vec::with_capacity(size * size);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            window.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    window.push(img.get_clamped(x + dx, y + dy));
                }
            }
            let mid = window.len() / 2;
            let (_, median, _) = window.select_nth_unstable(mid);
            data.push(*median);
        }
    }
    GrayImage::new(w, h, data)
}

/// Rotate about the image center with bilinear interpolation; the frame is
/// kept and exposed corners are filled with 0.
pub fn rotate(img: &GrayImage, angle_degrees: f64) -> Result<GrayImage> {
    if !angle_degrees.is_finite() {
        return Err(Error::InvalidParameter(
            "rotation angle must be finite".into(),
        ));
    }
    let (w, h) = (img.width(), img.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let theta = angle_degrees.to_radians();
    let (sin, cos) = theta.sin_cos();

    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            // inverse mapping: sample the source at the un-rotated position
            let sx = cx + cos * dx + sin * dy;
            let sy = cy - sin * dx + cos * dy;
            data.push(bilinear_or_zero(img, sx, sy));
        }
    }
    GrayImage::new(w, h, data)
}

fn bilinear_or_zero(img: &GrayImage, sx: f64, sy: f64) -> u8 {
    let (w, h) = (img.width() as f64, img.height() as f64);
    // tolerate rounding drift at the frame edge (e.g. a full 360-degree turn)
    const EDGE_EPS: f64 = 1e-9;
    if sx < -EDGE_EPS || sy < -EDGE_EPS || sx > w - 1.0 + EDGE_EPS || sy > h - 1.0 + EDGE_EPS {
        return 0;
    }
    let sx = sx.clamp(0.0, w - 1.0);
    let sy = sy.clamp(0.0, h - 1.0);
    let x0 = sx.floor() as usize;
    let y0 = sy.floor() as usize;
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    let top = img.get(x0, y0) as f64 * (1.0 - fx) + img.get(x1, y0) as f64 * fx;
    let bot = img.get(x0, y1) as f64 * (1.0 - fx) + img.get(x1, y1) as f64 * fx;
    quantize_pixel(top * (1.0 - fy) + bot * fy)
}

/// Zero out everything outside `rect`; dimensions are preserved so the
/// extraction pipeline still runs on the result.
pub fn crop(img: &GrayImage, rect: &Rect) -> Result<GrayImage> {
    if rect.x + rect.width > img.width() || rect.y + rect.height > img.height() {
        return Err(Error::InvalidParameter(format!(
            "crop rect {}x{}+{}+{} exceeds image {}x{}",
            rect.width,
            rect.height,
            rect.x,
            rect.y,
            img.width(),
            img.height()
        )));
    }
    let mut data = vec![0u8; img.width() * img.height()];
    for y in rect.y..rect.y + rect.height {
        let src = y * img.width() + rect.x;
        data[src..src + rect.width].copy_from_slice(&img.data()[src..src + rect.width]);
    }
    GrayImage::new(img.width(), img.height(), data)
}
