//! Deterministic synthetic test assets. The cover generator layers seeded
//! value noise into a smooth multi-scale field with roughly natural-image
//! statistics, so tests and CI never depend on external picture files.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::Result;
use crate::image::{quantize_pixel, GrayImage, WatermarkBits};

/// One octave of value noise: random lattice values interpolated smoothly.
struct NoiseOctave {
    cell: usize,
    grid_w: usize,
    values: Vec<f64>,
}

impl NoiseOctave {
    fn new(width: usize, height: usize, cell: usize, rng: &mut ChaCha12Rng) -> Self {
        let grid_w = width / cell + 2;
        let grid_h = height / cell + 2;
        let values = (0..grid_w * grid_h)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        Self {
            cell,
            grid_w,
            values,
        }
    }

    fn sample(&self, x: usize, y: usize) -> f64 {
        let fx = x as f64 / self.cell as f64;
        let fy = y as f64 / self.cell as f64;
        let x0 = fx.floor() as usize;
        let y0 = fy.floor() as usize;
        let tx = smoothstep(fx - x0 as f64);
        let ty = smoothstep(fy - y0 as f64);
        let at = |gx: usize, gy: usize| self.values[gy * self.grid_w + gx];
        let top = at(x0, y0) * (1.0 - tx) + at(x0 + 1, y0) * tx;
        let bot = at(x0, y0 + 1) * (1.0 - tx) + at(x0 + 1, y0 + 1) * tx;
        top * (1.0 - ty) + bot * ty
    }
}

#[inline]
fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Octave cell sizes and amplitudes (in intensity levels) for the cover.
/// Coarse octaves give the large-scale tonal variation, fine ones the texture.
const OCTAVES: [(usize, f64); 5] = [(64, 44.0), (32, 26.0), (8, 24.0), (5, 20.0), (4, 4.0)];

/// Deterministic grayscale cover with natural-looking statistics.
pub fn synthetic_cover(width: usize, height: usize, seed: u64) -> Result<GrayImage> {
    synthetic_cover_with(width, height, seed, &OCTAVES)
}

/// Cover built from caller-chosen octaves as (cell size, amplitude) pairs.
pub fn synthetic_cover_with(
    width: usize,
    height: usize,
    seed: u64,
    octaves: &[(usize, f64)],
) -> Result<GrayImage> {
    let fields: Vec<NoiseOctave> = octaves
        .iter()
        .enumerate()
        .map(|(i, &(cell, _))| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(i as u64 * 0x9E37_79B9));
            NoiseOctave::new(width, height, cell, &mut rng)
        })
        .collect();

    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let mut v = 128.0;
            for (field, &(_, amp)) in fields.iter().zip(octaves) {
                v += amp * field.sample(x, y);
            }
            data.push(quantize_pixel(v));
        }
    }
    GrayImage::new(width, height, data)
}

/// Deterministic binary logo: a ring with a center dot, scaled to the logo
/// size. At 64x64 it carries 2292 one-bits (~56% density).
pub fn synthetic_logo(width: usize, height: usize) -> Result<WatermarkBits> {
    let scale = width.min(height) as f64 / 64.0;
    let outer = 30.0 * scale;
    let inner = 14.0 * scale;
    let dot = 6.0 * scale;
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;

    let mut bits = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let on = d <= dot || (d >= inner && d <= outer);
            bits.push(u8::from(on));
        }
    }
    WatermarkBits::new(width, height, bits)
}
