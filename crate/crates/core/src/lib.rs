//! Grayscale image watermarking in the principal-component space of the
//! block-DCT low-frequency band.
//!
//! The pipeline splits the cover into 8x8 blocks, transforms each with an
//! orthonormal DCT, gathers the first six zig-zag coefficients of every
//! block into a feature matrix, and fits a PCA model on it. One watermark
//! bit per block is added (scaled by a strength `alpha`) to the first
//! principal-component score before the chain is inverted back to pixels.
//! Detection is non-blind: it rebuilds both feature matrices, projects them
//! through the cover's model, and thresholds the PC1 score differences.
//!
//! The companion modules provide the evaluation harness pieces: a
//! deterministic attack suite ([`attacks`]), quality metrics ([`metrics`]),
//! netpbm file I/O ([`pnm`]), and synthetic test assets ([`synth`]).

pub mod attacks;
pub mod error;
pub mod image;
pub mod metrics;
pub mod pca;
pub mod pnm;
pub mod synth;
pub mod transforms;
pub mod watermark;

pub use error::{Error, Result};
pub use image::{GrayImage, WatermarkBits};
pub use transforms::BandSelector;
pub use watermark::{EmbedParams, RawExtraction, DEFAULT_ALPHA};
