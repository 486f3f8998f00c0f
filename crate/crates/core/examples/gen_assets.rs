//! Writes the bundled synthetic test assets to disk so the CLI can be tried
//! without external images:
//!
//! ```text
//! cargo run --release -p wmark-core --example gen_assets -- [out_dir]
//! ```

use std::path::PathBuf;

use wmark_core::{pnm, synth};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).expect("create output directory");

    let cover = synth::synthetic_cover(512, 512, 1).expect("cover");
    let logo = synth::synthetic_logo(64, 64).expect("logo");

    let cover_path = dir.join("cover.pgm");
    let logo_path = dir.join("logo.pbm");
    pnm::write_pgm(&cover_path, &cover).expect("write cover");
    pnm::write_logo(&logo_path, &logo).expect("write logo");
    println!(
        "wrote {} (512x512 grayscale) and {} (64x64, {} one-bits)",
        cover_path.display(),
        logo_path.display(),
        logo.ones()
    );
}
