//! Text serialization of a fitted PCA model for `--save-model` / `--model`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use wmark_core::error::{Error, Result};
use wmark_core::pca::{Matrix, PcaModel};

const MAGIC: &str = "wmark-pca v1";

/// Render the model as text: mean, eigenvalues, then one line per
/// eigenvector (column-major).
pub fn model_to_string(model: &PcaModel) -> String {
    let m = model.dim();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "dim {m}");
    let _ = writeln!(out, "mean {}", join(model.mean().iter().copied()));
    let _ = writeln!(out, "eigvals {}", join(model.eigvals().iter().copied()));
    for j in 0..m {
        let col = (0..m).map(|i| model.eigvec(i, j));
        let _ = writeln!(out, "eigvec {j} {}", join(col));
    }
    out
}

fn join(values: impl Iterator<Item = f64>) -> String {
    values
        .map(|v| format!("{v:.17e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_model(text: &str) -> Result<PcaModel> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(Error::Parse("not a wmark PCA model file".into()));
    }
    let dim_line = lines
        .next()
        .ok_or_else(|| Error::Parse("model file truncated".into()))?;
    let m: usize = dim_line
        .strip_prefix("dim ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse("bad dim line in model file".into()))?;

    let numbers = |prefix: &str, line: Option<&str>| -> Result<Vec<f64>> {
        let line = line.ok_or_else(|| Error::Parse("model file truncated".into()))?;
        let rest = line
            .strip_prefix(prefix)
            .ok_or_else(|| Error::Parse(format!("expected `{prefix}` line in model file")))?;
        let vals: Vec<f64> = rest
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad number on `{prefix}` line")))?;
        if vals.len() != m {
            return Err(Error::Parse(format!(
                "expected {m} values on `{prefix}` line, got {}",
                vals.len()
            )));
        }
        Ok(vals)
    };

    let mean = numbers("mean ", lines.next())?;
    let eigvals = numbers("eigvals ", lines.next())?;
    let mut eigvecs = Matrix::zeros(m, m);
    for j in 0..m {
        let col = numbers(&format!("eigvec {j} "), lines.next())?;
        for (i, v) in col.into_iter().enumerate() {
            eigvecs.set(i, j, v);
        }
    }
    PcaModel::from_parts(mean, eigvecs, eigvals)
}

pub fn save_model<P: AsRef<Path>>(path: P, model: &PcaModel) -> Result<()> {
    Ok(fs::write(path, model_to_string(model))?)
}

pub fn load_model<P: AsRef<Path>>(path: P) -> Result<PcaModel> {
    parse_model(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmark_core::synth;
    use wmark_core::watermark::fit_cover_model;
    use wmark_core::BandSelector;

    #[test]
    fn model_roundtrips_exactly() {
        let cover = synth::synthetic_cover(64, 64, 3).unwrap();
        let model = fit_cover_model(&cover, &BandSelector::low_band()).unwrap();
        let text = model_to_string(&model);
        let back = parse_model(&text).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn rejects_corrupt_files() {
        assert!(parse_model("garbage").is_err());
        assert!(parse_model("wmark-pca v1\ndim 2\nmean 0 0\n").is_err());
        let cover = synth::synthetic_cover(64, 64, 3).unwrap();
        let model = fit_cover_model(&cover, &BandSelector::low_band()).unwrap();
        let text = model_to_string(&model).replace("eigvals", "bogus");
        assert!(parse_model(&text).is_err());
    }
}
