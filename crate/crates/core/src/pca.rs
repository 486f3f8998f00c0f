//! PCA over per-block feature vectors: mean, covariance, eigendecomposition,
//! and the score-space mapping used for embedding.

use crate::error::{Error, Result};

/// Dense row-major real matrix. Rows are observations (one per block),
/// columns are band coefficients or principal-component scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// N x M matrix of low-band coefficient vectors, one row per block.
pub type FeatureMatrix = Matrix;

/// N x M matrix of principal-component scores; column 0 is PC1.
pub type ScoreMatrix = Matrix;

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::ShapeMismatch("matrix needs at least one row".into()));
        };
        let cols = first.len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "ragged rows: {} vs {}",
                    r.len(),
                    cols
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// PCA model fitted on a cover image's feature matrix.
///
/// `eigvecs` is M x M with eigenvectors as columns, orthonormal, ordered by
/// descending eigenvalue. Signs are fixed so each column's largest-magnitude
/// entry (first on ties) is positive, making embed and extract agree bit for
/// bit on the same cover.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    eigvecs: Matrix,
    eigvals: Vec<f64>,
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Entry (i, j) of the eigenvector matrix A; column j is the j-th eigenvector.
    pub fn eigvec(&self, i: usize, j: usize) -> f64 {
        self.eigvecs.get(i, j)
    }

    pub fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    /// Rebuild a model from serialized parts, re-checking the invariants.
    pub fn from_parts(mean: Vec<f64>, eigvecs: Matrix, eigvals: Vec<f64>) -> Result<Self> {
        let m = mean.len();
        if eigvecs.rows() != m || eigvecs.cols() != m || eigvals.len() != m {
            return Err(Error::ShapeMismatch(
                "model parts have inconsistent dimensions".into(),
            ));
        }
        if !mean.iter().all(|v| v.is_finite())
            || !eigvecs.is_finite()
            || !eigvals.iter().all(|v| v.is_finite())
        {
            return Err(Error::NonFinite("PCA model".into()));
        }
        // columns must be orthonormal
        for a in 0..m {
            for b in 0..m {
                let dot: f64 = (0..m).map(|i| eigvecs.get(i, a) * eigvecs.get(i, b)).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if (dot - want).abs() > 1e-6 {
                    return Err(Error::InvalidParameter(
                        "model eigenvectors are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Self {
            mean,
            eigvecs,
            eigvals,
        })
    }
}

/// Fit mean, covariance (1/N normalization), and sorted eigenpairs.
pub fn fit(x: &FeatureMatrix) -> Result<PcaModel> {
    let n = x.rows();
    let m = x.cols();
    if n < m {
        return Err(Error::ShapeMismatch(format!(
            "need at least as many rows as columns, got {n} x {m}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("feature matrix".into()));
    }

    let mut mean = vec![0.0; m];
    for r in 0..n {
        for (c, acc) in mean.iter_mut().enumerate() {
            *acc += x.get(r, c);
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }

    let mut cov = Matrix::zeros(m, m);
    let mut centered = vec![0.0; m];
    for r in 0..n {
        for c in 0..m {
            centered[c] = x.get(r, c) - mean[c];
        }
        for a in 0..m {
            for b in a..m {
                let v = cov.get(a, b) + centered[a] * centered[b];
                cov.set(a, b, v);
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            let v = cov.get(a, b) / n as f64;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }

    let (mut eigvals, mut eigvecs) = jacobi_eigen(&cov)?;
    sort_descending(&mut eigvals, &mut eigvecs);
    fix_signs(&mut eigvecs);

    Ok(PcaModel {
        mean,
        eigvecs,
        eigvals,
    })
}

/// Map feature rows to score rows: y_k = A^t (x_k - mean).
pub fn project(model: &PcaModel, x: &FeatureMatrix) -> Result<ScoreMatrix> {
    let m = model.dim();
    if x.cols() != m {
        return Err(Error::ShapeMismatch(format!(
            "feature matrix has {} columns, model expects {m}",
            x.cols()
        )));
    }
    let mut y = Matrix::zeros(x.rows(), m);
    for r in 0..x.rows() {
        for j in 0..m {
            let mut acc = 0.0;
            for i in 0..m {
                acc += model.eigvecs.get(i, j) * (x.get(r, i) - model.mean[i]);
            }
            y.set(r, j, acc);
        }
    }
    Ok(y)
}

/// Map score rows back to feature rows: x_k = A y_k + mean.
pub fn inverse_project(model: &PcaModel, y: &ScoreMatrix) -> Result<FeatureMatrix> {
    let m = model.dim();
    if y.cols() != m {
        return Err(Error::ShapeMismatch(format!(
            "score matrix has {} columns, model expects {m}",
            y.cols()
        )));
    }
    let mut x = Matrix::zeros(y.rows(), m);
    for r in 0..y.rows() {
        for i in 0..m {
            let mut acc = model.mean[i];
            for j in 0..m {
                acc += model.eigvecs.get(i, j) * y.get(r, j);
            }
            x.set(r, i, acc);
        }
    }
    Ok(x)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns unsorted
/// eigenvalues and a matrix whose columns are the matching eigenvectors.
fn jacobi_eigen(sym: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    const MAX_SWEEPS: usize = 50;
    let m = sym.rows();
    let mut a = sym.clone();
    let mut v = Matrix::zeros(m, m);
    for i in 0..m {
        v.set(i, i, 1.0);
    }
    if m == 1 {
        return Ok((vec![a.get(0, 0)], v));
    }

    let frob: f64 = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| sym.get(i, j) * sym.get(i, j))
        .sum::<f64>()
        .sqrt();
    let tol = 1e-14 * frob.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..m - 1 {
            for q in p + 1..m {
                off += a.get(p, q).abs();
            }
        }
        if off <= tol {
            let eigvals = (0..m).map(|i| a.get(i, i)).collect();
            return Ok((eigvals, v));
        }

        for p in 0..m - 1 {
            for q in p + 1..m {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // smaller-magnitude rotation root keeps the sweep stable
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..m {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..m {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                // keep symmetry exact against rounding drift
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);

                for k in 0..m {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::InvalidParameter(
        "Jacobi eigensolver failed to converge".into(),
    ))
}

fn sort_descending(eigvals: &mut [f64], eigvecs: &mut Matrix) {
    let m = eigvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    // stable sort keeps original index order on ties
    order.sort_by(|&a, &b| eigvals[b].partial_cmp(&eigvals[a]).unwrap());

    let vals: Vec<f64> = order.iter().map(|&i| eigvals[i]).collect();
    eigvals.copy_from_slice(&vals);

    let old = eigvecs.clone();
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..m {
            eigvecs.set(i, new_col, old.get(i, old_col));
        }
    }
}

/// Flip each column so its largest-magnitude entry (first on ties) is positive.
fn fix_signs(eigvecs: &mut Matrix) {
    let m = eigvecs.rows();
    for j in 0..m {
        let mut best = 0;
        for i in 1..m {
            if eigvecs.get(i, j).abs() > eigvecs.get(best, j).abs() {
                best = i;
            }
        }
        if eigvecs.get(best, j) < 0.0 {
            for i in 0..m {
                let v = eigvecs.get(i, j);
                eigvecs.set(i, j, -v);
            }
        }
    }
}
