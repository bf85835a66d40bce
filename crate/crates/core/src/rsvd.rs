//! Randomized SVD with oversampling and the factored storage it produces.

use crate::error::{Error, Result};
use crate::linalg::{matmul, matmul_nt, matmul_tn, qr_thin, svd_small, Matrix};
use crate::rng::RngStream;

/// A moment stored as `u · diag(s) · vᵀ` with `l` columns per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredMomentum {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl FactoredMomentum {
    /// All-zero factors; reconstructs to the zero `rows × cols` matrix.
    pub fn zeros(rows: usize, cols: usize, width: usize) -> Self {
        FactoredMomentum {
            u: Matrix::zeros(rows, width),
            s: vec![0.0; width],
            v: Matrix::zeros(cols, width),
        }
    }

    /// Number of stored columns `l`.
    pub fn width(&self) -> usize {
        self.s.len()
    }

    /// Shape of the represented matrix.
    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    /// Stored element count with `s` absorbed into `u`: `(rows + cols) · l`.
    pub fn stored_elements(&self) -> usize {
        (self.u.rows() + self.v.rows()) * self.width()
    }

    /// Keeps the leading `k` singular triplets.
    pub fn truncated(&self, k: usize) -> FactoredMomentum {
        let k = k.min(self.width());
        FactoredMomentum {
            u: self.u.leading_cols(k),
            s: self.s[..k].to_vec(),
            v: self.v.leading_cols(k),
        }
    }
}

/// `rows × cols` matrix of independent standard normal draws.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.next_gaussian())
}

/// Randomized SVD of `a` with target rank `rank` and `oversample` extra
/// sketch columns, without power iterations.
///
/// The sketch width is `l = min(rank + oversample, rows, cols)`; asking for
/// more columns than the matrix has makes the factorization exact.
pub fn rsvd(
    a: &Matrix,
    rank: usize,
    oversample: usize,
    rng: &mut RngStream,
) -> Result<FactoredMomentum> {
    if rank == 0 {
        return Err(Error::InvalidArgument(
            "rsvd rank must be at least 1".into(),
        ));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("rsvd input"));
    }
    let (m, n) = a.shape();
    let l = (rank + oversample).min(m.min(n));

    let omega = gaussian_matrix(n, l, rng);
    let y = matmul(a, &omega)?;
    let (q, _) = qr_thin(&y)?;
    let b = matmul_tn(&q, a)?;
    let small = svd_small(&b)?;
    let u = matmul(&q, &small.u)?;

    Ok(FactoredMomentum {
        u,
        s: small.s,
        v: small.v,
    })
}

/// `u · diag(s) · vᵀ`.
pub fn reconstruct(f: &FactoredMomentum) -> Result<Matrix> {
    let l = f.width();
    if f.u.cols() != l || f.v.cols() != l {
        return Err(Error::Shape {
            op: "reconstruct",
            expected: format!("factors with {l} columns"),
            got: format!("u has {}, v has {}", f.u.cols(), f.v.cols()),
        });
    }
    let us = Matrix::from_fn(f.u.rows(), l, |i, j| f.u[(i, j)] * f.s[j]);
    matmul_nt(&us, &f.v)
}
