//! Dense row-major `f64` matrices and the small deterministic decompositions
//! the rest of the crate is built on: Householder thin QR, one-sided Jacobi
//! SVD, and the Frobenius / entrywise-l1 norms.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense real matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting bad lengths and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix data"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Matrix::from_vec(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Square diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Matrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, values: &[f64]) {
        for (i, &x) in values.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Matrix {
        self.map(|x| c * x)
    }

    /// Entrywise combination of two equally shaped matrices.
    pub fn zip_map(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        self.expect_shape("zip_map", other.shape())?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_map(other, |a, b| a - b)
    }

    /// First `k` columns.
    pub fn leading_cols(&self, k: usize) -> Matrix {
        let k = k.min(self.cols);
        Matrix::from_fn(self.rows, k, |i, j| self[(i, j)])
    }

    pub(crate) fn expect_shape(&self, op: &'static str, shape: (usize, usize)) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::shape(op, shape, self.shape()));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `a * b`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::Shape {
            op: "matmul",
            expected: format!("{}xK with K={}", b.rows, a.cols),
            got: format!("{}x{}", b.rows, b.cols),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == 0.0 {
                continue;
            }
            let b_row = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// `aᵀ * b` without materializing the transpose.
pub fn matmul_tn(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(Error::Shape {
            op: "matmul_tn",
            expected: format!("{} rows", a.rows),
            got: format!("{}x{}", b.rows, b.cols),
        });
    }
    let mut out = Matrix::zeros(a.cols, b.cols);
    for k in 0..a.rows {
        let a_row = a.row(k);
        let b_row = b.row(k);
        for (i, &aki) in a_row.iter().enumerate() {
            if aki == 0.0 {
                continue;
            }
            let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aki * bkj;
            }
        }
    }
    Ok(out)
}

/// `a * bᵀ` without materializing the transpose.
pub fn matmul_nt(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.cols {
        return Err(Error::Shape {
            op: "matmul_nt",
            expected: format!("{} cols", a.cols),
            got: format!("{}x{}", b.rows, b.cols),
        });
    }
    Ok(Matrix::from_fn(a.rows, b.rows, |i, j| {
        dot(a.row(i), b.row(j))
    }))
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn frob_norm(a: &Matrix) -> f64 {
    norm2(&a.data)
}

/// Entrywise l1 norm, `Σ |a_ij|`.
pub fn l11_norm(a: &Matrix) -> f64 {
    a.data.iter().map(|x| x.abs()).sum()
}

/// Householder thin QR of a tall matrix (`rows >= cols`).
///
/// Zero or dependent columns produce an identity reflector for that step, so
/// `q` stays orthonormal for rank-deficient input.
pub fn qr_thin(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "qr_thin needs rows >= cols, got {m}x{n}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("qr_thin input"));
    }

    let mut work = a.clone();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    for k in 0..n {
        let x: Vec<f64> = (k..m).map(|i| work[(i, k)]).collect();
        let norm_x = norm2(&x);
        if norm_x == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm_x } else { norm_x };
        let mut v = x;
        v[0] -= alpha;
        let norm_v = norm2(&v);
        if norm_v == 0.0 {
            reflectors.push(None);
            continue;
        }
        v.iter_mut().for_each(|vi| *vi /= norm_v);
        apply_reflector(&mut work, &v, k, k);
        reflectors.push(Some(v));
    }

    let r = Matrix::from_fn(n, n, |i, j| if j >= i { work[(i, j)] } else { 0.0 });
    let mut q = Matrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for (k, v) in reflectors.iter().enumerate().rev() {
        if let Some(v) = v {
            apply_reflector(&mut q, v, k, 0);
        }
    }
    Ok((q, r))
}

/// Applies `I - 2 v vᵀ` to rows `row0..` of `target`, columns `col0..`.
fn apply_reflector(target: &mut Matrix, v: &[f64], row0: usize, col0: usize) {
    for j in col0..target.cols {
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi * target[(row0 + i, j)])
            .sum();
        if s == 0.0 {
            continue;
        }
        for (i, vi) in v.iter().enumerate() {
            target[(row0 + i, j)] -= 2.0 * s * vi;
        }
    }
}

/// Thin SVD `a = u · diag(s) · vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows × k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: Matrix,
    /// Nonincreasing, nonnegative.
    pub s: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let us = Matrix::from_fn(self.u.rows, self.u.cols, |i, j| self.u[(i, j)] * self.s[j]);
        matmul_nt(&us, &self.v).expect("svd factors are consistent")
    }
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// Exact thin SVD by one-sided (Hestenes) Jacobi on the narrower side.
///
/// Deterministic for a fixed input. Each left singular vector is signed so
/// that its first nonzero component is positive; columns belonging to
/// (numerically) zero singular values are completed to an orthonormal set
/// from the standard basis.
pub fn svd_small(b: &Matrix) -> Result<SvdResult> {
    if !b.is_finite() {
        return Err(Error::NonFinite("svd_small input"));
    }
    let res = if b.rows >= b.cols {
        jacobi_svd_tall(b)
    } else {
        let t = jacobi_svd_tall(&b.transpose());
        SvdResult {
            u: t.v,
            s: t.s,
            v: t.u,
        }
    };
    Ok(canonical_signs(res))
}

fn jacobi_svd_tall(a: &Matrix) -> SvdResult {
    let (m, n) = a.shape();
    // column-major working copies
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in column order, deterministic
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let s: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = smax * f64::EPSILON * (m.max(n) as f64);

    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        v.set_col(k, &vcols[j]);
        if s[k] > cutoff && s[k] > 0.0 {
            let col: Vec<f64> = cols[j].iter().map(|x| x / s[k]).collect();
            u.set_col(k, &col);
        } else {
            missing.push(k);
        }
    }
    complete_orthonormal(&mut u, &missing);
    SvdResult { u, s, v }
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every
/// other column, drawn from the standard basis by Gram-Schmidt.
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = u.rows;
    let mut filled: Vec<bool> = vec![true; u.cols];
    for &k in missing {
        filled[k] = false;
    }
    let mut candidate = 0;
    for &k in missing {
        loop {
            assert!(candidate < m, "cannot complete orthonormal basis");
            let mut x = vec![0.0; m];
            x[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (j, done) in filled.iter().enumerate() {
                    if !done {
                        continue;
                    }
                    let col = u.col(j);
                    let proj = dot(&x, &col);
                    x.iter_mut().zip(&col).for_each(|(xi, ci)| *xi -= proj * ci);
                }
            }
            let nx = norm2(&x);
            if nx > 0.5 {
                x.iter_mut().for_each(|xi| *xi /= nx);
                u.set_col(k, &x);
                filled[k] = true;
                break;
            }
        }
    }
}

fn canonical_signs(mut res: SvdResult) -> SvdResult {
    for k in 0..res.u.cols {
        let first = (0..res.u.rows)
            .map(|i| res.u[(i, k)])
            .find(|&x| x != 0.0)
            .unwrap_or(0.0);
        if first < 0.0 {
            for i in 0..res.u.rows {
                res.u[(i, k)] = -res.u[(i, k)];
            }
            for i in 0..res.v.rows {
                res.v[(i, k)] = -res.v[(i, k)];
            }
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = RngStream::new(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.next_gaussian())
    }

    fn orthonormality_error(q: &Matrix) -> f64 {
        let qtq = matmul_tn(q, q).unwrap();
        frob_norm(&qtq.sub(&Matrix::identity(q.cols())).unwrap())
    }

    #[test]
    fn matmul_examples() {
        let a = random(3, 4, 1);
        assert_eq!(matmul(&Matrix::identity(3), &a).unwrap(), a);
        let z = matmul(&a, &Matrix::zeros(4, 2)).unwrap();
        assert!(z.as_slice().iter().all(|&x| x == 0.0));
        let p = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let q = Matrix::from_rows(&[[5.0], [6.0]]).unwrap();
        assert_eq!(
            matmul(&p, &q).unwrap(),
            Matrix::from_rows(&[[17.0], [39.0]]).unwrap()
        );
    }

    #[test]
    fn matmul_shape_error() {
        let err = matmul(&Matrix::zeros(2, 3), &Matrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::Shape { .. }));
    }

    #[test]
    fn transposed_products_agree_with_matmul() {
        let a = random(5, 3, 2);
        let b = random(5, 4, 3);
        let c = random(6, 3, 4);
        assert_eq!(
            matmul_tn(&a, &b).unwrap(),
            matmul(&a.transpose(), &b).unwrap()
        );
        let nt = matmul_nt(&a, &c).unwrap();
        let reference = matmul(&a, &c.transpose()).unwrap();
        assert!(frob_norm(&nt.sub(&reference).unwrap()) < 1e-14);
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(Matrix::from_vec(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::from_vec(0, 2, vec![]).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(frob_norm(&Matrix::zeros(3, 2)), 0.0);
        assert_eq!(frob_norm(&Matrix::from_rows(&[[3.0, 4.0]]).unwrap()), 5.0);
        assert!((frob_norm(&Matrix::identity(7)) - 7f64.sqrt()).abs() < 1e-15);
        assert_eq!(l11_norm(&Matrix::zeros(2, 2)), 0.0);
        let a = Matrix::from_rows(&[[1.0, -2.0], [3.0, -4.0]]).unwrap();
        assert_eq!(l11_norm(&a), 10.0);
        assert_eq!(l11_norm(&Matrix::identity(5)), 5.0);
    }

    #[test]
    fn qr_of_orthonormal_columns_is_signed_identity() {
        let (q0, _) = qr_thin(&random(9, 4, 5)).unwrap();
        let (q, r) = qr_thin(&q0).unwrap();
        for j in 0..4 {
            let sign = r[(j, j)].signum();
            assert!((r[(j, j)].abs() - 1.0).abs() < 1e-12);
            for i in 0..9 {
                assert!((q[(i, j)] - sign * q0[(i, j)]).abs() < 1e-12);
            }
            for i in 0..4 {
                if i != j {
                    assert!(r[(i, j)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qr_residual_random_50x5() {
        let a = random(50, 5, 42);
        let (q, r) = qr_thin(&a).unwrap();
        let qr = matmul(&q, &r).unwrap();
        assert!(frob_norm(&qr.sub(&a).unwrap()) / frob_norm(&a) <= 1e-12);
        assert!(orthonormality_error(&q) <= 1e-10);
        for i in 0..5 {
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn qr_rank_deficient_stays_orthonormal() {
        let mut a = random(8, 4, 6);
        for i in 0..8 {
            a[(i, 1)] = 0.0;
            a[(i, 3)] = 2.0 * a[(i, 0)];
        }
        let (q, r) = qr_thin(&a).unwrap();
        assert!(orthonormality_error(&q) <= 1e-10);
        assert!(frob_norm(&matmul(&q, &r).unwrap().sub(&a).unwrap()) <= 1e-10 * frob_norm(&a));

        let (q, r) = qr_thin(&Matrix::zeros(5, 3)).unwrap();
        assert!(orthonormality_error(&q) <= 1e-12);
        assert!(r.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn qr_rejects_wide() {
        assert!(qr_thin(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn svd_diagonal_sorted() {
        let svd = svd_small(&Matrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(svd.s, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn svd_zero_matrix() {
        let svd = svd_small(&Matrix::zeros(4, 6)).unwrap();
        assert!(svd.s.iter().all(|&x| x == 0.0));
        assert!(orthonormality_error(&svd.u) <= 1e-12);
        assert!(orthonormality_error(&svd.v) <= 1e-12);
    }

    #[test]
    fn svd_sign_convention() {
        let svd = svd_small(&random(6, 4, 8)).unwrap();
        for k in 0..svd.u.cols() {
            let first = svd.u.col(k).into_iter().find(|&x| x != 0.0).unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn svd_rank_deficient_completion() {
        // rank 1, 5x3
        let x = random(5, 1, 9);
        let y = random(3, 1, 10);
        let a = matmul_nt(&x, &y).unwrap();
        let svd = svd_small(&a).unwrap();
        assert!(orthonormality_error(&svd.u) <= 1e-10);
        assert!(orthonormality_error(&svd.v) <= 1e-10);
        let rec = svd.reconstruct();
        assert!(frob_norm(&rec.sub(&a).unwrap()) <= 1e-12 * frob_norm(&a));
        assert!(svd.s[1] <= 1e-14 * svd.s[0]);
    }

    fn check_svd_contract(a: &Matrix) {
        let svd = svd_small(a).unwrap();
        let k = a.rows().min(a.cols());
        assert_eq!(svd.u.shape(), (a.rows(), k));
        assert_eq!(svd.v.shape(), (a.cols(), k));
        assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.s.iter().all(|&x| x >= 0.0));
        assert!(orthonormality_error(&svd.u) <= 1e-10);
        assert!(orthonormality_error(&svd.v) <= 1e-10);
        let scale = frob_norm(a).max(f64::MIN_POSITIVE);
        assert!(frob_norm(&svd.reconstruct().sub(a).unwrap()) <= 1e-8 * scale);
    }

    proptest! {
        #[test]
        fn svd_contract_holds(rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()) {
            check_svd_contract(&random(rows, cols, seed));
        }

        #[test]
        fn qr_contract_holds(rows in 1usize..14, cols in 1usize..8, seed in any::<u64>()) {
            prop_assume!(rows >= cols);
            let a = random(rows, cols, seed);
            let (q, r) = qr_thin(&a).unwrap();
            prop_assert!(orthonormality_error(&q) <= 1e-10);
            prop_assert!(frob_norm(&matmul(&q, &r).unwrap().sub(&a).unwrap()) <= 1e-10 * frob_norm(&a));
        }

        #[test]
        fn norm_equivalence(rows in 1usize..10, cols in 1usize..10, seed in any::<u64>()) {
            let a = random(rows, cols, seed);
            let f = frob_norm(&a);
            let l = l11_norm(&a);
            prop_assert!(f <= l * (1.0 + 1e-12));
            prop_assert!(l <= ((rows * cols) as f64).sqrt() * f * (1.0 + 1e-12));
        }
    }
}
