//! Synthetic objectives with exact and stochastic gradient oracles.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{frob_norm, matmul, matmul_nt, matmul_tn, svd_small, Matrix};
use crate::rng::RngStream;
use crate::rsvd::gaussian_matrix;

/// One stochastic gradient draw.
#[derive(Debug, Clone)]
pub struct GradSample {
    pub grad: Matrix,
    /// Sample indices of the mini-batch; empty for additive-noise oracles.
    pub batch_indices: Vec<usize>,
    /// Objective value on the same batch (the full objective for
    /// additive-noise oracles).
    pub loss_value: f64,
}

/// A differentiable objective over one matrix parameter.
pub trait Problem {
    fn param_shape(&self) -> (usize, usize);

    fn loss(&self, w: &Matrix) -> Result<f64>;

    fn grad(&self, w: &Matrix) -> Result<Matrix>;

    /// Unbiased gradient estimate from a batch of `batch_size`.
    fn stoch_grad(&self, w: &Matrix, batch_size: usize, rng: &mut RngStream) -> Result<GradSample>;

    fn finite_diff_grad(&self, w: &Matrix, h: f64) -> Result<Matrix> {
        finite_diff_grad(|x| self.loss(x), w, h)
    }
}

/// Central differences `(f(w + hE_ij) - f(w - hE_ij)) / 2h` for every entry.
pub fn finite_diff_grad(f: impl Fn(&Matrix) -> Result<f64>, w: &Matrix, h: f64) -> Result<Matrix> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step h must be positive, got {h}"
        )));
    }
    let mut probe = w.clone();
    let mut out = Matrix::zeros(w.rows(), w.cols());
    for idx in 0..w.len() {
        let orig = probe.as_slice()[idx];
        probe.as_mut_slice()[idx] = orig + h;
        let up = f(&probe)?;
        probe.as_mut_slice()[idx] = orig - h;
        let down = f(&probe)?;
        probe.as_mut_slice()[idx] = orig;
        out.as_mut_slice()[idx] = (up - down) / (2.0 * h);
    }
    Ok(out)
}

/// `f(W) = ½‖a W b − c‖_F²` with an additive Gaussian gradient-noise oracle.
#[derive(Debug, Clone)]
pub struct MatrixQuadratic {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    noise_std: f64,
    solution: Option<Matrix>,
}

impl MatrixQuadratic {
    /// `a` is `q × rows`, `b` is `cols × k`, `c` is `q × k`.
    pub fn new(a: Matrix, b: Matrix, c: Matrix, noise_std: f64) -> Result<Self> {
        if c.shape() != (a.rows(), b.cols()) {
            return Err(Error::shape(
                "MatrixQuadratic::new",
                (a.rows(), b.cols()),
                c.shape(),
            ));
        }
        if !(noise_std.is_finite() && noise_std >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise_std must be nonnegative, got {noise_std}"
            )));
        }
        Ok(MatrixQuadratic {
            a,
            b,
            c,
            noise_std,
            solution: None,
        })
    }

    /// Random well-conditioned `a`, `b` and a target `c = a W* b` whose
    /// minimizer `W*` has the requested rank (`rank = 0` or `rank >= min`
    /// gives a dense full-rank `W*`).
    pub fn planted(
        rows: usize,
        cols: usize,
        rank: usize,
        noise_std: f64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(
                "problem dimensions must be positive".into(),
            ));
        }
        let near_identity = |n: usize, rng: &mut RngStream| {
            let g = gaussian_matrix(n, n, rng);
            let scale = 0.5 / (n as f64).sqrt();
            Matrix::from_fn(
                n,
                n,
                |i, j| if i == j { 1.0 } else { 0.0 } + scale * g[(i, j)],
            )
        };
        let a = near_identity(rows, rng);
        let b = near_identity(cols, rng);
        let w_star = if rank == 0 || rank >= rows.min(cols) {
            gaussian_matrix(rows, cols, rng)
        } else {
            let x = gaussian_matrix(rows, rank, rng);
            let y = gaussian_matrix(cols, rank, rng);
            matmul_nt(&x, &y)?.scale(1.0 / (rank as f64).sqrt())
        };
        let c = matmul(&matmul(&a, &w_star)?, &b)?;
        let mut q = MatrixQuadratic::new(a, b, c, noise_std)?;
        q.solution = Some(w_star);
        Ok(q)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// The planted minimizer, when the problem was built by [`Self::planted`].
    pub fn solution(&self) -> Option<&Matrix> {
        self.solution.as_ref()
    }

    /// Gradient Lipschitz constant `σ_max(a)² σ_max(b)²`.
    pub fn smoothness(&self) -> Result<f64> {
        let sa = svd_small(&self.a)?.s[0];
        let sb = svd_small(&self.b)?.s[0];
        Ok(sa * sa * sb * sb)
    }

    fn residual(&self, w: &Matrix) -> Result<Matrix> {
        w.expect_shape("MatrixQuadratic", self.param_shape())?;
        matmul(&matmul(&self.a, w)?, &self.b)?.sub(&self.c)
    }
}

impl Problem for MatrixQuadratic {
    fn param_shape(&self) -> (usize, usize) {
        (self.a.cols(), self.b.rows())
    }

    fn loss(&self, w: &Matrix) -> Result<f64> {
        let r = frob_norm(&self.residual(w)?);
        Ok(0.5 * r * r)
    }

    fn grad(&self, w: &Matrix) -> Result<Matrix> {
        let r = self.residual(w)?;
        matmul_nt(&matmul_tn(&self.a, &r)?, &self.b)
    }

    /// Exact gradient plus i.i.d. `N(0, σ²/b)` noise per entry.
    fn stoch_grad(&self, w: &Matrix, batch_size: usize, rng: &mut RngStream) -> Result<GradSample> {
        if batch_size == 0 {
            return Err(Error::InvalidArgument(
                "batch_size must be at least 1".into(),
            ));
        }
        let mut grad = self.grad(w)?;
        if self.noise_std > 0.0 {
            let sd = self.noise_std / (batch_size as f64).sqrt();
            grad.as_mut_slice()
                .iter_mut()
                .for_each(|x| *x += sd * rng.next_gaussian());
        }
        Ok(GradSample {
            grad,
            batch_indices: Vec::new(),
            loss_value: self.loss(w)?,
        })
    }
}

/// Binary logistic regression. The parameter is `classes × features`; only
/// its first row produces logits, the remaining rows see only the l2 term.
#[derive(Debug, Clone)]
pub struct LogisticTask {
    features: Matrix,
    labels: Vec<f64>,
    classes: usize,
    l2_reg: f64,
}

impl LogisticTask {
    pub fn new(features: Matrix, labels: Vec<f64>, classes: usize, l2_reg: f64) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} samples",
                labels.len(),
                features.rows()
            )));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
        }
        if classes == 0 {
            return Err(Error::InvalidArgument("classes must be at least 1".into()));
        }
        if !(l2_reg.is_finite() && l2_reg >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "l2_reg must be nonnegative, got {l2_reg}"
            )));
        }
        Ok(LogisticTask {
            features,
            labels,
            classes,
            l2_reg,
        })
    }

    /// Gaussian features; labels drawn from a logistic model with a random
    /// ground-truth weight vector.
    pub fn synthetic(
        samples: usize,
        features: usize,
        classes: usize,
        l2_reg: f64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if samples == 0 || features == 0 {
            return Err(Error::InvalidArgument(
                "samples and features must be positive".into(),
            ));
        }
        let x = gaussian_matrix(samples, features, rng);
        let truth: Vec<f64> = (0..features).map(|_| rng.next_gaussian()).collect();
        let labels = (0..samples)
            .map(|i| {
                let z: f64 = x.row(i).iter().zip(&truth).map(|(a, b)| a * b).sum();
                if rng.next_f64() < sigmoid(z) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        LogisticTask::new(x, labels, classes, l2_reg)
    }

    /// Dense CSV without a header: one sample per row, last column the 0/1 label.
    pub fn from_csv(path: &Path, classes: usize, l2_reg: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        let mut data = Vec::new();
        let mut labels = Vec::new();
        let mut width = None;
        for (line, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            let values = rec
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("row {}: {e}", line + 1),
                })?;
            if values.len() < 2 || *width.get_or_insert(values.len()) != values.len() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("row {} has {} columns", line + 1, values.len()),
                });
            }
            let (label, row) = values.split_last().expect("at least two columns");
            labels.push(*label);
            data.extend_from_slice(row);
        }
        let n = width.ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            message: "empty dataset".into(),
        })? - 1;
        let features = Matrix::from_vec(labels.len(), n, data)?;
        LogisticTask::new(features, labels, classes, l2_reg)
    }

    pub fn samples(&self) -> usize {
        self.features.rows()
    }

    fn logit(&self, w: &Matrix, i: usize) -> f64 {
        self.features
            .row(i)
            .iter()
            .zip(w.row(0))
            .map(|(x, w)| x * w)
            .sum()
    }

    fn batch_loss(&self, w: &Matrix, idx: impl Iterator<Item = usize> + Clone) -> f64 {
        let count = idx.clone().count() as f64;
        let data: f64 = idx
            .map(|i| {
                let z = self.logit(w, i);
                softplus(z) - self.labels[i] * z
            })
            .sum::<f64>()
            / count;
        let reg = frob_norm(w);
        data + 0.5 * self.l2_reg * reg * reg
    }

    fn batch_grad(&self, w: &Matrix, idx: impl Iterator<Item = usize> + Clone) -> Matrix {
        let count = idx.clone().count() as f64;
        let mut g = w.scale(self.l2_reg);
        let n = self.features.cols();
        let mut row0 = vec![0.0; n];
        for i in idx {
            let err = sigmoid(self.logit(w, i)) - self.labels[i];
            for (acc, x) in row0.iter_mut().zip(self.features.row(i)) {
                *acc += err * x;
            }
        }
        for (j, acc) in row0.into_iter().enumerate() {
            g[(0, j)] += acc / count;
        }
        g
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl Problem for LogisticTask {
    fn param_shape(&self) -> (usize, usize) {
        (self.classes, self.features.cols())
    }

    fn loss(&self, w: &Matrix) -> Result<f64> {
        w.expect_shape("LogisticTask", self.param_shape())?;
        Ok(self.batch_loss(w, 0..self.samples()))
    }

    fn grad(&self, w: &Matrix) -> Result<Matrix> {
        w.expect_shape("LogisticTask", self.param_shape())?;
        Ok(self.batch_grad(w, 0..self.samples()))
    }

    /// Mini-batch of distinct samples drawn uniformly; batches of different
    /// calls are independent.
    fn stoch_grad(&self, w: &Matrix, batch_size: usize, rng: &mut RngStream) -> Result<GradSample> {
        w.expect_shape("LogisticTask", self.param_shape())?;
        let n = self.samples();
        if batch_size == 0 || batch_size > n {
            return Err(Error::InvalidArgument(format!(
                "batch_size {batch_size} must lie in 1..={n}"
            )));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        for k in 0..batch_size {
            let j = k + rng.next_below((n - k) as u64) as usize;
            pool.swap(k, j);
        }
        pool.truncate(batch_size);
        let grad = self.batch_grad(w, pool.iter().copied());
        let loss_value = self.batch_loss(w, pool.iter().copied());
        Ok(GradSample {
            grad,
            batch_indices: pool,
            loss_value,
        })
    }
}

/// Problem chosen at run time.
#[derive(Debug, Clone)]
pub enum ProblemInstance {
    Quadratic(MatrixQuadratic),
    Logistic(LogisticTask),
}

impl Problem for ProblemInstance {
    fn param_shape(&self) -> (usize, usize) {
        match self {
            ProblemInstance::Quadratic(p) => p.param_shape(),
            ProblemInstance::Logistic(p) => p.param_shape(),
        }
    }

    fn loss(&self, w: &Matrix) -> Result<f64> {
        match self {
            ProblemInstance::Quadratic(p) => p.loss(w),
            ProblemInstance::Logistic(p) => p.loss(w),
        }
    }

    fn grad(&self, w: &Matrix) -> Result<Matrix> {
        match self {
            ProblemInstance::Quadratic(p) => p.grad(w),
            ProblemInstance::Logistic(p) => p.grad(w),
        }
    }

    fn stoch_grad(&self, w: &Matrix, batch_size: usize, rng: &mut RngStream) -> Result<GradSample> {
        match self {
            ProblemInstance::Quadratic(p) => p.stoch_grad(w, batch_size, rng),
            ProblemInstance::Logistic(p) => p.stoch_grad(w, batch_size, rng),
        }
    }
}
