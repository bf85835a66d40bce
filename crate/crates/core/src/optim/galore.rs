//! Gradient-projection AdamW baseline: Adam runs on `Pᵀg` in an `r`-dimensional
//! row subspace and updates are projected back with `P`.

use crate::error::{Error, Result};
use crate::linalg::{matmul, matmul_tn, svd_small, Matrix};
use crate::optim::adamw::ema;
use crate::optim::{check_step_inputs, HyperParams, StepReport};

#[derive(Debug, Clone, PartialEq)]
pub struct GaLoreState {
    /// `rows × r`, orthonormal columns.
    pub projector: Matrix,
    /// `r × cols`.
    pub m_low: Matrix,
    /// `r × cols`, nonnegative.
    pub v_low: Matrix,
    pub t: u64,
}

impl GaLoreState {
    pub fn new(rows: usize, cols: usize, rank: usize) -> Result<Self> {
        if rank == 0 || rank > rows.min(cols) {
            return Err(Error::InvalidArgument(format!(
                "projection rank {rank} must lie in 1..={}",
                rows.min(cols)
            )));
        }
        Ok(GaLoreState {
            projector: Matrix::from_fn(rows, rank, |i, j| if i == j { 1.0 } else { 0.0 }),
            m_low: Matrix::zeros(rank, cols),
            v_low: Matrix::zeros(rank, cols),
            t: 1,
        })
    }

    pub fn rank(&self) -> usize {
        self.projector.cols()
    }
}

pub fn galore_adamw_step(
    w: &mut Matrix,
    g: &Matrix,
    state: &mut GaLoreState,
    hp: &HyperParams,
) -> Result<StepReport> {
    check_step_inputs(w, g)?;
    let (rows, cols) = w.shape();
    let r = state.rank();
    state
        .projector
        .expect_shape("galore_adamw_step state", (rows, r))?;
    if hp.rank != r {
        return Err(Error::InvalidArgument(format!(
            "state projects to rank {r} but hyperparameters ask for {}",
            hp.rank
        )));
    }
    if hp.galore_update_freq == 0 {
        return Err(Error::config("galore_update_freq", "must be at least 1"));
    }

    if (state.t - 1).is_multiple_of(hp.galore_update_freq as u64) {
        state.projector = svd_small(g)?.u.leading_cols(r);
    }

    let projected = matmul_tn(&state.projector, g)?;
    state.m_low = ema(&state.m_low, &projected, hp.beta1, |x| x);
    state.v_low = ema(&state.v_low, &projected, hp.beta2, |x| x * x);

    let step = state.t as i32;
    let bc1 = 1.0 - hp.beta1.powi(step);
    let bc2 = 1.0 - hp.beta2.powi(step);
    let low_update = state.m_low.zip_map(&state.v_low, |m, v| {
        (m / bc1) / ((v / bc2).sqrt() + hp.epsilon)
    })?;
    let update = matmul(&state.projector, &low_update)?;
    debug_assert_eq!(update.shape(), (rows, cols));

    for (wi, &ui) in w.as_mut_slice().iter_mut().zip(update.as_slice()) {
        *wi -= hp.alpha * (ui + hp.weight_decay * *wi);
    }
    state.t += 1;

    Ok(StepReport::default())
}
