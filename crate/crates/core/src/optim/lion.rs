//! Lion and momentum-compressed Lion.

use crate::error::Result;
use crate::linalg::{frob_norm, Matrix};
use crate::optim::adamw::ema;
use crate::optim::{check_step_inputs, compressed_width, HyperParams, StepReport};
use crate::rng::RngStream;
use crate::rsvd::{reconstruct, rsvd, FactoredMomentum};

#[derive(Debug, Clone, PartialEq)]
pub struct LionState {
    pub m: Matrix,
    pub t: u64,
    /// Use the first gradient as the initial momentum instead of zero.
    pub warm_start: bool,
}

impl LionState {
    pub fn new(rows: usize, cols: usize) -> Self {
        LionState {
            m: Matrix::zeros(rows, cols),
            t: 1,
            warm_start: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MLorcLionState {
    pub fm: FactoredMomentum,
    pub t: u64,
    pub warm_start: bool,
}

impl MLorcLionState {
    pub fn new(rows: usize, cols: usize, rank: usize, oversample: usize) -> Self {
        MLorcLionState {
            fm: FactoredMomentum::zeros(rows, cols, compressed_width(rows, cols, rank, oversample)),
            t: 1,
            warm_start: false,
        }
    }
}

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn apply_sign_update(w: &mut Matrix, c: &Matrix, alpha: f64) {
    for (wi, &ci) in w.as_mut_slice().iter_mut().zip(c.as_slice()) {
        *wi -= alpha * sign0(ci);
    }
}

pub fn lion_step(
    w: &mut Matrix,
    g: &Matrix,
    state: &mut LionState,
    hp: &HyperParams,
) -> Result<StepReport> {
    check_step_inputs(w, g)?;
    state.m.expect_shape("lion_step state", w.shape())?;
    if state.warm_start && state.t == 1 {
        state.m = g.clone();
    }
    let c = ema(&state.m, g, hp.beta1, |x| x);
    state.m = ema(&state.m, g, hp.beta2, |x| x);
    apply_sign_update(w, &c, hp.alpha);
    state.t += 1;
    Ok(StepReport {
        first_moment: Some(state.m.clone()),
        ..StepReport::default()
    })
}

/// One step of momentum-compressed Lion. The interpolation `c` and the new
/// momentum both start from the reconstructed previous momentum; only the
/// new momentum is compressed.
pub fn mlorc_lion_step(
    w: &mut Matrix,
    g: &Matrix,
    state: &mut MLorcLionState,
    hp: &HyperParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    check_step_inputs(w, g)?;
    let (rows, cols) = w.shape();
    state
        .fm
        .u
        .expect_shape("mlorc_lion_step state", (rows, state.fm.width()))?;
    let l = compressed_width(rows, cols, hp.rank, hp.oversample);
    if l != state.fm.width() {
        return Err(crate::Error::InvalidArgument(format!(
            "state holds {} factor columns but rank/oversample give {l}",
            state.fm.width()
        )));
    }

    let m_prev = if state.warm_start && state.t == 1 {
        g.clone()
    } else {
        reconstruct(&state.fm)?
    };
    let c = ema(&m_prev, g, hp.beta1, |x| x);
    let m = ema(&m_prev, g, hp.beta2, |x| x);
    state.fm = rsvd(&m, hp.rank, hp.oversample, rng)?;
    let err_m = frob_norm(&reconstruct(&state.fm)?.sub(&m)?);

    apply_sign_update(w, &c, hp.alpha);
    state.t += 1;

    Ok(StepReport {
        compression_error_m: Some(err_m),
        first_moment: Some(m),
        ..StepReport::default()
    })
}
