//! Exact AdamW and its momentum-compressed counterpart.

use crate::compress::correct_nonneg_with_report;
use crate::error::Result;
use crate::linalg::{frob_norm, Matrix};
use crate::optim::{check_step_inputs, compressed_width, HyperParams, StepReport};
use crate::rng::RngStream;
use crate::rsvd::{reconstruct, rsvd, FactoredMomentum};

#[derive(Debug, Clone, PartialEq)]
pub struct AdamWState {
    pub m: Matrix,
    /// Entrywise nonnegative.
    pub v: Matrix,
    /// Index of the next step, starting at 1.
    pub t: u64,
}

impl AdamWState {
    pub fn new(rows: usize, cols: usize) -> Self {
        AdamWState {
            m: Matrix::zeros(rows, cols),
            v: Matrix::zeros(rows, cols),
            t: 1,
        }
    }
}

/// AdamW state whose two moments are kept as RSVD factors between steps.
#[derive(Debug, Clone, PartialEq)]
pub struct MLorcAdamWState {
    pub fm: FactoredMomentum,
    pub fv: FactoredMomentum,
    pub t: u64,
}

impl MLorcAdamWState {
    pub fn new(rows: usize, cols: usize, rank: usize, oversample: usize) -> Self {
        let l = compressed_width(rows, cols, rank, oversample);
        MLorcAdamWState {
            fm: FactoredMomentum::zeros(rows, cols, l),
            fv: FactoredMomentum::zeros(rows, cols, l),
            t: 1,
        }
    }
}

/// Bias-corrected AdamW update with decoupled weight decay, applied in place.
pub(crate) fn apply_adam_update(w: &mut Matrix, m: &Matrix, v: &Matrix, t: u64, hp: &HyperParams) {
    let step = t as i32;
    let bc1 = 1.0 - hp.beta1.powi(step);
    let bc2 = 1.0 - hp.beta2.powi(step);
    for ((wi, &mi), &vi) in w
        .as_mut_slice()
        .iter_mut()
        .zip(m.as_slice())
        .zip(v.as_slice())
    {
        let m_hat = mi / bc1;
        let v_hat = vi / bc2;
        *wi -= hp.alpha * (m_hat / (v_hat.sqrt() + hp.epsilon) + hp.weight_decay * *wi);
    }
}

/// `beta * prev + (1 - beta) * f(g)`, entrywise.
pub(crate) fn ema(prev: &Matrix, g: &Matrix, beta: f64, f: impl Fn(f64) -> f64) -> Matrix {
    prev.zip_map(g, |p, x| beta * p + (1.0 - beta) * f(x))
        .expect("shapes checked by caller")
}

pub fn adamw_step(
    w: &mut Matrix,
    g: &Matrix,
    state: &mut AdamWState,
    hp: &HyperParams,
) -> Result<StepReport> {
    check_step_inputs(w, g)?;
    state.m.expect_shape("adamw_step state", w.shape())?;

    state.m = ema(&state.m, g, hp.beta1, |x| x);
    state.v = ema(&state.v, g, hp.beta2, |x| x * x);
    apply_adam_update(w, &state.m, &state.v, state.t, hp);
    state.t += 1;

    Ok(StepReport {
        first_moment: Some(state.m.clone()),
        second_moment: Some(state.v.clone()),
        ..StepReport::default()
    })
}

/// One step of momentum-compressed AdamW.
///
/// The stored factors are reconstructed, the second moment is repaired to be
/// nonnegative, both moments take the usual exponential update, and the new
/// moments are re-compressed for the next step. The weight update itself uses
/// the uncompressed moments of this step.
pub fn mlorc_adamw_step(
    w: &mut Matrix,
    g: &Matrix,
    state: &mut MLorcAdamWState,
    hp: &HyperParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    check_step_inputs(w, g)?;
    let (rows, cols) = w.shape();
    state
        .fm
        .u
        .expect_shape("mlorc_adamw_step state", (rows, state.fm.width()))?;
    let l = compressed_width(rows, cols, hp.rank, hp.oversample);
    if l != state.fm.width() || l != state.fv.width() {
        return Err(crate::Error::InvalidArgument(format!(
            "state holds {} factor columns but rank/oversample give {l}",
            state.fm.width()
        )));
    }

    let m_prev = reconstruct(&state.fm)?;
    let (v_prev, correction) = correct_nonneg_with_report(&reconstruct(&state.fv)?);
    let v_min = v_prev
        .as_slice()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let m = ema(&m_prev, g, hp.beta1, |x| x);
    let v = ema(&v_prev, g, hp.beta2, |x| x * x);

    state.fm = rsvd(&m, hp.rank, hp.oversample, rng)?;
    state.fv = rsvd(&v, hp.rank, hp.oversample, rng)?;
    let err_m = frob_norm(&reconstruct(&state.fm)?.sub(&m)?);
    let err_v = frob_norm(&reconstruct(&state.fv)?.sub(&v)?);

    apply_adam_update(w, &m, &v, state.t, hp);
    state.t += 1;

    Ok(StepReport {
        compression_error_m: Some(err_m),
        compression_error_v: Some(err_v),
        correction: Some(correction),
        corrected_v_min: Some(v_min),
        first_moment: Some(m),
        second_moment: Some(v),
    })
}
