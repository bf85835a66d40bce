//! The optimizer family and a uniform step entry point.
//!
//! Every step function updates the weights and its state in place and
//! returns a [`StepReport`] with the diagnostics the harness records.

mod adamw;
mod galore;
mod hyper;
mod lion;

use std::fmt;
use std::str::FromStr;

pub use adamw::{adamw_step, mlorc_adamw_step, AdamWState, MLorcAdamWState};
pub use galore::{galore_adamw_step, GaLoreState};
pub use hyper::HyperParams;
pub use lion::{lion_step, mlorc_lion_step, sign0, LionState, MLorcLionState};

use crate::compress::CorrectionReport;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::RngStream;

/// Per-step diagnostics. Fields an optimizer does not produce are `None`.
#[derive(Debug, Clone, Default)]
pub struct StepReport {
    /// `‖m̃ − m‖_F` for the moment just compressed, i.e. the error the next
    /// step's reconstruction will carry.
    pub compression_error_m: Option<f64>,
    pub compression_error_v: Option<f64>,
    /// Repair applied to the reconstructed second moment.
    pub correction: Option<CorrectionReport>,
    /// Smallest entry of the repaired second moment that entered the average.
    pub corrected_v_min: Option<f64>,
    /// Uncompressed first moment after this step's update.
    pub first_moment: Option<Matrix>,
    pub second_moment: Option<Matrix>,
}

/// Factor column count `l = min(r + p, rows, cols)`.
pub fn compressed_width(rows: usize, cols: usize, rank: usize, oversample: usize) -> usize {
    (rank + oversample).min(rows.min(cols))
}

pub(crate) fn check_step_inputs(w: &Matrix, g: &Matrix) -> Result<()> {
    g.expect_shape("optimizer step gradient", w.shape())?;
    if !g.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    AdamW,
    Lion,
    MLorcAdamW,
    MLorcLion,
    GaLoreAdamW,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 5] = [
        OptimizerKind::AdamW,
        OptimizerKind::Lion,
        OptimizerKind::MLorcAdamW,
        OptimizerKind::MLorcLion,
        OptimizerKind::GaLoreAdamW,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::AdamW => "adamw",
            OptimizerKind::Lion => "lion",
            OptimizerKind::MLorcAdamW => "mlorc-adamw",
            OptimizerKind::MLorcLion => "mlorc-lion",
            OptimizerKind::GaLoreAdamW => "galore-adamw",
        }
    }

    pub fn is_lion_family(self) -> bool {
        matches!(self, OptimizerKind::Lion | OptimizerKind::MLorcLion)
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::config(
                    "optimizer.kind",
                    format!(
                        "unknown optimizer `{s}`, expected one of adamw, lion, mlorc-adamw, mlorc-lion, galore-adamw"
                    ),
                )
            })
    }
}

/// Persistent state of any optimizer in the family.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerState {
    AdamW(AdamWState),
    Lion(LionState),
    MLorcAdamW(MLorcAdamWState),
    MLorcLion(MLorcLionState),
    GaLoreAdamW(GaLoreState),
}

impl OptimizerState {
    /// Fresh state for a `rows × cols` parameter.
    pub fn new(kind: OptimizerKind, rows: usize, cols: usize, hp: &HyperParams) -> Result<Self> {
        Ok(match kind {
            OptimizerKind::AdamW => OptimizerState::AdamW(AdamWState::new(rows, cols)),
            OptimizerKind::Lion => OptimizerState::Lion(LionState::new(rows, cols)),
            OptimizerKind::MLorcAdamW => {
                OptimizerState::MLorcAdamW(MLorcAdamWState::new(rows, cols, hp.rank, hp.oversample))
            }
            OptimizerKind::MLorcLion => {
                OptimizerState::MLorcLion(MLorcLionState::new(rows, cols, hp.rank, hp.oversample))
            }
            OptimizerKind::GaLoreAdamW => {
                OptimizerState::GaLoreAdamW(GaLoreState::new(rows, cols, hp.rank)?)
            }
        })
    }

    pub fn kind(&self) -> OptimizerKind {
        match self {
            OptimizerState::AdamW(_) => OptimizerKind::AdamW,
            OptimizerState::Lion(_) => OptimizerKind::Lion,
            OptimizerState::MLorcAdamW(_) => OptimizerKind::MLorcAdamW,
            OptimizerState::MLorcLion(_) => OptimizerKind::MLorcLion,
            OptimizerState::GaLoreAdamW(_) => OptimizerKind::GaLoreAdamW,
        }
    }

    /// Index of the next step.
    pub fn step_count(&self) -> u64 {
        match self {
            OptimizerState::AdamW(s) => s.t,
            OptimizerState::Lion(s) => s.t,
            OptimizerState::MLorcAdamW(s) => s.t,
            OptimizerState::MLorcLion(s) => s.t,
            OptimizerState::GaLoreAdamW(s) => s.t,
        }
    }

    /// Lion family only: start the momentum from the first gradient.
    pub fn set_warm_start(&mut self, on: bool) {
        match self {
            OptimizerState::Lion(s) => s.warm_start = on,
            OptimizerState::MLorcLion(s) => s.warm_start = on,
            _ => {}
        }
    }
}

/// Number of real numbers held in an optimizer's moment structures. Singular
/// value vectors count as absorbed into a neighbouring factor.
pub trait StateFootprint {
    fn stored_elements(&self) -> usize;
}

impl StateFootprint for AdamWState {
    fn stored_elements(&self) -> usize {
        self.m.len() + self.v.len()
    }
}

impl StateFootprint for LionState {
    fn stored_elements(&self) -> usize {
        self.m.len()
    }
}

impl StateFootprint for MLorcAdamWState {
    fn stored_elements(&self) -> usize {
        self.fm.stored_elements() + self.fv.stored_elements()
    }
}

impl StateFootprint for MLorcLionState {
    fn stored_elements(&self) -> usize {
        self.fm.stored_elements()
    }
}

impl StateFootprint for GaLoreState {
    fn stored_elements(&self) -> usize {
        self.projector.len() + self.m_low.len() + self.v_low.len()
    }
}

impl StateFootprint for OptimizerState {
    fn stored_elements(&self) -> usize {
        match self {
            OptimizerState::AdamW(s) => s.stored_elements(),
            OptimizerState::Lion(s) => s.stored_elements(),
            OptimizerState::MLorcAdamW(s) => s.stored_elements(),
            OptimizerState::MLorcLion(s) => s.stored_elements(),
            OptimizerState::GaLoreAdamW(s) => s.stored_elements(),
        }
    }
}

/// Runs one step of `kind`, which must match the variant of `state`.
/// Non-compressing optimizers leave `rng` untouched.
pub fn optimizer_step(
    kind: OptimizerKind,
    w: &mut Matrix,
    g: &Matrix,
    state: &mut OptimizerState,
    hp: &HyperParams,
    rng: &mut RngStream,
) -> Result<StepReport> {
    match (kind, state) {
        (OptimizerKind::AdamW, OptimizerState::AdamW(s)) => adamw_step(w, g, s, hp),
        (OptimizerKind::Lion, OptimizerState::Lion(s)) => lion_step(w, g, s, hp),
        (OptimizerKind::MLorcAdamW, OptimizerState::MLorcAdamW(s)) => {
            mlorc_adamw_step(w, g, s, hp, rng)
        }
        (OptimizerKind::MLorcLion, OptimizerState::MLorcLion(s)) => {
            mlorc_lion_step(w, g, s, hp, rng)
        }
        (OptimizerKind::GaLoreAdamW, OptimizerState::GaLoreAdamW(s)) => {
            galore_adamw_step(w, g, s, hp)
        }
        (kind, _) => Err(Error::StateMismatch {
            kind: kind.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rsvd::gaussian_matrix;

    #[test]
    fn dispatch_matches_direct_call_bitwise() {
        let hp = HyperParams::default();
        let mut rng = RngStream::new(1);
        let g = gaussian_matrix(5, 4, &mut rng);
        let w0 = gaussian_matrix(5, 4, &mut rng);
        let (mut wa, mut wb) = (w0.clone(), w0);
        let mut direct = AdamWState::new(5, 4);
        let mut state = OptimizerState::new(OptimizerKind::AdamW, 5, 4, &hp).unwrap();
        for _ in 0..3 {
            adamw_step(&mut wa, &g, &mut direct, &hp).unwrap();
            optimizer_step(OptimizerKind::AdamW, &mut wb, &g, &mut state, &hp, &mut rng).unwrap();
        }
        assert_eq!(wa, wb);
        assert_eq!(state, OptimizerState::AdamW(direct));
    }

    #[test]
    fn unknown_kind_is_config_error() {
        let err = "sgd".parse::<OptimizerKind>().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "optimizer.kind"));
        for k in OptimizerKind::ALL {
            assert_eq!(k.as_str().parse::<OptimizerKind>().unwrap(), k);
        }
    }

    #[test]
    fn kind_state_mismatch_rejected() {
        let hp = HyperParams::default();
        let mut state = OptimizerState::new(OptimizerKind::Lion, 3, 3, &hp).unwrap();
        let mut w = Matrix::zeros(3, 3);
        let err = optimizer_step(
            OptimizerKind::AdamW,
            &mut w,
            &Matrix::zeros(3, 3),
            &mut state,
            &hp,
            &mut RngStream::new(0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::StateMismatch { .. }));
    }

    #[test]
    fn counters_advance_once_per_dispatch() {
        let hp = HyperParams {
            rank: 2,
            ..HyperParams::default()
        };
        let mut rng = RngStream::new(2);
        for kind in OptimizerKind::ALL {
            let mut state = OptimizerState::new(kind, 6, 5, &hp).unwrap();
            let mut w = Matrix::zeros(6, 5);
            for n in 1..=4u64 {
                let g = gaussian_matrix(6, 5, &mut rng);
                optimizer_step(kind, &mut w, &g, &mut state, &hp, &mut rng).unwrap();
                assert_eq!(state.step_count(), n + 1, "{kind}");
                assert_eq!(state.kind(), kind);
            }
        }
    }
}
