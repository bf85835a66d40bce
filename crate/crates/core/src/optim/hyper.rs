use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters shared by every optimizer in the family. Fields that a
/// given optimizer does not use are ignored by it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Learning rate.
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Decoupled weight decay.
    pub weight_decay: f64,
    pub epsilon: f64,
    /// Target rank `r` of the compressed or projected moments.
    pub rank: usize,
    /// RSVD oversampling `p`.
    pub oversample: usize,
    pub batch_size: usize,
    /// Projector refresh period for the projected baseline.
    pub galore_update_freq: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            alpha: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            weight_decay: 0.0,
            epsilon: 1e-8,
            rank: 4,
            oversample: 0,
            batch_size: 1,
            galore_update_freq: 200,
        }
    }
}

impl HyperParams {
    /// Checks ranges; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    name,
                    format!("must be positive and finite, got {x}"),
                ))
            }
        };
        positive("alpha", self.alpha)?;
        positive("epsilon", self.epsilon)?;
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::config(
                    name,
                    format!("must lie in [0, 1), got {beta}"),
                ));
            }
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::config(
                "weight_decay",
                format!("must be nonnegative, got {}", self.weight_decay),
            ));
        }
        for (name, v) in [
            ("rank", self.rank),
            ("batch_size", self.batch_size),
            ("galore_update_freq", self.galore_update_freq),
        ] {
            if v == 0 {
                return Err(Error::config(name, "must be at least 1"));
            }
        }
        Ok(())
    }
}
