//! Spectral concentration, stationarity traces and optimizer-state memory
//! accounting. Spectra always come from the exact SVD.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{l11_norm, svd_small, Matrix};
use crate::optim::StateFootprint;

/// Share of the singular-value mass held by the top `k` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRatio {
    pub k: usize,
    pub ratio: f64,
}

pub const DEFAULT_SPECTRAL_K: usize = 8;

/// `Σ_{i≤k} σ_i / Σ_i σ_i`.
pub fn topk_ratio(a: &Matrix, k: usize) -> Result<SpectralRatio> {
    let min_dim = a.rows().min(a.cols());
    if k == 0 || k > min_dim {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in 1..={min_dim}"
        )));
    }
    let s = svd_small(a)?.s;
    let total: f64 = s.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain(
            "top-k singular ratio of a zero matrix".into(),
        ));
    }
    let top: f64 = s[..k].iter().sum();
    Ok(SpectralRatio {
        k,
        ratio: (top / total).min(1.0),
    })
}

/// Methods covered by the memory comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemoryMethod {
    FullAdamW,
    LoraAdamW,
    GaLore,
    MLorcAdamW,
}

impl MemoryMethod {
    pub const ALL: [MemoryMethod; 4] = [
        MemoryMethod::FullAdamW,
        MemoryMethod::LoraAdamW,
        MemoryMethod::GaLore,
        MemoryMethod::MLorcAdamW,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MemoryMethod::FullAdamW => "full-adamw",
            MemoryMethod::LoraAdamW => "lora-adamw",
            MemoryMethod::GaLore => "galore",
            MemoryMethod::MLorcAdamW => "mlorc-adamw",
        }
    }
}

impl fmt::Display for MemoryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MemoryMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MemoryMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown memory method `{s}`")))
    }
}

/// Element counts (not bytes) for one `m × n` weight matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryCount {
    pub method: MemoryMethod,
    pub weights: usize,
    pub optimizer_states: usize,
}

pub fn memory_count(method: MemoryMethod, m: usize, n: usize, r: usize) -> Result<MemoryCount> {
    if m == 0 || n == 0 || r == 0 {
        return Err(Error::InvalidArgument(format!(
            "m, n, r must be positive, got ({m}, {n}, {r})"
        )));
    }
    let (weights, optimizer_states) = match method {
        MemoryMethod::FullAdamW => (m * n, 2 * m * n),
        MemoryMethod::LoraAdamW => (m * n + m * r + n * r, 2 * m * r + 2 * n * r),
        MemoryMethod::GaLore => (m * n, m * r + 2 * n * r),
        MemoryMethod::MLorcAdamW => (m * n, 2 * m * r + 2 * n * r),
    };
    Ok(MemoryCount {
        method,
        weights,
        optimizer_states,
    })
}

/// AdamW moments of a LoRA adapter pair `B (m × r)`, `A (r × n)`.
///
/// Only allocated to cross-check the accounting; there is no LoRA optimizer.
#[derive(Debug, Clone)]
pub struct LoraAdamWFootprint {
    pub m_b: Matrix,
    pub v_b: Matrix,
    pub m_a: Matrix,
    pub v_a: Matrix,
}

impl LoraAdamWFootprint {
    pub fn new(m: usize, n: usize, r: usize) -> Self {
        LoraAdamWFootprint {
            m_b: Matrix::zeros(m, r),
            v_b: Matrix::zeros(m, r),
            m_a: Matrix::zeros(r, n),
            v_a: Matrix::zeros(r, n),
        }
    }
}

impl StateFootprint for LoraAdamWFootprint {
    fn stored_elements(&self) -> usize {
        self.m_b.len() + self.v_b.len() + self.m_a.len() + self.v_a.len()
    }
}

/// Real numbers actually held by an optimizer state.
pub fn measured_state_elements(state: &dyn StateFootprint) -> usize {
    state.stored_elements()
}

/// Per-step `‖∇f(W_t)‖_{1,1}` and its running mean.
#[derive(Debug, Clone, PartialEq)]
pub struct L11Trace {
    pub per_step: Vec<f64>,
    pub running_average: Vec<f64>,
}

pub fn grad_l11_trace<'a>(grads: impl IntoIterator<Item = &'a Matrix>) -> L11Trace {
    let per_step: Vec<f64> = grads.into_iter().map(l11_norm).collect();
    let mut sum = 0.0;
    let running_average = per_step
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            sum += x;
            sum / (i + 1) as f64
        })
        .collect();
    L11Trace {
        per_step,
        running_average,
    }
}
