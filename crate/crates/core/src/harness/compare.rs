use crate::error::{Error, Result};
use crate::harness::run::{RunOutput, RunRecord};
use crate::linalg::{frob_norm, Matrix};

/// Relative divergence between two runs, step by step.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub steps: Vec<usize>,
    pub loss_rel: Vec<f64>,
    /// `‖W_a − W_b‖_F / max(‖W_a‖_F, ‖W_b‖_F)`; present only when weight
    /// snapshots were available.
    pub weight_rel: Option<Vec<f64>>,
    pub max_loss_rel: f64,
    pub mean_loss_rel: f64,
    pub max_weight_rel: Option<f64>,
    pub mean_weight_rel: Option<f64>,
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn rel_matrix(a: &Matrix, b: &Matrix) -> Result<f64> {
    let scale = frob_norm(a).max(frob_norm(b));
    let diff = frob_norm(&a.sub(b)?);
    Ok(if scale == 0.0 { 0.0 } else { diff / scale })
}

fn summarize(v: &[f64]) -> (f64, f64) {
    let max = v.iter().copied().fold(0.0, f64::max);
    let mean = if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    };
    (max, mean)
}

/// Compares loss columns of two record lists taken at the same steps.
pub fn compare_runs(a: &[RunRecord], b: &[RunRecord]) -> Result<DivergenceReport> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "runs have {} and {} records",
            a.len(),
            b.len()
        )));
    }
    if let Some((x, y)) = a.iter().zip(b).find(|(x, y)| x.step != y.step) {
        return Err(Error::InvalidArgument(format!(
            "record steps differ: {} vs {}",
            x.step, y.step
        )));
    }
    let loss_rel: Vec<f64> = a.iter().zip(b).map(|(x, y)| rel(x.loss, y.loss)).collect();
    let (max_loss_rel, mean_loss_rel) = summarize(&loss_rel);
    Ok(DivergenceReport {
        steps: a.iter().map(|r| r.step).collect(),
        loss_rel,
        weight_rel: None,
        max_loss_rel,
        mean_loss_rel,
        max_weight_rel: None,
        mean_weight_rel: None,
    })
}

/// Like [`compare_runs`], adding weight deltas from the in-memory snapshots.
pub fn compare_outputs(a: &RunOutput, b: &RunOutput) -> Result<DivergenceReport> {
    let mut report = compare_runs(&a.records, &b.records)?;
    let weight_rel = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| rel_matrix(x, y))
        .collect::<Result<Vec<_>>>()?;
    let (max, mean) = summarize(&weight_rel);
    report.weight_rel = Some(weight_rel);
    report.max_weight_rel = Some(max);
    report.mean_weight_rel = Some(mean);
    Ok(report)
}
