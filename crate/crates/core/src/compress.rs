//! Non-negativity repair for a reconstructed second moment.
//!
//! Low-rank reconstruction of an entrywise-positive matrix can produce small
//! negative entries. They are replaced by the mean magnitude of all negative
//! entries, while nonnegative entries pass through unchanged.

use crate::linalg::Matrix;

/// Summary of the negative part of a reconstructed second moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionReport {
    /// Mean of `|x|` over strictly negative entries; 0 when there are none.
    pub zeta: f64,
    pub negative_count: usize,
}

pub fn zeta(v_tilde: &Matrix) -> CorrectionReport {
    let (sum, count) = v_tilde
        .as_slice()
        .iter()
        .filter(|&&x| x < 0.0)
        .fold((0.0, 0usize), |(s, c), &x| (s - x, c + 1));
    CorrectionReport {
        zeta: if count == 0 { 0.0 } else { sum / count as f64 },
        negative_count: count,
    }
}

/// `ReLU(v) + zeta(v) · 1{v < 0}`, entrywise.
pub fn correct_nonneg(v_tilde: &Matrix) -> Matrix {
    correct_nonneg_with_report(v_tilde).0
}

pub fn correct_nonneg_with_report(v_tilde: &Matrix) -> (Matrix, CorrectionReport) {
    let report = zeta(v_tilde);
    if report.negative_count == 0 {
        return (v_tilde.clone(), report);
    }
    let fill = report.zeta;
    (v_tilde.map(|x| if x < 0.0 { fill } else { x }), report)
}
