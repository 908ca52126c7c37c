//! Behaviour of the difference-operator inequality as the step shrinks.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{norm_sq, require_admissible, require_nonzero, shifted_inner, CoeffVec};
use crate::error::{Result, UpError};
use crate::functionals::Verifier;
use crate::kernel::check_delta;
use crate::multiplier::Multiplier;
use crate::operators::DiffMode;

pub const CSV_HEADER: &str = "delta,sigma_a,sigma_b,comm_abs,residual,diff_to_derivative";

/// `δ = 2^{-k}` for `k = 0..=10`.
pub fn default_deltas() -> Vec<f64> {
    (0..=10).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub comm_abs: f64,
    /// `σ_a σ_b − ½ comm_abs`.
    pub residual: f64,
    /// `‖Pf − f′‖` for the difference operator `P`.
    pub diff_to_derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub mode: DiffMode,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells = [
                r.delta,
                r.sigma_a,
                r.sigma_b,
                r.comm_abs,
                r.residual,
                r.diff_to_derivative,
            ];
            let line: Vec<String> = cells.iter().map(|v| format_float(*v)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn min_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min)
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sorts a step list into strictly decreasing order, rejecting duplicates and
/// values outside `(0, 1]`.
pub fn normalize_deltas(deltas: &[f64]) -> Result<Vec<f64>> {
    if deltas.is_empty() {
        return Err(UpError::InvalidGrid("empty step list".into()));
    }
    for &d in deltas {
        check_delta(d)?;
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(UpError::InvalidGrid("repeated step".into()));
    }
    Ok(sorted)
}

/// `‖Pf − f′‖` with `P` the difference operator of `mode` at step `δ`.
pub fn diff_to_derivative(f: &CoeffVec, delta: f64, mode: DiffMode) -> Result<f64> {
    check_delta(delta)?;
    let p = match mode {
        DiffMode::Backward => Multiplier::backward_diff(delta),
        DiffMode::Central => Multiplier::central_diff(delta),
    };
    Ok(p.minus(&Multiplier::derivative()).norm_sq(f).sqrt())
}

/// One row per step, in decreasing order of `δ`.
pub fn delta_sweep(verifier: &Verifier, f: &CoeffVec, deltas: &[f64], mode: DiffMode) -> Result<SweepTable> {
    require_nonzero(f)?;
    require_admissible(f, verifier.tolerances().eq_tol)?;
    let deltas = normalize_deltas(deltas)?;
    let rows = deltas
        .par_iter()
        .map(|&delta| {
            let report = match mode {
                DiffMode::Backward => verifier.check_backward_up(f, delta, None, None)?,
                DiffMode::Central => verifier.check_central_up(f, delta, None, None)?,
            };
            let chain = report.chain.expect("difference checks carry chain links");
            Ok(SweepRow {
                delta,
                sigma_a: chain.sigma_a,
                sigma_b: chain.sigma_b,
                comm_abs: chain.comm_abs,
                residual: chain.sigma_a * chain.sigma_b - 0.5 * chain.comm_abs,
                diff_to_derivative: diff_to_derivative(f, delta, mode)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { mode, rows })
}

/// Least-squares slope of `ln ‖A_δ f − f′‖` against `ln δ`.
pub fn convergence_rate(f: &CoeffVec, deltas: &[f64]) -> Result<f64> {
    convergence_rate_for(f, deltas, DiffMode::Backward)
}

/// [`convergence_rate`] for either difference operator.
pub fn convergence_rate_for(f: &CoeffVec, deltas: &[f64], mode: DiffMode) -> Result<f64> {
    require_nonzero(f)?;
    let deltas = normalize_deltas(deltas)?;
    if deltas.len() < 4 {
        return Err(UpError::InvalidGrid(format!(
            "need at least 4 steps, got {}",
            deltas.len()
        )));
    }
    if deltas[0] / deltas[deltas.len() - 1] < 100.0 {
        return Err(UpError::InvalidGrid("steps must span at least two decades".into()));
    }
    let mut points = Vec::with_capacity(deltas.len());
    for &d in &deltas {
        let err = diff_to_derivative(f, d, mode)?;
        if err.is_nan() || err <= 0.0 {
            return Err(UpError::InvalidGrid(format!(
                "difference quotient is exact at step {d}"
            )));
        }
        points.push((d.ln(), err.ln()));
    }
    Ok(least_squares_slope(&points))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub delta: f64,
    pub shifted: Complex64,
    /// `|⟨f(·−δ), f⟩ − ‖f‖²|`.
    pub gap: f64,
}

/// Distance of `⟨f(·−δ), f⟩` from its `δ → 0` limit `‖f‖²`.
pub fn commutator_limit_check(f: &CoeffVec, deltas: &[f64]) -> Result<Vec<LimitRow>> {
    require_nonzero(f)?;
    let nf = norm_sq(f);
    normalize_deltas(deltas)?
        .into_iter()
        .map(|delta| {
            let shifted = shifted_inner(f, f, delta)?;
            Ok(LimitRow {
                delta,
                shifted,
                gap: (shifted - nf).norm(),
            })
        })
        .collect()
}
