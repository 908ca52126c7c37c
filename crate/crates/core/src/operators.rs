//! The difference, multiplication, derivative and shift operators acting on
//! sample vectors.
//!
//! Integer shifts act exactly on samples. A non-integer shift leaves the
//! integer lattice, so its image is resampled on a padded window and carries
//! an explicit truncation bound. Norms and inner products used by the checks
//! never go through resampling; see [`op_inner`] and [`deviation_norm_sq`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{evaluate, require_admissible, CoeffVec};
use crate::error::{Result, UpError};
use crate::kernel::{check_delta, sinc};
use crate::multiplier::Multiplier;

/// Padding used when an image has to be resampled.
pub const DEFAULT_PADDING: usize = 64;

/// One of the operators from the uncertainty inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    /// `A_δ f = (f − f(· − δ))/δ`.
    BackwardDiff { delta: f64 },
    /// `C_δ f = (f(· + δ) − f(· − δ))/(2δ)`.
    CentralDiff { delta: f64 },
    /// `A_δ* f = (f − f(· + δ))/δ`.
    BackwardAdjoint { delta: f64 },
    /// `B f = x f`.
    MultB,
    /// `D f = f'`.
    Derivative,
    /// `f ↦ f(· − δ)`.
    Shift { delta: f64 },
}

impl OperatorSpec {
    pub fn delta(&self) -> Option<f64> {
        match *self {
            OperatorSpec::BackwardDiff { delta }
            | OperatorSpec::CentralDiff { delta }
            | OperatorSpec::BackwardAdjoint { delta }
            | OperatorSpec::Shift { delta } => Some(delta),
            OperatorSpec::MultB | OperatorSpec::Derivative => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.delta() {
            Some(d) => check_delta(d),
            None => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorSpec::BackwardDiff { .. } => "backward_diff",
            OperatorSpec::CentralDiff { .. } => "central_diff",
            OperatorSpec::BackwardAdjoint { .. } => "backward_adjoint",
            OperatorSpec::MultB => "mult_b",
            OperatorSpec::Derivative => "derivative",
            OperatorSpec::Shift { .. } => "shift",
        }
    }

    /// Fourier symbol of the operator; `None` for `B`, which is not a multiplier.
    pub fn multiplier(&self) -> Option<Multiplier> {
        match *self {
            OperatorSpec::BackwardDiff { delta } => Some(Multiplier::backward_diff(delta)),
            OperatorSpec::CentralDiff { delta } => Some(Multiplier::central_diff(delta)),
            OperatorSpec::BackwardAdjoint { delta } => Some(Multiplier::backward_adjoint(delta)),
            OperatorSpec::Derivative => Some(Multiplier::derivative()),
            OperatorSpec::Shift { delta } => Some(Multiplier::shift(delta)),
            OperatorSpec::MultB => None,
        }
    }

    pub fn needs_admissible(&self) -> bool {
        matches!(self, OperatorSpec::MultB)
    }

    /// Applies the operator to `f`, resampling when the image leaves the lattice.
    pub fn apply(&self, f: &CoeffVec, padding: usize, eq_tol: f64) -> Result<ApplyResult> {
        match *self {
            OperatorSpec::BackwardDiff { delta } => apply_backward_diff(f, delta, padding),
            OperatorSpec::CentralDiff { delta } => apply_central_diff(f, delta, padding),
            OperatorSpec::BackwardAdjoint { delta } => apply_backward_adjoint(f, delta, padding),
            OperatorSpec::MultB => apply_mult_b(f, eq_tol).map(ApplyResult::Exact),
            OperatorSpec::Derivative => Ok(apply_derivative(f, padding)),
            OperatorSpec::Shift { delta } => apply_shift(f, delta, padding),
        }
    }
}

/// Image of an operator in sample form.
#[derive(Debug, Clone, PartialEq)]
pub enum ApplyResult {
    /// The image has a finite sample representation.
    Exact(CoeffVec),
    /// Samples on `[n_min − padding, n_max + padding]`; `trunc_bound` bounds the
    /// L² norm of everything outside that window.
    Resampled {
        samples: CoeffVec,
        padding: usize,
        trunc_bound: f64,
    },
}

impl ApplyResult {
    pub fn samples(&self) -> &CoeffVec {
        match self {
            ApplyResult::Exact(v) => v,
            ApplyResult::Resampled { samples, .. } => samples,
        }
    }

    pub fn exact(&self) -> Option<&CoeffVec> {
        match self {
            ApplyResult::Exact(v) => Some(v),
            ApplyResult::Resampled { .. } => None,
        }
    }

    pub fn trunc_bound(&self) -> f64 {
        match self {
            ApplyResult::Exact(_) => 0.0,
            ApplyResult::Resampled { trunc_bound, .. } => *trunc_bound,
        }
    }

    fn combine(a: &ApplyResult, b: &ApplyResult, wa: f64, wb: f64, padding: usize) -> ApplyResult {
        let samples = &(a.samples() * wa) + &(b.samples() * wb);
        match (a, b) {
            (ApplyResult::Exact(_), ApplyResult::Exact(_)) => ApplyResult::Exact(samples),
            _ => ApplyResult::Resampled {
                samples,
                padding,
                trunc_bound: wa.abs() * a.trunc_bound() + wb.abs() * b.trunc_bound(),
            },
        }
    }
}

/// `(Σ_{|k| > P} sinc²(k − t))^{1/2}`: the ℓ² mass a unit sample shifted by `t`
/// leaves outside a window padded by `P`.
pub fn shift_tail(padding: usize, t: f64) -> f64 {
    let p = padding as i64;
    let kept: f64 = (-p..=p).map(|k| sinc(k as f64 - t).powi(2)).sum();
    (1.0 - kept).max(0.0).sqrt()
}

/// `(Σ_{|k| > P} 1/k²)^{1/2}`, the derivative analogue of [`shift_tail`].
pub fn derivative_tail(padding: usize) -> f64 {
    let kept: f64 = (1..=padding).map(|k| 1.0 / (k as f64).powi(2)).sum();
    (PI * PI / 3.0 - 2.0 * kept).max(0.0).sqrt()
}

fn window(f: &CoeffVec, padding: usize) -> (i64, i64) {
    let p = padding as i64;
    (f.n_min() - p, f.n_max() + p)
}

/// `f(· − t)` for arbitrary real `t`.
pub(crate) fn shift_any(f: &CoeffVec, t: f64, padding: usize) -> ApplyResult {
    if t == t.round() {
        return ApplyResult::Exact(f.index_shift(t as i64));
    }
    let (lo, hi) = window(f, padding);
    let samples = CoeffVec::from_fn(lo, hi, |n| evaluate(f, n as f64 - t));
    ApplyResult::Resampled {
        samples,
        padding,
        trunc_bound: f.l1_norm() * shift_tail(padding, t),
    }
}

pub fn apply_shift(f: &CoeffVec, delta: f64, padding: usize) -> Result<ApplyResult> {
    check_delta(delta)?;
    Ok(shift_any(f, delta, padding))
}

pub fn apply_backward_diff(f: &CoeffVec, delta: f64, padding: usize) -> Result<ApplyResult> {
    check_delta(delta)?;
    let shifted = shift_any(f, delta, padding);
    let w = 1.0 / delta;
    Ok(ApplyResult::combine(
        &ApplyResult::Exact(f.clone()),
        &shifted,
        w,
        -w,
        padding,
    ))
}

pub fn apply_backward_adjoint(f: &CoeffVec, delta: f64, padding: usize) -> Result<ApplyResult> {
    check_delta(delta)?;
    let shifted = shift_any(f, -delta, padding);
    let w = 1.0 / delta;
    Ok(ApplyResult::combine(
        &ApplyResult::Exact(f.clone()),
        &shifted,
        w,
        -w,
        padding,
    ))
}

pub fn apply_central_diff(f: &CoeffVec, delta: f64, padding: usize) -> Result<ApplyResult> {
    check_delta(delta)?;
    let ahead = shift_any(f, -delta, padding);
    let behind = shift_any(f, delta, padding);
    let w = 0.5 / delta;
    Ok(ApplyResult::combine(&ahead, &behind, w, -w, padding))
}

/// Samples `n f(n)`; exact because `x f(x) = Σ n f(n) sinc(x − n)` once the
/// alternating sum of `f` vanishes.
pub fn apply_mult_b(f: &CoeffVec, eq_tol: f64) -> Result<CoeffVec> {
    require_admissible(f, eq_tol)?;
    Ok(mult_b_samples(f))
}

pub(crate) fn mult_b_samples(f: &CoeffVec) -> CoeffVec {
    f.map_indexed(|n, c| c * n as f64)
}

/// Derivative samples `f'(n) = Σ_{k≠0} (−1)^k f(n − k)/k` on the padded window.
pub fn apply_derivative(f: &CoeffVec, padding: usize) -> ApplyResult {
    let (lo, hi) = window(f, padding);
    let samples = CoeffVec::from_fn(lo, hi, |n| {
        f.iter()
            .filter(|&(m, _)| m != n)
            .map(|(m, c)| {
                let k = n - m;
                let w = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 } / k as f64;
                c * w
            })
            .sum()
    });
    ApplyResult::Resampled {
        samples,
        padding,
        trunc_bound: f.l1_norm() * derivative_tail(padding),
    }
}

/// Backward (`A_δ`) or central (`C_δ`) difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffMode {
    Backward,
    Central,
}

impl std::str::FromStr for DiffMode {
    type Err = UpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "backward" => Ok(DiffMode::Backward),
            "central" => Ok(DiffMode::Central),
            other => Err(UpError::InvalidConfig(format!(
                "unknown mode {other:?}; expected backward or central"
            ))),
        }
    }
}

impl std::fmt::Display for DiffMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DiffMode::Backward => "backward",
            DiffMode::Central => "central",
        })
    }
}

impl DiffMode {
    pub fn operator(&self, delta: f64) -> OperatorSpec {
        match self {
            DiffMode::Backward => OperatorSpec::BackwardDiff { delta },
            DiffMode::Central => OperatorSpec::CentralDiff { delta },
        }
    }
}

/// Largest `|((XB − BX)f)(n) − ([X,B]f)(n)|` over the padded integer window,
/// where `X` is `A_δ` or `C_δ`. The left side is assembled pointwise from the
/// sampling series of `f` and of `Bf`; the right side from the closed-form
/// commutator. No admissibility check: an inadmissible `f` shows up as a
/// large deviation once the step is not an integer.
pub fn commutator_grid_deviation(f: &CoeffVec, delta: f64, mode: DiffMode, padding: usize) -> Result<f64> {
    check_delta(delta)?;
    let bf = mult_b_samples(f);
    let (lo, hi) = window(f, padding);
    let diff_at = |g: &CoeffVec, n: i64| -> Complex64 {
        let x = n as f64;
        match mode {
            DiffMode::Backward => (g.get(n) - evaluate(g, x - delta)) / delta,
            DiffMode::Central => (evaluate(g, x + delta) - evaluate(g, x - delta)) / (2.0 * delta),
        }
    };
    let dev = (lo..=hi)
        .map(|n| {
            let x = n as f64;
            let lhs = diff_at(&bf, n) - diff_at(f, n) * x;
            let rhs = match mode {
                DiffMode::Backward => evaluate(f, x - delta),
                DiffMode::Central => (evaluate(f, x + delta) + evaluate(f, x - delta)) * 0.5,
            };
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max);
    Ok(dev)
}

fn checked_commutator(f: &CoeffVec, delta: f64, mode: DiffMode, padding: usize, eq_tol: f64) -> Result<ApplyResult> {
    check_delta(delta)?;
    require_admissible(f, eq_tol)?;
    let result = match mode {
        DiffMode::Backward => shift_any(f, delta, padding),
        DiffMode::Central => {
            let ahead = shift_any(f, -delta, padding);
            let behind = shift_any(f, delta, padding);
            ApplyResult::combine(&ahead, &behind, 0.5, 0.5, padding)
        }
    };
    let deviation = commutator_grid_deviation(f, delta, mode, padding)?;
    let threshold = eq_tol * f.norm().max(1.0);
    if deviation > threshold {
        return Err(UpError::CommutatorMismatch { deviation, threshold });
    }
    Ok(result)
}

/// `[A_δ, B] f = f(· − δ)`, cross-checked against `A_δB − BA_δ` on the grid.
pub fn commutator_backward(f: &CoeffVec, delta: f64, padding: usize, eq_tol: f64) -> Result<ApplyResult> {
    checked_commutator(f, delta, DiffMode::Backward, padding, eq_tol)
}

/// `[C_δ, B] f = (f(· + δ) + f(· − δ))/2`, cross-checked on the grid.
pub fn commutator_central(f: &CoeffVec, delta: f64, padding: usize, eq_tol: f64) -> Result<ApplyResult> {
    checked_commutator(f, delta, DiffMode::Central, padding, eq_tol)
}

/// `⟨X f, Y g⟩` for two operators, computed from closed-form kernels.
pub fn op_inner(x: &OperatorSpec, f: &CoeffVec, y: &OperatorSpec, g: &CoeffVec, eq_tol: f64) -> Result<Complex64> {
    x.validate()?;
    y.validate()?;
    let (mx, fx) = lift(x, f, eq_tol)?;
    let (my, gy) = lift(y, g, eq_tol)?;
    Ok(mx.inner(&fx, &my, &gy))
}

/// Rewrites `X f` as `m(X') f'` with `m` a multiplier; `B` becomes the
/// identity acting on the samples `n f(n)`.
fn lift(op: &OperatorSpec, f: &CoeffVec, eq_tol: f64) -> Result<(Multiplier, CoeffVec)> {
    match op.multiplier() {
        Some(m) => Ok((m, f.clone())),
        None => Ok((Multiplier::identity(), apply_mult_b(f, eq_tol)?)),
    }
}

/// `‖(X − a) f‖²`.
pub fn deviation_norm_sq(op: &OperatorSpec, f: &CoeffVec, a: Complex64, eq_tol: f64) -> Result<f64> {
    op.validate()?;
    match op.multiplier() {
        Some(m) => Ok(m.minus_scalar(a).norm_sq(f)),
        None => {
            require_admissible(f, eq_tol)?;
            Ok(f.iter().map(|(n, c)| ((n as f64 - a) * c).norm_sqr()).sum())
        }
    }
}

/// `⟨[X, Y] f, f⟩` for any pair of the supported operators.
///
/// Multipliers commute with each other, so only pairs involving `B` contribute:
/// `⟨[P, B] f, f⟩ = ⟨P(Bf), f⟩ − ⟨Pf, Bf⟩`, using that `B` is symmetric.
pub fn commutator_expectation(x: &OperatorSpec, y: &OperatorSpec, f: &CoeffVec, eq_tol: f64) -> Result<Complex64> {
    x.validate()?;
    y.validate()?;
    match (x.multiplier(), y.multiplier()) {
        (Some(_), Some(_)) => Ok(Complex64::new(0.0, 0.0)),
        (None, None) => {
            require_admissible(f, eq_tol)?;
            Ok(Complex64::new(0.0, 0.0))
        }
        (Some(p), None) => multiplier_b_commutator(&p, f, eq_tol),
        (None, Some(p)) => multiplier_b_commutator(&p, f, eq_tol).map(|v| -v),
    }
}

fn multiplier_b_commutator(p: &Multiplier, f: &CoeffVec, eq_tol: f64) -> Result<Complex64> {
    let bf = apply_mult_b(f, eq_tol)?;
    let id = Multiplier::identity();
    Ok(p.inner(&bf, &id, f) - p.inner(f, &id, &bf))
}
