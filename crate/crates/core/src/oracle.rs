//! Brute-force reference computations: trapezoid sums on the line and
//! adaptive quadrature on the circle.
//!
//! Nothing here goes through the Gram kernels. Line integrals use only
//! [`evaluate`]; circle integrals sum the Fourier series directly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{evaluate, CoeffVec};
use crate::error::{Result, UpError};
use crate::kernel::{moment1, moment2, theta_exp_moment, GramKernel};
use crate::operators::{DiffMode, OperatorSpec};
use crate::quadrature::{fixed, integrate};

/// Extra half-width beyond the support in the default grid.
pub const DEFAULT_MARGIN: f64 = 64.0;
/// Default trapezoid step.
pub const DEFAULT_STEP: f64 = 1.0 / 64.0;
/// Absolute tolerance of [`validate_kernels`].
pub const KERNEL_TOL: f64 = 1e-10;

const MIN_MARGIN: f64 = 32.0;
const CIRCLE_TOL: f64 = 1e-14;
// periods integrated numerically past the trapezoid window
const TAIL_PERIODS: usize = 1024;
const TAIL_PANEL: usize = 4;

/// Trapezoid grid on `[−X, X]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub step: f64,
}

impl GridSpec {
    /// `X = radius + 64`, `h = 1/64`.
    pub fn default_for(f: &CoeffVec, g: &CoeffVec) -> Self {
        let radius = f.support_radius().max(g.support_radius()) as f64;
        GridSpec {
            half_width: radius + DEFAULT_MARGIN,
            step: DEFAULT_STEP,
        }
    }

    pub fn validate(&self, f: &CoeffVec, g: &CoeffVec) -> Result<()> {
        let radius = f.support_radius().max(g.support_radius()) as f64;
        if !(self.step > 0.0 && self.step <= DEFAULT_STEP) {
            return Err(UpError::InvalidGrid(format!("step {} outside (0, 1/64]", self.step)));
        }
        if !(self.half_width.is_finite() && self.half_width >= radius + MIN_MARGIN) {
            return Err(UpError::InvalidGrid(format!(
                "half width {} below support radius {radius} + {MIN_MARGIN}",
                self.half_width
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseGridInner {
    /// Trapezoid sum plus far-field correction.
    pub value: Complex64,
    pub trapezoid: Complex64,
    /// Contribution of `|x| > X`, added to the trapezoid sum.
    pub tail: Complex64,
}

impl DenseGridInner {
    pub fn tail_estimate(&self) -> f64 {
        self.tail.norm()
    }
}

/// `∫ f(x − δ) conj(g(x)) dx` by a trapezoid sum of [`evaluate`] on the grid.
///
/// Outside the window the integrand is written as
/// `[cos πδ − cos(2πx − πδ)]/(2π²) · F(x − δ) conj(G(x))` with
/// `F(y) = Σ (−1)^n f(n)/(y − n)`, and each piece is integrated separately.
pub fn dense_grid_inner(f: &CoeffVec, g: &CoeffVec, delta: f64, grid: &GridSpec) -> Result<DenseGridInner> {
    grid.validate(f, g)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(UpError::DeltaOutOfRange(delta));
    }
    let x_max = grid.half_width;
    let steps = (2.0 * x_max / grid.step).ceil() as i64;
    let h = 2.0 * x_max / steps as f64;
    let mut trapezoid = Complex64::new(0.0, 0.0);
    for i in 0..=steps {
        let x = -x_max + h * i as f64;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        trapezoid += evaluate(f, x - delta) * evaluate(g, x).conj() * w;
    }
    trapezoid *= h;
    let tail = line_tail(f, g, delta, x_max, 1.0) + line_tail(f, g, delta, x_max, -1.0);
    Ok(DenseGridInner {
        value: trapezoid + tail,
        trapezoid,
        tail,
    })
}

fn pole_sum(f: &CoeffVec, y: f64) -> Complex64 {
    f.iter()
        .map(|(n, c)| {
            let s = if n.rem_euclid(2) == 0 { c } else { -c };
            s / (y - n as f64)
        })
        .sum()
}

// ∫_X^∞ of the integrand at x = side·u
fn line_tail(f: &CoeffVec, g: &CoeffVec, delta: f64, x_max: f64, side: f64) -> Complex64 {
    let r = |u: f64| pole_sum(f, side * u - delta) * pole_sum(g, side * u).conj();
    let phase = side * PI * delta;
    let scale = 1.0 / (2.0 * PI * PI);

    // smooth part through u = X/t
    let smooth = integrate(&|t: f64| r(x_max / t) * (x_max / (t * t)), 0.0, 1.0, 4, 1e-15).value;

    let osc = |u: f64| r(u) * (2.0 * PI * u - phase).cos();
    let mut oscillating = Complex64::new(0.0, 0.0);
    let mut lo = x_max;
    for _ in 0..TAIL_PERIODS / TAIL_PANEL {
        let hi = lo + TAIL_PANEL as f64;
        oscillating += fixed(&osc, lo, hi);
        lo = hi;
    }
    // leading term of integration by parts past the last panel
    oscillating += -(2.0 * PI * lo - phase).sin() * r(lo) / (2.0 * PI);

    (smooth * (PI * delta).cos() - oscillating) * scale
}

/// Weights for [`circle_quadrature_moment`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleWeight {
    One,
    Theta,
    ThetaSq,
    ExpIDeltaTheta { delta: f64 },
}

impl CircleWeight {
    pub fn eval(&self, theta: f64) -> Complex64 {
        match *self {
            CircleWeight::One => Complex64::new(1.0, 0.0),
            CircleWeight::Theta => Complex64::new(theta, 0.0),
            CircleWeight::ThetaSq => Complex64::new(theta * theta, 0.0),
            CircleWeight::ExpIDeltaTheta { delta } => Complex64::from_polar(1.0, delta * theta),
        }
    }
}

fn series(f: &CoeffVec, theta: f64) -> Complex64 {
    f.iter()
        .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta))
        .sum()
}

fn circle_panels(span: f64) -> usize {
    8 + span.ceil() as usize
}

/// `(1/2π)∫_{−π}^{π} w(θ) dθ` by adaptive quadrature; `span` is the highest
/// frequency present, used to size the initial panels.
pub fn circle_mean(w: impl Fn(f64) -> Complex64, span: f64) -> Complex64 {
    integrate(&w, -PI, PI, circle_panels(span), CIRCLE_TOL).value / (2.0 * PI)
}

/// `(1/2π)∫ w(θ)|f̌(θ)|² dθ`.
pub fn circle_quadrature_moment(f: &CoeffVec, weight: CircleWeight) -> Complex64 {
    let extra = match weight {
        CircleWeight::ExpIDeltaTheta { delta } => delta.abs(),
        _ => 0.0,
    };
    circle_mean(|t| weight.eval(t) * series(f, t).norm_sqr(), f.len() as f64 + extra)
}

/// Circle-side image `(Xf)ˇ(θ)`. `B` is taken from the samples `n f(n)`.
pub fn circle_image(op: &OperatorSpec, f: &CoeffVec, theta: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let e = |t: f64| Complex64::from_polar(1.0, t * theta);
    match *op {
        OperatorSpec::MultB => f.iter().map(|(n, c)| c * n as f64 * e(n as f64)).sum(),
        OperatorSpec::Shift { delta } => e(delta) * series(f, theta),
        OperatorSpec::BackwardDiff { delta } => (1.0 - e(delta)) / delta * series(f, theta),
        OperatorSpec::BackwardAdjoint { delta } => (1.0 - e(-delta)) / delta * series(f, theta),
        OperatorSpec::CentralDiff { delta } => (e(-delta) - e(delta)) / (2.0 * delta) * series(f, theta),
        OperatorSpec::Derivative => -i * theta * series(f, theta),
    }
}

fn op_span(op: &OperatorSpec, f: &CoeffVec) -> f64 {
    f.len() as f64 + op.delta().unwrap_or(0.0)
}

/// `⟨Xf, Yg⟩` by circle quadrature.
pub fn operator_inner(x: &OperatorSpec, f: &CoeffVec, y: &OperatorSpec, g: &CoeffVec) -> Complex64 {
    circle_mean(
        |t| circle_image(x, f, t) * circle_image(y, g, t).conj(),
        op_span(x, f) + op_span(y, g),
    )
}

/// `⟨Xf, g⟩` by circle quadrature.
pub fn operator_expectation_num(x: &OperatorSpec, f: &CoeffVec, g: &CoeffVec) -> Complex64 {
    circle_mean(
        |t| circle_image(x, f, t) * series(g, t).conj(),
        op_span(x, f) + g.len() as f64,
    )
}

fn b_image(f: &CoeffVec) -> CoeffVec {
    f.map_indexed(|n, c| c * n as f64)
}

fn sigma(x: &OperatorSpec, f: &CoeffVec, nf: f64) -> f64 {
    let image = operator_inner(x, f, x, f).re;
    let mean = operator_expectation_num(x, f, f);
    (image - mean.norm_sqr() / nf).max(0.0).sqrt()
}

/// Oracle values of the quantities entering the difference-operator
/// inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRatio {
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub comm_abs: f64,
    pub ratio: f64,
}

/// `σ_X σ_B / (½|⟨[X, B] f, f⟩|)` for `X` the backward or central difference,
/// every term by circle quadrature. The caller is responsible for `f` being
/// admissible.
pub fn uncertainty_ratio(f: &CoeffVec, delta: f64, mode: DiffMode) -> OracleRatio {
    let op = mode.operator(delta);
    let b = OperatorSpec::MultB;
    let nf = circle_quadrature_moment(f, CircleWeight::One).re;
    let sigma_a = sigma(&op, f, nf);
    let sigma_b = sigma(&b, f, nf);
    // ⟨X(Bf), f⟩ − ⟨Xf, Bf⟩
    let comm = operator_expectation_num(&op, &b_image(f), f) - operator_inner(&op, f, &b, f);
    let comm_abs = comm.norm();
    OracleRatio {
        sigma_a,
        sigma_b,
        comm_abs,
        ratio: sigma_a * sigma_b / (0.5 * comm_abs),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `sinc(k + δ)`.
    Shift,
    /// `(1/2π)∫ θ e^{ikθ}`.
    Moment1,
    /// `(1/2π)∫ θ² e^{ikθ}`.
    Moment2,
    /// `(1/2π)∫ θ e^{i(k+δ)θ}`.
    ThetaShift,
}

impl KernelKind {
    pub fn needs_delta(&self) -> bool {
        matches!(self, KernelKind::Shift | KernelKind::ThetaShift)
    }

    fn weight(&self, k: i64, delta: f64) -> impl Fn(f64) -> Complex64 {
        let kind = *self;
        let u = k as f64 + if kind.needs_delta() { delta } else { 0.0 };
        move |t: f64| {
            let e = Complex64::from_polar(1.0, u * t);
            match kind {
                KernelKind::Shift => e,
                KernelKind::Moment1 | KernelKind::ThetaShift => e * t,
                KernelKind::Moment2 => e * t * t,
            }
        }
    }
}

/// Library value of a kernel entry.
pub fn closed_form(kind: KernelKind, k: i64, delta: f64) -> Complex64 {
    match kind {
        KernelKind::Shift => GramKernel::Shift { delta }.value(k),
        KernelKind::Moment1 => moment1(k),
        KernelKind::Moment2 => Complex64::new(moment2(k), 0.0),
        KernelKind::ThetaShift => theta_exp_moment(k as f64 + delta),
    }
}

/// Quadrature value of a kernel entry.
pub fn kernel_quadrature(kind: KernelKind, k: i64, delta: f64) -> Complex64 {
    let u = k as f64 + if kind.needs_delta() { delta } else { 0.0 };
    circle_mean(kind.weight(k, delta), u.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub kind: KernelKind,
    pub k: i64,
    pub delta: Option<f64>,
    pub closed_form: Complex64,
    pub quadrature: Complex64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelValidation {
    pub tol: f64,
    pub checks: Vec<KernelCheck>,
}

impl KernelValidation {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.abs_err <= self.tol)
    }

    pub fn failures(&self) -> impl Iterator<Item = &KernelCheck> {
        self.checks
            .iter()
            .filter(move |c| c.abs_err.is_nan() || c.abs_err > self.tol)
    }

    pub fn max_abs_err(&self) -> f64 {
        self.checks.iter().map(|c| c.abs_err).fold(0.0, f64::max)
    }
}

/// Checks every kernel entry with `|k| ≤ max_lag` (and every `δ` for the
/// shifted kinds) against quadrature at [`KERNEL_TOL`].
pub fn validate_kernels(max_lag: i64, deltas: &[f64]) -> Result<KernelValidation> {
    validate_kernels_with(max_lag, deltas, closed_form)
}

/// [`validate_kernels`] against an arbitrary table of claimed values.
pub fn validate_kernels_with(
    max_lag: i64,
    deltas: &[f64],
    claimed: impl Fn(KernelKind, i64, f64) -> Complex64 + Sync,
) -> Result<KernelValidation> {
    if max_lag < 1 {
        return Err(UpError::InvalidConfig(format!(
            "max_lag must be at least 1, got {max_lag}"
        )));
    }
    for &d in deltas {
        crate::kernel::check_delta(d)?;
    }
    let mut cases = Vec::new();
    for k in -max_lag..=max_lag {
        cases.push((KernelKind::Moment1, k, None));
        cases.push((KernelKind::Moment2, k, None));
        for &d in deltas {
            cases.push((KernelKind::Shift, k, Some(d)));
            cases.push((KernelKind::ThetaShift, k, Some(d)));
        }
    }
    use rayon::prelude::*;
    let checks = cases
        .into_par_iter()
        .map(|(kind, k, delta)| {
            let d = delta.unwrap_or(0.0);
            let closed_form = claimed(kind, k, d);
            let quadrature = kernel_quadrature(kind, k, d);
            KernelCheck {
                kind,
                k,
                delta,
                closed_form,
                quadrature,
                abs_err: (closed_form - quadrature).norm(),
            }
        })
        .collect();
    Ok(KernelValidation {
        tol: KERNEL_TOL,
        checks,
    })
}
