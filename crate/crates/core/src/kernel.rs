//! Closed-form Toeplitz kernels for exact inner products in the sample
//! representation.
//!
//! With `f̌(θ) = Σ f(n) e^{inθ}` every inner product of the form
//! `(1/2π)∫ w(θ) f̌(θ) conj(ǧ(θ)) dθ` collapses to `Σ_{n,m} f(n) conj(g(m)) K(n−m)`
//! where `K(k) = (1/2π)∫ w(θ) e^{ikθ} dθ`. The weights used throughout the
//! crate are `e^{itθ}`, `θ e^{itθ}` and `θ²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UpError};

const SINC_SERIES_CUTOFF: f64 = 1e-6;
const DSINC_SERIES_CUTOFF: f64 = 0.25;

/// `sin(πu)` with the argument reduced to `[-1/2, 1/2]` first, so integer
/// arguments give an exact zero.
pub fn sin_pi(u: f64) -> f64 {
    let n = u.round();
    let s = (PI * (u - n)).sin();
    if n.rem_euclid(2.0) == 1.0 {
        -s
    } else {
        s
    }
}

/// `cos(πu)` with the same reduction as [`sin_pi`].
pub fn cos_pi(u: f64) -> f64 {
    let n = u.round();
    let c = (PI * (u - n)).cos();
    if n.rem_euclid(2.0) == 1.0 {
        -c
    } else {
        c
    }
}

/// Normalized sinc, `sin(πt)/(πt)` with `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < SINC_SERIES_CUTOFF {
        let x = (PI * t) * (PI * t);
        1.0 - x / 6.0 + x * x / 120.0
    } else {
        sin_pi(t) / (PI * t)
    }
}

/// Derivative of [`sinc`]. Uses the Taylor series near the origin where
/// `cos(πu) - sinc(u)` cancels.
pub fn sinc_derivative(u: f64) -> f64 {
    if u.abs() < DSINC_SERIES_CUTOFF {
        sinc_derivative_series(u)
    } else if u == u.round() {
        if (u as i64).rem_euclid(2) == 0 {
            1.0 / u
        } else {
            -1.0 / u
        }
    } else {
        (cos_pi(u) - sinc(u)) / u
    }
}

// d/du Σ (-1)^j (πu)^{2j} / (2j+1)!
fn sinc_derivative_series(u: f64) -> f64 {
    let x = (PI * u) * (PI * u);
    // running coefficient (-1)^j π^{2j} u^{2j-1} / (2j+1)!
    let mut term = 1.0 / 6.0 * -(PI * PI) * u;
    let mut sum = 0.0;
    for j in 1..20 {
        let jf = j as f64;
        if j > 1 {
            term *= -x / ((2.0 * jf) * (2.0 * jf + 1.0));
        }
        let contrib = 2.0 * jf * term;
        sum += contrib;
        if contrib.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// First-moment kernel `(1/2π)∫ θ e^{ikθ} dθ = -i(-1)^k/k`, zero at `k = 0`.
pub fn moment1(k: i64) -> Complex64 {
    if k == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, -sign / k as f64)
    }
}

/// Second-moment kernel `(1/2π)∫ θ² e^{ikθ} dθ`: `π²/3` at zero, `2(-1)^k/k²` otherwise.
pub fn moment2(k: i64) -> f64 {
    if k == 0 {
        PI * PI / 3.0
    } else {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        2.0 * sign / (kf * kf)
    }
}

/// `(1/2π)∫ e^{iuθ} dθ` for real `u`.
pub fn exp_moment(u: f64) -> f64 {
    sinc(u)
}

/// `(1/2π)∫ θ e^{iuθ} dθ = -i sinc'(u)` for real `u`; matches [`moment1`]
/// bit-for-bit at integers.
pub fn theta_exp_moment(u: f64) -> Complex64 {
    if u == u.round() && u.abs() < 9.0e15 {
        moment1(u as i64)
    } else {
        Complex64::new(0.0, -sinc_derivative(u))
    }
}

/// One of the three closed-form Gram kernels, indexed by integer lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GramKernel {
    /// `S_k(δ) = sinc(δ + k)`, so that `⟨f(·−δ), g⟩ = Σ f(n) conj(g(m)) S_{n−m}(δ)`.
    Shift {
        delta: f64,
    },
    Moment1,
    Moment2,
}

impl GramKernel {
    pub fn shift(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(GramKernel::Shift { delta })
    }

    pub fn value(&self, k: i64) -> Complex64 {
        match *self {
            GramKernel::Shift { delta } => Complex64::new(sinc(delta + k as f64), 0.0),
            GramKernel::Moment1 => moment1(k),
            GramKernel::Moment2 => Complex64::new(moment2(k), 0.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GramKernel::Shift { .. } => "shift",
            GramKernel::Moment1 => "moment1",
            GramKernel::Moment2 => "moment2",
        }
    }

    /// Tabulates the kernel over lags `lo..=hi`.
    pub fn table(&self, lo: i64, hi: i64) -> LagTable {
        LagTable::from_fn(lo, hi, |k| self.value(k))
    }
}

/// Kernel values on a contiguous lag range.
#[derive(Debug, Clone)]
pub struct LagTable {
    lo: i64,
    values: Vec<Complex64>,
}

impl LagTable {
    pub fn from_fn(lo: i64, hi: i64, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let values = (lo..=hi).map(&mut f).collect();
        LagTable { lo, values }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.values[(k - self.lo) as usize]
    }

    /// `Σ_{n,m} f(n) conj(g(m)) K(n−m)` for samples starting at `f_min`, `g_min`.
    pub fn sandwich(&self, f_min: i64, f: &[Complex64], g_min: i64, g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, fv) in f.iter().enumerate() {
            let n = f_min + i as i64;
            let mut row = Complex64::new(0.0, 0.0);
            for (j, gv) in g.iter().enumerate() {
                let m = g_min + j as i64;
                row += gv.conj() * self.get(n - m);
            }
            acc += fv * row;
        }
        acc
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(UpError::DeltaOutOfRange(delta))
    }
}
