//! Exact inner-product algebra for translation-invariant operators.
//!
//! Shifts, differences and the derivative all act on `f̌` as multiplication
//! by a symbol `m(θ) = Σ_j c_j e^{i t_j θ} + d·θ`. Inner products
//! `⟨m₁ f, m₂ g⟩` reduce to a single Toeplitz sum whose lag kernel is built
//! from `sinc`, `sinc'` and the second-moment kernel.

use num_complex::Complex64;

use crate::coeffs::CoeffVec;
use crate::kernel::{exp_moment, moment2, theta_exp_moment, LagTable};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Symbol `Σ c_j e^{i t_j θ} + d·θ` of a Fourier multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    exps: Vec<(f64, Complex64)>,
    theta: Complex64,
}

impl Multiplier {
    pub fn zero() -> Self {
        Multiplier {
            exps: Vec::new(),
            theta: ZERO,
        }
    }

    pub fn identity() -> Self {
        Self::zero().with_exp(0.0, Complex64::new(1.0, 0.0))
    }

    /// `f ↦ f(· − t)`.
    pub fn shift(t: f64) -> Self {
        Self::zero().with_exp(t, Complex64::new(1.0, 0.0))
    }

    /// `(f − f(· − δ))/δ`.
    pub fn backward_diff(delta: f64) -> Self {
        let w = 1.0 / delta;
        Self::zero()
            .with_exp(0.0, Complex64::new(w, 0.0))
            .with_exp(delta, Complex64::new(-w, 0.0))
    }

    /// `(f − f(· + δ))/δ`.
    pub fn backward_adjoint(delta: f64) -> Self {
        Self::backward_diff(-delta).scaled(Complex64::new(-1.0, 0.0))
    }

    /// `(f(· + δ) − f(· − δ))/(2δ)`.
    pub fn central_diff(delta: f64) -> Self {
        let w = 0.5 / delta;
        Self::zero()
            .with_exp(-delta, Complex64::new(w, 0.0))
            .with_exp(delta, Complex64::new(-w, 0.0))
    }

    /// `d/dx`, i.e. multiplication of `f̌` by `−iθ`.
    pub fn derivative() -> Self {
        Multiplier {
            exps: Vec::new(),
            theta: Complex64::new(0.0, -1.0),
        }
    }

    pub fn with_exp(mut self, t: f64, c: Complex64) -> Self {
        match self.exps.iter_mut().find(|(s, _)| *s == t) {
            Some((_, existing)) => *existing += c,
            None => self.exps.push((t, c)),
        }
        self
    }

    /// The symbol of `P − a·I`.
    pub fn minus_scalar(self, a: Complex64) -> Self {
        self.with_exp(0.0, -a)
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for (_, v) in &mut self.exps {
            *v *= c;
        }
        self.theta *= c;
        self
    }

    pub fn plus(mut self, other: &Multiplier) -> Self {
        for &(t, c) in &other.exps {
            self = self.with_exp(t, c);
        }
        self.theta += other.theta;
        self
    }

    pub fn minus(self, other: &Multiplier) -> Self {
        self.plus(&other.clone().scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Pointwise value `m(θ)`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let exps: Complex64 = self
            .exps
            .iter()
            .map(|&(t, c)| c * Complex64::from_polar(1.0, t * theta))
            .sum();
        exps + self.theta * theta
    }

    /// `(1/2π)∫ m(θ) conj(other(θ)) e^{ikθ} dθ`.
    pub fn cross_kernel(&self, other: &Multiplier, k: i64) -> Complex64 {
        let kf = k as f64;
        let mut acc = ZERO;
        for &(t, p) in &self.exps {
            for &(s, q) in &other.exps {
                acc += p * q.conj() * exp_moment(kf + t - s);
            }
            if other.theta != ZERO {
                acc += p * other.theta.conj() * theta_exp_moment(kf + t);
            }
        }
        if self.theta != ZERO {
            for &(s, q) in &other.exps {
                acc += self.theta * q.conj() * theta_exp_moment(kf - s);
            }
            if other.theta != ZERO {
                acc += self.theta * other.theta.conj() * moment2(k);
            }
        }
        acc
    }

    /// `⟨m f, other g⟩`.
    pub fn inner(&self, f: &CoeffVec, other: &Multiplier, g: &CoeffVec) -> Complex64 {
        let lo = f.n_min() - g.n_max();
        let hi = f.n_max() - g.n_min();
        let table = LagTable::from_fn(lo, hi, |k| self.cross_kernel(other, k));
        table.sandwich(f.n_min(), f.coeffs(), g.n_min(), g.coeffs())
    }

    /// `‖m f‖²`.
    pub fn norm_sq(&self, f: &CoeffVec) -> f64 {
        self.inner(f, self, f).re.max(0.0)
    }
}
