//! Finite sample sequences standing in for functions in the Paley–Wiener
//! space of band limit π.
//!
//! A [`CoeffVec`] holds `f(n)` for `n` in `n_min..=n_max`; the function itself
//! is `f(x) = Σ f(n) sinc(x − n)`. The sampling map is taken to be an
//! isometry, `⟨f, g⟩ = Σ f(n) conj(g(n))`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UpError};
use crate::kernel::{check_delta, cos_pi, sin_pi, sinc, LagTable};

/// Integer samples `f(n_min), …, f(n_max)` of a band-limited function.
///
/// Always canonical: the first and last stored samples are nonzero unless the
/// whole vector is zero, in which case it is the single sample `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffVec", into = "RawCoeffVec")]
pub struct CoeffVec {
    n_min: i64,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawCoeffVec {
    n_min: i64,
    coeffs: Vec<Complex64>,
}

impl TryFrom<RawCoeffVec> for CoeffVec {
    type Error = UpError;

    fn try_from(raw: RawCoeffVec) -> Result<Self> {
        CoeffVec::new(raw.n_min, raw.coeffs)
    }
}

impl From<CoeffVec> for RawCoeffVec {
    fn from(v: CoeffVec) -> Self {
        RawCoeffVec {
            n_min: v.n_min,
            coeffs: v.coeffs,
        }
    }
}

impl CoeffVec {
    pub fn new(n_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(UpError::EmptyCoeffs);
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(UpError::NonFiniteCoeff {
                index: n_min + i as i64,
            });
        }
        Ok(Self::canonical(n_min, coeffs))
    }

    pub fn from_real(n_min: i64, values: &[f64]) -> Result<Self> {
        Self::new(n_min, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero() -> Self {
        CoeffVec {
            n_min: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    /// Trims exact-zero edge samples. Inputs must already be finite.
    fn canonical(n_min: i64, mut coeffs: Vec<Complex64>) -> Self {
        let is_zero = |c: &Complex64| c.re == 0.0 && c.im == 0.0;
        let Some(first) = coeffs.iter().position(|c| !is_zero(c)) else {
            return Self::zero();
        };
        let last = coeffs.iter().rposition(|c| !is_zero(c)).unwrap_or(first);
        coeffs.truncate(last + 1);
        coeffs.drain(..first);
        CoeffVec {
            n_min: n_min + first as i64,
            coeffs,
        }
    }

    /// Builds samples `f(n) = value(n)` for `n` in `lo..=hi`.
    pub fn from_fn(lo: i64, hi: i64, value: impl FnMut(i64) -> Complex64) -> Self {
        let coeffs: Vec<Complex64> = (lo..=hi).map(value).collect();
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self::canonical(lo, coeffs)
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    /// The sample `f(n)`; zero outside the stored support.
    pub fn get(&self, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n - self.n_min) as usize]
        }
    }

    /// `(n, f(n))` pairs over the stored support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.n_min + i as i64, c))
    }

    /// Largest `|n|` in the support.
    pub fn support_radius(&self) -> i64 {
        self.n_min.abs().max(self.n_max().abs())
    }

    pub fn norm(&self) -> f64 {
        norm_sq(self).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Samples of `f(· − k)` for integer `k`.
    pub fn index_shift(&self, k: i64) -> Self {
        CoeffVec {
            n_min: self.n_min + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Pointwise `n ↦ weight(n) · f(n)`.
    pub fn map_indexed(&self, mut weight: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self.iter().map(|(n, c)| weight(n, c)).collect();
        Self::canonical(self.n_min, coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_indexed(|_, v| v * c)
    }

    /// Rescales to unit norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let lo = self.n_min.min(other.n_min);
        let hi = self.n_max().max(other.n_max());
        Self::from_fn(lo, hi, |n| op(self.get(n), other.get(n)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("CoeffVec serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Add for &CoeffVec {
    type Output = CoeffVec;

    fn add(self, rhs: &CoeffVec) -> CoeffVec {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CoeffVec {
    type Output = CoeffVec;

    fn sub(self, rhs: &CoeffVec) -> CoeffVec {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<Complex64> for &CoeffVec {
    type Output = CoeffVec;

    fn mul(self, rhs: Complex64) -> CoeffVec {
        self.scale(rhs)
    }
}

impl Mul<f64> for &CoeffVec {
    type Output = CoeffVec;

    fn mul(self, rhs: f64) -> CoeffVec {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// `⟨f, g⟩ = Σ f(n) conj(g(n))`.
pub fn inner(f: &CoeffVec, g: &CoeffVec) -> Complex64 {
    let lo = f.n_min.max(g.n_min);
    let hi = f.n_max().min(g.n_max());
    (lo..=hi).map(|n| f.get(n) * g.get(n).conj()).sum()
}

pub fn norm_sq(f: &CoeffVec) -> f64 {
    f.coeffs.iter().map(|c| c.norm_sqr()).sum()
}

/// Sampling series `f(x) = Σ f(n) sinc(x − n)`.
pub fn evaluate(f: &CoeffVec, x: f64) -> Complex64 {
    f.iter().map(|(n, c)| c * sinc(x - n as f64)).sum()
}

/// `⟨f(· − δ), g⟩` for `δ ∈ (0, 1]`, evaluated with the shift kernel `sinc(δ + k)`.
pub fn shifted_inner(f: &CoeffVec, g: &CoeffVec, delta: f64) -> Result<Complex64> {
    check_delta(delta)?;
    Ok(shift_inner_any(f, g, delta))
}

/// `⟨f(· − t), g⟩` for any real `t`.
pub(crate) fn shift_inner_any(f: &CoeffVec, g: &CoeffVec, t: f64) -> Complex64 {
    let lo = f.n_min - g.n_max();
    let hi = f.n_max() - g.n_min;
    let table = LagTable::from_fn(lo, hi, |k| Complex64::new(sinc(t + k as f64), 0.0));
    table.sandwich(f.n_min, &f.coeffs, g.n_min, &g.coeffs)
}

/// `Σ (−1)^n f(n)`, the value of the Fourier series at `θ = π`.
pub fn alternating_sum(f: &CoeffVec) -> Complex64 {
    f.iter().map(|(n, c)| if n.rem_euclid(2) == 0 { c } else { -c }).sum()
}

/// Whether `x f(x)` is square integrable, i.e. the alternating sample sum
/// vanishes to within `tol · max(1, ‖f‖)`.
pub fn is_admissible(f: &CoeffVec, tol: f64) -> bool {
    alternating_sum(f).norm() <= admissibility_threshold(f, tol)
}

pub(crate) fn admissibility_threshold(f: &CoeffVec, tol: f64) -> f64 {
    tol * f.norm().max(1.0)
}

pub(crate) fn require_admissible(f: &CoeffVec, tol: f64) -> Result<()> {
    let alternating = alternating_sum(f).norm();
    let threshold = admissibility_threshold(f, tol);
    if alternating <= threshold {
        Ok(())
    } else {
        Err(UpError::InadmissibleFunction { alternating, threshold })
    }
}

pub(crate) fn require_nonzero(f: &CoeffVec) -> Result<()> {
    if f.is_zero() {
        Err(UpError::ZeroFunction)
    } else {
        Ok(())
    }
}

/// `f̌(θ) = Σ f(n) e^{inθ}`.
pub fn fourier_series_value(f: &CoeffVec, theta: f64) -> Complex64 {
    let turns = theta / PI;
    f.iter()
        .map(|(n, c)| {
            let u = n as f64 * turns;
            c * Complex64::new(cos_pi(u), sin_pi(u))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn demo() -> CoeffVec {
        CoeffVec::from_real(0, &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn construction_rejects_empty_and_non_finite() {
        assert!(matches!(CoeffVec::new(0, vec![]), Err(UpError::EmptyCoeffs)));
        let err = CoeffVec::new(3, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, UpError::NonFiniteCoeff { index: 4 }));
        assert!(CoeffVec::new(0, vec![c(f64::INFINITY, 0.0)]).is_err());
    }

    #[test]
    fn canonical_form_trims_zero_edges() {
        let f = CoeffVec::from_real(-2, &[0.0, 0.0, 1.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.n_min(), 0);
        assert_eq!(f.n_max(), 2);
        assert_eq!(f.coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let z = CoeffVec::from_real(5, &[0.0, 0.0]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, CoeffVec::zero());
    }

    #[test]
    fn inner_products() {
        let one = CoeffVec::from_real(0, &[1.0]).unwrap();
        let at1 = CoeffVec::from_real(1, &[1.0]).unwrap();
        assert_eq!(inner(&one, &one), c(1.0, 0.0));
        assert_eq!(inner(&demo(), &demo()), c(2.0, 0.0));
        assert_eq!(inner(&one, &at1), c(0.0, 0.0));
        let f = CoeffVec::new(0, vec![c(1.0, 2.0), c(0.0, -1.0)]).unwrap();
        let g = CoeffVec::new(0, vec![c(0.5, 0.0), c(3.0, 1.0)]).unwrap();
        // conjugate-linear in the second slot
        let lhs = inner(&f, &(&g * c(0.0, 2.0)));
        assert_abs_diff_eq!((lhs - inner(&f, &g) * c(0.0, -2.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn norms() {
        assert_eq!(norm_sq(&CoeffVec::from_real(0, &[1.0]).unwrap()), 1.0);
        assert_eq!(norm_sq(&demo()), 2.0);
        assert_eq!(norm_sq(&CoeffVec::new(0, vec![c(0.0, 3.0)]).unwrap()), 9.0);
        assert_eq!(norm_sq(&CoeffVec::zero()), 0.0);
    }

    #[test]
    fn evaluate_interpolates_and_matches_half_integer_value() {
        let one = CoeffVec::from_real(0, &[1.0]).unwrap();
        assert_eq!(evaluate(&one, 0.0), c(1.0, 0.0));
        assert_abs_diff_eq!(evaluate(&one, 0.5).re, 2.0 / PI, epsilon = 1e-15);
        assert_eq!(evaluate(&demo(), 1.0), c(1.0, 0.0));
        let f = CoeffVec::new(-3, vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.0), c(1.1, 1.1)]).unwrap();
        for (n, v) in f.iter() {
            assert_eq!(evaluate(&f, n as f64), v);
        }
    }

    #[test]
    fn shifted_inner_examples() {
        let one = CoeffVec::from_real(0, &[1.0]).unwrap();
        assert_eq!(shifted_inner(&one, &one, 1.0).unwrap(), c(0.0, 0.0));
        assert_abs_diff_eq!(shifted_inner(&demo(), &demo(), 1.0).unwrap().re, 1.0, epsilon = 1e-15);
        // 3 sinc(1/2) + sinc(3/2) = 16/(3π)
        let half = shifted_inner(&demo(), &demo(), 0.5).unwrap();
        assert_abs_diff_eq!(half.re, 16.0 / (3.0 * PI), epsilon = 1e-14);
        assert_eq!(half.im, 0.0);
        assert!(matches!(
            shifted_inner(&one, &one, 0.0),
            Err(UpError::DeltaOutOfRange(_))
        ));
        assert!(shifted_inner(&one, &one, 1.0001).is_err());
    }

    #[test]
    fn integer_shift_is_index_shift() {
        let f = CoeffVec::new(-1, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)]).unwrap();
        let g = CoeffVec::new(0, vec![c(0.5, 0.0), c(1.0, -2.0)]).unwrap();
        let direct = inner(&f.index_shift(1), &g);
        assert_eq!(shifted_inner(&f, &g, 1.0).unwrap(), direct);
    }

    #[test]
    fn alternating_sums_and_admissibility() {
        assert_eq!(alternating_sum(&CoeffVec::from_real(0, &[1.0]).unwrap()), c(1.0, 0.0));
        assert_eq!(alternating_sum(&demo()), c(0.0, 0.0));
        let f = CoeffVec::from_real(-1, &[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(alternating_sum(&f), c(-3.0, 0.0));

        assert!(!is_admissible(&CoeffVec::from_real(0, &[1.0]).unwrap(), 1e-10));
        assert!(is_admissible(&demo(), 1e-10));
        assert!(is_admissible(
            &CoeffVec::from_real(0, &[1.0, 0.0, -1.0]).unwrap(),
            1e-10
        ));
    }

    #[test]
    fn fourier_series_examples() {
        let one = CoeffVec::from_real(0, &[1.0]).unwrap();
        for &t in &[-PI, -1.0, 0.0, 2.5] {
            assert_eq!(fourier_series_value(&one, t), c(1.0, 0.0));
        }
        assert_eq!(fourier_series_value(&demo(), 0.0), c(2.0, 0.0));
        assert_eq!(fourier_series_value(&demo(), PI), c(0.0, 0.0));
        let f = CoeffVec::new(-2, vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.0), c(1.1, 1.1)]).unwrap();
        assert_eq!(fourier_series_value(&f, PI), alternating_sum(&f));
    }

    #[test]
    fn json_round_trip() {
        let f = CoeffVec::new(-2, vec![c(0.1, -1.0 / 3.0), c(2.0, 0.5), c(-0.7, 1e-300)]).unwrap();
        let s = f.to_json();
        let back = CoeffVec::from_json(&s).unwrap();
        assert_eq!(back, f);
        let parsed = CoeffVec::from_json(r#"{"n_min": 0, "coeffs": [[1, 0], [1, 0]]}"#).unwrap();
        assert_eq!(parsed, demo());
        assert!(CoeffVec::from_json(r#"{"n_min": 0, "coeffs": []}"#).is_err());
    }
}
