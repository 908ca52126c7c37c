//! Band limits other than π, handled by unitary dilation.
//!
//! `g(x) = √(R/π) f(Rx/π)` has band limit `R` and the same norm as `f`.
//! Position spreads scale by `π/R`, frequency spreads by `R/π`; nothing is
//! resampled.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::coeffs::{norm_sq, require_admissible, require_nonzero, CoeffVec};
use crate::error::{Result, UpError};
use crate::multiplier::Multiplier;
use crate::operators::{deviation_norm_sq, OperatorSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Dilated {
    samples: CoeffVec,
    band: f64,
}

pub fn dilate(f: &CoeffVec, band: f64) -> Result<Dilated> {
    if !(band.is_finite() && band > 0.0) {
        return Err(UpError::InvalidBand(band));
    }
    Ok(Dilated {
        samples: f.clone(),
        band,
    })
}

impl Dilated {
    pub fn band(&self) -> f64 {
        self.band
    }

    /// Samples of the band-π prototype.
    pub fn samples(&self) -> &CoeffVec {
        &self.samples
    }

    /// Length scale `π/R` between the dilated function and its prototype.
    pub fn scale(&self) -> f64 {
        PI / self.band
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.samples)
    }

    /// `‖(x − a) g‖`.
    pub fn position_spread(&self, a: Complex64, eq_tol: f64) -> Result<f64> {
        let s = self.scale();
        let dev = deviation_norm_sq(&OperatorSpec::MultB, &self.samples, a / s, eq_tol)?;
        Ok(s * dev.sqrt())
    }

    /// `‖(d/dx − a) g‖`.
    pub fn frequency_spread(&self, a: Complex64) -> Result<f64> {
        let s = self.scale();
        let dev = deviation_norm_sq(&OperatorSpec::Derivative, &self.samples, a * s, 0.0)?;
        Ok(dev.sqrt() / s)
    }

    /// `τ_B(g) = ⟨x g, g⟩/‖g‖²`.
    pub fn position_mean(&self, eq_tol: f64) -> Result<f64> {
        require_admissible(&self.samples, eq_tol)?;
        require_nonzero(&self.samples)?;
        let weighted: f64 = self.samples.iter().map(|(n, c)| n as f64 * c.norm_sqr()).sum();
        Ok(self.scale() * weighted / self.norm_sq())
    }

    /// `τ_D(g) = ⟨g', g⟩/‖g‖²`.
    pub fn frequency_mean(&self) -> Result<Complex64> {
        require_nonzero(&self.samples)?;
        let tau =
            Multiplier::derivative().inner(&self.samples, &Multiplier::identity(), &self.samples) / self.norm_sq();
        Ok(tau / self.scale())
    }

    pub fn sigma_b(&self, eq_tol: f64) -> Result<f64> {
        let mean = self.position_mean(eq_tol)?;
        self.position_spread(Complex64::new(mean, 0.0), eq_tol)
    }

    pub fn sigma_d(&self) -> Result<f64> {
        let mean = self.frequency_mean()?;
        self.frequency_spread(mean)
    }

    /// `‖g'‖`.
    pub fn derivative_norm(&self) -> f64 {
        Multiplier::derivative().norm_sq(&self.samples).sqrt() / self.scale()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn demo() -> CoeffVec {
        CoeffVec::from_real(0, &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn identity_at_pi() {
        let g = dilate(&demo(), PI).unwrap();
        assert_eq!(g.scale(), 1.0);
        assert_abs_diff_eq!(g.sigma_b(1e-10).unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.position_mean(1e-10).unwrap(), 0.5);
    }

    #[test]
    fn doubling_the_band_halves_position_and_doubles_frequency_spread() {
        let base = dilate(&demo(), PI).unwrap();
        let wide = dilate(&demo(), 2.0 * PI).unwrap();
        assert_abs_diff_eq!(
            wide.sigma_b(1e-10).unwrap(),
            0.5 * base.sigma_b(1e-10).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(wide.sigma_d().unwrap(), 2.0 * base.sigma_d().unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(wide.derivative_norm(), 2.0 * base.derivative_norm(), epsilon = 1e-14);
        // the Heisenberg product is dilation invariant
        let p0 = base.sigma_b(1e-10).unwrap() * base.sigma_d().unwrap();
        let p1 = wide.sigma_b(1e-10).unwrap() * wide.sigma_d().unwrap();
        assert_abs_diff_eq!(p0, p1, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_positive_band() {
        assert!(matches!(dilate(&demo(), 0.0), Err(UpError::InvalidBand(_))));
        assert!(dilate(&demo(), -1.0).is_err());
        assert!(dilate(&demo(), f64::NAN).is_err());
    }
}
