//! Seeded random sample vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coeffs::CoeffVec;
use crate::error::{Result, UpError};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Removes the alternating sum by orthogonal projection onto the hyperplane
/// `Σ (−1)^n c_n = 0`.
pub fn project_admissible(n_min: i64, coeffs: &mut [Complex64]) {
    if coeffs.is_empty() {
        return;
    }
    let sign = |i: usize| {
        if (n_min + i as i64).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let alt: Complex64 = coeffs.iter().enumerate().map(|(i, c)| c * sign(i)).sum();
    let share = alt / coeffs.len() as f64;
    for (i, c) in coeffs.iter_mut().enumerate() {
        *c -= share * sign(i);
    }
}

/// Unit-norm vector of `dim` standard complex normals on indices starting at
/// `−(dim/2)`, projected to the admissible hyperplane when asked.
pub fn random_coeffs<R: Rng + ?Sized>(rng: &mut R, dim: usize, admissible: bool) -> Result<CoeffVec> {
    if dim == 0 {
        return Err(UpError::InvalidConfig("dimension must be at least 1".into()));
    }
    if admissible && dim < 2 {
        return Err(UpError::InvalidConfig(
            "admissible vectors need dimension at least 2".into(),
        ));
    }
    let n_min = -((dim / 2) as i64);
    let mut coeffs: Vec<Complex64> = (0..dim).map(|_| standard_normal_complex(rng)).collect();
    if admissible {
        project_admissible(n_min, &mut coeffs);
    }
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    CoeffVec::new(n_min, coeffs)
}
