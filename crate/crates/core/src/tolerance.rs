use serde::{Deserialize, Serialize};

use crate::error::{Result, UpError};

/// Numerical tolerances shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Closed-form identities (kernel algebra, admissibility).
    pub eq_tol: f64,
    /// Relative agreement required against quadrature oracles.
    pub oracle_tol: f64,
    /// Negative residual tolerated as rounding in an inequality check.
    pub ineq_slack: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eq_tol: 1e-10,
            oracle_tol: 1e-6,
            ineq_slack: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.eq_tol, self.oracle_tol, self.ineq_slack]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if all_positive {
            Ok(())
        } else {
            Err(UpError::InvalidConfig(format!(
                "tolerances must be strictly positive: {self:?}"
            )))
        }
    }
}
