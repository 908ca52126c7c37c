//! Uncertainty inequalities for band-limited functions.
//!
//! Functions of band limit π are represented by their integer samples
//! ([`CoeffVec`]). On top of that representation the crate provides the
//! backward and central difference operators, multiplication by `x`,
//! differentiation, and residual checks for the family of uncertainty
//! inequalities they satisfy, from the circle case (unit step) down to the
//! Heisenberg limit (step → 0).

pub mod coeffs;
pub mod dilation;
pub mod error;
pub mod functionals;
pub mod kernel;
pub mod limits;
pub mod multiplier;
pub mod operators;
pub mod optimizer;
pub mod oracle;
pub mod quadrature;
pub mod random;
pub mod tolerance;

pub use coeffs::{
    alternating_sum, evaluate, fourier_series_value, inner, is_admissible, norm_sq, shifted_inner, CoeffVec,
};
pub use dilation::{dilate, Dilated};
pub use error::{Result, UpError};
pub use functionals::{ChainLinks, FunctionalReport, InequalityKind, InequalityReport, ReportParams, Verifier};
pub use kernel::{sinc, GramKernel};
pub use operators::{ApplyResult, DiffMode, OperatorSpec, DEFAULT_PADDING};
pub use tolerance::ToleranceConfig;
