//! Expectations, standard deviations and the uncertainty inequalities as
//! residual computations.
//!
//! Checks for operator pairs report the whole chain
//! `‖(X−a)f‖‖(Y−b)f‖ ≥ σ_X σ_Y ≥ ½|⟨[X,Y]f, f⟩|` through [`ChainLinks`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{inner, norm_sq, require_admissible, require_nonzero, shifted_inner, CoeffVec};
use crate::dilation::{dilate, Dilated};
use crate::error::Result;
use crate::kernel::check_delta;
use crate::multiplier::Multiplier;
use crate::operators::{commutator_expectation, deviation_norm_sq, DiffMode, OperatorSpec};
use crate::tolerance::ToleranceConfig;

/// Commutator terms below this are reported as a degenerate bound.
pub const DEGENERATE_BOUND: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Expectation and standard deviation of one operator for one function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub tau: Complex64,
    pub sigma: f64,
    pub norm_sq_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    GeneralPair,
    BackwardUp,
    CentralUp,
    BreitenbergerSequence,
    Heisenberg,
    SineCircle,
    Localization,
    Bernstein,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 8] = [
        InequalityKind::GeneralPair,
        InequalityKind::BackwardUp,
        InequalityKind::CentralUp,
        InequalityKind::BreitenbergerSequence,
        InequalityKind::Heisenberg,
        InequalityKind::SineCircle,
        InequalityKind::Localization,
        InequalityKind::Bernstein,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityKind::GeneralPair => "general_pair",
            InequalityKind::BackwardUp => "backward_up",
            InequalityKind::CentralUp => "central_up",
            InequalityKind::BreitenbergerSequence => "breitenberger_sequence",
            InequalityKind::Heisenberg => "heisenberg",
            InequalityKind::SineCircle => "sine_circle",
            InequalityKind::Localization => "localization",
            InequalityKind::Bernstein => "bernstein",
        }
    }

    /// Whether the check needs `x f ∈ L²`.
    pub fn needs_admissible(&self) -> bool {
        !matches!(self, InequalityKind::BreitenbergerSequence | InequalityKind::Bernstein)
    }
}

impl std::str::FromStr for InequalityKind {
    type Err = crate::error::UpError;

    fn from_str(s: &str) -> Result<Self> {
        InequalityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| crate::error::UpError::InvalidConfig(format!("unknown check {s:?}")))
    }
}

/// Parameters a check was evaluated at.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_a: Option<OperatorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_b: Option<OperatorSpec>,
}

/// Factors of `‖(X−a)f‖‖(Y−b)f‖ ≥ σ_X σ_Y ≥ ½|⟨[X,Y]f,f⟩|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainLinks {
    pub dev_a: f64,
    pub dev_b: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub comm_abs: f64,
    /// `dev_a·dev_b − σ_a·σ_b`.
    pub chain1: f64,
    /// `σ_a·σ_b − ½ comm_abs`.
    pub chain2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
    pub params: ReportParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainLinks>,
    #[serde(default)]
    pub degenerate_bound: bool,
}

impl InequalityReport {
    /// `residual / ‖f‖²`, invariant under `f → cf`.
    pub fn normalized_residual(&self, norm_sq_f: f64) -> f64 {
        self.residual / norm_sq_f
    }
}

/// Entry point for every functional and inequality check, carrying the
/// tolerances they are evaluated with.
#[derive(Debug, Clone, Copy, Default)]
pub struct Verifier {
    tol: ToleranceConfig,
}

impl Verifier {
    pub fn new(tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        Ok(Verifier { tol })
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tol
    }

    fn prepare(&self, op: &OperatorSpec, f: &CoeffVec) -> Result<()> {
        op.validate()?;
        require_nonzero(f)?;
        if op.needs_admissible() {
            require_admissible(f, self.tol.eq_tol)?;
        }
        Ok(())
    }

    /// `τ_X(f) = ⟨Xf, f⟩/⟨f, f⟩`.
    pub fn expectation(&self, op: &OperatorSpec, f: &CoeffVec) -> Result<Complex64> {
        self.prepare(op, f)?;
        let num = match op.multiplier() {
            Some(m) => m.inner(f, &Multiplier::identity(), f),
            None => Complex64::new(f.iter().map(|(n, c)| n as f64 * c.norm_sqr()).sum::<f64>(), 0.0),
        };
        Ok(num / norm_sq(f))
    }

    /// `σ_X(f) = √(‖Xf‖² − |τ|²‖f‖²)`, clamped at zero.
    pub fn variance(&self, op: &OperatorSpec, f: &CoeffVec) -> Result<FunctionalReport> {
        let tau = self.expectation(op, f)?;
        let nf = norm_sq(f);
        let image = deviation_norm_sq(op, f, ZERO, self.tol.eq_tol)?;
        let sigma_sq = image - tau.norm_sqr() * nf;
        Ok(FunctionalReport {
            tau,
            sigma: sigma_sq.max(0.0).sqrt(),
            norm_sq_f: nf,
        })
    }

    /// `‖(X − a) f‖`.
    pub fn deviation(&self, op: &OperatorSpec, f: &CoeffVec, a: Complex64) -> Result<f64> {
        self.prepare(op, f)?;
        Ok(deviation_norm_sq(op, f, a, self.tol.eq_tol)?.sqrt())
    }

    fn chain_report(
        &self,
        name: InequalityKind,
        params: ReportParams,
        devs: (f64, f64),
        sigmas: (f64, f64),
        comm_abs: f64,
    ) -> InequalityReport {
        let lhs = devs.0 * devs.1;
        let rhs = 0.5 * comm_abs;
        let sigma_prod = sigmas.0 * sigmas.1;
        let chain = ChainLinks {
            dev_a: devs.0,
            dev_b: devs.1,
            sigma_a: sigmas.0,
            sigma_b: sigmas.1,
            comm_abs,
            chain1: lhs - sigma_prod,
            chain2: sigma_prod - rhs,
        };
        let residual = lhs - rhs;
        let slack = -self.tol.ineq_slack;
        InequalityReport {
            name,
            lhs,
            rhs,
            residual,
            pass: residual >= slack && chain.chain1 >= slack && chain.chain2 >= slack,
            params,
            chain: Some(chain),
            degenerate_bound: rhs < DEGENERATE_BOUND,
        }
    }

    fn plain_report(&self, name: InequalityKind, params: ReportParams, lhs: f64, rhs: f64) -> InequalityReport {
        let residual = lhs - rhs;
        InequalityReport {
            name,
            lhs,
            rhs,
            residual,
            pass: residual >= -self.tol.ineq_slack,
            params,
            chain: None,
            degenerate_bound: false,
        }
    }

    /// Both links of the abstract chain for an arbitrary operator pair.
    /// `a`, `b` default to the expectations.
    pub fn check_general_pair(
        &self,
        op_a: &OperatorSpec,
        op_b: &OperatorSpec,
        f: &CoeffVec,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        let va = self.variance(op_a, f)?;
        let vb = self.variance(op_b, f)?;
        let a = a.unwrap_or(va.tau);
        let b = b.unwrap_or(vb.tau);
        let devs = (self.deviation(op_a, f, a)?, self.deviation(op_b, f, b)?);
        let comm = commutator_expectation(op_a, op_b, f, self.tol.eq_tol)?;
        let params = ReportParams {
            a: Some(a),
            b: Some(b),
            op_a: Some(*op_a),
            op_b: Some(*op_b),
            ..Default::default()
        };
        Ok(self.chain_report(
            InequalityKind::GeneralPair,
            params,
            devs,
            (va.sigma, vb.sigma),
            comm.norm(),
        ))
    }

    fn difference_up(
        &self,
        mode: DiffMode,
        f: &CoeffVec,
        delta: f64,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        check_delta(delta)?;
        let op = mode.operator(delta);
        let va = self.variance(&op, f)?;
        let vb = self.variance(&OperatorSpec::MultB, f)?;
        let a = a.unwrap_or(va.tau);
        let b = b.unwrap_or(vb.tau);
        let devs = (self.deviation(&op, f, a)?, self.deviation(&OperatorSpec::MultB, f, b)?);
        let s = shifted_inner(f, f, delta)?;
        let (name, comm_abs) = match mode {
            DiffMode::Backward => (InequalityKind::BackwardUp, s.norm()),
            // ⟨f(·+δ), f⟩ = conj ⟨f(·−δ), f⟩
            DiffMode::Central => (InequalityKind::CentralUp, (0.5 * (s + s.conj())).norm()),
        };
        let params = ReportParams {
            delta: Some(delta),
            a: Some(a),
            b: Some(b),
            ..Default::default()
        };
        Ok(self.chain_report(name, params, devs, (va.sigma, vb.sigma), comm_abs))
    }

    /// `‖(A_δ−a)f‖‖(B−b)f‖ ≥ σ_{A_δ}σ_B ≥ ½|⟨f(·−δ), f⟩|`.
    pub fn check_backward_up(
        &self,
        f: &CoeffVec,
        delta: f64,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        self.difference_up(DiffMode::Backward, f, delta, a, b)
    }

    /// `‖(C_δ−a)f‖‖(B−b)f‖ ≥ σ_{C_δ}σ_B ≥ ½|⟨(f(·+δ)+f(·−δ))/2, f⟩|`.
    pub fn check_central_up(
        &self,
        f: &CoeffVec,
        delta: f64,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        self.difference_up(DiffMode::Central, f, delta, a, b)
    }

    /// Circle inequality for `e^{iθ}` and `d/dθ`, written on the Fourier
    /// coefficients: `‖f(n−1) − a f(n)‖ ‖(n−b) f(n)‖ ≥ ½|Σ f(n−1) conj f(n)|`.
    ///
    /// Works on any finite sequence. Computed from plain sequence sums; at unit
    /// step it matches [`Verifier::check_backward_up`] with `a ↦ 1 − a`.
    pub fn check_breitenberger_sequence(
        &self,
        seq: &CoeffVec,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        require_nonzero(seq)?;
        let nf = norm_sq(seq);
        let shifted = seq.index_shift(1);
        let comm = inner(&shifted, seq);
        let tau_a = comm / nf;
        let tau_b: f64 = seq.iter().map(|(n, c)| n as f64 * c.norm_sqr()).sum::<f64>() / nf;
        let a = a.unwrap_or(tau_a);
        let b = b.unwrap_or(Complex64::new(tau_b, 0.0));
        let shift_dev = |z: Complex64| norm_sq(&(&shifted - &(seq * z))).sqrt();
        let position_dev = |z: Complex64| {
            seq.iter()
                .map(|(n, c)| ((n as f64 - z) * c).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let devs = (shift_dev(a), position_dev(b));
        let sigmas = (shift_dev(tau_a), position_dev(Complex64::new(tau_b, 0.0)));
        let params = ReportParams {
            delta: Some(1.0),
            a: Some(a),
            b: Some(b),
            ..Default::default()
        };
        Ok(self.chain_report(InequalityKind::BreitenbergerSequence, params, devs, sigmas, comm.norm()))
    }

    /// `‖(d/dx − a)f‖ ‖(x − b)f‖ ≥ ½‖f‖²`.
    pub fn check_heisenberg(
        &self,
        f: &CoeffVec,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        let d = OperatorSpec::Derivative;
        let vd = self.variance(&d, f)?;
        let vb = self.variance(&OperatorSpec::MultB, f)?;
        let a = a.unwrap_or(vd.tau);
        let b = b.unwrap_or(vb.tau);
        let devs = (self.deviation(&d, f, a)?, self.deviation(&OperatorSpec::MultB, f, b)?);
        let params = ReportParams {
            a: Some(a),
            b: Some(b),
            ..Default::default()
        };
        Ok(self.chain_report(
            InequalityKind::Heisenberg,
            params,
            devs,
            (vd.sigma, vb.sigma),
            vd.norm_sq_f,
        ))
    }

    /// Circle inequality for `sin θ` and `d/dθ` with bound `½|⟨cos θ f̌, f̌⟩|`,
    /// evaluated on the coefficients: `sin θ f̌ ↔ (f(n−1) − f(n+1))/2i`,
    /// `cos θ f̌ ↔ (f(n−1) + f(n+1))/2`, `d/dθ f̌ ↔ i n f(n)`.
    ///
    /// Equals [`Verifier::check_central_up`] at unit step with `a ↦ i a`, `b ↦ i b`.
    pub fn check_sine_circle(
        &self,
        f: &CoeffVec,
        a: Option<Complex64>,
        b: Option<Complex64>,
    ) -> Result<InequalityReport> {
        require_nonzero(f)?;
        require_admissible(f, self.tol.eq_tol)?;
        let nf = norm_sq(f);
        let behind = f.index_shift(1);
        let ahead = f.index_shift(-1);
        let sine = &(&behind - &ahead) * Complex64::new(0.0, -0.5);
        let cosine = &(&behind + &ahead) * 0.5;
        let angular = f.map_indexed(|n, c| c * Complex64::new(0.0, n as f64));
        let tau_a = inner(&sine, f) / nf;
        let tau_b = inner(&angular, f) / nf;
        let a = a.unwrap_or(tau_a);
        let b = b.unwrap_or(tau_b);
        let dev = |g: &CoeffVec, z: Complex64| norm_sq(&(g - &(f * z))).sqrt();
        let devs = (dev(&sine, a), dev(&angular, b));
        let sigmas = (dev(&sine, tau_a), dev(&angular, tau_b));
        let params = ReportParams {
            delta: Some(1.0),
            a: Some(a),
            b: Some(b),
            ..Default::default()
        };
        Ok(self.chain_report(
            InequalityKind::SineCircle,
            params,
            devs,
            sigmas,
            inner(&cosine, f).norm(),
        ))
    }

    /// `‖(x − a) g‖ ≥ ‖g‖/(2R)` for `g` the band-`R` dilation of `f`;
    /// `a` defaults to the position mean.
    pub fn check_localization(&self, f: &CoeffVec, a: Option<Complex64>, band: f64) -> Result<InequalityReport> {
        let g = dilate(f, band)?;
        self.check_localization_dilated(&g, a)
    }

    pub fn check_localization_dilated(&self, g: &Dilated, a: Option<Complex64>) -> Result<InequalityReport> {
        let a = match a {
            Some(a) => a,
            None => Complex64::new(g.position_mean(self.tol.eq_tol)?, 0.0),
        };
        require_nonzero(g.samples())?;
        let lhs = g.position_spread(a, self.tol.eq_tol)?;
        let rhs = g.norm_sq().sqrt() / (2.0 * g.band());
        let params = ReportParams {
            a: Some(a),
            band: Some(g.band()),
            ..Default::default()
        };
        Ok(self.plain_report(InequalityKind::Localization, params, lhs, rhs))
    }

    /// `‖f'‖ ≤ π‖f‖`, reported as `lhs = π‖f‖`, `rhs = ‖f'‖`.
    pub fn check_bernstein(&self, f: &CoeffVec) -> Result<InequalityReport> {
        let g = dilate(f, PI)?;
        self.check_bernstein_dilated(&g)
    }

    /// `‖g'‖ ≤ R‖g‖` for a dilated function.
    pub fn check_bernstein_dilated(&self, g: &Dilated) -> Result<InequalityReport> {
        require_nonzero(g.samples())?;
        let lhs = g.band() * g.norm_sq().sqrt();
        let rhs = g.derivative_norm();
        let params = ReportParams {
            band: Some(g.band()),
            ..Default::default()
        };
        Ok(self.plain_report(InequalityKind::Bernstein, params, lhs, rhs))
    }

    /// Runs `kind` with its default parameters; `delta` feeds the
    /// difference-operator checks and the operator of the general pair.
    pub fn run_default(&self, kind: InequalityKind, f: &CoeffVec, delta: f64) -> Result<InequalityReport> {
        match kind {
            InequalityKind::GeneralPair => self.check_general_pair(
                &OperatorSpec::BackwardDiff { delta },
                &OperatorSpec::MultB,
                f,
                None,
                None,
            ),
            InequalityKind::BackwardUp => self.check_backward_up(f, delta, None, None),
            InequalityKind::CentralUp => self.check_central_up(f, delta, None, None),
            InequalityKind::BreitenbergerSequence => self.check_breitenberger_sequence(f, None, None),
            InequalityKind::Heisenberg => self.check_heisenberg(f, None, None),
            InequalityKind::SineCircle => self.check_sine_circle(f, None, None),
            InequalityKind::Localization => self.check_localization(f, None, PI),
            InequalityKind::Bernstein => self.check_bernstein(f),
        }
    }
}
