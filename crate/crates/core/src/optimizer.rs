//! Search for functions that make the difference-operator inequality tight.
//!
//! The ratio `σ_P σ_B / (½ comm_abs)` is minimized over unit-norm admissible
//! sample vectors on a centered support, by projected gradient descent with
//! central finite differences.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffVec;
use crate::error::{Result, UpError};
use crate::kernel::{check_delta, sinc};
use crate::operators::DiffMode;
use crate::oracle;
use crate::random::{project_admissible, rng_from_seed, standard_normal_complex};

/// Ratios below `1 − SUSPECT` are re-evaluated by the oracle.
pub const SUSPECT: f64 = 1e-9;
/// Oracle ratios below `1 − CONFIRMED` abort the run.
pub const CONFIRMED: f64 = 1e-6;
/// Commutator terms below this make a start point unusable.
pub const DEGENERATE_COMM: f64 = 1e-12;
pub const MAX_TRACE: usize = 200;

const FD_STEP: f64 = 1e-6;
const FROZEN: f64 = 1e-12;
const STALL_WINDOW: usize = 20;
const STALL_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 40;
const MAX_RESAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub dim: usize,
    pub delta: f64,
    pub mode: DiffMode,
    pub max_iters: usize,
    pub step0: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            dim: 11,
            delta: 1.0,
            mode: DiffMode::Backward,
            max_iters: 2000,
            step0: 0.1,
            seed: 0,
            restarts: 8,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 3 || self.dim.is_multiple_of(2) {
            return Err(UpError::InvalidConfig(format!(
                "dim must be odd and at least 3, got {}",
                self.dim
            )));
        }
        check_delta(self.delta)?;
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(UpError::InvalidConfig("max_iters and restarts must be positive".into()));
        }
        if !(self.step0.is_finite() && self.step0 > 0.0) {
            return Err(UpError::InvalidConfig(format!(
                "step0 must be positive, got {}",
                self.step0
            )));
        }
        Ok(())
    }

    fn n_min(&self) -> i64 {
        -((self.dim / 2) as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub config: OptimizeConfig,
    pub best_f: CoeffVec,
    pub ratio: f64,
    /// The ratio at `best_f` recomputed by circle quadrature.
    pub oracle_ratio: f64,
    /// `(iteration, ratio)` over accepted steps of the winning restart.
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub best_restart: usize,
    /// Final ratio of every restart; `None` where every start was degenerate.
    pub restart_ratios: Vec<Option<f64>>,
    /// Sub-unit candidates that the oracle did not confirm.
    pub rejected_candidates: usize,
}

/// Fast ratio evaluation on a fixed centered support.
#[derive(Debug, Clone)]
pub struct RatioObjective {
    n_min: i64,
    dim: usize,
    delta: f64,
    mode: DiffMode,
    // sinc(k + δ), then sinc(k + 2δ), for k in −(dim−1)..=dim−1
    shift1: Vec<f64>,
    shift2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioParts {
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub comm_abs: f64,
    pub ratio: f64,
}

impl RatioObjective {
    pub fn new(dim: usize, delta: f64, mode: DiffMode) -> Self {
        let span = dim as i64 - 1;
        let table = |t: f64| (-span..=span).map(|k| sinc(k as f64 + t)).collect();
        RatioObjective {
            n_min: -((dim / 2) as i64),
            dim,
            delta,
            mode,
            shift1: table(delta),
            shift2: table(2.0 * delta),
        }
    }

    fn shifted(&self, table: &[f64], c: &[Complex64]) -> Complex64 {
        let off = self.dim - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in c.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, b) in c.iter().enumerate() {
                row += b.conj() * table[off + i - j];
            }
            acc += a * row;
        }
        acc
    }

    pub fn parts(&self, c: &[Complex64]) -> RatioParts {
        let nf: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        let s = self.shifted(&self.shift1, c);
        let d = self.delta;
        let (sigma_a_sq, comm_abs) = match self.mode {
            DiffMode::Backward => {
                let image = 2.0 * (nf - s.re) / (d * d);
                let mean = (nf - s) / d;
                (image - mean.norm_sqr() / nf, s.norm())
            }
            DiffMode::Central => {
                let s2 = self.shifted(&self.shift2, c);
                let image = (2.0 * nf - 2.0 * s2.re) / (4.0 * d * d);
                let mean = (s.conj() - s) / (2.0 * d);
                (image - mean.norm_sqr() / nf, s.re.abs())
            }
        };
        let (mut m1, mut m2) = (0.0, 0.0);
        for (i, z) in c.iter().enumerate() {
            let n = (self.n_min + i as i64) as f64;
            m1 += n * z.norm_sqr();
            m2 += n * n * z.norm_sqr();
        }
        let sigma_b = (m2 - m1 * m1 / nf).max(0.0).sqrt();
        let sigma_a = sigma_a_sq.max(0.0).sqrt();
        RatioParts {
            sigma_a,
            sigma_b,
            comm_abs,
            ratio: sigma_a * sigma_b / (0.5 * comm_abs),
        }
    }

    /// Projects to the admissible unit sphere; `None` for the zero vector.
    pub fn project(&self, c: &mut [Complex64]) -> Option<()> {
        project_admissible(self.n_min, c);
        let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return None;
        }
        for z in c.iter_mut() {
            *z /= norm;
        }
        Some(())
    }

    fn eval_params(&self, x: &[f64]) -> Option<RatioParts> {
        let mut c: Vec<Complex64> = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        self.project(&mut c)?;
        Some(self.parts(&c))
    }
}

fn to_params(c: &[Complex64]) -> Vec<f64> {
    c.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn to_coeffs(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

struct RestartOutcome {
    coeffs: Vec<Complex64>,
    ratio: f64,
    trace: Vec<(usize, f64)>,
    converged: bool,
    rejected: usize,
}

enum Verdict {
    Accept(f64),
    Reject,
}

struct Runner<'a> {
    cfg: &'a OptimizeConfig,
    objective: RatioObjective,
}

impl Runner<'_> {
    fn judge(&self, x: &[f64], rejected: &mut usize) -> Result<Verdict> {
        let Some(p) = self.objective.eval_params(x) else {
            return Ok(Verdict::Reject);
        };
        if p.comm_abs.is_nan() || p.comm_abs < DEGENERATE_COMM || !p.ratio.is_finite() {
            return Ok(Verdict::Reject);
        }
        if p.ratio < 1.0 - SUSPECT {
            let mut c = to_coeffs(x);
            self.objective.project(&mut c);
            let f = CoeffVec::new(self.cfg.n_min(), c)?;
            let confirmed = oracle::uncertainty_ratio(&f, self.cfg.delta, self.cfg.mode).ratio;
            if confirmed < 1.0 - CONFIRMED {
                return Err(UpError::BoundViolation { ratio: confirmed });
            }
            *rejected += 1;
            return Ok(Verdict::Reject);
        }
        Ok(Verdict::Accept(p.ratio))
    }

    fn start(&self, rng: &mut ChaCha8Rng, warm: Option<&[Complex64]>) -> Option<Vec<Complex64>> {
        if let Some(w) = warm {
            let mut c = w.to_vec();
            if self.objective.project(&mut c).is_some() && self.objective.parts(&c).comm_abs >= DEGENERATE_COMM {
                return Some(c);
            }
        }
        for _ in 0..MAX_RESAMPLES {
            let mut c: Vec<Complex64> = (0..self.cfg.dim).map(|_| standard_normal_complex(rng)).collect();
            if self.objective.project(&mut c).is_none() {
                continue;
            }
            let p = self.objective.parts(&c);
            if p.comm_abs >= DEGENERATE_COMM && p.ratio.is_finite() {
                return Some(c);
            }
        }
        None
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut probe = x.to_vec();
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let orig = probe[i];
            probe[i] = orig + FD_STEP;
            let up = self.objective.eval_params(&probe).map(|p| p.ratio);
            probe[i] = orig - FD_STEP;
            let down = self.objective.eval_params(&probe).map(|p| p.ratio);
            probe[i] = orig;
            if let (Some(u), Some(d)) = (up, down) {
                let g = (u - d) / (2.0 * FD_STEP);
                if g.is_finite() && g.abs() >= FROZEN {
                    grad[i] = g;
                }
            }
        }
        grad
    }

    fn descend(&self, start: Vec<Complex64>) -> Result<RestartOutcome> {
        let mut x = to_params(&start);
        let mut ratio = self.objective.parts(&start).ratio;
        let mut trace = vec![(0, ratio)];
        let mut history = vec![ratio];
        let mut step = self.cfg.step0;
        let mut converged = false;
        let mut rejected = 0;
        for iter in 1..=self.cfg.max_iters {
            let grad = self.gradient(&x);
            if grad.iter().all(|g| *g == 0.0) {
                converged = true;
                break;
            }
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
                if let Verdict::Accept(r) = self.judge(&trial, &mut rejected)? {
                    if r < ratio {
                        accepted = Some((trial, r));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((trial, r)) = accepted else {
                converged = true;
                break;
            };
            let mut c = to_coeffs(&trial);
            self.objective.project(&mut c);
            x = to_params(&c);
            ratio = r;
            step *= 1.5;
            trace.push((iter, ratio));
            history.push(ratio);
            if history.len() > STALL_WINDOW {
                let old = history[history.len() - 1 - STALL_WINDOW];
                if (old - ratio).abs() <= STALL_TOL * ratio.abs() {
                    converged = true;
                    break;
                }
            }
        }
        Ok(RestartOutcome {
            coeffs: to_coeffs(&x),
            ratio,
            trace,
            converged,
            rejected,
        })
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Best ratio over `cfg.restarts` independent descents.
pub fn minimize_ratio(cfg: &OptimizeConfig) -> Result<OptimizeResult> {
    minimize_ratio_from(cfg, None)
}

/// [`minimize_ratio`] with restart 0 started from `warm` (embedded into the
/// centered support by sample index) when given.
pub fn minimize_ratio_from(cfg: &OptimizeConfig, warm: Option<&CoeffVec>) -> Result<OptimizeResult> {
    cfg.validate()?;
    let runner = Runner {
        cfg,
        objective: RatioObjective::new(cfg.dim, cfg.delta, cfg.mode),
    };
    let warm_coeffs = match warm {
        Some(w) => {
            let lo = cfg.n_min();
            let hi = lo + cfg.dim as i64 - 1;
            if w.n_min() < lo || w.n_max() > hi {
                return Err(UpError::InvalidConfig("warm start does not fit the support".into()));
            }
            Some((lo..=hi).map(|n| w.get(n)).collect::<Vec<_>>())
        }
        None => None,
    };
    let outcomes: Vec<Option<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(restart_seed(cfg.seed, r));
            let warm = if r == 0 { warm_coeffs.as_deref() } else { None };
            match runner.start(&mut rng, warm) {
                Some(start) => runner.descend(start).map(Some),
                None => Ok(None),
            }
        })
        .collect::<Result<_>>()?;

    let restart_ratios: Vec<Option<f64>> = outcomes.iter().map(|o| o.as_ref().map(|o| o.ratio)).collect();
    let rejected_candidates = outcomes.iter().flatten().map(|o| o.rejected).sum();
    let (best_restart, best) = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|o| (i, o)))
        .min_by(|a, b| a.1.ratio.total_cmp(&b.1.ratio).then(a.0.cmp(&b.0)))
        .ok_or(UpError::AllStartsDegenerate)?;

    let best_f = CoeffVec::new(cfg.n_min(), best.coeffs)?;
    let oracle_ratio = oracle::uncertainty_ratio(&best_f, cfg.delta, cfg.mode).ratio;
    Ok(OptimizeResult {
        config: *cfg,
        best_f,
        ratio: best.ratio,
        oracle_ratio,
        trace: downsample(&best.trace, MAX_TRACE),
        converged: best.converged,
        best_restart,
        restart_ratios,
        rejected_candidates,
    })
}

/// Keeps the first and last points and evenly spaced ones in between.
pub fn downsample<T: Copy>(points: &[T], max: usize) -> Vec<T> {
    if points.len() <= max {
        return points.to_vec();
    }
    if max < 2 {
        return points[..max].to_vec();
    }
    let last = points.len() - 1;
    (0..max).map(|i| points[i * last / (max - 1)]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub dim: usize,
    pub delta: f64,
    pub ratio: f64,
}

/// Best ratio for every `(dim, δ)`. Dimensions are visited in increasing
/// order and each run is warm-started from the previous dimension's optimum.
pub fn sharpness_profile(dims: &[usize], deltas: &[f64], base: &OptimizeConfig) -> Result<Vec<ProfileEntry>> {
    if dims.is_empty() || deltas.is_empty() {
        return Err(UpError::InvalidConfig("empty dimension or step list".into()));
    }
    let mut sorted = dims.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut cells = Vec::with_capacity(sorted.len() * deltas.len());
    for &delta in deltas {
        let mut previous: Option<CoeffVec> = None;
        for &dim in &sorted {
            let cfg = OptimizeConfig { dim, delta, ..*base };
            let res = minimize_ratio_from(&cfg, previous.as_ref())?;
            cells.push(ProfileEntry {
                dim,
                delta,
                ratio: res.ratio,
            });
            previous = Some(res.best_f);
        }
    }
    cells.sort_by_key(|c| c.dim);
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::alternating_sum;
    use crate::functionals::Verifier;

    fn cfg(dim: usize, delta: f64, mode: DiffMode) -> OptimizeConfig {
        OptimizeConfig {
            dim,
            delta,
            mode,
            max_iters: 400,
            seed: 11,
            restarts: 3,
            ..Default::default()
        }
    }

    #[test]
    fn objective_matches_verifier() {
        let v = Verifier::default();
        let mut rng = rng_from_seed(5);
        for mode in [DiffMode::Backward, DiffMode::Central] {
            for &delta in &[1.0, 0.25] {
                let f = crate::random::random_coeffs(&mut rng, 7, true).unwrap();
                let obj = RatioObjective::new(7, delta, mode);
                let mut c: Vec<Complex64> = (-3..=3).map(|n| f.get(n)).collect();
                obj.project(&mut c).unwrap();
                let p = obj.parts(&c);
                let r = match mode {
                    DiffMode::Backward => v.check_backward_up(&f, delta, None, None).unwrap(),
                    DiffMode::Central => v.check_central_up(&f, delta, None, None).unwrap(),
                };
                let ch = r.chain.unwrap();
                assert!((p.sigma_a - ch.sigma_a).abs() < 1e-12);
                assert!((p.sigma_b - ch.sigma_b).abs() < 1e-12);
                assert!((p.comm_abs - ch.comm_abs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_run_respects_bound_and_constraints() {
        let res = minimize_ratio(&cfg(3, 1.0, DiffMode::Backward)).unwrap();
        assert!(res.ratio >= 1.0 - SUSPECT);
        assert!(alternating_sum(&res.best_f).norm() <= 1e-12);
        assert!((res.best_f.norm() - 1.0).abs() <= 1e-12);
        assert!((res.oracle_ratio - res.ratio).abs() <= 1e-6 * res.ratio);
        assert!(res.trace.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
        assert!(res.trace.len() <= MAX_TRACE);
    }

    #[test]
    fn descent_is_monotone_on_larger_support() {
        let res = minimize_ratio(&cfg(21, 0.125, DiffMode::Backward)).unwrap();
        let first = res.trace.first().unwrap().1;
        assert!(res.ratio <= first);
        assert!(res.trace.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(res.ratio >= 1.0 - SUSPECT);
    }

    #[test]
    fn runs_repeat_for_fixed_seed() {
        let c = cfg(5, 0.5, DiffMode::Central);
        let a = minimize_ratio(&c).unwrap();
        let b = minimize_ratio(&c).unwrap();
        assert_eq!(a.best_f, b.best_f);
        assert_eq!(a.ratio, b.ratio);
    }

    #[test]
    fn config_validation() {
        for bad in [
            OptimizeConfig {
                dim: 4,
                ..Default::default()
            },
            OptimizeConfig {
                dim: 1,
                ..Default::default()
            },
            OptimizeConfig {
                delta: 0.0,
                ..Default::default()
            },
            OptimizeConfig {
                restarts: 0,
                ..Default::default()
            },
            OptimizeConfig {
                step0: -1.0,
                ..Default::default()
            },
        ] {
            assert!(minimize_ratio(&bad).is_err());
        }
    }

    #[test]
    fn profile_is_nonincreasing_in_dim() {
        let base = OptimizeConfig {
            max_iters: 300,
            restarts: 2,
            seed: 3,
            ..Default::default()
        };
        let rows = sharpness_profile(&[9, 5, 3], &[1.0, 0.5], &base).unwrap();
        assert_eq!(rows.len(), 6);
        for &delta in &[1.0, 0.5] {
            let r: Vec<f64> = rows.iter().filter(|e| e.delta == delta).map(|e| e.ratio).collect();
            assert!(r.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{r:?}");
        }
        let single = sharpness_profile(&[3], &[1.0], &base).unwrap();
        let direct = minimize_ratio(&OptimizeConfig {
            dim: 3,
            delta: 1.0,
            ..base
        })
        .unwrap();
        assert_eq!(single[0].ratio, direct.ratio);
    }

    #[test]
    fn downsample_bounds() {
        let pts: Vec<usize> = (0..1000).collect();
        let d = downsample(&pts, 200);
        assert_eq!(d.len(), 200);
        assert_eq!((d[0], d[199]), (0, 999));
        assert_eq!(downsample(&pts[..5], 200), pts[..5].to_vec());
    }
}
