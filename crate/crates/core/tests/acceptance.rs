//! Release gate. Prints one PASS/FAIL line per criterion and exits nonzero if
//! any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use bandlimited_up::limits::{commutator_limit_check, convergence_rate};
use bandlimited_up::operators::commutator_grid_deviation;
use bandlimited_up::optimizer::{minimize_ratio, OptimizeConfig};
use bandlimited_up::oracle::{
    circle_quadrature_moment, dense_grid_inner, operator_inner, uncertainty_ratio, validate_kernels, CircleWeight,
    GridSpec,
};
use bandlimited_up::random::{random_coeffs, rng_from_seed, standard_normal_complex};
use bandlimited_up::{inner, norm_sq, shifted_inner, CoeffVec, DiffMode, OperatorSpec, Verifier, DEFAULT_PADDING};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

const SLACK: f64 = 1e-10;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn demo() -> CoeffVec {
    CoeffVec::from_real(0, &[1.0, 1.0]).unwrap()
}

fn chain_ordering() -> Outcome {
    let v = Verifier::default();
    let mut rng = rng_from_seed(1);
    let funcs: Vec<CoeffVec> = (0..1000)
        .map(|_| {
            let dim = rng.random_range(3..=33);
            random_coeffs(&mut rng, dim, true).unwrap()
        })
        .collect();
    let worst = funcs
        .par_iter()
        .map(|f| {
            let mut worst = f64::INFINITY;
            for &d in &[1.0, 0.5, 0.25, 0.125] {
                for r in [
                    v.check_backward_up(f, d, None, None).unwrap(),
                    v.check_central_up(f, d, None, None).unwrap(),
                ] {
                    let ch = r.chain.unwrap();
                    worst = worst.min(ch.chain1).min(ch.chain2);
                }
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    outcome(worst >= -SLACK, format!("min chain link {worst:.3e} over 8000 cases"))
}

fn commutator_identities() -> Outcome {
    let mut rng = rng_from_seed(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = rng.random_range(2..=21);
        let f = random_coeffs(&mut rng, dim, true).unwrap();
        for &d in &[1.0, 0.5] {
            for mode in [DiffMode::Backward, DiffMode::Central] {
                let dev = commutator_grid_deviation(&f, d, mode, DEFAULT_PADDING).unwrap();
                worst = worst.max(dev / f.norm());
            }
        }
    }
    outcome(worst <= 1e-9, format!("max deviation / norm {worst:.3e}"))
}

fn circle_dictionary() -> Outcome {
    let v = Verifier::default();
    let mut rng = rng_from_seed(3);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = rng.random_range(2..=25);
        let f = random_coeffs(&mut rng, dim, true).unwrap();
        let a = standard_normal_complex(&mut rng);
        let b = standard_normal_complex(&mut rng);
        let line = v.check_backward_up(&f, 1.0, Some(a), Some(b)).unwrap().chain.unwrap();
        let seq = v
            .check_breitenberger_sequence(&f, Some(one - a), Some(b))
            .unwrap()
            .chain
            .unwrap();
        for (x, y) in [
            (line.dev_a, seq.dev_a),
            (line.dev_b, seq.dev_b),
            (line.sigma_a, seq.sigma_a),
            (line.sigma_b, seq.sigma_b),
            (line.comm_abs, seq.comm_abs),
        ] {
            worst = worst.max((x - y).abs());
        }
        let cen = v.check_central_up(&f, 1.0, Some(a), Some(b)).unwrap().chain.unwrap();
        let sin = v
            .check_sine_circle(&f, Some(i * a), Some(i * b))
            .unwrap()
            .chain
            .unwrap();
        for (x, y) in [
            (cen.dev_a, sin.dev_a),
            (cen.dev_b, sin.dev_b),
            (cen.sigma_a, sin.sigma_a),
            (cen.sigma_b, sin.sigma_b),
            (cen.comm_abs, sin.comm_abs),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max factor difference {worst:.3e}"))
}

fn heisenberg_limit() -> Outcome {
    let v = Verifier::default();
    let mut rng = rng_from_seed(4);
    let mut funcs = vec![demo()];
    for _ in 0..20 {
        let dim = rng.random_range(2..=21);
        funcs.push(random_coeffs(&mut rng, dim, true).unwrap());
    }
    let grid: Vec<f64> = (1..=8).map(|k| 0.5f64.powi(k)).collect();
    let tiny = 0.5f64.powi(10);
    let (mut worst_gap, mut slope_lo, mut slope_hi, mut worst_res) =
        (0.0f64, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for f in &funcs {
        let gap = commutator_limit_check(f, &[tiny]).unwrap()[0].gap / norm_sq(f);
        worst_gap = worst_gap.max(gap);
        let slope = convergence_rate(f, &grid).unwrap();
        slope_lo = slope_lo.min(slope);
        slope_hi = slope_hi.max(slope);
        worst_res = worst_res.min(v.check_heisenberg(f, None, None).unwrap().residual);
    }
    let pass = worst_gap <= 0.01 && slope_lo >= 0.9 && slope_hi <= 1.1 && worst_res >= -SLACK;
    outcome(
        pass,
        format!("max relative gap {worst_gap:.3e}, slopes [{slope_lo:.4}, {slope_hi:.4}], min Heisenberg residual {worst_res:.3e}"),
    )
}

fn worked_numbers() -> Outcome {
    let v = Verifier::default();
    let f = demo();
    let oracle_sigma = |op: &OperatorSpec| {
        let nf = circle_quadrature_moment(&f, CircleWeight::One).re;
        let image = operator_inner(op, &f, op, &f).re;
        let mean = bandlimited_up::oracle::operator_expectation_num(op, &f, &f);
        (image - mean.norm_sqr() / nf).sqrt()
    };
    let sigma = |op: OperatorSpec| v.variance(&op, &f).unwrap().sigma;
    let shift = |d: f64| shifted_inner(&f, &f, d).unwrap();
    let deriv_sq =
        bandlimited_up::operators::deviation_norm_sq(&OperatorSpec::Derivative, &f, Complex64::new(0.0, 0.0), 1e-10)
            .unwrap();
    let grid = GridSpec::default_for(&f, &f);
    let dense = |d: f64| dense_grid_inner(&f, &f, d, &grid).unwrap().value;
    // (label, library value, expected, tolerance, oracle value)
    let rows: Vec<(&str, Complex64, f64, f64, Complex64)> = vec![
        (
            "sigma_B",
            sigma(OperatorSpec::MultB).into(),
            0.5f64.sqrt(),
            1e-12,
            oracle_sigma(&OperatorSpec::MultB).into(),
        ),
        (
            "sigma_A1",
            sigma(OperatorSpec::BackwardDiff { delta: 1.0 }).into(),
            1.5f64.sqrt(),
            1e-12,
            oracle_sigma(&OperatorSpec::BackwardDiff { delta: 1.0 }).into(),
        ),
        ("<f(.-1),f>", shift(1.0), 1.0, 1e-12, dense(1.0)),
        ("<f(.-1/2),f>", shift(0.5), 16.0 / (3.0 * PI), 1e-10, dense(0.5)),
        (
            "|f'|^2",
            deriv_sq.into(),
            2.0 * PI * PI / 3.0 - 4.0,
            1e-10,
            circle_quadrature_moment(&f, CircleWeight::ThetaSq),
        ),
        (
            "sigma_C1",
            sigma(OperatorSpec::CentralDiff { delta: 1.0 }).into(),
            1.0,
            1e-12,
            oracle_sigma(&OperatorSpec::CentralDiff { delta: 1.0 }).into(),
        ),
    ];
    let mut pass = true;
    let mut worst_oracle: f64 = 0.0;
    for (label, value, expected, tol, oracle) in &rows {
        let ok = (value - Complex64::new(*expected, 0.0)).norm() <= *tol;
        let rel = (value - oracle).norm() / expected.abs();
        worst_oracle = worst_oracle.max(rel);
        if !ok || rel > 1e-6 {
            eprintln!("  {label}: {value} expected {expected} oracle {oracle}");
            pass = false;
        }
    }
    outcome(
        pass,
        format!("6 values, max oracle relative difference {worst_oracle:.3e}"),
    )
}

fn kernel_validation() -> Outcome {
    let report = validate_kernels(32, &[0.1, 0.25, 0.5, 0.75, 1.0]).unwrap();
    let mut rng = rng_from_seed(6);
    let cases: Vec<(CoeffVec, CoeffVec, f64)> = (0..500)
        .map(|k| {
            let df = rng.random_range(1..=16);
            let dg = rng.random_range(1..=16);
            let f = random_coeffs(&mut rng, df, false)
                .unwrap()
                .index_shift(rng.random_range(-6..=6));
            let g = random_coeffs(&mut rng, dg, false)
                .unwrap()
                .index_shift(rng.random_range(-6..=6));
            let d = if k % 10 == 0 { 0.0 } else { rng.random_range(0.0..=1.0) };
            (f, g, d)
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|(f, g, d)| {
            let exact = if *d == 0.0 {
                inner(f, g)
            } else {
                shifted_inner(f, g, *d).unwrap()
            };
            let q = dense_grid_inner(f, g, *d, &GridSpec::default_for(f, g)).unwrap().value;
            (q - exact).norm() / (f.norm() * g.norm())
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        report.pass() && worst <= 1e-6,
        format!(
            "{} kernel entries, max abs err {:.3e}; 500 line integrals, max relative err {worst:.3e}",
            report.checks.len(),
            report.max_abs_err()
        ),
    )
}

fn minimizer_property() -> Outcome {
    let v = Verifier::default();
    let ops = [
        OperatorSpec::BackwardDiff { delta: 0.5 },
        OperatorSpec::CentralDiff { delta: 0.25 },
        OperatorSpec::BackwardAdjoint { delta: 1.0 },
        OperatorSpec::Shift { delta: 0.3 },
        OperatorSpec::Derivative,
        OperatorSpec::MultB,
    ];
    let results: Vec<(f64, f64)> = ops
        .par_iter()
        .enumerate()
        .map(|(k, op)| {
            let mut rng = rng_from_seed(70 + k as u64);
            let (mut below, mut at_tau) = (f64::INFINITY, 0.0f64);
            for _ in 0..1000 {
                let dim = rng.random_range(2..=21);
                let f = random_coeffs(&mut rng, dim, true).unwrap();
                let a = standard_normal_complex(&mut rng) * 2.0;
                let rep = v.variance(op, &f).unwrap();
                below = below.min(v.deviation(op, &f, a).unwrap() - rep.sigma);
                at_tau = at_tau.max((v.deviation(op, &f, rep.tau).unwrap() - rep.sigma).abs());
            }
            (below, at_tau)
        })
        .collect();
    let below = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let at_tau = results.iter().map(|r| r.1).fold(0.0, f64::max);
    outcome(
        below >= -SLACK && at_tau <= 1e-10,
        format!("6 operators x 1000: min excess {below:.3e}, max gap at tau {at_tau:.3e}"),
    )
}

fn band_bounds() -> Outcome {
    let v = Verifier::default();
    let mut rng = rng_from_seed(8);
    let (mut bern, mut loc) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..1000 {
        let dim = rng.random_range(2..=33);
        let f = random_coeffs(&mut rng, dim, true).unwrap();
        bern = bern.min(v.check_bernstein(&f).unwrap().residual);
        loc = loc.min(v.check_localization(&f, None, PI).unwrap().residual);
    }
    outcome(
        bern >= -SLACK && loc >= -SLACK,
        format!("min derivative-bound margin {bern:.3e}, min localization margin {loc:.3e}"),
    )
}

fn optimizer_soundness() -> Outcome {
    let mut cells = Vec::new();
    for &dim in &[3, 11, 21] {
        for &delta in &[1.0, 0.25] {
            for mode in [DiffMode::Backward, DiffMode::Central] {
                cells.push(OptimizeConfig {
                    dim,
                    delta,
                    mode,
                    restarts: 8,
                    seed: 9,
                    ..Default::default()
                });
            }
        }
    }
    let mut pass = true;
    let (mut min_ratio, mut worst_rel) = (f64::INFINITY, 0.0f64);
    for cfg in &cells {
        match minimize_ratio(cfg) {
            Ok(res) => {
                let confirm = uncertainty_ratio(&res.best_f, cfg.delta, cfg.mode).ratio;
                let rel = (confirm - res.ratio).abs() / res.ratio;
                min_ratio = min_ratio.min(res.ratio);
                worst_rel = worst_rel.max(rel);
                if res.ratio < 1.0 - 1e-9 || rel > 1e-6 {
                    pass = false;
                }
            }
            Err(e) => {
                eprintln!("  optimizer {cfg:?}: {e}");
                pass = false;
            }
        }
    }
    outcome(
        pass,
        format!(
            "{} runs, min ratio {min_ratio:.12}, max oracle relative difference {worst_rel:.3e}",
            cells.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("chain ordering on random admissible functions", chain_ordering),
        ("commutator identities on the integer grid", commutator_identities),
        ("unit step equals the circle forms", circle_dictionary),
        ("small-step limit and Heisenberg bound", heisenberg_limit),
        ("worked values for the two-sample demo", worked_numbers),
        ("kernel and line-integral validation", kernel_validation),
        ("expectation minimizes the deviation", minimizer_property),
        ("derivative and localization bounds", band_bounds),
        ("optimizer never beats the bound", optimizer_soundness),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {tag} {name}: {} ({:.1}s)",
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass {
            failures += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
