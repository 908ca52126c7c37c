//! Adaptive Gauss–Legendre quadrature for smooth complex integrands.

use std::sync::OnceLock;

use num_complex::Complex64;

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 18;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Fixed 20-point rule on `[a, b]`.
pub fn fixed<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (x, w) = rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        sum += f(mid + half * xi) * *wi;
    }
    sum * half
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum of the panel-wise differences between one and two applications of
    /// the rule.
    pub error: f64,
}

/// Integrates over `[a, b]` split into `panels` equal pieces, bisecting each
/// piece until one and two applications of the rule agree to `tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, panels: usize, tol: f64) -> Quadrature {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut out = Quadrature {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
    };
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let whole = fixed(f, lo, hi);
        let q = refine(f, lo, hi, whole, tol / panels as f64, 0);
        out.value += q.value;
        out.error += q.error;
    }
    out
}

fn refine<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, whole: Complex64, tol: f64, depth: u32) -> Quadrature {
    let mid = 0.5 * (a + b);
    let left = fixed(f, a, mid);
    let right = fixed(f, mid, b);
    let err = (left + right - whole).norm();
    let floor = 64.0 * f64::EPSILON * (left.norm() + right.norm());
    if err <= tol.max(floor) || depth >= MAX_DEPTH {
        return Quadrature {
            value: left + right,
            error: err,
        };
    }
    let l = refine(f, a, mid, left, 0.5 * tol, depth + 1);
    let r = refine(f, mid, b, right, 0.5 * tol, depth + 1);
    Quadrature {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(ORDER);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        for deg in 0..(2 * ORDER) {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert_abs_diff_eq!(q, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn small_rules() {
        let (x, w) = gauss_legendre(2);
        assert_abs_diff_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_{-π}^{π} θ² cos(30θ) dθ = 4π/900
        let q = integrate(
            &|t: f64| Complex64::new(t * t * (30.0 * t).cos(), 0.0),
            -PI,
            PI,
            4,
            1e-14,
        );
        assert_abs_diff_eq!(q.value.re, 4.0 * PI / 900.0, epsilon = 1e-12);
        assert!(q.error < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        // ∫_0^1 1/(1e-3 + x²)
        let c: f64 = 1e-3;
        let q = integrate(&|x: f64| Complex64::new(1.0 / (c + x * x), 0.0), 0.0, 1.0, 1, 1e-12);
        assert_abs_diff_eq!(q.value.re, (1.0 / c.sqrt()).atan() / c.sqrt(), epsilon = 1e-10);
    }
}
