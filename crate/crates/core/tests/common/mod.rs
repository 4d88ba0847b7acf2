#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use slfd_core::coeffmesh::PiecewiseConstantCoeff;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

pub fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

pub fn gl_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(x, w)| w * f(c + r * x))
        .sum::<f64>()
        * r
}

/// Composite Gauss-Legendre on `[a, b]`, geometrically graded towards both
/// ends so logarithmic endpoint singularities are integrated accurately.
pub fn graded_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let rule = gauss_legendre(24);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for j in 0..40 {
        let (lo, hi) = (half * 0.5f64.powi(j + 1), half * 0.5f64.powi(j));
        if a + lo <= a || b - lo >= b || lo < 1e-13 {
            break;
        }
        s += gl_integrate(f, a + lo, a + hi, &rule);
        s += gl_integrate(f, b - hi, b - lo, &rule);
    }
    s
}

/// Lowest eigenvalues of the Legendre operator plus a piecewise-constant
/// coefficient, by a dense Legendre-Galerkin discretisation.
pub fn galerkin_piecewise(qbar: &PiecewiseConstantCoeff, modes: usize) -> Vec<f64> {
    let rule = gauss_legendre(modes + 2);
    let mesh = qbar.mesh();
    let mut a = DMatrix::<f64>::zeros(modes, modes);
    for i in 0..mesh.intervals() {
        let (lo, hi) = mesh.interval(i);
        let c = qbar.values()[i];
        let (mid, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let xx = mid + r * x;
            let phi: Vec<f64> = (0..modes)
                .map(|k| ((2 * k + 1) as f64 / 2.0).sqrt() * legendre(k, xx))
                .collect();
            for j in 0..modes {
                for k in 0..modes {
                    a[(j, k)] += c * w * r * phi[j] * phi[k];
                }
            }
        }
    }
    for k in 0..modes {
        a[(k, k)] += (k * (k + 1)) as f64;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}
