//! Spectral Galerkin reference solver.
//!
//! The operator `-((1 - x^2) u')' + q u` is projected onto normalised
//! Legendre polynomials. The stiffness part is `diag(n (n + 1))`, the
//! potential part is a Gram matrix integrated with a fine tanh rule split
//! at the breakpoints of `q`. The dense symmetric eigenproblem is solved by
//! cyclic Jacobi rotations.

use slfd_core::coeffmesh::{Mesh, Potential};
use slfd_core::sincquad::build_grid_with_step;

use crate::error::{CliError, CliResult};

pub const MIN_MODES: usize = 16;
/// `K h` for the Gram quadrature; the tanh weights have decayed to about
/// `e^-40` at the truncation point.
const SPAN: f64 = 40.0;

/// Ascending eigenvalues of the Galerkin matrix of size `modes`.
pub fn galerkin_oracle(potential: &Potential, modes: usize) -> CliResult<Vec<f64>> {
    let q = gram_matrix(potential, modes)?;
    let mut a = q;
    for n in 0..modes {
        a[n * modes + n] += (n * (n + 1)) as f64;
    }
    Ok(jacobi_eigenvalues(a, modes))
}

/// `int q p_i p_j` over `(-1, 1)` for orthonormal Legendre `p_i`, row-major.
pub fn gram_matrix(potential: &Potential, modes: usize) -> CliResult<Vec<f64>> {
    if modes < MIN_MODES {
        return Err(CliError::config(format!(
            "the oracle needs at least {MIN_MODES} modes"
        )));
    }
    let mut points = vec![-1.0];
    let mut bps = potential.breakpoints().to_vec();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    points.extend(bps);
    points.push(1.0);
    let mesh = Mesh::new(points)?;
    let h = std::f64::consts::PI / (2 * modes) as f64;
    let k = (SPAN / h).ceil() as usize;
    let grid = build_grid_with_step(&mesh, k, Some(h))?;
    let mut g = vec![0.0; modes * modes];
    let mut p = vec![0.0; modes];
    let step = grid.h();
    for (at, &mu) in grid.abscissae().iter().zip(grid.weights()) {
        let wq = step * mu * potential.eval(at.x)?;
        if wq == 0.0 {
            continue;
        }
        normalized_legendre(at.x, &mut p);
        for i in 0..modes {
            let a = wq * p[i];
            let row = &mut g[i * modes..(i + 1) * modes];
            for j in i..modes {
                row[j] += a * p[j];
            }
        }
    }
    for i in 0..modes {
        for j in 0..i {
            g[i * modes + j] = g[j * modes + i];
        }
    }
    Ok(g)
}

/// `sqrt(n + 1/2) P_n(x)` for `n < out.len()`.
pub fn normalized_legendre(x: f64, out: &mut [f64]) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for (n, o) in out.iter_mut().enumerate() {
        *o = cur * (n as f64 + 0.5).sqrt();
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * x * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
}

/// Eigenvalues of the symmetric row-major `n x n` matrix `a`, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix is not n x n");
    let total: f64 = a.iter().map(|v| v * v).sum();
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (r + 1..n).map(move |c| (r, c)))
            .map(|(r, c)| a[idx(r, c)] * a[idx(r, c)])
            .sum();
        if off <= 1e-32 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let (arp, arq) = (a[idx(r, p)], a[idx(r, q)]);
                    let (np, nq) = (c * arp - s * arq, s * arp + c * arq);
                    a[idx(r, p)] = np;
                    a[idx(p, r)] = np;
                    a[idx(r, q)] = nq;
                    a[idx(q, r)] = nq;
                }
                a[idx(p, p)] -= t * apq;
                a[idx(q, q)] += t * apq;
                a[idx(p, q)] = 0.0;
                a[idx(q, p)] = 0.0;
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
