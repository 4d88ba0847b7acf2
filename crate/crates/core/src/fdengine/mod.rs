//! Rank-`m` FD correction series.
//!
//! With `u0` the basic eigenfunction (normalised by `u0(1) = 1`) and `w` the
//! second solution, the corrections solve
//!
//! ```text
//! ((1 - x^2) u_d')' + (lambda0 - qbar) u_d = F_d,
//! F_d = -sum_{k<d} lambda_{d-k} u_k + (q - qbar) u_{d-1},
//! ```
//!
//! through the kernel `u_d = w int u0 F_d - u0 int w F_d`, followed by
//! projection orthogonal to `u0`.

mod bounds;
mod residual;

pub use self::bounds::{
    alpha, apriori_bounds, catalan, zero_coefficient_rate, BoundStatus, ConvergenceBound,
};
pub use self::residual::{residual_eta, residual_eta_bar};

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use crate::basicsolver::BasicEigenpair;
use crate::coeffmesh::{PiecewiseConstantCoeff, Potential};
use crate::sincquad::SincGrid;
use crate::{Error, Real, Result};

/// Number of consecutive norm increases reported as stagnation.
pub const STAGNATION_RUN: usize = 3;

/// Values at every node of a [`SincGrid`], interval-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction(Vec<Real>);

impl GridFunction {
    pub fn new(grid: &SincGrid, values: Vec<Real>) -> Result<Self> {
        check(grid, values.len())?;
        Ok(GridFunction(values))
    }

    pub fn zeros(grid: &SincGrid) -> Self {
        GridFunction(alloc::vec![0.0; grid.len()])
    }

    pub fn sample<F: FnMut(Real) -> Real>(grid: &SincGrid, f: F) -> Self {
        GridFunction(grid.sample(f))
    }

    pub fn values(&self) -> &[Real] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<Real> {
        self.0
    }
}

fn check(grid: &SincGrid, found: usize) -> Result<()> {
    if found == grid.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: grid.len(),
            found,
        })
    }
}

/// Tanh-rule inner product.
pub fn inner(grid: &SincGrid, a: &[Real], b: &[Real]) -> Result<Real> {
    check(grid, a.len())?;
    check(grid, b.len())?;
    Ok(grid.h()
        * a.iter()
            .zip(b)
            .zip(grid.weights())
            .map(|((x, y), m)| x * y * m)
            .sum::<Real>())
}

pub fn norm(grid: &SincGrid, a: &[Real]) -> Result<Real> {
    Ok(inner(grid, a, a)?.sqrt())
}

/// `q - qbar` at every node. The potential must be finite at all nodes.
pub fn sample_deviation(
    q: &Potential,
    qbar: &PiecewiseConstantCoeff,
    grid: &SincGrid,
) -> Result<GridFunction> {
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.intervals() {
        let c = qbar.values()[i];
        for at in &grid.abscissae()[grid.range(i)] {
            out.push(q.eval(at.x)? - c);
        }
    }
    Ok(GridFunction(out))
}

/// `qbar` at every node.
pub fn sample_coefficient(qbar: &PiecewiseConstantCoeff, grid: &SincGrid) -> GridFunction {
    let mut out = Vec::with_capacity(grid.len());
    for i in 0..grid.intervals() {
        out.extend(core::iter::repeat_n(qbar.values()[i], grid.per_interval()));
    }
    GridFunction(out)
}

/// `lambda^(d) = int u0 u^(d-1) (q - qbar) / int u0^2`.
pub fn compute_lambda_correction(
    u_prev: &GridFunction,
    u0: &GridFunction,
    qdiff: &GridFunction,
    grid: &SincGrid,
    norm_sq: Real,
) -> Result<Real> {
    check(grid, u_prev.len())?;
    check(grid, u0.len())?;
    check(grid, qdiff.len())?;
    let s: Real =
        u0.0.iter()
            .zip(&u_prev.0)
            .zip(&qdiff.0)
            .zip(grid.weights())
            .map(|(((a, b), c), m)| a * b * c * m)
            .sum();
    Ok(grid.h() * s / norm_sq)
}

/// `F^(d)` from `lambdas = [lambda^(1), .., lambda^(d)]` and
/// `u_all = [u^(0), .., u^(d-1)]`.
pub fn compute_rhs(
    lambdas: &[Real],
    u_all: &[GridFunction],
    qdiff: &GridFunction,
) -> Result<GridFunction> {
    let d = lambdas.len();
    if d == 0 || u_all.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d.max(1),
            found: u_all.len(),
        });
    }
    let len = qdiff.len();
    if let Some(bad) = u_all.iter().find(|u| u.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let mut f: Vec<Real> = qdiff
        .0
        .iter()
        .zip(&u_all[d - 1].0)
        .map(|(q, u)| q * u)
        .collect();
    for (k, u) in u_all.iter().enumerate() {
        let l = lambdas[d - k - 1];
        if l != 0.0 {
            for (fi, ui) in f.iter_mut().zip(&u.0) {
                *fi -= l * ui;
            }
        }
    }
    Ok(GridFunction(f))
}

/// Kernel solution with the two running integrals it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSolution {
    pub u: GridFunction,
    /// `int_{-1}^z u0 F`
    pub i1: Vec<Real>,
    /// `int_{-1}^z w F`
    pub i2: Vec<Real>,
}

/// `u = w I1 - u0 I2` with the running integrals accumulated interval by
/// interval (carry taken at the last node of each interval).
pub fn compute_eigfun_correction(
    f: &GridFunction,
    u0: &GridFunction,
    w: &GridFunction,
    grid: &SincGrid,
) -> Result<KernelSolution> {
    check(grid, f.len())?;
    check(grid, u0.len())?;
    check(grid, w.len())?;
    let len = grid.len();
    let (mut u, mut i1, mut i2) = (
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    );
    let (mut v1, mut v2) = (0.0, 0.0);
    for i in 0..grid.intervals() {
        let r = grid.range(i);
        let s1: Vec<Real> = r.clone().map(|k| u0.0[k] * f.0[k]).collect();
        let s2: Vec<Real> = r.clone().map(|k| w.0[k] * f.0[k]).collect();
        let j1 = grid.indefinite_integrate(i, &s1)?;
        let j2 = grid.indefinite_integrate(i, &s2)?;
        for (t, k) in r.enumerate() {
            let (a, b) = (v1 + j1[t], v2 + j2[t]);
            i1.push(a);
            i2.push(b);
            u.push(w.0[k] * a - u0.0[k] * b);
        }
        v1 += j1[j1.len() - 1];
        v2 += j2[j2.len() - 1];
    }
    Ok(KernelSolution {
        u: GridFunction(u),
        i1,
        i2,
    })
}

/// `u - (<u, u0> / norm_sq) u0`, with the removed coefficient.
pub fn orthogonalize(
    u: &GridFunction,
    u0: &GridFunction,
    grid: &SincGrid,
    norm_sq: Real,
) -> Result<(GridFunction, Real)> {
    let c = inner(grid, &u.0, &u0.0)? / norm_sq;
    let out = u.0.iter().zip(&u0.0).map(|(a, b)| a - c * b).collect();
    Ok((GridFunction(out), c))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Maximum rank `m`.
    pub rank: usize,
    /// Stop once `max(|lambda^(d)|, ||u^(d)||) < tol` (norms relative to
    /// `||u0||`).
    pub tol: Option<Real>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankDiagnostics {
    pub rank: usize,
    pub lambda_correction: Real,
    /// `||u^(d)|| / ||u0||`
    pub correction_norm: Real,
    /// `|<u^(d), u0>| / (||u^(d)|| ||u0||)` after projection.
    pub orthogonality: Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub index: usize,
    /// Highest rank computed.
    pub rank: usize,
    /// `lambda^(0) .. lambda^(rank)`.
    pub lambda_corrections: Vec<Real>,
    /// `||u^(j)||` in the `u0(1) = 1` scaling; entry 0 is `sqrt(norm_sq)`.
    pub correction_norms: Vec<Real>,
    pub eigenvalue_sum: Real,
    /// `u^(0) .. u^(rank)`.
    pub corrections: Vec<GridFunction>,
    /// `F^(1) .. F^(rank)`.
    pub rhs: Vec<GridFunction>,
    /// Kernel data `(I1, I2, c)` of each correction, for derivatives.
    pub kernels: Vec<(Vec<Real>, Vec<Real>, Real)>,
    pub eigenfunction_samples: GridFunction,
    pub norm_sq: Real,
    pub diagnostics: Vec<RankDiagnostics>,
    /// Set when `||u^(d)||` grew for [`STAGNATION_RUN`] consecutive ranks.
    pub stagnation: bool,
}

impl FdSolution {
    /// Correction norms for the `L2`-normalised eigenfunction.
    pub fn normalized_norms(&self) -> Vec<Real> {
        let s = self.norm_sq.sqrt();
        self.correction_norms.iter().map(|v| v / s).collect()
    }

    /// Partial sums `lambda~^j` for `j = 0..=rank`.
    pub fn partial_sums(&self) -> Vec<Real> {
        let mut acc = 0.0;
        self.lambda_corrections
            .iter()
            .map(|l| {
                acc += l;
                acc
            })
            .collect()
    }

    /// Sampled `d/dx u^(j)` for every stored correction.
    pub fn correction_derivative(&self, j: usize, basic: &BasicEigenpair) -> Vec<Real> {
        let s = &basic.samples;
        if j == 0 {
            return s.du0.clone();
        }
        let (i1, i2, c) = &self.kernels[j - 1];
        (0..s.du0.len())
            .map(|k| s.dw[k] * i1[k] - s.du0[k] * i2[k] - c * s.du0[k])
            .collect()
    }

    /// The same run cut back to rank `m` (clamped to `self.rank`).
    pub fn truncated(&self, m: usize) -> FdSolution {
        let m = m.min(self.rank);
        let corrections: Vec<GridFunction> = self.corrections[..=m].to_vec();
        let mut sum = alloc::vec![0.0; self.eigenfunction_samples.len()];
        for u in &corrections {
            for (s, v) in sum.iter_mut().zip(&u.0) {
                *s += v;
            }
        }
        let lambda_corrections = self.lambda_corrections[..=m].to_vec();
        FdSolution {
            index: self.index,
            rank: m,
            eigenvalue_sum: lambda_corrections.iter().sum(),
            lambda_corrections,
            correction_norms: self.correction_norms[..=m].to_vec(),
            corrections,
            rhs: self.rhs[..m].to_vec(),
            kernels: self.kernels[..m].to_vec(),
            eigenfunction_samples: GridFunction(sum),
            norm_sq: self.norm_sq,
            diagnostics: self.diagnostics[..m].to_vec(),
            stagnation: self.stagnation,
        }
    }

    /// Sampled derivative of the rank-`m` sum.
    pub fn eigenfunction_derivative(&self, basic: &BasicEigenpair) -> Vec<Real> {
        let mut acc = alloc::vec![0.0; basic.samples.du0.len()];
        for j in 0..=self.rank {
            for (a, d) in acc.iter_mut().zip(self.correction_derivative(j, basic)) {
                *a += d;
            }
        }
        acc
    }
}

/// Algorithm 1: corrections up to `opts.rank`, or earlier once `opts.tol`
/// is met.
pub fn run_fd(
    basic: &BasicEigenpair,
    qdiff: &GridFunction,
    grid: &SincGrid,
    opts: FdOptions,
) -> Result<FdSolution> {
    check(grid, qdiff.len())?;
    let u0 = GridFunction::new(grid, basic.samples.u0.clone())?;
    let w = GridFunction::new(grid, basic.samples.w.clone())?;
    let norm_sq = basic.norm_sq;
    let unit = norm_sq.sqrt();
    let mut lambdas = alloc::vec![basic.lambda0];
    let mut norms = alloc::vec![unit];
    let mut corrections = alloc::vec![u0.clone()];
    let mut rhs = Vec::new();
    let mut kernels = Vec::new();
    let mut diagnostics = Vec::new();
    let mut rises = 0;
    let mut stagnation = false;
    for d in 1..=opts.rank {
        let l = compute_lambda_correction(&corrections[d - 1], &u0, qdiff, grid, norm_sq)?;
        lambdas.push(l);
        let f = compute_rhs(&lambdas[1..], &corrections, qdiff)?;
        let k = compute_eigfun_correction(&f, &u0, &w, grid)?;
        let (u, c) = orthogonalize(&k.u, &u0, grid, norm_sq)?;
        let nu = norm(grid, &u.0)?;
        let orth = if nu > 0.0 {
            inner(grid, &u.0, &u0.0)?.abs() / (nu * unit)
        } else {
            0.0
        };
        if nu > norms[d - 1] && d >= 2 {
            rises += 1;
            stagnation |= rises >= STAGNATION_RUN;
        } else {
            rises = 0;
        }
        diagnostics.push(RankDiagnostics {
            rank: d,
            lambda_correction: l,
            correction_norm: nu / unit,
            orthogonality: orth,
        });
        norms.push(nu);
        corrections.push(u);
        rhs.push(f);
        kernels.push((k.i1, k.i2, c));
        if let Some(tol) = opts.tol {
            if l.abs().max(nu / unit) < tol {
                break;
            }
        }
    }
    let rank = lambdas.len() - 1;
    let mut sum = alloc::vec![0.0; grid.len()];
    for u in &corrections {
        for (s, v) in sum.iter_mut().zip(&u.0) {
            *s += v;
        }
    }
    Ok(FdSolution {
        index: basic.index,
        rank,
        eigenvalue_sum: lambdas.iter().sum(),
        lambda_corrections: lambdas,
        correction_norms: norms,
        corrections,
        rhs,
        kernels,
        eigenfunction_samples: GridFunction(sum),
        norm_sq,
        diagnostics,
        stagnation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffmesh::build_mesh;
    use crate::sincquad::build_grid;

    fn grid(n: usize, k: usize) -> SincGrid {
        build_grid(&build_mesh(n, &[]).unwrap(), k).unwrap()
    }

    #[test]
    fn zero_deviation_gives_zero_corrections() {
        let g = grid(2, 40);
        let u0 = GridFunction::sample(&g, |x| 1.0 + x);
        let z = GridFunction::zeros(&g);
        assert_eq!(
            compute_lambda_correction(&u0, &u0, &z, &g, 1.0).unwrap(),
            0.0
        );
        let f = compute_rhs(&[0.0], &[u0.clone()], &z).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
        let k = compute_eigfun_correction(&f, &u0, &u0, &g).unwrap();
        assert!(k.u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn first_rhs_is_deviation_times_constant() {
        let g = grid(1, 20);
        let u0 = GridFunction::sample(&g, |_| 0.7);
        let qd = GridFunction::sample(&g, |x| x);
        let f = compute_rhs(&[0.0], &[u0], &qd).unwrap();
        for (v, at) in f.values().iter().zip(g.abscissae()) {
            assert!((v - 0.7 * at.x).abs() < 1e-15);
        }
    }

    #[test]
    fn dimension_checks() {
        let g = grid(1, 20);
        let short = GridFunction(alloc::vec![0.0; 3]);
        let ok = GridFunction::zeros(&g);
        assert!(matches!(
            compute_lambda_correction(&short, &ok, &ok, &g, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(GridFunction::new(&g, alloc::vec![0.0; 2]).is_err());
        assert!(compute_rhs(&[1.0, 2.0], &[ok.clone()], &ok).is_err());
    }

    #[test]
    fn projection() {
        let g = grid(3, 80);
        let u0 = GridFunction::sample(&g, |x| 1.0 + 0.2 * x * x);
        let ns = inner(&g, u0.values(), u0.values()).unwrap();
        let (p, c) = orthogonalize(&u0, &u0, &g, ns).unwrap();
        assert!((c - 1.0).abs() < 1e-14);
        assert!(p.values().iter().all(|v| v.abs() < 1e-14));
        let v = GridFunction::sample(&g, |x| x * x * x);
        let (p, c) = orthogonalize(&v, &u0, &g, ns).unwrap();
        assert!(c.abs() < 1e-16);
        for (a, b) in p.values().iter().zip(v.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
