//! The basic problem with piecewise-constant `qbar`: on interval `i` the
//! solution is `A_i P_{nu_i}(x) + B_i Q_{nu_i}(x)` with
//! `nu_i (nu_i + 1) = lambda - qbar_i`, and value and derivative are matched
//! at every interior mesh point.

use alloc::vec::Vec;

use crate::coeffmesh::PiecewiseConstantCoeff;
use crate::scalar::{ccos_pi, csin_pi, real, Complex, PI};
use crate::sincquad::SincGrid;
use crate::specfun::{degree_from_lambda, legendre_pair_at, Abscissa, Degree, FunctionValuePair};
use crate::{Error, Real, Result};

pub const DEFAULT_BISECT_TOL: Real = 1e-13;
const IMAGINARY_TOL: Real = 1e-8;
const MAX_STEP_HALVINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Eigenfunction,
    SecondSolution,
}

/// Output of the backward matching recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub degrees: Vec<Degree>,
    /// `(A_i, B_i)` for every interval, left to right.
    pub coefficients: Vec<(Complex, Complex)>,
    /// Computed Wronskians `P Q' - P' Q` of the left-hand basis at each
    /// interior mesh point, left to right.
    pub wronskians: Vec<Complex>,
}

/// Runs the matching conditions from interval `N` (coefficients `a_n`,
/// `b_n`) down to interval 1.
pub fn transfer_coefficients(
    lambda: Real,
    qbar: &PiecewiseConstantCoeff,
    a_n: Complex,
    b_n: Complex,
) -> Result<Transfer> {
    let mesh = qbar.mesh();
    let n = mesh.intervals();
    let degrees: Vec<Degree> = qbar
        .values()
        .iter()
        .map(|&c| degree_from_lambda(lambda, c))
        .collect();
    let mut coefficients = alloc::vec![(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)); n];
    let mut wronskians = alloc::vec![Complex::new(0.0, 0.0); n - 1];
    coefficients[n - 1] = (a_n, b_n);
    for i in (1..n).rev() {
        let at = Abscissa::new(mesh.points()[i]);
        let (a, b) = coefficients[i];
        let (c, d) = if degrees[i] == degrees[i - 1] && i + 1 < n {
            // identical bases on both sides: nothing to solve
            coefficients[i - 1] = (a, b);
            wronskians[i - 1] = real(1.0 / at.one_minus_sq());
            continue;
        } else {
            let right = legendre_pair_at(degrees[i], &at)?;
            (
                a * right.p + b * right.q,
                a * right.p_prime + b * right.q_prime,
            )
        };
        let left = legendre_pair_at(degrees[i - 1], &at)?;
        let delta = left.wronskian();
        if delta.norm() < 1e-300 {
            return Err(Error::SingularTransfer { node: i });
        }
        wronskians[i - 1] = delta;
        coefficients[i - 1] = (
            (c * left.q_prime - d * left.q) / delta,
            (d * left.p - c * left.p_prime) / delta,
        );
    }
    Ok(Transfer {
        degrees,
        coefficients,
        wronskians,
    })
}

/// Boundary functional at `x = -1` of the solution regular at `x = 1`;
/// its zeros are the eigenvalues of the basic problem.
pub fn characteristic(lambda: Real, qbar: &PiecewiseConstantCoeff) -> Result<Real> {
    let t = transfer_coefficients(lambda, qbar, real(1.0), real(0.0))?;
    let nu = t.degrees[0].value();
    let (a, b) = t.coefficients[0];
    let s = a * csin_pi(nu) * (2.0 / PI);
    let c = b * ccos_pi(nu);
    let phi = s + c;
    let scale = s.norm() + c.norm();
    if scale > 0.0 && phi.im.abs() > IMAGINARY_TOL * scale {
        return Err(Error::ImaginaryResidue {
            lambda,
            relative: phi.im.abs() / scale,
        });
    }
    Ok(phi.re)
}

/// Sign-change brackets for the lowest `n_max + 1` eigenvalues.
pub fn bracket_eigenvalues(
    qbar: &PiecewiseConstantCoeff,
    n_max: usize,
) -> Result<Vec<(Real, Real)>> {
    bracket_with_scale(qbar, n_max, 1.0)
}

fn bracket_with_scale(
    qbar: &PiecewiseConstantCoeff,
    n_max: usize,
    scale: Real,
) -> Result<Vec<(Real, Real)>> {
    let qmax = qbar.max_abs();
    let limit = ((n_max + 2) * (n_max + 3)) as Real + qmax;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut lambda = qbar.min() - 1.0;
    let mut prev: Option<(Real, Real)> = None;
    while out.len() <= n_max {
        if lambda > limit {
            return Err(Error::BracketFailure {
                found: out.len(),
                wanted: n_max + 1,
            });
        }
        let phi = characteristic(lambda, qbar)?;
        if phi == 0.0 {
            out.push((lambda, lambda));
            prev = None;
        } else {
            if let Some((l0, p0)) = prev {
                if p0.signum() != phi.signum() {
                    out.push((l0, lambda));
                }
            }
            prev = Some((lambda, phi));
        }
        let k = out.len() as Real;
        let step = (2.0 * k - 2.0 * qmax).clamp(0.25, 1.0) * scale;
        lambda += step;
    }
    Ok(out)
}

/// Bisects `Phi` on `[lo, hi]` down to width `tol`.
pub fn bisect(qbar: &PiecewiseConstantCoeff, lo: Real, hi: Real, tol: Real) -> Result<Real> {
    if lo == hi {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = characteristic(lo, qbar)?;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = characteristic(mid, qbar)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The lowest `n_max + 1` eigenvalues of the basic problem. The scan step
/// is halved when the first pass misses sign changes.
pub fn eigenvalues(qbar: &PiecewiseConstantCoeff, n_max: usize, tol: Real) -> Result<Vec<Real>> {
    let mut scale = 1.0;
    let mut last = None;
    for _ in 0..=MAX_STEP_HALVINGS {
        match bracket_with_scale(qbar, n_max, scale) {
            Ok(brackets) => {
                return brackets
                    .into_iter()
                    .map(|(lo, hi)| bisect(qbar, lo, hi, tol))
                    .collect();
            }
            Err(e @ Error::BracketFailure { .. }) => {
                last = Some(e);
                scale *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::BracketFailure {
        found: 0,
        wanted: n_max + 1,
    }))
}

/// A basic-problem solution stored as per-interval `(nu_i, A_i, B_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLegendreFunction {
    qbar: PiecewiseConstantCoeff,
    degrees: Vec<Degree>,
    coefficients: Vec<(Complex, Complex)>,
    kind: FunctionKind,
}

impl PiecewiseLegendreFunction {
    pub fn new(lambda: Real, qbar: &PiecewiseConstantCoeff, kind: FunctionKind) -> Result<Self> {
        let (a, b) = match kind {
            FunctionKind::Eigenfunction => (real(1.0), real(0.0)),
            FunctionKind::SecondSolution => (real(0.0), real(1.0)),
        };
        let t = transfer_coefficients(lambda, qbar, a, b)?;
        Ok(PiecewiseLegendreFunction {
            qbar: qbar.clone(),
            degrees: t.degrees,
            coefficients: t.coefficients,
            kind,
        })
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn coefficients(&self) -> &[(Complex, Complex)] {
        &self.coefficients
    }

    /// Complex value and derivative on interval `i` at `at`.
    pub fn eval_on(&self, i: usize, at: &Abscissa) -> Result<(Complex, Complex)> {
        let f = legendre_pair_at(self.degrees[i], at)?;
        Ok(self.combine(i, &f))
    }

    fn combine(&self, i: usize, f: &FunctionValuePair) -> (Complex, Complex) {
        let (a, b) = self.coefficients[i];
        (a * f.p + b * f.q, a * f.p_prime + b * f.q_prime)
    }

    fn locate(&self, x: Real) -> Result<(usize, Abscissa)> {
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::DomainError(alloc::format!(
                "evaluation point {x} is not inside (-1, 1)"
            )));
        }
        let i = self.qbar.mesh().locate(x).unwrap_or(0);
        Ok((i, Abscissa::new(x)))
    }

    pub fn eval(&self, x: Real) -> Result<Real> {
        let (i, at) = self.locate(x)?;
        Ok(self.eval_on(i, &at)?.0.re)
    }

    pub fn derivative(&self, x: Real) -> Result<Real> {
        let (i, at) = self.locate(x)?;
        Ok(self.eval_on(i, &at)?.1.re)
    }
}

/// `u0`, `u0'`, `w`, `w'` at every node of a sinc grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicSamples {
    pub u0: Vec<Real>,
    pub du0: Vec<Real>,
    pub w: Vec<Real>,
    pub dw: Vec<Real>,
}

fn sample_pair(
    u: &PiecewiseLegendreFunction,
    w: &PiecewiseLegendreFunction,
    grid: &SincGrid,
) -> Result<BasicSamples> {
    let len = grid.len();
    let mut s = BasicSamples {
        u0: Vec::with_capacity(len),
        du0: Vec::with_capacity(len),
        w: Vec::with_capacity(len),
        dw: Vec::with_capacity(len),
    };
    for i in 0..grid.intervals() {
        for at in &grid.abscissae()[grid.range(i)] {
            // u and w share degrees, so one evaluation serves both
            let f = legendre_pair_at(u.degrees[i], at)?;
            let (v, dv) = u.combine(i, &f);
            let (x, dx) = w.combine(i, &f);
            s.u0.push(v.re);
            s.du0.push(dv.re);
            s.w.push(x.re);
            s.dw.push(dx.re);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicEigenpair {
    pub index: usize,
    pub lambda0: Real,
    /// Normalised by `u(1) = 1`, not in `L2`.
    pub eigenfunction: PiecewiseLegendreFunction,
    /// Second solution `w` with `(1 - x^2)(w' u - u' w) = 1`.
    pub second: PiecewiseLegendreFunction,
    /// `int u^2`.
    pub norm_sq: Real,
    /// `M_n`, the reciprocal of the smaller neighbouring spectral gap.
    pub gap_m: Real,
    pub samples: BasicSamples,
}

/// `M_n` from a spectrum containing at least `lambda_0..=lambda_{n+1}`.
pub fn gap_m(spectrum: &[Real], n: usize) -> Real {
    let up = 1.0 / (spectrum[n + 1] - spectrum[n]);
    if n == 0 {
        up
    } else {
        up.max(1.0 / (spectrum[n] - spectrum[n - 1]))
    }
}

pub fn solve_basic(
    n: usize,
    qbar: &PiecewiseConstantCoeff,
    grid: &SincGrid,
    tol: Real,
) -> Result<BasicEigenpair> {
    let spectrum = eigenvalues(qbar, n + 1, tol)?;
    solve_basic_with_spectrum(n, qbar, grid, &spectrum)
}

/// As `solve_basic`, reusing eigenvalues computed once for many indices.
pub fn solve_basic_with_spectrum(
    n: usize,
    qbar: &PiecewiseConstantCoeff,
    grid: &SincGrid,
    spectrum: &[Real],
) -> Result<BasicEigenpair> {
    if spectrum.len() < n + 2 {
        return Err(Error::DimensionMismatch {
            expected: n + 2,
            found: spectrum.len(),
        });
    }
    if qbar.mesh() != grid.mesh() {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "coefficient and sinc grid use different meshes",
        )));
    }
    let lambda0 = spectrum[n];
    let eigenfunction = PiecewiseLegendreFunction::new(lambda0, qbar, FunctionKind::Eigenfunction)?;
    let second = PiecewiseLegendreFunction::new(lambda0, qbar, FunctionKind::SecondSolution)?;
    let samples = sample_pair(&eigenfunction, &second, grid)?;
    let sq: Vec<Real> = samples.u0.iter().map(|u| u * u).collect();
    let norm_sq = grid.integrate(&sq)?;
    if norm_sq.is_nan() || norm_sq < 1e-12 {
        return Err(Error::NormDegenerate { norm_sq });
    }
    Ok(BasicEigenpair {
        index: n,
        lambda0,
        eigenfunction,
        second,
        norm_sq,
        gap_m: gap_m(spectrum, n),
        samples,
    })
}
