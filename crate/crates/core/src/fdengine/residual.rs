//! A-posteriori residuals of a computed eigenpair.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use super::{norm, FdSolution};
use crate::basicsolver::BasicEigenpair;
use crate::sincquad::SincGrid;
use crate::{Error, Real, Result};

fn running_integral(grid: &SincGrid, g: &[Real]) -> Result<Vec<Real>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut carry = 0.0;
    for i in 0..grid.intervals() {
        let j = grid.indefinite_integrate(i, &g[grid.range(i)])?;
        out.extend(j.iter().map(|v| carry + v));
        carry += j[j.len() - 1];
    }
    Ok(out)
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

/// `|| (1 - x^2) u' + int_{-1}^x (lambda - q) u ||` for the normalised
/// rank-`m` eigenfunction; `q_nodes` holds the potential at every node.
pub fn residual_eta(
    sol: &FdSolution,
    basic: &BasicEigenpair,
    q_nodes: &[Real],
    grid: &SincGrid,
) -> Result<Real> {
    check(grid, q_nodes.len())?;
    let u = sol.eigenfunction_samples.values();
    let du = sol.eigenfunction_derivative(basic);
    let lambda = sol.eigenvalue_sum;
    let g: Vec<Real> = u
        .iter()
        .zip(q_nodes)
        .map(|(u, q)| (lambda - q) * u)
        .collect();
    let inner = running_integral(grid, &g)?;
    let r: Vec<Real> = grid
        .abscissae()
        .iter()
        .zip(&du)
        .zip(&inner)
        .map(|((at, d), s)| at.one_minus_sq() * d + s)
        .collect();
    Ok(norm(grid, &r)? / sol.norm_sq.sqrt())
}

/// `|| ((1 - x^2) u')' + (lambda - q) u ||` for the normalised rank-`m`
/// eigenfunction, with the outer derivative taken from the correction
/// equations.
pub fn residual_eta_bar(
    sol: &FdSolution,
    basic: &BasicEigenpair,
    qbar_nodes: &[Real],
    q_nodes: &[Real],
    grid: &SincGrid,
) -> Result<Real> {
    check(grid, q_nodes.len())?;
    check(grid, qbar_nodes.len())?;
    let s = &basic.samples;
    let u = sol.eigenfunction_samples.values();
    let lambda = sol.eigenvalue_sum;
    let mut e: Vec<Real> = (0..grid.len())
        .map(|k| (qbar_nodes[k] - basic.lambda0) * u[k] + (lambda - q_nodes[k]) * u[k])
        .collect();
    for (k, at) in grid.abscissae().iter().enumerate() {
        let wr = at.one_minus_sq() * (s.dw[k] * s.u0[k] - s.du0[k] * s.w[k]);
        let f: Real = sol.rhs.iter().map(|f| f.values()[k]).sum();
        e[k] += wr * f;
    }
    Ok(norm(grid, &e)? / sol.norm_sq.sqrt())
}
