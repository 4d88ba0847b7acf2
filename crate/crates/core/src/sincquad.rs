//! Tanh-rule quadrature and Stenger's sinc indefinite integration on every
//! mesh interval.
//!
//! Node `j` of interval `[a, b]` is `z = (a + b e^{jh}) / (1 + e^{jh})` with
//! weight `mu = (b - a) / (4 cosh^2(jh / 2))`, `j = -K..=K`, `h = sqrt(2 pi / K)`.
//! Samples are stored interval-major: node `(i, j)` lives at
//! `i * (2K + 1) + (j + K)`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use crate::coeffmesh::Mesh;
use crate::scalar::PI;
use crate::specfun::{stenger_delta, Abscissa};
use crate::{Error, Real, Result};

pub const MIN_K: usize = 8;

#[derive(Debug, Clone)]
pub struct SincGrid {
    k: usize,
    h: Real,
    mesh: Mesh,
    nodes: Vec<Abscissa>,
    left_gap: Vec<Real>,
    right_gap: Vec<Real>,
    mu: Vec<Real>,
    delta: Vec<Real>,
}

/// Builds the grid with the default step `sqrt(2 pi / K)`.
pub fn build_grid(mesh: &Mesh, k: usize) -> Result<SincGrid> {
    build_grid_with_step(mesh, k, None)
}

pub fn build_grid_with_step(mesh: &Mesh, k: usize, h: Option<Real>) -> Result<SincGrid> {
    if k < MIN_K {
        return Err(Error::InvalidParameter(alloc::format!(
            "K must be at least {MIN_K}, got {k}"
        )));
    }
    let h = h.unwrap_or_else(|| (2.0 * PI / k as Real).sqrt());
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!(
            "sinc step must be positive, got {h}"
        )));
    }
    let per = 2 * k + 1;
    let n = mesh.intervals();
    let mut nodes = Vec::with_capacity(n * per);
    let mut left_gap = Vec::with_capacity(n * per);
    let mut right_gap = Vec::with_capacity(n * per);
    let mut mu = Vec::with_capacity(n * per);
    for i in 0..n {
        let (a, b) = mesh.interval(i);
        let len = b - a;
        for jj in 0..per {
            let j = jj as i64 - k as i64;
            let t = j as Real * h;
            let (lg, rg) = if j == 0 {
                (0.5 * len, 0.5 * len)
            } else {
                (len / (1.0 + (-t).exp()), len / (1.0 + t.exp()))
            };
            let mut z = if j == 0 {
                0.5 * (a + b)
            } else if j < 0 {
                a + lg
            } else {
                b - rg
            };
            if z <= a {
                z = a.next_up();
            }
            if z >= b {
                z = b.next_down();
            }
            let c = (0.5 * t).cosh();
            let w = len / (4.0 * c * c);
            nodes.push(Abscissa::with_gaps(z, (1.0 - b) + rg, (1.0 + a) + lg));
            left_gap.push(lg);
            right_gap.push(rg);
            mu.push(w);
        }
    }
    let delta = (-2 * k as i64..=2 * k as i64).map(stenger_delta).collect();
    Ok(SincGrid {
        k,
        h,
        mesh: mesh.clone(),
        nodes,
        left_gap,
        right_gap,
        mu,
        delta,
    })
}

impl SincGrid {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> Real {
        self.h
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn intervals(&self) -> usize {
        self.mesh.intervals()
    }

    /// Nodes per interval, `2K + 1`.
    pub fn per_interval(&self) -> usize {
        2 * self.k + 1
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, i: usize, j: i64) -> usize {
        i * self.per_interval() + (j + self.k as i64) as usize
    }

    pub fn range(&self, i: usize) -> core::ops::Range<usize> {
        let p = self.per_interval();
        i * p..(i + 1) * p
    }

    /// Node abscissae with `1 - z` and `1 + z` kept to full relative accuracy.
    pub fn abscissae(&self) -> &[Abscissa] {
        &self.nodes
    }

    pub fn z(&self, idx: usize) -> Real {
        self.nodes[idx].x
    }

    /// `z - x_{i}` for the node's own interval.
    pub fn left_gaps(&self) -> &[Real] {
        &self.left_gap
    }

    /// `x_{i+1} - z` for the node's own interval.
    pub fn right_gaps(&self) -> &[Real] {
        &self.right_gap
    }

    pub fn weights(&self) -> &[Real] {
        &self.mu
    }

    /// `delta_l` for `l = -2K..=2K`.
    pub fn delta(&self, l: i64) -> Real {
        self.delta[(l + 2 * self.k as i64) as usize]
    }

    /// Samples `f` at every node.
    pub fn sample<F: FnMut(Real) -> Real>(&self, mut f: F) -> Vec<Real> {
        self.nodes.iter().map(|a| f(a.x)).collect()
    }

    fn check(&self, found: usize, expected: usize) -> Result<()> {
        if found == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }

    /// Composite tanh rule over `[-1, 1]`.
    pub fn integrate(&self, samples: &[Real]) -> Result<Real> {
        self.check(samples.len(), self.len())?;
        Ok(self.h
            * samples
                .iter()
                .zip(&self.mu)
                .map(|(f, w)| f * w)
                .sum::<Real>())
    }

    /// Tanh rule over interval `i` only.
    pub fn integrate_interval(&self, i: usize, samples: &[Real]) -> Result<Real> {
        self.check(samples.len(), self.per_interval())?;
        let w = &self.mu[self.range(i)];
        Ok(self.h * samples.iter().zip(w).map(|(f, w)| f * w).sum::<Real>())
    }

    /// Running integrals `int_{x_i}^{z_{i,k}} f` on interval `i` by Stenger's
    /// formula; `samples` holds the `2K + 1` values of `f` on that interval.
    pub fn indefinite_integrate(&self, i: usize, samples: &[Real]) -> Result<Vec<Real>> {
        let p = self.per_interval();
        self.check(samples.len(), p)?;
        let w = &self.mu[self.range(i)];
        let fw: Vec<Real> = samples.iter().zip(w).map(|(f, w)| f * w).collect();
        let mut out = Vec::with_capacity(p);
        for kk in 0..p {
            // delta index (kk - l) + 2K runs from kk + 2K down to kk.
            let base = kk + 2 * self.k;
            let s: Real = fw
                .iter()
                .enumerate()
                .map(|(l, v)| self.delta[base - l] * v)
                .sum();
            out.push(self.h * s);
        }
        Ok(out)
    }
}
