//! A-priori convergence bounds of the FD series.

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use crate::scalar::PI;
use crate::Real;

/// Catalan number `C_j`, exact while it fits in `u128` (`j <= 64`).
pub fn catalan(j: usize) -> Option<u128> {
    (0..j).try_fold(1u128, |c, i| {
        c.checked_mul(2 * (2 * i as u128 + 1))
            .map(|v| v / (i as u128 + 2))
    })
}

/// `alpha_j = 2 (2j - 1)!! / (2j + 2)!! = C_j / 4^j`, with `alpha_0 = 1`.
pub fn alpha(j: usize) -> Real {
    match catalan(j) {
        Some(c) => c as Real * (0.25 as Real).powi(j as i32),
        _ => (0..j).fold(1.0, |a, i| a * (2 * i + 1) as Real / (2 * i + 4) as Real),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundStatus {
    /// `r < 1`: geometric-times-`alpha` bounds.
    Convergent,
    /// `r = 1`: bounds from the tail of `sum 1 / ((j + 1) sqrt(pi j))`.
    Critical,
    /// `r > 1`: the theory gives no bound.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBound {
    /// `M_n * ||q - qbar||_inf`
    pub r_bar: Real,
    /// `4 r_bar`
    pub r: Real,
    pub deviation: Real,
    pub status: BoundStatus,
}

/// `sum_{j >= m} 1 / ((j + 1) sqrt(pi j))`, bounded by the integral from
/// `m - 1`.
fn critical_tail(m: usize) -> Real {
    match m {
        0 => Real::INFINITY,
        1 => PI.sqrt(),
        _ => 2.0 / PI.sqrt() * (1.0 / ((m - 1) as Real).sqrt()).atan(),
    }
}

pub fn apriori_bounds(gap_m: Real, deviation: Real) -> ConvergenceBound {
    let r_bar = gap_m * deviation;
    let r = 4.0 * r_bar;
    let status = if r < 1.0 {
        BoundStatus::Convergent
    } else if r == 1.0 {
        BoundStatus::Critical
    } else {
        BoundStatus::NotApplicable
    };
    ConvergenceBound {
        r_bar,
        r,
        deviation,
        status,
    }
}

impl ConvergenceBound {
    pub fn alpha(&self, j: usize) -> Real {
        alpha(j)
    }

    /// Bound on `|lambda - lambda~^m|`.
    pub fn eig_bound(&self, m: usize) -> Option<Real> {
        match self.status {
            BoundStatus::Convergent => {
                Some(self.deviation * self.r.powi(m as i32) * alpha(m) / (1.0 - self.r))
            }
            BoundStatus::Critical => Some(self.deviation * critical_tail(m)),
            BoundStatus::NotApplicable => None,
        }
    }

    /// Bound on `||u - u~^m||` for the `L2`-normalised eigenfunction.
    pub fn fun_bound(&self, m: usize) -> Option<Real> {
        match self.status {
            BoundStatus::Convergent => {
                Some(self.r.powi(m as i32 + 1) * alpha(m + 1) / (1.0 - self.r))
            }
            BoundStatus::Critical => Some(critical_tail(m + 1)),
            BoundStatus::NotApplicable => None,
        }
    }

    /// Smallest rank whose eigenvalue bound is below `tol`.
    pub fn rank_for(&self, tol: Real) -> Option<usize> {
        (0..=10_000).find(|&m| self.eig_bound(m).is_some_and(|b| b < tol))
    }
}

/// `q_n = 2 ||q||_inf / n`, the rate for `qbar = 0`.
pub fn zero_coefficient_rate(q_sup: Real, n: usize) -> Real {
    2.0 * q_sup / n as Real
}
