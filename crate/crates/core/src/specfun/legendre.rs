//! Ferrers (on-the-cut) Legendre functions `P_nu`, `Q_nu` of arbitrary degree.
//!
//! Near `x = 1` both functions come from one hypergeometric expansion in
//! `t = (1 - x)/2`: `P_nu = 2F1(-nu, nu+1; 1; t)` and the logarithmic
//! second solution of the degenerate `c = 1` case for `Q_nu`. The digamma
//! differences of that expansion are carried as derivatives of Pochhammer
//! symbols, so integer degrees need no special casing. Real degrees are
//! reduced to `|nu| <= 1/2` and raised with the three-term recurrence;
//! negative arguments go through the reflection formulas.

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use super::{digamma, Degree};
use crate::scalar::{cos_pi, csin_pi, real, sin_pi, Complex, Real, EPSILON, EULER_GAMMA, PI};
use crate::{Error, Result};

const MAX_TERMS: usize = 20_000;

/// Point of (-1, 1) carrying `1 - x` and `1 + x` separately, so that
/// abscissae closer to the endpoints than the floating spacing of `x`
/// are still represented faithfully.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: Real,
    pub one_minus: Real,
    pub one_plus: Real,
}

impl Abscissa {
    pub fn new(x: Real) -> Self {
        Abscissa {
            x,
            one_minus: 1.0 - x,
            one_plus: 1.0 + x,
        }
    }

    pub fn with_gaps(x: Real, one_minus: Real, one_plus: Real) -> Self {
        Abscissa {
            x,
            one_minus,
            one_plus,
        }
    }

    /// `1 - x^2`
    pub fn one_minus_sq(&self) -> Real {
        self.one_minus * self.one_plus
    }

    fn reflected(&self) -> Self {
        Abscissa {
            x: -self.x,
            one_minus: self.one_plus,
            one_plus: self.one_minus,
        }
    }
}

/// `P_nu(x)`, `Q_nu(x)` and their `x`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionValuePair {
    pub p: Complex,
    pub p_prime: Complex,
    pub q: Complex,
    pub q_prime: Complex,
}

impl FunctionValuePair {
    /// `P Q' - P' Q`, equal to `1 / (1 - x^2)`.
    pub fn wronskian(&self) -> Complex {
        self.p * self.q_prime - self.p_prime * self.q
    }
}

pub fn legendre_pair(nu: Degree, x: Real) -> Result<FunctionValuePair> {
    legendre_pair_at(nu, &Abscissa::new(x))
}

pub fn legendre_pair_at(nu: Degree, at: &Abscissa) -> Result<FunctionValuePair> {
    if !(at.one_minus > 0.0 && at.one_plus > 0.0) || !at.x.is_finite() {
        return Err(Error::DomainError(alloc::format!(
            "Legendre functions need |x| < 1, got {}",
            at.x
        )));
    }
    let v = nu.value();
    if v.re < -0.5 {
        // P_nu = P_{-nu-1};  Q_nu = Q_{-nu-1} - pi cot(pi (-nu-1)) P_{-nu-1}
        let mirror = -v - 1.0;
        let s = csin_pi(mirror);
        if s.norm() < 1e-300 {
            return Err(Error::DomainError(alloc::format!(
                "Q_nu has a pole at degree {v}"
            )));
        }
        let cot = crate::scalar::ccos_pi(mirror) / s * PI;
        let base = legendre_pair_at(Degree::new(mirror), at)?;
        return Ok(FunctionValuePair {
            p: base.p,
            p_prime: base.p_prime,
            q: base.q - cot * base.p,
            q_prime: base.q_prime - cot * base.p_prime,
        });
    }
    if v.im == 0.0 {
        if at.x >= 0.0 {
            real_degree(v.re, at)
        } else {
            let mirror = real_degree(v.re, &at.reflected())?;
            Ok(reflect(mirror, real(sin_pi(v.re)), real(cos_pi(v.re))))
        }
    } else if at.x >= -0.9 {
        series_near_one(v, at)
    } else {
        let mirror = series_near_one(v, &at.reflected())?;
        Ok(reflect(mirror, csin_pi(v), crate::scalar::ccos_pi(v)))
    }
}

/// Values at `x` from values at `-x`.
fn reflect(m: FunctionValuePair, s: Complex, c: Complex) -> FunctionValuePair {
    let two_over_pi = 2.0 / PI;
    let half_pi = 0.5 * PI;
    FunctionValuePair {
        p: c * m.p - s * two_over_pi * m.q,
        p_prime: -(c * m.p_prime - s * two_over_pi * m.q_prime),
        q: -c * m.q - s * half_pi * m.p,
        q_prime: c * m.q_prime + s * half_pi * m.p_prime,
    }
}

/// Real degree `nu >= -1/2` at `x >= 0`.
fn real_degree(nu: Real, at: &Abscissa) -> Result<FunctionValuePair> {
    let steps = (nu + 0.5).floor();
    let base = nu - steps;
    let steps = steps as usize;
    let first = series_near_one(real(base), at)?;
    if steps == 0 {
        return Ok(first);
    }
    let mut prev = first;
    let mut cur = series_near_one(real(base + 1.0), at)?;
    let x = at.x;
    for k in 1..steps {
        let mu = base + k as Real;
        let a = (2.0 * mu + 1.0) / (mu + 1.0);
        let b = mu / (mu + 1.0);
        let next = FunctionValuePair {
            p: cur.p * (a * x) - prev.p * b,
            p_prime: prev.p_prime + cur.p * (2.0 * mu + 1.0),
            q: cur.q * (a * x) - prev.q * b,
            q_prime: prev.q_prime + cur.q * (2.0 * mu + 1.0),
        };
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Hypergeometric expansion about `x = 1`, valid for `t = (1-x)/2 < 1`
/// and used here for `t <= 0.95`.
fn series_near_one(nu: Complex, at: &Abscissa) -> Result<FunctionValuePair> {
    let t = 0.5 * at.one_minus;
    let a = -nu;
    let b = nu + 1.0;

    // A_k = (a)_k t^k / k!, B_k = (b)_k / k!, and their parameter derivatives
    let mut big_a = real(1.0);
    let mut d_a = real(0.0);
    let mut big_b = real(1.0);
    let mut d_b = real(0.0);
    let mut harmonic: Real = 0.0;

    let zero = real(0.0);
    let (mut f, mut fk, mut s, mut sk) = (zero, zero, zero, zero);
    let (mut f_scale, mut s_scale): (Real, Real) = (0.0, 0.0);
    let min_terms = (2.0 * nu.norm()) as usize + 4;
    let mut quiet = 0;

    let mut k = 0usize;
    loop {
        let ab = big_a * big_b;
        let log_part = d_a * big_b + big_a * d_b - ab * (2.0 * harmonic);
        let kr = k as Real;
        f += ab;
        fk += ab * kr;
        s += log_part;
        sk += log_part * kr;
        f_scale = f_scale.max(ab.norm());
        s_scale = s_scale.max(log_part.norm());

        let small = ab.norm() * (kr + 1.0) <= 0.25 * EPSILON * f_scale
            && log_part.norm() * (kr + 1.0) <= 0.25 * EPSILON * s_scale.max(f_scale);
        if k >= min_terms && small {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        if k >= MAX_TERMS {
            return Err(Error::NonConvergence {
                what: "Legendre hypergeometric series",
                iterations: k,
            });
        }

        let step = 1.0 / (kr + 1.0);
        let fa = a + kr;
        let fb = b + kr;
        d_a = (d_a * fa + big_a) * (t * step);
        big_a = big_a * fa * (t * step);
        d_b = (d_b * fb + big_b) * step;
        big_b = big_b * fb * step;
        harmonic += step;
        k += 1;
    }

    let log_t = t.ln();
    let c = -digamma(nu + 1.0) - EULER_GAMMA;
    let inv_t = 1.0 / t;
    let df_dt = fk * inv_t;
    let q = -(f * log_t + s) * 0.5 + c * f;
    let dq_dt = -(df_dt * log_t + f * inv_t + sk * inv_t) * 0.5 + c * df_dt;
    Ok(FunctionValuePair {
        p: f,
        p_prime: df_dt * -0.5,
        q,
        q_prime: dq_dt * -0.5,
    })
}
