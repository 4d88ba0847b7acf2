//! Legendre functions of arbitrary degree on (-1, 1) and the sine-integral
//! coefficients used by sinc indefinite integration.

mod digamma;
mod legendre;
mod sine_integral;

pub use self::digamma::digamma;
pub use self::legendre::{legendre_pair, legendre_pair_at, Abscissa, FunctionValuePair};
pub use self::sine_integral::{sine_integral, stenger_delta};

#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use crate::scalar::{ccos_pi, csin_pi, real, Complex, Real, PI};

/// Degree `nu` of a Legendre function.
///
/// Degrees built from a spectral parameter are either real with
/// `nu >= -1/2` or lie on the conical line `Re nu = -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degree(Complex);

impl Degree {
    pub fn new(value: Complex) -> Self {
        Degree(value)
    }

    pub fn real(value: Real) -> Self {
        Degree(real(value))
    }

    pub fn value(self) -> Complex {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.im == 0.0
    }

    /// `nu (nu + 1)`, the separation constant this degree solves for.
    pub fn eigen_product(self) -> Complex {
        self.0 * (self.0 + 1.0)
    }
}

/// Degree solving `nu (nu + 1) = lambda - qbar_i`, taking the root with
/// `Re nu >= -1/2`. The other root `-nu - 1` gives the same `P_nu`.
pub fn degree_from_lambda(lambda: Real, qbar_i: Real) -> Degree {
    let disc = 1.0 + 4.0 * (lambda - qbar_i);
    if disc >= 0.0 {
        Degree(real(0.5 * (disc.sqrt() - 1.0)))
    } else {
        Degree(Complex::new(-0.5, 0.5 * (-disc).sqrt()))
    }
}

/// Boundary limits of `(1 - x^2)` times the derivatives of `P_nu`, `Q_nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointLimits {
    /// `lim_{x -> -1} (1 - x^2) P'_nu(x) = 2 sin(pi nu) / pi`
    pub p_left: Complex,
    /// `lim_{x -> 1} (1 - x^2) P'_nu(x) = 0`
    pub p_right: Complex,
    /// `lim_{x -> -1} (1 - x^2) Q'_nu(x) = cos(pi nu)`
    pub q_left: Complex,
    /// `lim_{x -> 1} (1 - x^2) Q'_nu(x) = 1`
    pub q_right: Complex,
}

pub fn endpoint_limits(nu: Degree) -> EndpointLimits {
    EndpointLimits {
        p_left: csin_pi(nu.0) * (2.0 / PI),
        p_right: Complex::new(0.0, 0.0),
        q_left: ccos_pi(nu.0),
        q_right: Complex::new(1.0, 0.0),
    }
}
