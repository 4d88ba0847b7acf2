//! Eigenvalues and eigenfunctions of the singular Sturm-Liouville problem
//!
//! ```text
//! d/dx[(1 - x^2) du/dx] - q(x) u = -lambda u,   x in (-1, 1),
//! lim_{x -> +-1} (1 - x^2) du/dx = 0,
//! ```
//!
//! computed with the functional-discrete (FD) method: the potential is
//! replaced by a piecewise-constant approximation whose eigenproblem is
//! solved exactly with Legendre functions of arbitrary degree, and the
//! remainder `q - qbar` is folded back in through a rank-`m` correction
//! series evaluated with sinc quadratures.
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration files
//! and the command line live in the companion `slfd` crate.

#![no_std]

extern crate alloc;

pub mod basicsolver;
pub mod coeffmesh;
mod error;
pub mod exprparse;
pub mod fdengine;
pub mod scalar;
pub mod sincquad;
pub mod specfun;

pub use crate::error::Error;
pub use crate::scalar::{Complex, Real};

pub type Result<T> = core::result::Result<T, Error>;
