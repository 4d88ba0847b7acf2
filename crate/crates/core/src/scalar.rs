//! Working scalar types.
//!
//! Every formula in the crate is written against [`Real`] and [`Complex`].
//! Swapping in a wider floating type only requires changing these aliases
//! (and providing `num_traits::Float` for it); no formula names `f64`.

pub type Real = f64;
pub type Complex = num_complex::Complex<Real>;

pub const PI: Real = core::f64::consts::PI;
pub const EULER_GAMMA: Real = 0.577_215_664_901_532_9;
pub const EPSILON: Real = Real::EPSILON;

#[inline]
pub fn real(x: Real) -> Complex {
    Complex::new(x, 0.0)
}

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: Real) -> Real {
    #[allow(unused_imports)] // inherent float methods need std
    use num_traits::Float;
    let r = x - 2.0 * (x * 0.5).floor();
    // r in [0, 2)
    let (s, r) = if r >= 1.0 { (-1.0, r - 1.0) } else { (1.0, r) };
    let v = if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (0.5 - r)).cos()
    } else {
        (PI * (1.0 - r)).sin()
    };
    s * v
}

/// `cos(pi x)` with exact zeros at the half-integers.
pub fn cos_pi(x: Real) -> Real {
    sin_pi(x + 0.5)
}

/// `sin(pi z)` for complex `z`, exact on the real axis at the integers.
pub fn csin_pi(z: Complex) -> Complex {
    #[allow(unused_imports)] // inherent float methods need std
    use num_traits::Float;
    if z.im == 0.0 {
        return real(sin_pi(z.re));
    }
    let (s, c) = (sin_pi(z.re), cos_pi(z.re));
    let y = PI * z.im;
    Complex::new(s * y.cosh(), c * y.sinh())
}

/// `cos(pi z)` for complex `z`.
pub fn ccos_pi(z: Complex) -> Complex {
    #[allow(unused_imports)] // inherent float methods need std
    use num_traits::Float;
    if z.im == 0.0 {
        return real(cos_pi(z.re));
    }
    let (s, c) = (sin_pi(z.re), cos_pi(z.re));
    let y = PI * z.im;
    Complex::new(c * y.cosh(), -s * y.sinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for k in -6..=6 {
            assert_eq!(sin_pi(k as Real), 0.0);
            assert_eq!(cos_pi(k as Real + 0.5), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((cos_pi(1.0) + 1.0).abs() < 1e-16);
        assert!((sin_pi(0.3) - 0.809_016_994_374_947_4).abs() < 1e-15);
    }

    #[test]
    fn complex_trig_matches_libm() {
        #[allow(unused_imports)] // inherent float methods need std
        use num_traits::Float;
        let z = Complex::new(-0.5, 0.8);
        let a = csin_pi(z);
        let b = (z * PI).sin();
        assert!((a - b).norm() < 1e-14);
        let a = ccos_pi(z);
        let b = (z * PI).cos();
        assert!((a - b).norm() < 1e-14);
    }
}
