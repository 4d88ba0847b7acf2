#[allow(unused_imports)] // inherent float methods need std
use num_traits::Float;

use crate::scalar::{Complex, Real, EPSILON, PI};

/// Sine integral `Si(x) = int_0^x sin(t)/t dt`.
///
/// Power series for `|x| <= 2`, otherwise the continued fraction for the
/// exponential integral `E1(ix)` evaluated with the modified Lentz method.
pub fn sine_integral(x: Real) -> Real {
    let ax = x.abs();
    let value = if ax <= 2.0 {
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut k = 1;
        loop {
            term *= -x2 / ((2 * k) as Real * (2 * k + 1) as Real);
            let contrib = term / (2 * k + 1) as Real;
            sum += contrib;
            if contrib.abs() < EPSILON * sum.abs() * 0.1 {
                break;
            }
            k += 1;
        }
        sum
    } else {
        const TINY: Real = 1e-300;
        let mut b = Complex::new(1.0, ax);
        let mut c = Complex::new(1.0 / TINY, 0.0);
        let mut d = b.inv();
        let mut h = d;
        let mut i = 2;
        loop {
            let a = -(((i - 1) * (i - 1)) as Real);
            b += 2.0;
            d = (d * a + b).inv();
            c = b + c.inv() * a;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < EPSILON || i > 10_000 {
                break;
            }
            i += 1;
        }
        h *= Complex::new(ax.cos(), -ax.sin());
        0.5 * PI + h.im
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Stenger coefficient `delta_k = 1/2 + Si(pi k) / pi`.
///
/// Negative indices use `delta_{-k} = 1 - delta_k`, so that the pair sums
/// to one exactly in floating point.
pub fn stenger_delta(k: i64) -> Real {
    if k == 0 {
        return 0.5;
    }
    let pos = 0.5 + sine_integral(PI * k.unsigned_abs() as Real) / PI;
    if k > 0 {
        pos
    } else {
        1.0 - pos
    }
}
