use crate::scalar::Complex;

// B_{2k} / (2k) for k = 1..7
const ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Digamma function for complex arguments with `Re z > 0`.
pub fn digamma(z: Complex) -> Complex {
    let mut z = z;
    let mut acc = Complex::new(0.0, 0.0);
    while z.norm_sqr() < 196.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(0.0, 0.0);
    let mut pow = inv2;
    for c in ASYMPTOTIC {
        series += pow * c;
        pow *= inv2;
    }
    acc + z.ln() - inv * 0.5 - series
}
