//! Meshes aligned with the potential's singular points and the
//! piecewise-constant approximation `qbar`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::exprparse::{self, Expr};
use crate::{Error, Real, Result};

/// Breakpoints closer than this to a uniform point replace it.
pub const SNAP_TOLERANCE: Real = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    points: Vec<Real>,
}

impl Mesh {
    pub fn new(points: Vec<Real>) -> Result<Self> {
        if points.len() < 2 || points[0] != -1.0 || points[points.len() - 1] != 1.0 {
            return Err(Error::InvalidParameter(String::from(
                "mesh must start at -1 and end at 1",
            )));
        }
        if points.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(core::cmp::Ordering::Less)) {
            return Err(Error::InvalidParameter(String::from(
                "mesh points must be strictly increasing",
            )));
        }
        Ok(Mesh { points })
    }

    pub fn points(&self) -> &[Real] {
        &self.points
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.points.len() - 1
    }

    /// Endpoints of interval `i` (zero-based).
    pub fn interval(&self, i: usize) -> (Real, Real) {
        (self.points[i], self.points[i + 1])
    }

    pub fn max_step(&self) -> Real {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, Real::max)
    }

    /// Interval containing `x`, using half-open `[x_i, x_{i+1})` pieces
    /// (the last one closed).
    pub fn locate(&self, x: Real) -> Option<usize> {
        if !(-1.0..=1.0).contains(&x) {
            return None;
        }
        let i = self.points.partition_point(|&p| p <= x);
        Some(i.saturating_sub(1).min(self.intervals() - 1))
    }
}

/// Uniform mesh of `n` intervals with every breakpoint made a mesh point.
pub fn build_mesh(n: usize, breakpoints: &[Real]) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidParameter(String::from(
            "N must be at least 1",
        )));
    }
    let mut points: Vec<Real> = (0..=n)
        .map(|i| (2.0 * i as Real - n as Real) / n as Real)
        .collect();
    for &b in breakpoints {
        if !(b > -1.0 && b < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "breakpoint {b} is not inside (-1, 1)"
            )));
        }
        let i = points.partition_point(|&p| p < b);
        let near = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&k| k < points.len())
            .find(|&k| (points[k] - b).abs() <= SNAP_TOLERANCE);
        match near {
            Some(0) => {}
            Some(k) if k == points.len() - 1 => {}
            Some(k) => points[k] = b,
            None => points.insert(i, b),
        }
    }
    Mesh::new(points)
}

/// How `qbar_i` is taken from `q` on each interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    #[default]
    Midpoint,
    EndpointAverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantCoeff {
    mesh: Mesh,
    values: Vec<Real>,
}

impl PiecewiseConstantCoeff {
    pub fn new(mesh: Mesh, values: Vec<Real>) -> Result<Self> {
        if values.len() != mesh.intervals() {
            return Err(Error::DimensionMismatch {
                expected: mesh.intervals(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(String::from(
                "coefficient values must be finite",
            )));
        }
        Ok(PiecewiseConstantCoeff { mesh, values })
    }

    pub fn constant(mesh: Mesh, c: Real) -> Result<Self> {
        let n = mesh.intervals();
        Self::new(mesh, alloc::vec![c; n])
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[Real] {
        &self.values
    }

    pub fn at(&self, x: Real) -> Option<Real> {
        self.mesh.locate(x).map(|i| self.values[i])
    }

    pub fn max_abs(&self) -> Real {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> Real {
        self.values.iter().copied().fold(Real::INFINITY, Real::min)
    }

    pub fn mean(&self) -> Real {
        let (sum, len) = self
            .values
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(s, l), (i, v)| {
                let (a, b) = self.mesh.interval(i);
                (s + v * (b - a), l + (b - a))
            });
        sum / len
    }
}

/// A potential `q(x)` with its declared interior singular points.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    expr: Expr,
    breakpoints: Vec<Real>,
}

impl Potential {
    pub fn new(expr: Expr, breakpoints: Vec<Real>) -> Self {
        Potential { expr, breakpoints }
    }

    pub fn parse(text: &str, breakpoints: &[Real]) -> Result<Self> {
        Ok(Self::new(exprparse::parse(text)?, breakpoints.to_vec()))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn breakpoints(&self) -> &[Real] {
        &self.breakpoints
    }

    pub fn eval(&self, x: Real) -> Result<Real> {
        self.expr.evaluate(x).map_err(|e| match e {
            Error::NonFinite { x, subexpression } => Error::Evaluation {
                x,
                detail: alloc::format!("non-finite value of {subexpression}"),
            },
            other => other,
        })
    }
}

fn inside_right(a: Real) -> Real {
    a.next_up()
}

fn inside_left(b: Real) -> Real {
    b.next_down()
}

pub fn approximate_coefficient(
    q: &Potential,
    mesh: &Mesh,
    rule: Rule,
) -> Result<PiecewiseConstantCoeff> {
    let values = (0..mesh.intervals())
        .map(|i| {
            let (a, b) = mesh.interval(i);
            match rule {
                Rule::Midpoint => q.eval(0.5 * (a + b)),
                Rule::EndpointAverage => {
                    Ok(0.5 * (q.eval(inside_right(a))? + q.eval(inside_left(b))?))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseConstantCoeff::new(mesh.clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupDeviation {
    pub value: Real,
    /// False when some sample of `q` was non-finite, i.e. `q` is
    /// (probably) unbounded and `value` is only a lower estimate.
    pub reliable: bool,
}

/// Sampled estimate of `sup |q - qbar|`, equispaced per interval with the
/// endpoints taken one-sided.
pub fn sup_deviation(
    q: &Potential,
    qbar: &PiecewiseConstantCoeff,
    samples_per_interval: usize,
) -> SupDeviation {
    let s = samples_per_interval.max(16);
    let mesh = qbar.mesh();
    let mut value: Real = 0.0;
    let mut reliable = true;
    for (i, &c) in qbar.values().iter().enumerate() {
        let (a, b) = mesh.interval(i);
        for k in 0..s {
            let x = if k == 0 {
                inside_right(a)
            } else if k == s - 1 {
                inside_left(b)
            } else {
                a + (b - a) * (k as Real / (s - 1) as Real)
            };
            match q.eval(x) {
                Ok(v) => value = value.max((v - c).abs()),
                Err(_) => reliable = false,
            }
        }
    }
    SupDeviation { value, reliable }
}
