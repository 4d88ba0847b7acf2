//! A-priori convergence estimates per index.

use slfd_core::basicsolver::gap_m;
use slfd_core::coeffmesh::{sup_deviation, Mesh, Potential};
use slfd_core::fdengine::{apriori_bounds, zero_coefficient_rate, BoundStatus, ConvergenceBound};

use crate::error::CliResult;
use crate::problem::Problem;
use crate::report::aligned_table;

/// Samples per interval for the sup-norm estimate.
pub const DEVIATION_SAMPLES: usize = 2048;
/// Target accuracy for the predicted rank when the config has no `tol`.
pub const DEFAULT_TARGET: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub n: usize,
    pub gap_m: f64,
    pub bound: ConvergenceBound,
    pub target: f64,
    pub predicted_rank: Option<usize>,
    /// `2 ||q|| / n` when the piecewise-constant coefficient vanishes.
    pub zero_rate: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub deviation: f64,
    pub reliable: bool,
    pub intervals: usize,
    pub rows: Vec<BoundsRow>,
}

pub fn compute_bounds(problem: &Problem) -> CliResult<BoundsReport> {
    let dev = sup_deviation(&problem.potential, &problem.qbar, DEVIATION_SAMPLES);
    let unbounded = appears_unbounded(&problem.potential, problem.qbar.mesh());
    let zero_coeff = problem.qbar.values().iter().all(|&v| v == 0.0);
    let target = problem.config.tol.unwrap_or(DEFAULT_TARGET);
    let rows = problem
        .config
        .indices
        .iter()
        .map(|&n| {
            let m = gap_m(&problem.spectrum, n);
            let bound = apriori_bounds(m, dev.value);
            BoundsRow {
                n,
                gap_m: m,
                bound,
                target,
                predicted_rank: bound.rank_for(target),
                zero_rate: (zero_coeff && n > 0).then(|| zero_coefficient_rate(dev.value, n)),
            }
        })
        .collect();
    Ok(BoundsReport {
        deviation: dev.value,
        reliable: dev.reliable && !unbounded,
        intervals: problem.config.intervals,
        rows,
    })
}

impl BoundsReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.reliable {
            out.push(format!(
                "warning: q appears unbounded; sup|q - qbar| = {:.3e} is only a lower estimate",
                self.deviation
            ));
        }
        out
    }

    pub fn render(&self) -> String {
        let header: Vec<String> = ["n", "M_n", "sup|q-qbar|", "r_bar", "r", "status", "rank"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let b = &r.bound;
                vec![
                    r.n.to_string(),
                    format!("{:.6e}", r.gap_m),
                    format!("{:.6e}", b.deviation),
                    format!("{:.6e}", b.r_bar),
                    format!("{:.6e}", b.r),
                    status_name(b.status).to_string(),
                    r.predicted_rank
                        .map(|m| m.to_string())
                        .unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        let mut out = aligned_table(&header, &rows);
        if let Some(r) = self.rows.first() {
            out.push_str(&format!(
                "rank: smallest m with eigenvalue bound below {:e}\n",
                r.target
            ));
        }
        for r in &self.rows {
            if let Some(q) = r.zero_rate {
                let verdict = if q < 1.0 {
                    "converges".to_string()
                } else {
                    format!(
                        "zero-coefficient estimate not applicable for n={} at N={}",
                        r.n, self.intervals
                    )
                };
                out.push_str(&format!(
                    "n={}: q_n = 2 sup|q| / n = {q:.6}: {verdict}\n",
                    r.n
                ));
            }
        }
        out
    }
}

/// True when `q` keeps growing as a mesh point is approached from either
/// side, comparing offsets of `1e-6` and `1e-12` of the interval length.
pub fn appears_unbounded(q: &Potential, mesh: &Mesh) -> bool {
    (0..mesh.intervals()).any(|i| {
        let (a, b) = mesh.interval(i);
        let len = b - a;
        [(a, 1.0), (b, -1.0)].iter().any(|&(x, dir)| {
            let near = q.eval(x + dir * 1e-12 * len);
            let far = q.eval(x + dir * 1e-6 * len);
            match (near, far) {
                (Ok(n), Ok(f)) => (n - f).abs() > 1e-3 * (1.0 + f.abs()),
                _ => true,
            }
        })
    })
}

pub fn status_name(s: BoundStatus) -> &'static str {
    match s {
        BoundStatus::Convergent => "r < 1",
        BoundStatus::Critical => "r = 1",
        BoundStatus::NotApplicable => "r > 1",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use slfd_core::coeffmesh::build_mesh;

    #[test]
    fn growth_probe_separates_bounded_from_singular() {
        let bps = [-1.0 / 3.0, 1.0 / 3.0];
        let mesh = build_mesh(6, &bps).unwrap();
        let check = |q: &str| appears_unbounded(&Potential::parse(q, &bps).unwrap(), &mesh);
        assert!(!check("x"));
        assert!(!check("abs(x - 1/3) + 3"));
        assert!(check("1/sqrt(abs(x+1/3))"));
        assert!(check("ln(abs(x-1/3))"));
    }
}
