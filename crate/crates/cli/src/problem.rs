//! Assembly of a configured problem and the per-index FD runs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use slfd_core::basicsolver::{eigenvalues, solve_basic_with_spectrum, BasicEigenpair};
use slfd_core::coeffmesh::{
    approximate_coefficient, build_mesh, PiecewiseConstantCoeff, Potential,
};
use slfd_core::fdengine::{
    residual_eta, residual_eta_bar, run_fd, sample_coefficient, sample_deviation, FdOptions,
    FdSolution, GridFunction,
};
use slfd_core::sincquad::{build_grid_with_step, SincGrid};

use crate::config::ProblemConfig;
use crate::error::{CliError, CliResult};

/// Everything shared by the indices of one run.
pub struct Problem {
    pub config: ProblemConfig,
    pub potential: Potential,
    pub qbar: PiecewiseConstantCoeff,
    pub grid: SincGrid,
    pub qdiff: GridFunction,
    pub qbar_nodes: Vec<f64>,
    pub q_nodes: Vec<f64>,
    /// Basic eigenvalues up to `max(indices) + 1`.
    pub spectrum: Vec<f64>,
}

/// One line of the convergence CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub n: usize,
    pub rank: usize,
    pub lambda_corr: f64,
    pub lambda_sum: f64,
    pub corr_norm: f64,
    pub eta: f64,
    pub eta_bar: f64,
}

#[derive(Debug, Clone)]
pub struct IndexReport {
    pub n: usize,
    pub basic: BasicEigenpair,
    pub solution: FdSolution,
    /// One row per rank `0..=m`; the last one is the reported result.
    pub rows: Vec<RankRow>,
    pub reference: Option<f64>,
}

impl IndexReport {
    pub fn final_row(&self) -> &RankRow {
        self.rows.last().expect("rank 0 always present")
    }

    pub fn lambda(&self) -> f64 {
        self.solution.eigenvalue_sum
    }

    pub fn discrepancy(&self) -> Option<f64> {
        self.reference.map(|r| (self.lambda() - r).abs())
    }
}

impl Problem {
    pub fn build(config: &ProblemConfig) -> CliResult<Self> {
        config.validate()?;
        let potential = config.potential()?;
        let mesh = build_mesh(config.intervals, &config.breakpoints)?;
        let qbar = approximate_coefficient(&potential, &mesh, config.rule)?;
        let grid = build_grid_with_step(&mesh, config.effective_k(), config.h)?;
        let n_max = *config.indices.iter().max().expect("validated non-empty");
        let spectrum = eigenvalues(&qbar, n_max + 1, config.bisect_tol)?;
        let qdiff = sample_deviation(&potential, &qbar, &grid)?;
        let qbar_nodes = sample_coefficient(&qbar, &grid).into_inner();
        let q_nodes = qbar_nodes
            .iter()
            .zip(qdiff.values())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Problem {
            config: config.clone(),
            potential,
            qbar,
            grid,
            qdiff,
            qbar_nodes,
            q_nodes,
            spectrum,
        })
    }

    pub fn basic(&self, n: usize) -> CliResult<BasicEigenpair> {
        Ok(solve_basic_with_spectrum(
            n,
            &self.qbar,
            &self.grid,
            &self.spectrum,
        )?)
    }

    /// Runs index `n` to its configured rank and evaluates both residuals
    /// at every intermediate rank.
    pub fn solve_index(&self, n: usize) -> CliResult<IndexReport> {
        if n + 2 > self.spectrum.len() {
            return Err(CliError::config(format!(
                "index {n} was not part of the configured indices"
            )));
        }
        let basic = self.basic(n)?;
        let opts = FdOptions {
            rank: self.config.rank_for(n),
            tol: self.config.tol,
        };
        let solution = run_fd(&basic, &self.qdiff, &self.grid, opts)?;
        let norms = solution.normalized_norms();
        let sums = solution.partial_sums();
        let rows = (0..=solution.rank)
            .map(|j| {
                let part = solution.truncated(j);
                Ok(RankRow {
                    n,
                    rank: j,
                    lambda_corr: solution.lambda_corrections[j],
                    lambda_sum: sums[j],
                    corr_norm: norms[j],
                    eta: residual_eta(&part, &basic, &self.q_nodes, &self.grid)?,
                    eta_bar: residual_eta_bar(
                        &part,
                        &basic,
                        &self.qbar_nodes,
                        &self.q_nodes,
                        &self.grid,
                    )?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(IndexReport {
            n,
            basic,
            solution,
            rows,
            reference: self.config.reference_for(n),
        })
    }

    /// All configured indices, in index order. With `parallel > 1` the
    /// indices are distributed over that many threads.
    pub fn solve(&self, parallel: usize) -> CliResult<Vec<IndexReport>> {
        let indices = &self.config.indices;
        if parallel <= 1 || indices.len() == 1 {
            return indices.iter().map(|&n| self.solve_index(n)).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<CliResult<IndexReport>>>> =
            Mutex::new((0..indices.len()).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..parallel.min(indices.len()) {
                s.spawn(|| loop {
                    let pos = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&n) = indices.get(pos) else { break };
                    let r = self.solve_index(n);
                    slots.lock().expect("worker panicked")[pos] = Some(r);
                });
            }
        });
        slots
            .into_inner()
            .expect("worker panicked")
            .into_iter()
            .map(|r| r.expect("every slot filled"))
            .collect()
    }
}
