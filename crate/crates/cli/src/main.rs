use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slfd::bounds::compute_bounds;
use slfd::config::{parse_indices, ProblemConfig};
use slfd::golden::Golden;
use slfd::oracle::galerkin_oracle;
use slfd::report::{aligned_table, summary_table, write_outputs};
use slfd::validate::{check_ids, run_all, run_check, ValidateOptions};
use slfd::{CliError, CliResult, Problem};

/// Eigenvalues of the Legendre-type Sturm-Liouville problem
/// -((1 - x^2) u')' + q u = lambda u on (-1, 1) by the FD method.
#[derive(Parser)]
#[command(name = "slfd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, residuals and convergence data for the configured indices.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Indices to solve, e.g. "0-4" or "1,3".
        #[arg(long = "n", value_name = "LIST")]
        indices: Option<String>,
        /// Rank for every index (overrides rank and ranks).
        #[arg(long, value_name = "M")]
        rank: Option<usize>,
        #[arg(long = "K", value_name = "INT")]
        k: Option<usize>,
        #[arg(long = "N", value_name = "INT")]
        intervals: Option<usize>,
        /// Directory for summary.txt, convergence.csv and effective_config.txt.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Number of worker threads.
        #[arg(long, value_name = "P", default_value_t = 1)]
        parallel: usize,
    },
    /// A-priori convergence estimates per index.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Eigenvalues from the spectral Galerkin reference solver.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_name = "M")]
        modes: usize,
    },
    /// Runs the acceptance suite against the shipped reference data.
    Validate {
        /// Sinc half-count for every quadrature-limited check.
        #[arg(long = "K", value_name = "INT")]
        k: Option<usize>,
        /// Directory whose CSV files replace the shipped reference tables.
        #[arg(long, value_name = "DIR")]
        golden: Option<PathBuf>,
        /// Run only these checks (repeatable).
        #[arg(long = "check", value_name = "ID")]
        checks: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Solve {
            config,
            indices,
            rank,
            k,
            intervals,
            out,
            parallel,
        } => {
            let mut cfg = ProblemConfig::load(&config)?;
            if let Some(list) = indices {
                cfg.indices = parse_indices(&list)?;
            }
            if let Some(m) = rank {
                cfg.rank = m;
                cfg.ranks.clear();
            }
            if let Some(k) = k {
                cfg.k = Some(k);
            }
            if let Some(n) = intervals {
                cfg.intervals = n;
            }
            if out.is_some() {
                cfg.out = out;
            }
            cfg.validate()?;
            let problem = Problem::build(&cfg)?;
            let reports = problem.solve(parallel)?;
            for r in &reports {
                if r.solution.stagnation {
                    eprintln!(
                        "warning: correction norms for n={} grew over several ranks; the series may not converge",
                        r.n
                    );
                }
            }
            print!("{}", summary_table(&reports));
            if let Some(dir) = &cfg.out {
                write_outputs(dir, &cfg, &reports)?;
            }
            Ok(())
        }
        Command::Bounds { config } => {
            let cfg = ProblemConfig::load(&config)?;
            let problem = Problem::build(&cfg)?;
            let report = compute_bounds(&problem)?;
            for w in report.warnings() {
                eprintln!("{w}");
            }
            print!("{}", report.render());
            Ok(())
        }
        Command::Oracle { config, modes } => {
            let cfg = ProblemConfig::load(&config)?;
            let ev = galerkin_oracle(&cfg.potential()?, modes)?;
            let with_ref = cfg.indices.iter().any(|&n| cfg.reference_for(n).is_some());
            let mut header = vec!["n".to_string(), "lambda".to_string()];
            if with_ref {
                header.push("|lambda - ref|".into());
            }
            let mut rows = Vec::new();
            for &n in &cfg.indices {
                let Some(&l) = ev.get(n) else {
                    return Err(CliError::config(format!(
                        "index {n} needs more than {modes} modes"
                    )));
                };
                let mut row = vec![n.to_string(), format!("{l:.15}")];
                if with_ref {
                    row.push(
                        cfg.reference_for(n)
                            .map(|r| format!("{:.4e}", (l - r).abs()))
                            .unwrap_or_default(),
                    );
                }
                rows.push(row);
            }
            print!("{}", aligned_table(&header, &rows));
            Ok(())
        }
        Command::Validate { k, golden, checks } => {
            let opts = ValidateOptions {
                k,
                golden: match golden {
                    Some(dir) => Golden::with_overrides(&dir)?,
                    None => Golden::embedded(),
                },
            };
            let print = |c: &slfd::validate::Check| print!("{}", c.render());
            let results = if checks.is_empty() {
                run_all(&opts, print)
            } else {
                checks
                    .iter()
                    .map(|id| {
                        let c = run_check(id, &opts).ok_or_else(|| {
                            CliError::config(format!(
                                "unknown check '{id}' (known: {})",
                                check_ids().join(", ")
                            ))
                        })?;
                        print(&c);
                        Ok(c)
                    })
                    .collect::<CliResult<Vec<_>>>()?
            };
            let failed = results.iter().filter(|c| !c.passed).count();
            println!(
                "{} of {} checks passed",
                results.len() - failed,
                results.len()
            );
            if failed > 0 {
                return Err(CliError::Validation {
                    failed,
                    total: results.len(),
                });
            }
            Ok(())
        }
    }
}
