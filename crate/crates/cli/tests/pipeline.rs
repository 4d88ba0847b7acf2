use proptest::prelude::*;
use slfd::bounds::compute_bounds;
use slfd::golden::Golden;
use slfd::oracle::galerkin_oracle;
use slfd::report::{read_convergence_csv, write_convergence_csv};
use slfd::validate::{check_ids, run_check, ValidateOptions};
use slfd::{Problem, ProblemConfig};
use slfd_core::coeffmesh::Potential;
use slfd_core::fdengine::BoundStatus;

fn small(q: &str, n: usize, k: usize, indices: Vec<usize>, rank: usize) -> ProblemConfig {
    let mut c = ProblemConfig::new(q, n);
    c.k = Some(k);
    c.indices = indices;
    c.rank = rank;
    c
}

#[test]
fn oracle_reaches_the_linear_ground_state() {
    let golden = Golden::embedded();
    let want = golden
        .table("linear_fd_n3")
        .unwrap()
        .number(0, "lambda")
        .unwrap();
    let ev = galerkin_oracle(&Potential::parse("x", &[]).unwrap(), 200).unwrap();
    assert!((ev[0] - want).abs() < 1e-9, "{}", ev[0]);
}

#[test]
fn oracle_respects_breakpoints_of_singular_potentials() {
    let bps = [-1.0 / 3.0, 5.0 / 12.0];
    let q = Potential::parse("ln(abs((5/12 - x)*(1/3 + x)))", &bps).unwrap();
    let ev = galerkin_oracle(&q, 120).unwrap();
    let want = Golden::embedded()
        .table("log_fd_n24")
        .unwrap()
        .number(0, "lambda")
        .unwrap();
    // algebraic convergence for a log singularity
    assert!((ev[0] - want).abs() < 1e-3, "{}", ev[0]);
}

#[test]
fn constant_potential_has_zero_bounds() {
    let p = Problem::build(&small("2", 1, 40, vec![0, 1], 2)).unwrap();
    let b = compute_bounds(&p).unwrap();
    for row in &b.rows {
        assert_eq!(row.bound.r_bar, 0.0);
        assert_eq!(row.bound.status, BoundStatus::Convergent);
        assert_eq!(row.bound.eig_bound(1), Some(0.0));
        assert_eq!(row.zero_rate, None);
    }
    assert!(b.reliable);
}

#[test]
fn three_interval_bound_for_index_four_is_convergent() {
    let p = Problem::build(&small("x", 3, 60, vec![4], 0)).unwrap();
    let b = compute_bounds(&p).unwrap();
    let row = &b.rows[0];
    assert!((row.bound.r_bar - row.gap_m / 3.0).abs() < 1e-12);
    assert!(row.bound.r < 1.0);
}

#[test]
fn rank_rows_are_consistent_with_the_solution() {
    let p = Problem::build(&small("x", 3, 80, vec![0, 2], 6)).unwrap();
    let reports = p.solve(2).unwrap();
    assert_eq!(reports.iter().map(|r| r.n).collect::<Vec<_>>(), vec![0, 2]);
    for r in &reports {
        assert_eq!(r.rows.len(), 7);
        let sums = r.solution.partial_sums();
        for (j, row) in r.rows.iter().enumerate() {
            assert_eq!(row.rank, j);
            assert_eq!(row.lambda_sum, sums[j]);
        }
        // residuals shrink with the rank
        assert!(r.rows[6].eta < 1e-3 * r.rows[0].eta, "{:?}", r.rows);
        assert!(r.rows[6].eta_bar < 1e-3 * r.rows[0].eta_bar);
    }
}

#[test]
fn supplementary_checks_pass() {
    let opts = ValidateOptions::default();
    for id in ["linear-corrections", "linear-n1-columns", "log-discrepancy"] {
        assert!(check_ids().contains(&id));
        let c = run_check(id, &opts).unwrap();
        assert!(c.passed, "{}", c.render());
        assert!(c.warnings.is_empty());
    }
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(f64::MAX),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_rows_round_trip_exactly(
        values in proptest::collection::vec((0usize..50, 0usize..80, finite(), finite(), finite(), finite(), finite()), 1..20)
    ) {
        let p = Problem::build(&small("x", 1, 8, vec![0], 0)).unwrap();
        let mut report = p.solve_index(0).unwrap();
        report.rows = values
            .iter()
            .map(|&(n, rank, a, b, c, d, e)| slfd::RankRow {
                n,
                rank,
                lambda_corr: a,
                lambda_sum: b,
                corr_norm: c,
                eta: d,
                eta_bar: e,
            })
            .collect();
        let mut buf = Vec::new();
        write_convergence_csv(std::slice::from_ref(&report), &mut buf).unwrap();
        let back = read_convergence_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), report.rows.len());
        for (x, y) in back.iter().zip(&report.rows) {
            prop_assert_eq!((x.n, x.rank), (y.n, y.rank));
            for (u, v) in [
                (x.lambda_corr, y.lambda_corr),
                (x.lambda_sum, y.lambda_sum),
                (x.corr_norm, y.corr_norm),
                (x.eta, y.eta),
                (x.eta_bar, y.eta_bar),
            ] {
                prop_assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }
}
