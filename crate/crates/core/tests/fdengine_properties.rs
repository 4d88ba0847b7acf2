mod common;

use slfd_core::basicsolver::{
    eigenvalues, solve_basic_with_spectrum, BasicEigenpair, DEFAULT_BISECT_TOL,
};
use slfd_core::coeffmesh::{approximate_coefficient, build_mesh, sup_deviation, Potential, Rule};
use slfd_core::fdengine::{
    alpha, apriori_bounds, catalan, compute_eigfun_correction, compute_lambda_correction, inner,
    orthogonalize, residual_eta, run_fd, sample_coefficient, sample_deviation, FdOptions,
    FdSolution, GridFunction,
};
use slfd_core::sincquad::{build_grid, SincGrid};

struct Setup {
    grid: SincGrid,
    basic: Vec<BasicEigenpair>,
    qdiff: GridFunction,
    q_nodes: Vec<f64>,
    deviation: f64,
}

fn setup(q: &str, bps: &[f64], n: usize, k: usize, indices: usize) -> Setup {
    let pot = Potential::parse(q, bps).unwrap();
    let mesh = build_mesh(n, bps).unwrap();
    let qbar = approximate_coefficient(&pot, &mesh, Rule::Midpoint).unwrap();
    let grid = build_grid(&mesh, k).unwrap();
    let ev = eigenvalues(&qbar, indices, DEFAULT_BISECT_TOL).unwrap();
    let basic = (0..indices)
        .map(|i| solve_basic_with_spectrum(i, &qbar, &grid, &ev).unwrap())
        .collect();
    let qdiff = sample_deviation(&pot, &qbar, &grid).unwrap();
    let qb = sample_coefficient(&qbar, &grid);
    let q_nodes = qb
        .values()
        .iter()
        .zip(qdiff.values())
        .map(|(a, b)| a + b)
        .collect();
    let deviation = sup_deviation(&pot, &qbar, 64).value;
    Setup {
        grid,
        basic,
        qdiff,
        q_nodes,
        deviation,
    }
}

fn fd(s: &Setup, n: usize, m: usize) -> FdSolution {
    run_fd(
        &s.basic[n],
        &s.qdiff,
        &s.grid,
        FdOptions { rank: m, tol: None },
    )
    .unwrap()
}

#[test]
fn single_interval_linear_potential_closed_forms() {
    let s = setup("x", &[], 1, 500, 2);
    let sol = fd(&s, 0, 6);
    let l = &sol.lambda_corrections;
    assert!(l[1].abs() < 1e-9);
    assert!((l[2] + 1.0 / 6.0).abs() < 1e-8);
    assert!(l[3].abs() < 1e-9);
    assert!((l[4] - 11.0 / 1080.0).abs() < 1e-8);
    assert!((l[6] + 47.0 / 34020.0).abs() < 1e-7);
    let r2 = 2f64.sqrt();
    let closed: [&dyn Fn(f64) -> f64; 6] = [
        &|_| r2 / 2.0,
        &|x| -r2 * x / 4.0,
        &|x| r2 * x * x / 24.0 - r2 / 72.0,
        &|x| -r2 * x.powi(3) / 288.0 + 5.0 * r2 * x / 288.0,
        &|x| r2 * x.powi(4) / 5760.0 - r2 * x * x / 270.0 + 311.0 * r2 / 259200.0,
        &|x| -r2 * x.powi(5) / 172800.0 + r2 * x.powi(3) / 2880.0 - 1181.0 * r2 * x / 518400.0,
    ];
    let scale = 1.0 / sol.norm_sq.sqrt();
    for (j, f) in closed.iter().enumerate() {
        for (k, at) in s.grid.abscissae().iter().enumerate() {
            let got = sol.corrections[j].values()[k] * scale;
            assert!(
                (got - f(at.x)).abs() < 1e-7,
                "u^({j}) at {}: {got} vs {}",
                at.x,
                f(at.x)
            );
        }
    }
    let norms = sol.normalized_norms();
    assert!((norms[0] - 1.0).abs() < 1e-12);
    assert!((norms[1] - (1.0f64 / 12.0).sqrt()).abs() < 1e-9);
}

#[test]
fn lambda_correction_examples() {
    let s = setup("x", &[], 1, 500, 1);
    let b = &s.basic[0];
    let u0 = GridFunction::new(&s.grid, b.samples.u0.clone()).unwrap();
    let l1 = compute_lambda_correction(&u0, &u0, &s.qdiff, &s.grid, b.norm_sq).unwrap();
    assert!(l1.abs() < 1e-12);
    let zero = GridFunction::zeros(&s.grid);
    assert_eq!(
        compute_lambda_correction(&u0, &u0, &zero, &s.grid, b.norm_sq).unwrap(),
        0.0
    );
}

#[test]
fn kernel_matches_closed_form_on_single_interval() {
    // q = 0, lambda = 0: ((1 - x^2) u')' = x has the bounded solution -x/2
    // (plus constants, removed by projection).
    let s = setup("0", &[], 1, 300, 1);
    let b = &s.basic[0];
    let u0 = GridFunction::new(&s.grid, b.samples.u0.clone()).unwrap();
    let w = GridFunction::new(&s.grid, b.samples.w.clone()).unwrap();
    let f = GridFunction::sample(&s.grid, |x| x);
    let k = compute_eigfun_correction(&f, &u0, &w, &s.grid).unwrap();
    for (v, at) in k.u.values().iter().zip(s.grid.abscissae()) {
        assert!((v + (1.0 + at.x) / 2.0).abs() < 1e-8, "{} {v}", at.x);
    }
    let (p, _) = orthogonalize(&k.u, &u0, &s.grid, b.norm_sq).unwrap();
    for (v, at) in p.values().iter().zip(s.grid.abscissae()) {
        assert!((v + at.x / 2.0).abs() < 1e-8);
    }
    let zero = compute_eigfun_correction(&GridFunction::zeros(&s.grid), &u0, &w, &s.grid).unwrap();
    assert!(zero.u.values().iter().all(|&v| v == 0.0));
}

#[test]
fn kernel_agrees_with_independent_quadrature_and_solves_the_equation() {
    let pot = Potential::parse("x", &[]).unwrap();
    let mesh = build_mesh(3, &[]).unwrap();
    let qbar = approximate_coefficient(&pot, &mesh, Rule::Midpoint).unwrap();
    let grid = build_grid(&mesh, 200).unwrap();
    let ev = eigenvalues(&qbar, 2, DEFAULT_BISECT_TOL).unwrap();
    let b = solve_basic_with_spectrum(1, &qbar, &grid, &ev).unwrap();
    // right-hand side made orthogonal to u0 so the solution stays bounded
    let raw = |x: f64| (2.0 * x).cos() + x * x * x;
    let u0 = GridFunction::new(&grid, b.samples.u0.clone()).unwrap();
    let c = inner(&grid, &grid.sample(raw), u0.values()).unwrap() / b.norm_sq;
    let smooth = |x: f64| raw(x) - c * b.eigenfunction.eval(x).unwrap();
    let f = GridFunction::new(
        &grid,
        (0..grid.len())
            .map(|k| raw(grid.z(k)) - c * u0.values()[k])
            .collect(),
    )
    .unwrap();
    let w = GridFunction::new(&grid, b.samples.w.clone()).unwrap();
    let k = compute_eigfun_correction(&f, &u0, &w, &grid).unwrap();

    let uf = |x: f64| b.eigenfunction.eval(x).unwrap();
    let wf = |x: f64| b.second.eval(x).unwrap();
    let pts = mesh.points().to_vec();
    let running = |g: &dyn Fn(f64) -> f64, x: f64| {
        let mut s = 0.0;
        let mut a = -1.0;
        for &p in &pts[1..] {
            let hi = p.min(x);
            if hi > a {
                s += common::graded_integrate(&|t| g(t), a, hi);
            }
            if p >= x {
                break;
            }
            a = p;
        }
        s
    };
    let oracle = |x: f64| {
        wf(x) * running(&|t| uf(t) * smooth(t), x) - uf(x) * running(&|t| wf(t) * smooth(t), x)
    };
    let lambda0 = b.lambda0;
    for i in 0..3 {
        let (lo, hi) = mesh.interval(i);
        let c = qbar.values()[i];
        for j in (-60i64..=60).step_by(15) {
            let idx = grid.index(i, j);
            let x = grid.z(idx);
            let want = oracle(x);
            assert!(
                (k.u.values()[idx] - want).abs() < 1e-8,
                "x={x}: {} vs {want}",
                k.u.values()[idx]
            );
            let h = 1e-3;
            if x - 2.0 * h <= lo || x + 2.0 * h >= hi {
                continue;
            }
            let flux = |t: f64| {
                let d = (-oracle(t + 2.0 * h) + 8.0 * oracle(t + h) - 8.0 * oracle(t - h)
                    + oracle(t - 2.0 * h))
                    / (12.0 * h);
                (1.0 - t * t) * d
            };
            let g = h / 2.0;
            let lhs = (flux(x + g) - flux(x - g)) / (2.0 * g);
            let residual = lhs + (lambda0 - c) * want - smooth(x);
            assert!(residual.abs() < 1e-6, "x={x}: residual {residual:e}");
        }
    }
}

#[test]
fn projection_removes_exactly_the_u0_component() {
    let s = setup("x", &[], 3, 200, 1);
    let b = &s.basic[0];
    let u0 = GridFunction::new(&s.grid, b.samples.u0.clone()).unwrap();
    let raw = GridFunction::sample(&s.grid, |x| (3.0 * x).sin() + x * x);
    let (v, _) = orthogonalize(&raw, &u0, &s.grid, b.norm_sq).unwrap();
    let mixed: Vec<f64> = v
        .values()
        .iter()
        .zip(u0.values())
        .map(|(a, b)| a + 0.8 * b)
        .collect();
    let mixed = GridFunction::new(&s.grid, mixed).unwrap();
    let (back, c) = orthogonalize(&mixed, &u0, &s.grid, b.norm_sq).unwrap();
    assert!((c - 0.8).abs() < 1e-12);
    for (a, b) in back.values().iter().zip(v.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn three_interval_linear_potential_table() {
    let s = setup("x", &[], 3, 350, 6);
    let want = [
        (15, -0.157_663_483_137_750_961_789_8, 1e-9),
        (15, 2.090_760_648_363_956_948_786, 1e-8),
        (15, 6.024_031_655_336_352_711_291, 1e-8),
        (13, 12.011_122_563_629_871_276_25, 1e-8),
        (11, 20.006_495_332_926_562_996_28, 1e-8),
    ];
    for (n, (m, l, tol)) in want.into_iter().enumerate() {
        let sol = fd(&s, n, m);
        assert!(
            (sol.eigenvalue_sum - l).abs() < tol,
            "{n}: {}",
            sol.eigenvalue_sum
        );
        let eta = residual_eta(&sol, &s.basic[n], &s.q_nodes, &s.grid).unwrap();
        assert!(eta < 1e-10, "{n}: eta {eta:e}");
        for d in &sol.diagnostics {
            assert!(
                d.orthogonality <= 1e-10,
                "{n} {}: {:e}",
                d.rank,
                d.orthogonality
            );
        }
        let n0 = inner(
            &s.grid,
            &sol.corrections[0].values(),
            &sol.corrections[0].values(),
        )
        .unwrap();
        assert!((sol.correction_norms[0].powi(2) / n0 - 1.0).abs() < 1e-10);
        assert!((sol.correction_norms[0].powi(2) / sol.norm_sq - 1.0).abs() < 1e-10);
        assert!(!sol.stagnation);
    }
}

#[test]
fn corrections_decay_superexponentially_under_the_majorant() {
    let s = setup("x", &[], 3, 350, 6);
    assert!((s.deviation - 1.0 / 3.0).abs() < 1e-12);
    for n in 0..5 {
        let sol = fd(&s, n, 12);
        let norms = sol.normalized_norms();
        if n == 0 {
            for j in 2..norms.len() - 1 {
                assert!(norms[j + 1].ln() < norms[j].ln(), "j={j}");
            }
        }
        let b = apriori_bounds(s.basic[n].gap_m, s.deviation);
        if b.r <= 1.0 {
            for (j, v) in norms.iter().enumerate() {
                assert!(
                    *v <= b.r.powi(j as i32) * alpha(j) * (1.0 + 1e-9),
                    "n={n} j={j}"
                );
            }
        }
        let l = sol.partial_sums();
        let exact = sol.eigenvalue_sum;
        for m in 0..8 {
            if let Some(bound) = b.eig_bound(m) {
                assert!((l[m] - exact).abs() <= bound, "n={n} m={m}");
            }
        }
    }
}

#[test]
fn accuracy_improves_with_mesh_refinement() {
    let exact = -0.157_663_483_137_750_961_789_8;
    let mut prev = f64::INFINITY;
    for n in [1usize, 3, 9] {
        let s = setup("x", &[], n, if n == 1 { 500 } else { 350 }, 1);
        let err = (fd(&s, 0, 8).eigenvalue_sum - exact).abs();
        assert!(err < prev, "N={n}: {err:e}");
        prev = err;
    }
}

#[test]
fn low_rank_error_shrinks_with_index() {
    // reference values from rank 15
    let s = setup("x", &[], 3, 350, 6);
    let mut prev = f64::INFINITY;
    for n in 1..=4 {
        let exact = fd(&s, n, 15).eigenvalue_sum;
        let err = (fd(&s, n, 3).eigenvalue_sum - exact).abs();
        assert!(err < prev, "n={n}: {err:e}");
        prev = err;
    }
}

#[test]
fn majorant_recursion_is_catalan() {
    let mut v = vec![1u128];
    for j in 1..=15 {
        let next = (0..j).map(|s| v[j - 1 - s] * v[s]).sum();
        v.push(next);
        assert_eq!(Some(next), catalan(j));
        assert_eq!(alpha(j) * 4f64.powi(j as i32), next as f64);
    }
    for m in 1..=30usize {
        let bound = 1.0 / ((m + 1) as f64 * (std::f64::consts::PI * m as f64).sqrt());
        assert!(alpha(m + 1) <= bound);
    }
}

#[test]
fn strong_potential_on_one_interval_flags_stagnation() {
    let s = setup("12*x", &[], 1, 200, 1);
    let sol = fd(&s, 0, 12);
    assert!(sol.stagnation);
    let tol = run_fd(
        &s.basic[0],
        &s.qdiff,
        &s.grid,
        FdOptions {
            rank: 50,
            tol: Some(1e-3),
        },
    );
    assert!(tol.is_ok());
}

#[test]
fn tolerance_stops_early() {
    let s = setup("x", &[], 3, 200, 1);
    let sol = run_fd(
        &s.basic[0],
        &s.qdiff,
        &s.grid,
        FdOptions {
            rank: 40,
            tol: Some(1e-10),
        },
    )
    .unwrap();
    assert!(sol.rank < 40);
    let last = sol.diagnostics.last().unwrap();
    assert!(last.lambda_correction.abs().max(last.correction_norm) < 1e-10);
}

#[test]
fn singular_potentials_reach_small_residuals() {
    let bps = [-1.0 / 3.0, 1.0 / 3.0];
    let s = setup("1/sqrt(abs(x+1/3)) + ln(abs(x-1/3))", &bps, 12, 350, 6);
    let sol = fd(&s, 4, 9);
    assert!((sol.eigenvalue_sum - 20.843_197_212_183_734).abs() < 1e-6);
    let eta = residual_eta(&sol, &s.basic[4], &s.q_nodes, &s.grid).unwrap();
    assert!(eta <= 1e-9, "{eta:e}");
}

#[test]
fn truncation_matches_a_shorter_run() {
    let s = setup("x", &[], 3, 120, 1);
    let long = fd(&s, 0, 8);
    let short = fd(&s, 0, 5);
    let cut = long.truncated(5);
    assert_eq!(cut.rank, 5);
    assert_eq!(cut.lambda_corrections, short.lambda_corrections);
    assert_eq!(cut.eigenvalue_sum, short.eigenvalue_sum);
    assert_eq!(cut.eigenfunction_samples, short.eigenfunction_samples);
    let a = residual_eta(&cut, &s.basic[0], &s.q_nodes, &s.grid).unwrap();
    let b = residual_eta(&short, &s.basic[0], &s.q_nodes, &s.grid).unwrap();
    assert_eq!(a, b);
    assert_eq!(long.truncated(99).rank, 8);
}
