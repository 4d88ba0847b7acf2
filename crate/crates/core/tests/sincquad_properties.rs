use proptest::prelude::*;
use slfd_core::coeffmesh::build_mesh;
use slfd_core::sincquad::{build_grid, build_grid_with_step};

fn arcsine_error(k: usize) -> f64 {
    arcsine_error_with(k, None)
}

fn arcsine_error_with(k: usize, h: Option<f64>) -> f64 {
    let g = build_grid_with_step(&build_mesh(1, &[]).unwrap(), k, h).unwrap();
    let f: Vec<f64> = g
        .abscissae()
        .iter()
        .map(|a| 1.0 / (a.one_minus * a.one_plus).sqrt())
        .collect();
    (g.integrate(&f).unwrap() - std::f64::consts::PI).abs()
}

// With the substitution the integrand becomes 1 / (2 cosh(t / 2)), so the
// error at the default step is the truncated tail 4 exp(-Kh / 2).
#[test]
fn endpoint_singularity_error_is_the_truncated_tail() {
    let k = 350;
    let h = (2.0 * std::f64::consts::PI / k as f64).sqrt();
    let tail = 4.0 * (-(k as f64 + 0.5) * h / 2.0).exp();
    let e = arcsine_error(k);
    assert!(e < 3e-10, "{e:e}");
    assert!((e / tail - 1.0).abs() < 0.01, "{e:e} {tail:e}");
    let e = arcsine_error_with(k, Some(0.16));
    assert!(e < 1e-10, "{e:e}");
}

#[test]
fn error_decays_exponentially_in_sqrt_k() {
    let (e50, e200) = (arcsine_error(50), arcsine_error(200));
    assert!(e200 < e50 / 1e3, "{e50:e} {e200:e}");
}

#[test]
fn weights_sum_to_length() {
    let g = build_grid(&build_mesh(1, &[]).unwrap(), 350).unwrap();
    let s: f64 = g.weights().iter().sum::<f64>() * g.h();
    assert!((s - 2.0).abs() < 1e-12);
}

#[test]
fn step_override_is_used() {
    let g = build_grid_with_step(&build_mesh(1, &[]).unwrap(), 64, Some(0.1)).unwrap();
    assert_eq!(g.h(), 0.1);
    assert!(build_grid_with_step(&build_mesh(1, &[]).unwrap(), 64, Some(-1.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn weights_positive_and_sum_to_interval_length(n in 1usize..6, k in 100usize..260, bp in -0.9f64..0.9) {
        let mesh = build_mesh(n, &[bp]).unwrap();
        let g = build_grid(&mesh, k).unwrap();
        for i in 0..mesh.intervals() {
            let (a, b) = mesh.interval(i);
            let w = &g.weights()[g.range(i)];
            prop_assert!(w.iter().all(|&m| m > 0.0));
            let s: f64 = w.iter().sum::<f64>() * g.h();
            prop_assert!((s - (b - a)).abs() < 1e-10);
        }
    }
}
