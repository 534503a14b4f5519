use proptest::prelude::*;
use selfdual::numcore::*;

fn sin_cos(p: &[f64; 2]) -> f64 {
    p[0].sin() * p[1].cos()
}

fn exact_d12(u: f64, v: f64) -> f64 {
    -u.cos() * v.sin()
}

fn exact_d11(u: f64, v: f64) -> f64 {
    -u.sin() * v.cos()
}

#[test]
fn default_step_beats_the_tiny_step_on_second_partials() {
    let (u, v) = (0.7, 0.3);
    let err = |h: f64| {
        let d = richardson(&sin_cos, &[u, v], Partial::D11, h, 2).unwrap();
        (d.value - exact_d11(u, v)).abs()
    };
    let coarse = err(NumericDiff::default().rel_step);
    let tiny = err(1e-4);
    println!("second partial error: h=1e-2 {coarse:.2e}, h=1e-4 {tiny:.2e}");
    assert!(coarse < 1e-10);
    assert!(coarse < tiny);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn richardson_error_bound_shrinks_with_levels(u in -2.0f64..2.0, v in -2.0f64..2.0) {
        let mut bounds = Vec::new();
        for levels in 1..=3 {
            bounds.push(richardson(&sin_cos, &[u, v], Partial::D1, 0.2, levels).unwrap().error_bound);
        }
        for w in bounds.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9), "{bounds:?}");
        }
    }

    #[test]
    fn mixed_partials_agree_within_bounds(u in -2.0f64..2.0, v in -2.0f64..2.0) {
        let d12 = richardson(&sin_cos, &[u, v], Partial::D12, 0.05, 2).unwrap();
        let d21 = richardson(&sin_cos, &[u, v], Partial::D21, 0.05, 2).unwrap();
        prop_assert!((d12.value - d21.value).abs() <= d12.error_bound + d21.error_bound);
        prop_assert!((d12.value - exact_d12(u, v)).abs() <= 1e-8);
    }

    #[test]
    fn central_stencil_is_exact_on_quadratics(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, u in -5.0f64..5.0, v in -5.0f64..5.0) {
        let f = move |p: &[f64; 2]| a * p[0] * p[0] + b * p[0] * p[1] + c * p[1];
        let d1 = central_diff(&f, &[u, v], Partial::D1, 0.1).unwrap().value;
        let d12 = central_diff(&f, &[u, v], Partial::D12, 0.1).unwrap().value;
        let d11 = central_diff(&f, &[u, v], Partial::D11, 0.1).unwrap().value;
        let scale = 1.0 + u.abs() + v.abs();
        prop_assert!((d1 - (2.0 * a * u + b * v)).abs() <= 1e-11 * scale * 10.0);
        prop_assert!((d12 - b).abs() <= 1e-9 * scale);
        prop_assert!((d11 - 2.0 * a).abs() <= 1e-9 * scale * scale);
    }

    #[test]
    fn trapezoid_is_exact_on_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, n in 2usize..50) {
        let g = Grid1::new(0.0, 2.0, n).unwrap();
        let samples: Vec<(f64, f64)> = g.points().into_iter().map(|x| (x, a + b * x)).collect();
        let cum = trapezoid_integrate(&samples).unwrap();
        let exact = 2.0 * a + 2.0 * b;
        prop_assert!((cum.last().unwrap().1 - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }
}

#[test]
fn rk4_halving_ratio_is_near_sixteen() {
    let rhs = |_t: f64, s: &[f64]| vec![s[0]];
    let err = |steps| {
        let tr = rk4(rhs, 0.0, &[1.0], 1.0, steps).unwrap();
        (tr.last().unwrap().1[0] - 1f64.exp()).abs()
    };
    let ratio = err(20) / err(40);
    assert!((14.0..=18.0).contains(&ratio), "{ratio}");
}
