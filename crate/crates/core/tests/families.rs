use proptest::prelude::*;
use selfdual::alphachain::{alpha_residual, AlphaField};
use selfdual::families::*;
use selfdual::numcore::{Grid1, Grid2};

fn xi_grid() -> Vec<f64> {
    Grid1::new(0.5, 5.0, 200).unwrap().points()
}

fn grid_2d(x: (f64, f64), t: (f64, f64)) -> Grid2 {
    Grid2::new(Grid1::new(x.0, x.1, 20).unwrap(), Grid1::new(t.0, t.1, 10).unwrap())
}

fn max_alpha_residual(alpha: &AlphaField, grid: &Grid2) -> f64 {
    grid.points()
        .map(|[y, t]| alpha_residual(alpha, y, t).unwrap().abs())
        .fold(0.0, f64::max)
}

#[test]
fn similarity_families_solve_the_profile_equation() {
    for family in PsFamily::ALL {
        for c in [-3.0, 0.0, 1.0, 7.0, 999.0] {
            let nu = ps_profile(family, c);
            let worst = xi_grid().into_iter().map(|xi| nu_residual(&nu, xi).unwrap().abs()).fold(0.0, f64::max);
            let scale = if c.abs() > 100.0 { c * c } else { 1.0 };
            assert!(worst <= 1e-9 * scale, "{} c={c}: {worst}", family.id());
        }
    }
}

#[test]
fn general_similarity_solution_and_its_unit_scale_collapse() {
    for c in [-1.0, 0.0, 2.0] {
        for lambda in [0.5, 1.0, 2.0, 3.0] {
            let nu = automodel_general_profile(c, lambda).unwrap();
            for xi in xi_grid() {
                assert!(nu_residual(&nu, xi).unwrap().abs() <= 1e-9, "c={c} λ={lambda} ξ={xi}");
                if lambda == 1.0 {
                    let v = eval_automodel_general(c, 1.0, xi).unwrap();
                    assert!((v - (4.0 * xi + c * xi.sqrt())).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn traveling_waves_solve_both_forms() {
    for (v, c1, c2) in [(1.0, 0.0, 1.0), (2.0, 1.0, 4.0), (0.5, -1.0, 0.25)] {
        for branch in [Branch::Plus, Branch::Minus] {
            let p = TravelingWaveParams { v, c1, c2, branch };
            let lo = -p.c1_tilde() / 8.0 + 0.1;
            let alpha = traveling_wave_field(p);
            let worst = max_alpha_residual(&alpha, &grid_2d((lo, lo + 3.0), (0.0, 1.0)));
            assert!(worst <= 1e-9, "{p:?}: {worst}");
            let profile = traveling_wave_profile(p);
            for s in Grid1::new(lo, lo + 4.0, 200).unwrap().points() {
                assert!(rv_first_integral_residual(&profile, v, c1, s).unwrap().abs() <= 1e-10);
                assert!(rv_residual(&profile, v, s).unwrap().abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn exact_alpha_families_on_the_unit_window() {
    let grid = grid_2d((0.0, 1.0), (1.0, 2.0));
    for a in [2.0, 4.0] {
        let b = if a == 2.0 { 0.0 } else { -2.0 };
        let field = linear_field(LinearFamilyParams::new(a, b, 0.7).unwrap());
        assert!(max_alpha_residual(&field, &grid) <= 1e-10);
    }
    for (c1, c2) in [(0.0, 0.0), (1.0, -2.0), (-3.0, 0.5)] {
        assert!(max_alpha_residual(&automodel_alpha_field(c1, c2), &grid) <= 1e-10);
    }
}

#[test]
fn f34_is_the_lifted_general_profile() {
    for c in [-1.0, 0.0, 2.0] {
        for lambda in [0.5, 2.0, 3.0] {
            let nu = automodel_general_profile(c, lambda).unwrap();
            for [x, t] in grid_2d((0.6, 3.0), (1.0, 1.2)).points() {
                let a = eval_f34(c, lambda, x, t, VariantMode::Corrected).unwrap();
                let b = alpha_from_nu(&nu, x, t).unwrap();
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "c={c} λ={lambda}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn parabolic_profile_matches_the_automodel_alpha() {
    for c in [-2.0, 0.5, 3.0] {
        let lifted = alpha_field_from_nu(&ps_profile(PsFamily::Parabolic, c));
        let closed = automodel_alpha_field(c, 0.0);
        for [y, t] in grid_2d((0.0, 2.0), (0.5, 2.0)).points() {
            let (a, b) = (lifted.value(y, t), closed.value(y, t));
            assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn scaling_preserves_solutions() {
    let wave = TravelingWaveParams { v: 1.0, c1: 0.0, c2: 1.0, branch: Branch::Plus };
    let cases: Vec<(AlphaField, Grid2)> = vec![
        (automodel_alpha_field(1.5, -0.5), grid_2d((0.0, 1.0), (1.0, 2.0))),
        (traveling_wave_field(wave), grid_2d((0.5, 1.0), (0.0, 0.5))),
        (f34_field(2.0, 2.0, VariantMode::Corrected).unwrap(), grid_2d((0.5, 1.0), (1.0, 1.5))),
    ];
    for (field, grid) in &cases {
        for lambda in [0.5, 2.0, 3.0] {
            let scaled = bbb1_scale(field, lambda).unwrap();
            assert!(max_alpha_residual(&scaled, grid) <= 1e-9, "λ={lambda}");
        }
    }
}

#[test]
fn printed_f34_fails_and_corrected_passes() {
    let grid = grid_2d((0.5, 2.0), (1.0, 1.5));
    let printed = f34_field(0.0, 2.0, VariantMode::Paper).unwrap();
    let corrected = f34_field(0.0, 2.0, VariantMode::Corrected).unwrap();
    assert!(max_alpha_residual(&printed, &grid) > 1.0);
    assert!(max_alpha_residual(&corrected, &grid) <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn general_solution_solves_the_profile_equation(c in -3.0f64..3.0, lambda in 0.5f64..4.0, xi in 0.5f64..5.0) {
        let nu = automodel_general_profile(c, lambda).unwrap();
        prop_assert!(nu_residual(&nu, xi).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn symmetry_keeps_solutions_solutions(c in -3.0f64..3.0, lambda in 0.5f64..3.0, xi in 0.6f64..4.0) {
        let nu = ps_profile(PsFamily::Sqrt, c);
        let mapped = ff_transform(&nu, lambda).unwrap();
        prop_assert!(nu_residual(&mapped, xi).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn shift_is_invertible(c in -3.0f64..3.0, q in -1.0f64..1.0, xi in 0.5f64..4.0) {
        let nu = ps_profile(PsFamily::Parabolic, c);
        let back = q_shift_inverse(&q_shift_transform(&nu, q).unwrap(), q).unwrap();
        prop_assert!((back.value([xi]) - nu.value([xi])).abs() <= 1e-12 * (1.0 + xi * xi));
    }

    #[test]
    fn scaled_linear_family_stays_a_solution(b in -3.0f64..3.0, c in -3.0f64..3.0, lambda in 0.3f64..3.0, y in 0.0f64..1.0, t in 0.0f64..1.0) {
        for a in [2.0, 4.0] {
            let field = linear_field(LinearFamilyParams::new(a, b, c).unwrap());
            let scaled = bbb1_scale(&field, lambda).unwrap();
            prop_assert!(alpha_residual(&scaled, y, t).unwrap().abs() <= 1e-12);
        }
    }
}
