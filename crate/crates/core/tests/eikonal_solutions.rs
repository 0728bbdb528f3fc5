mod common;

use common::bump_line_integral;
use eikonal_core::eikonal::{chi, eikonal_residual, jop_characteristic_residual, EikonalSolution, Roof};
use eikonal_core::quadrature::bump_test_function;
use eikonal_core::{Error, GridSpec, VectorField2D};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

fn generators() -> Vec<EikonalSolution> {
    vec![
        EikonalSolution::vortex([0.1, -0.2], 1.0).unwrap(),
        EikonalSolution::vortex([0.0, 0.0], -1.0).unwrap(),
        EikonalSolution::planar([0.6, -0.8]).unwrap(),
        EikonalSolution::roof(Roof::standard()),
        EikonalSolution::ball_distance([0.0, 0.0], 0.3).unwrap(),
        EikonalSolution::multi_point(vec![[-0.2, 0.0], [0.2, 0.1]]).unwrap(),
    ]
}

#[test]
fn closed_form_samples() {
    let v = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap();
    assert_eq!((v.u([1.0, 0.0]), v.grad([1.0, 0.0])), (1.0, Some([1.0, 0.0])));
    let p = EikonalSolution::planar([0.0, 1.0]).unwrap();
    assert_eq!((p.u([0.4, -0.3]), p.grad([0.4, -0.3])), (-0.3, Some([0.0, 1.0])));
    let r = EikonalSolution::roof(Roof::standard());
    assert_eq!(r.u([0.2, -0.3]), 0.3);
    assert_eq!(r.grad([0.2, -0.3]), Some([0.0, -1.0]));
}

#[test]
fn every_generator_has_zero_residual() {
    for n in [16, 33, 64] {
        let g = GridSpec::unit_centered(n).unwrap();
        for s in generators() {
            let (_, gu) = s.sample(&g);
            assert!(eikonal_residual(&gu) < 1e-15);
        }
    }
    let g = GridSpec::unit_centered(16).unwrap();
    assert_eq!(eikonal_residual(&VectorField2D::constant(g, [2.0, 0.0])), 1.0);
}

#[test]
fn singular_cells_are_masked() {
    let g = GridSpec::unit_centered(33).unwrap();
    let (_, gv) = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap().sample(&g);
    assert_eq!(g.len() - gv.valid_count(), 9);
    assert!(!gv.is_valid(16, 16));
    let (_, gr) = EikonalSolution::roof(Roof::standard()).sample(&g);
    assert!((0..33).all(|i| !gr.is_valid(i, 16) && gr.is_valid(i, 15) && gr.is_valid(i, 17)));
}

#[test]
fn vortex_gradient_loops_vanish() {
    // trapezoid circulation of ∇u around a square not enclosing the centre
    let errs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = GridSpec::unit_centered(n).unwrap();
            let (_, gu) = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap().sample(&g);
            let (i0, j0) = g.nearest([0.1, 0.1]);
            let (i1, j1) = g.nearest([0.35, 0.3]);
            let h = g.h();
            let mut c = 0.0;
            for i in i0..i1 {
                c += 0.5 * h[0] * (gu.raw(i, j0)[0] + gu.raw(i + 1, j0)[0]);
                c -= 0.5 * h[0] * (gu.raw(i, j1)[0] + gu.raw(i + 1, j1)[0]);
            }
            for j in j0..j1 {
                c += 0.5 * h[1] * (gu.raw(i1, j)[1] + gu.raw(i1, j + 1)[1]);
                c -= 0.5 * h[1] * (gu.raw(i0, j)[1] + gu.raw(i0, j + 1)[1]);
            }
            c.abs()
        })
        .collect();
    for r in common::ratios(&errs) {
        assert!(r > 3.5, "{errs:?}");
    }
}

#[test]
fn chi_examples() {
    let g = GridSpec::unit_centered(16).unwrap();
    let m = VectorField2D::constant(g, [1.0, 0.0]);
    assert!(chi(&m, [1.0, 0.0]).unwrap().values().iter().all(|&v| v == 1.0));
    assert!(chi(&m, [0.0, 1.0]).unwrap().values().iter().all(|&v| v == 0.0));
    assert!(matches!(chi(&m, [1.0, 1.0]), Err(Error::Argument(_))));

    let (_, gv) = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap().sample(&g);
    let w = gv.perp();
    let c = chi(&w, [1.0, 0.0]).unwrap();
    for (i, j, v) in c.iter_valid() {
        let x = g.center(i, j);
        assert_eq!(v, if x[1] < 0.0 { 1.0 } else { 0.0 });
    }
    let scaled = w.map(|v| [3.5 * v[0], 3.5 * v[1]]);
    let (a, b) = (chi(&scaled, [0.6, 0.8]).unwrap(), chi(&w, [0.6, 0.8]).unwrap());
    assert_eq!(a.mask(), b.mask());
    assert!(a.iter_valid().all(|(i, j, v)| b.get(i, j) == Some(v)));
}

#[test]
fn planar_characteristic_residual_vanishes() {
    let g = GridSpec::unit_centered(64).unwrap();
    let (_, gp) = EikonalSolution::planar([0.6, 0.8]).unwrap().sample(&g);
    let z = bump_test_function(&g, [0.05, 0.0], 0.3).unwrap();
    for k in 0..8 {
        let t = 0.2 + TAU * k as f64 / 8.0;
        assert!(jop_characteristic_residual(&gp, [t.cos(), t.sin()], &z).unwrap().abs() < 1e-12);
    }
}

#[test]
fn vortex_characteristic_residual_is_first_order() {
    let sup = eikonal_core::quadrature::Bump::new([0.0, 0.0], 0.3).unwrap().sup_gradient();
    let mut prev = f64::INFINITY;
    for n in [64, 128, 256, 512] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (_, gv) = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap().sample(&g);
        let w = gv.perp();
        let z = bump_test_function(&g, [0.0, 0.0], 0.3).unwrap();
        let worst = (0..8)
            .map(|k| {
                let t = 0.3 + TAU * k as f64 / 8.0;
                jop_characteristic_residual(&w, [t.cos(), t.sin()], &z).unwrap().abs()
            })
            .fold(0.0, f64::max);
        // the discontinuity line cuts cells of width h along a chord of length 0.6
        assert!(worst <= 4.0 * 0.3 * sup * g.h_max(), "n={n}: {worst}");
        assert!(worst < prev);
        prev = worst;
    }
}

#[test]
fn roof_characteristic_residual_matches_line_oracle() {
    let g = GridSpec::unit_centered(256).unwrap();
    let (_, gr) = EikonalSolution::roof(Roof::standard()).sample(&g);
    let z = bump_test_function(&g, [0.0, 0.0], 0.3).unwrap();
    let line = bump_line_integral(0.3, 0.0);
    for xi in [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [0.6, -0.8], [-0.28, 0.96]] {
        let r = jop_characteristic_residual(&gr, xi, &z).unwrap();
        let plus = if xi[1] > 0.0 { 1.0 } else { 0.0 };
        let minus = if -xi[1] > 0.0 { 1.0 } else { 0.0 };
        let oracle = -(plus - minus) * xi[1] * line;
        assert!((r - oracle).abs() <= 0.05 * oracle.abs(), "{r} vs {oracle}");
    }
}

#[test]
fn test_function_support_is_checked() {
    let g = GridSpec::unit_centered(32).unwrap();
    let (_, gp) = EikonalSolution::planar([1.0, 0.0]).unwrap().sample(&g);
    let z = eikonal_core::ScalarField2D::constant(g, 1.0);
    assert!(matches!(jop_characteristic_residual(&gp, [1.0, 0.0], &z), Err(Error::Domain(_))));
}
