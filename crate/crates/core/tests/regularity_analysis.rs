use eikonal_core::eikonal::{EikonalSolution, Roof};
use eikonal_core::regularity::*;
use eikonal_core::{Error, GridSpec, ScalarField2D};
use std::f64::consts::PI;

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[test]
fn planar_lipschitz_map_vanishes() {
    for n in [32, 128] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (_, v) = EikonalSolution::planar([0.28, 0.96]).unwrap().sample(&g);
        let l = lipschitz_map(&v, 3.0 / n as f64).unwrap();
        assert!(l.iter_valid().all(|(_, _, x)| x.abs() < 1e-12));
        let r = detect_singularities(&v, DEFAULT_THRESHOLD_FACTOR).unwrap();
        assert!(r.clusters.is_empty() && r.candidates.is_empty() && !r.line_like);
    }
    let g = GridSpec::unit_centered(32).unwrap();
    let (_, v) = EikonalSolution::planar([1.0, 0.0]).unwrap().sample(&g);
    assert!(matches!(lipschitz_map(&v, 1.5 / 32.0), Err(Error::Resolution(_))));
}

#[test]
fn vortex_lipschitz_map_is_the_inverse_distance() {
    let n = 128;
    let g = GridSpec::unit_centered(n).unwrap();
    let zeta = [0.05, -0.03];
    let (_, v) = EikonalSolution::vortex(zeta, 1.0).unwrap().sample(&g);
    let l = lipschitz_map(&v, 2.0 / n as f64).unwrap();
    let mut worst = 0.0f64;
    for (i, j, lx) in l.iter_valid() {
        let x = g.center(i, j);
        let r = dist(x, zeta);
        if r >= 0.15 && g.dist_to_boundary(x) >= 2.0 / n as f64 {
            worst = worst.max((lx * r - 1.0).abs());
        }
    }
    assert!(worst <= 0.2, "{worst}");
}

#[test]
fn roof_lipschitz_map_sees_the_jump() {
    let n = 64;
    let g = GridSpec::unit_centered(n).unwrap();
    let (_, v) = EikonalSolution::roof(Roof::standard()).sample(&g);
    let l = lipschitz_map(&v, 2.0 / n as f64).unwrap();
    let h = 1.0 / n as f64;
    for i in 0..n {
        for j in [n / 2 - 1, n / 2] {
            assert!((l.get(i, j).unwrap() * h / 2.0 - 1.0).abs() < 1e-12);
        }
        assert_eq!(l.get(i, n / 2 - 3).unwrap(), 0.0);
    }
}

#[test]
fn roof_is_line_like() {
    for n in [128, 256] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (_, v) = EikonalSolution::roof(Roof::standard()).sample(&g);
        let r = detect_singularities(&v, DEFAULT_THRESHOLD_FACTOR).unwrap();
        assert!(r.line_like);
        assert!(r.candidates.is_empty());
    }
}

#[test]
fn off_centre_vortex_gives_one_candidate() {
    let zeta = [0.3, -0.1];
    for n in [128, 256, 512] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (_, v) = EikonalSolution::vortex(zeta, 1.0).unwrap().sample(&g);
        let r = detect_singularities(&v, DEFAULT_THRESHOLD_FACTOR).unwrap();
        assert!(!r.line_like);
        assert_eq!(r.candidates.len(), 1, "n={n}");
        assert!(dist(r.candidates[0], zeta) <= 2.0 / n as f64, "n={n}: {:?}", r.candidates);
    }
}

#[test]
fn separated_vortices_are_counted() {
    let pts = vec![[-0.2, -0.1], [0.15, -0.15], [0.0, 0.2]];
    for n in [256, 512] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (_, v) = EikonalSolution::multi_point(pts.clone()).unwrap().sample(&g);
        let r = detect_singularities(&v, DEFAULT_THRESHOLD_FACTOR).unwrap();
        assert!(r.line_like, "ridges between the cones are jump lines of the gradient");
        assert_eq!(r.candidates.len(), pts.len(), "n={n}: {:?}", r.candidates);
        for p in &pts {
            assert!(r.candidates.iter().any(|c| dist(*c, *p) <= 2.0 / n as f64));
        }
    }
}

#[test]
fn exact_vortices_fit_exactly() {
    let g = GridSpec::unit_centered(128).unwrap();
    let zeta = [0.1, 0.05];
    let (u, _) = EikonalSolution::vortex(zeta, 1.0).unwrap().sample(&g);
    let p = vortex_fit(&u, zeta, 0.2).unwrap();
    assert_eq!(p.alpha, 1.0);
    assert!(p.accepted && p.fit_residual <= 1e-12 && p.gradient_residual <= 1e-12);
    let neg = vortex_fit(&u.map(|x| -x), zeta, 0.2).unwrap();
    assert_eq!(neg.alpha, -1.0);
    assert!(neg.fit_residual <= 1e-12);
    for c in [-5.0, 0.25, 17.0] {
        let p = vortex_fit(&u.map(|x| x + c), zeta, 0.2).unwrap();
        assert_eq!(p.alpha, 1.0);
        assert!((p.offset - c).abs() <= 1e-12);
    }
}

#[test]
fn perturbation_sweep() {
    let n = 256;
    let h = 1.0 / n as f64;
    let radius = 0.2;
    let zeta = [0.02, -0.04];
    let g = GridSpec::unit_centered(n).unwrap();
    let perturbed = |amp: f64| {
        ScalarField2D::from_fn(g, |x| dist(x, zeta) + amp * (PI * (x[0] - zeta[0]) / (2.0 * radius)).sin())
    };
    let p = vortex_fit(&perturbed(0.5 * h), zeta, radius).unwrap();
    assert!(p.accepted && p.alpha == 1.0);
    assert!(p.fit_residual <= 5.0 * h && p.gradient_residual <= 5.0 * h);
    assert!(matches!(vortex_fit(&perturbed(10.0 * h), zeta, radius), Err(Error::Structure(_))));
}

#[test]
fn planar_field_is_not_a_vortex() {
    let g = GridSpec::unit_centered(128).unwrap();
    let (u, _) = EikonalSolution::planar([0.6, 0.8]).unwrap().sample(&g);
    assert!(matches!(vortex_fit(&u, [0.0, 0.0], 0.2), Err(Error::Structure(_))));
    assert!(matches!(vortex_fit(&u, [0.45, 0.0], 0.2), Err(Error::Domain(_))));
}
