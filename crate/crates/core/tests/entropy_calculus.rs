mod common;

use common::{bump_line_integral, ratios};
use eikonal_core::eikonal::{EikonalSolution, Roof};
use eikonal_core::entropy::*;
use eikonal_core::mollify::{mollify, Mollifier};
use eikonal_core::quadrature::bump_test_function;
use eikonal_core::{Error, GridSpec, ScalarField2D, VectorField2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2 as S, PI, TAU};

fn close2(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
    (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
}

fn circle(n: usize) -> impl Iterator<Item = [f64; 2]> {
    (0..n).map(move |k| {
        let t = TAU * (k as f64 + 0.37) / n as f64;
        [t.cos(), t.sin()]
    })
}

#[test]
fn special_entropy_unit_values() {
    let g = GridSpec::unit_centered(8).unwrap();
    let at = |v: [f64; 2]| {
        let f = VectorField2D::constant(g, v);
        (sigma_e1e2(&f).raw(0, 0), sigma_eps1eps2(&f).raw(0, 0))
    };
    let (a, b) = at([1.0, 0.0]);
    assert!(close2(a, [2.0 / 3.0, 0.0], 1e-15) && close2(b, [0.0, 1.0 / 3.0], 1e-15));
    let (a, b) = at([0.0, 1.0]);
    assert!(close2(a, [0.0, -2.0 / 3.0], 1e-15) && close2(b, [1.0 / 3.0, 0.0], 1e-15));
    let (a, b) = at([0.0, -1.0]);
    assert!(close2(a, [0.0, 2.0 / 3.0], 1e-15) && close2(b, [-1.0 / 3.0, 0.0], 1e-15));
}

#[test]
fn roof_normal_jumps() {
    let g = GridSpec::unit_centered(8).unwrap();
    let up = VectorField2D::constant(g, [0.0, 1.0]);
    let down = VectorField2D::constant(g, [0.0, -1.0]);
    let je = sigma_e1e2(&up).raw(0, 0)[1] - sigma_e1e2(&down).raw(0, 0)[1];
    let jp = sigma_eps1eps2(&up).raw(0, 0)[1] - sigma_eps1eps2(&down).raw(0, 0)[1];
    assert!((je + 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(jp, 0.0);
}

#[test]
fn composed_fields_equal_tilde_forms() {
    let g = GridSpec::unit_centered(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gu = VectorField2D::from_fn(g, |_| {
        let t: f64 = rng.gen_range(0.0..TAU);
        [t.cos(), t.sin()]
    });
    let w = gu.perp();
    let a = sigma_e1e2(&gu);
    let b = apply_entropy(&SigmaE1E2, &w);
    let c = sigma_eps1eps2(&gu);
    let d = apply_entropy(&SigmaEps1Eps2, &w);
    for k in 0..g.len() {
        assert!(close2(a.values()[k], b.values()[k], 1e-15));
        assert!(close2(c.values()[k], d.values()[k], 1e-15));
    }
}

#[test]
fn circle_conditions() {
    assert!(circle_condition_residual(&SigmaE1E2, 256, false) <= 1e-10);
    assert!(circle_condition_residual(&SigmaEps1Eps2, 256, false) <= 1e-10);
    assert!(circle_condition_residual(&SigmaE1E2, 256, true) <= 1e-5);
    let polys = [
        Poly2::harmonic_re(2),
        Poly2::harmonic_im(3),
        Poly2::monomial(4, 0, 1.0),
        Poly2::new(vec![(1, 0, 0.3), (2, 2, -1.5), (0, 3, 0.7)]),
    ];
    for p in polys {
        let e = make_entropy(p).unwrap();
        assert!(circle(256).all(|z| entropy_condition_residual(&e, z).abs() <= 1e-8));
        assert!(circle(256).all(|z| entropy_condition_residual_fd(&e, z).abs() <= 1e-5));
    }
    let numeric = make_entropy(NumericPhi::new(|z: [f64; 2]| (z[0] * z[1]).sin() + z[0] * z[0] * z[1])).unwrap();
    assert!(circle(256).all(|z| entropy_condition_residual_fd(&numeric, z).abs() <= 1e-5));
}

#[test]
fn make_entropy_examples() {
    let e = make_entropy(Poly2::harmonic_re(2)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let z: [f64; 2] = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let expect = [z[0].powi(3) + 3.0 * z[0] * z[1] * z[1], -3.0 * z[0] * z[0] * z[1] - z[1].powi(3)];
        assert!(close2(e.value(z), expect, 1e-12));
    }
    let zero = make_entropy(Poly2::zero()).unwrap();
    assert_eq!(zero.value([0.3, 0.4]), [0.0, 0.0]);
    let lin = make_entropy(Poly2::monomial(1, 0, 1.0)).unwrap();
    assert!(close2(lin.value([0.0, 1.0]), [1.0, 0.0], 1e-15));
    assert!(matches!(make_entropy(Poly2::monomial(0, 0, 1.0)), Err(Error::Argument(_))));
}

#[test]
fn psi_examples_and_isotropy() {
    let psi = make_psi(make_entropy(Poly2::harmonic_re(2)).unwrap(), PsiMode::OffAxisOnly);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let z = [rng.gen_range(0.05..1.5), rng.gen_range(-1.5..-0.05)];
        assert!(close2(psi.eval(z).unwrap(), [-3.0 * z[0], 3.0 * z[1]], 1e-12));
    }
    assert!(matches!(psi.eval([0.0, 0.5]), Err(Error::Singularity(_))));
    let zero = make_psi(make_entropy(Poly2::zero()).unwrap(), PsiMode::WithCompletion);
    assert_eq!(zero.eval([0.4, 0.0]).unwrap(), [0.0, 0.0]);

    let generators = [Poly2::harmonic_im(4), Poly2::monomial(4, 0, 1.0), Poly2::new(vec![(2, 1, 1.0), (0, 4, -0.5)])];
    for p in generators {
        let e = make_entropy(p.clone()).unwrap();
        let psi = make_psi(e.clone(), PsiMode::WithCompletion);
        for z in circle(100).chain([[1.0, 0.0], [0.0, -1.0], [0.7, 0.0]]) {
            let v = psi.eval(z).unwrap();
            assert!(isotropy_residual(&e, v, z) <= 1e-6, "{z:?}");
            assert!(close2(v, psi_from_phi(&p, z), 1e-9));
        }
    }
}

#[test]
fn psi_antisymmetry_examples() {
    let (l, r) = psi_antisymmetry(&Poly2::harmonic_re(2), [0.3, -0.4]).unwrap();
    assert!(l.abs() < 1e-6 && r == 0.0);
    let (l, r) = psi_antisymmetry(&Poly2::monomial(4, 0, 1.0), [1.0, 1.0]).unwrap();
    assert!((r + 12.0).abs() < 1e-12 && (l - r).abs() <= 1e-5);
    let radial = Poly2::new(vec![(4, 0, 1.0), (2, 2, 2.0), (0, 4, 1.0)]);
    for z in circle(16) {
        if z[0].abs() > 1e-3 && z[1].abs() > 1e-3 {
            let (l, r) = psi_antisymmetry(&radial, z).unwrap();
            assert!(r.abs() < 1e-12 && l.abs() <= 1e-5);
        }
    }
    assert!(matches!(psi_antisymmetry(&radial, [0.0, 1.0]), Err(Error::Singularity(_))));
}

#[test]
fn psi_antisymmetry_at_random_points() {
    let phi = Poly2::new(vec![(3, 1, 0.4), (1, 2, -1.0), (0, 4, 0.25), (2, 0, 1.0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 100 {
        let z: [f64; 2] = [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)];
        if z[0].abs() < 0.05 || z[1].abs() < 0.05 {
            continue;
        }
        let (l, r) = psi_antisymmetry(&phi, z).unwrap();
        assert!((l - r).abs() <= 1e-5, "{z:?}: {l} vs {r}");
        checked += 1;
    }
}

#[test]
fn planar_production_vanishes() {
    let g = GridSpec::unit_centered(64).unwrap();
    let (_, gp) = EikonalSolution::planar([0.28, 0.96]).unwrap().sample(&g);
    let z = bump_test_function(&g, [0.05, 0.1], 0.25).unwrap();
    for eps in [0.0, 0.1] {
        assert!(entropy_production(&SigmaE1E2, &gp.perp(), &z, eps).unwrap().value.abs() <= 1e-10);
        assert!(entropy_production(&SigmaEps1Eps2, &gp.perp(), &z, eps).unwrap().value.abs() <= 1e-10);
    }
}

#[test]
fn roof_production_matches_jump_oracle() {
    let g = GridSpec::unit_centered(512).unwrap();
    let (_, gr) = EikonalSolution::roof(Roof::standard()).sample(&g);
    let z = bump_test_function(&g, [0.03, 0.0], 0.3).unwrap();
    let oracle = -4.0 / 3.0 * bump_line_integral(0.3, 0.0);
    let p = entropy_production(&SigmaE1E2, &gr.perp(), &z, 0.0).unwrap();
    assert!((p.value - oracle).abs() <= 0.02 * oracle.abs(), "{} vs {oracle}", p.value);
    let q = entropy_production(&SigmaEps1Eps2, &gr.perp(), &z, 0.0).unwrap();
    assert!(q.value.abs() <= 0.01 * oracle.abs());
    // the density concentrates on the two rows next to the jump
    let (_, j) = g.nearest([0.0, 0.3]);
    assert!((0..512).all(|i| p.density.get(i, j).is_none_or(|d| d.abs() < 1e-12)));
}

#[test]
fn vortex_production_decreases_along_the_ladder() {
    let phi_h = make_entropy(Poly2::harmonic_re(3)).unwrap();
    let mut prev = [f64::INFINITY; 3];
    for (n, eps) in [(64, 1.0 / 8.0), (128, 1.0 / 16.0), (256, 1.0 / 32.0), (512, 1.0 / 64.0)] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (_, gv) = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap().sample(&g);
        let w = gv.perp();
        let z = bump_test_function(&g, [0.05, 0.02], 0.25).unwrap();
        let now = [
            entropy_production(&SigmaE1E2, &w, &z, eps).unwrap().value.abs(),
            entropy_production(&SigmaEps1Eps2, &w, &z, eps).unwrap().value.abs(),
            entropy_production(&phi_h, &w, &z, eps).unwrap().value.abs(),
        ];
        for k in 0..3 {
            assert!(now[k] < prev[k], "n={n}: {now:?} after {prev:?}");
        }
        prev = now;
    }
    assert!(prev[0] < 1e-2 && prev[1] < 1e-2);
}

#[test]
fn weak_and_strong_forms_agree_for_smooth_fields() {
    let diffs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = GridSpec::unit_centered(n).unwrap();
            let w = VectorField2D::from_fn(g, |x| [(2.0 * x[1]).cos() * 0.8, (x[0] + x[1]).sin() * 0.6]);
            let z = bump_test_function(&g, [0.0, 0.05], 0.3).unwrap();
            let weak = entropy_production(&SigmaE1E2, &w, &z, 0.0).unwrap().value;
            let strong = entropy_production_strong(&SigmaE1E2, &w, &z, 0.0).unwrap();
            (weak - strong).abs()
        })
        .collect();
    // centred differences sum by parts exactly against a test function that
    // vanishes near the edge
    assert!(diffs.iter().all(|&d| d <= 1e-12), "{diffs:?}");
}

#[test]
fn halo_violation_is_a_domain_error() {
    let g = GridSpec::unit_centered(64).unwrap();
    let w = VectorField2D::constant(g, [1.0, 0.0]);
    let z = bump_test_function(&g, [0.0, 0.0], 0.4).unwrap();
    assert!(entropy_production(&SigmaE1E2, &w, &z, 0.0).is_ok());
    assert!(matches!(entropy_production(&SigmaE1E2, &w, &z, 0.2), Err(Error::Domain(_))));
}

#[test]
fn divergence_identities_on_a_quadratic() {
    // u = x₁x₂: the e-identity is exact on the stencil, the ε-identity misses
    // the cubic truncation term of both components, exactly (4/3)h²
    let g = GridSpec::unit_centered(32).unwrap();
    let u = ScalarField2D::from_fn(g, |x| x[0] * x[1]);
    let (r1, r2) = divergence_identity_check(&u).unwrap();
    let h = g.h_max();
    assert!(r1 <= 1e-12, "{r1}");
    assert!((r2 - 4.0 / 3.0 * h * h).abs() <= 1e-12, "{r2}");
    let planar = ScalarField2D::from_fn(g, |x| 0.6 * x[0] + 0.8 * x[1]);
    let (p1, p2) = divergence_identity_check(&planar).unwrap();
    assert!(p1 < 1e-13 && p2 < 1e-13);
}

#[test]
fn divergence_identities_converge_on_the_mollified_roof() {
    let nu = [0.3f64.cos(), 0.3f64.sin()];
    let roof = Roof::new([0.0, 0.0], nu, nu, [-nu[0], -nu[1]]).unwrap();
    let res: Vec<(f64, f64)> = [64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let g = GridSpec::unit_centered(n).unwrap();
            let (u, _) = EikonalSolution::roof(roof).sample(&g);
            divergence_identity_check(&mollify(&u, &Mollifier::new(0.1).unwrap()).unwrap()).unwrap()
        })
        .collect();
    let a: Vec<f64> = res.iter().map(|r| r.0).collect();
    let b: Vec<f64> = res.iter().map(|r| r.1).collect();
    for r in ratios(&a).into_iter().chain(ratios(&b)) {
        assert!((3.5..=4.5).contains(&r), "{a:?} {b:?}");
    }
}

#[test]
fn lemma18_identity_is_second_order() {
    let phi = Poly2::harmonic_re(2);
    let fields: [fn([f64; 2]) -> [f64; 2]; 2] =
        [|x| [-x[0], x[1]], |x| [-x[0].sin() * x[1].cos(), x[0].cos() * x[1].sin()]];
    for f in fields {
        let errs: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| lemma18_identity_check(&phi, &VectorField2D::from_fn(GridSpec::unit_centered(n).unwrap(), f)).unwrap())
            .collect();
        for r in ratios(&errs) {
            assert!((3.5..=4.5).contains(&r), "{errs:?}");
        }
    }
    let g = GridSpec::unit_centered(32).unwrap();
    assert!(lemma18_identity_check(&phi, &VectorField2D::constant(g, [0.3, 0.4])).unwrap() < 1e-12);
    let bad = VectorField2D::from_fn(g, |x| [x[0], x[1]]);
    assert!(matches!(lemma18_identity_check(&phi, &bad), Err(Error::Precondition(_))));
}

#[test]
fn xi_entropy_limit_and_convergence() {
    let se = special_xi_entropy([S, S], 4).unwrap();
    let lim = se.limit();
    assert!(close2(lim.value([1.0, 0.0]), [S, S], 1e-15));
    assert_eq!(lim.value([-0.6, 0.2]), [0.0, 0.0]);
    let z = [0.6, 0.8];
    let devs: Vec<f64> = [1u32, 2, 4, 8, 16, 32]
        .iter()
        .map(|&k| {
            let s = special_xi_entropy([S, S], k).unwrap();
            let (a, b) = (s.entropy_k().value(z), s.limit().value(z));
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        })
        .collect();
    assert!(devs.windows(2).all(|w| w[1] <= w[0]));
    assert!(devs[0] > 0.0 && *devs.last().unwrap() < 1e-14);
    // off the strip the generated entropy is exactly the limit
    let far = [0.9, 0.2];
    let s16 = special_xi_entropy([S, S], 16).unwrap();
    assert!(close2(s16.entropy_k().value(far), s16.limit().value(far), 1e-14));
}

#[test]
fn psi_k_against_a_numeric_oracle() {
    let se = special_xi_entropy([0.6, 0.8], 4).unwrap();
    let gen = se.generator();
    let d = 2.5e-4;
    let lap = |z: [f64; 2]| {
        let f = |a: f64, b: f64| gen.value([z[0] + a, z[1] + b]);
        (f(d, 0.0) + f(-d, 0.0) + f(0.0, d) + f(0.0, -d) - 4.0 * f(0.0, 0.0)) / (d * d)
    };
    for t in [2.3, 2.4, 2.45, -0.75] {
        let z = [f64::cos(t), f64::sin(t)];
        let g = [
            (lap([z[0] + d, z[1]]) - lap([z[0] - d, z[1]])) / (2.0 * d),
            (lap([z[0], z[1] + d]) - lap([z[0], z[1] - d])) / (2.0 * d),
        ];
        let oracle = (g[0] * -z[1] + g[1] * z[0]) / 4.0;
        assert!((se.psi_k(z) - oracle).abs() <= 2e-3 * (1.0 + oracle.abs()), "t={t}: {} vs {oracle}", se.psi_k(z));
    }
}

#[test]
fn chi_k_bounds() {
    for k in [4u32, 8, 16] {
        let se = special_xi_entropy([S, S], k).unwrap();
        let b = chi_k_bound(&se).unwrap();
        assert!(b.sup.is_finite() && b.sup > 0.0);
        assert!(b.sup <= 4.0 * b.psi_sup / (b.alpha * b.alpha) * (1.0 + 1e-12));
        if k >= 8 {
            assert!(b.alpha >= (PI / 8.0).sin());
        }
    }
    let on_axis = special_xi_entropy([1.0, 0.0], 8).unwrap();
    assert!(matches!(chi_k_bound(&on_axis), Err(Error::Hypothesis(_))));
    let coarse = special_xi_entropy([S, S], 1).unwrap();
    assert!(matches!(chi_k_bound(&coarse), Err(Error::Hypothesis(_))));
}
