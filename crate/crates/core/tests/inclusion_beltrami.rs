use eikonal_core::eikonal::{EikonalSolution, Roof};
use eikonal_core::inclusion::*;
use eikonal_core::{Error, GridSpec, Mat2, MatrixField2D, VectorField2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn dist(a: Mat2, b: Mat2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (a[i][j] - b[i][j]).powi(2);
        }
    }
    s.sqrt()
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Mat2 {
    [[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]]
}

#[test]
fn conformal_split_examples() {
    let id = [[1.0, 0.0], [0.0, 1.0]];
    assert_eq!(conformal_split(id), (id, [[0.0; 2]; 2]));
    let refl = [[1.0, 0.0], [0.0, -1.0]];
    assert_eq!(conformal_split(refl), ([[0.0; 2]; 2], refl));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let a = random_matrix(&mut rng);
        let (c, n) = conformal_split(a);
        assert!((det(a) - det(c) - det(n)).abs() <= 1e-14 * 16.0);
        assert!(dist([[c[0][0] + n[0][0], c[0][1] + n[0][1]], [c[1][0] + n[1][0], c[1][1] + n[1][1]]], a) < 1e-15 * 8.0);
    }
}

#[test]
fn k_matrix_examples_and_parts() {
    assert!(dist(k_matrix(FRAC_PI_2).matrix, [[2.0 / 3.0, 0.0], [0.0, 1.0 / 3.0]]) < 1e-15);
    assert!(dist(k_matrix(0.0).matrix, [[0.0, 2.0 / 3.0], [-1.0 / 3.0, 0.0]]) < 1e-15);
    assert!(dist(k_matrix(0.0).conformal(), [[0.0, 0.5], [-0.5, 0.0]]) < 1e-15);
    assert_eq!(k_matrix(TAU + 0.5).theta, k_matrix(0.5).theta);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(0.0..TAU);
        let k = k_matrix(t);
        let (s, c) = (t.sin(), t.cos());
        let (s3, c3) = ((3.0 * t).sin(), (3.0 * t).cos());
        assert!(dist(k.conformal(), [[0.5 * s, 0.5 * c], [-0.5 * c, 0.5 * s]]) <= 1e-14);
        assert!(dist(k.anticonformal(), [[-s3 / 6.0, c3 / 6.0], [c3 / 6.0, s3 / 6.0]]) <= 1e-14);
        assert!((s3 - (-4.0 * s.powi(3) + 3.0 * s)).abs() <= 1e-14);
        assert!((c3 - (4.0 * c.powi(3) - 3.0 * c)).abs() <= 1e-14);
        assert!((k.frobenius_sq() - 5.0 / 9.0).abs() <= 1e-13);
    }
}

#[test]
fn beltrami_equivalence_on_k() {
    for k in 0..1000 {
        let t = TAU * k as f64 / 1000.0;
        let m = k_matrix(t).matrix;
        let (r1, r2) = beltrami_pointwise(m);
        assert!(r1 <= 1e-12 && r2 <= 1e-12);
        let back = phase_recover(m, DEFAULT_K_TOLERANCE).unwrap();
        let d = (back - t).rem_euclid(TAU);
        assert!(d.min(TAU - d) <= 1e-10);
        let w = WirtingerPair::from_jacobian(m);
        let e = num_complex::Complex64::from_polar(1.0, t);
        assert!((w.dz - num_complex::Complex64::new(0.0, -0.5) * e).norm() < 1e-14);
    }
    assert_eq!(beltrami_pointwise([[0.0; 2]; 2]), (0.0, 0.5));
    assert!((beltrami_pointwise([[1.0, 0.0], [0.0, 1.0]]).1 - 0.5).abs() < 1e-15);
}

#[test]
fn zero_residual_matrices_lie_on_k() {
    // |∂z| = ½ and ∂z̄ = (4/3)(∂z)³ rebuild a point of K
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let a: f64 = rng.gen_range(0.0..TAU);
        let dz = num_complex::Complex64::from_polar(0.5, a);
        let a_mat = WirtingerPair { dz, dzbar: dz * dz * dz * (4.0 / 3.0) }.to_jacobian();
        let (r1, r2) = beltrami_pointwise(a_mat);
        assert!(r1 < 1e-14 && r2 < 1e-14);
        let t = phase_recover(a_mat, 1e-10).unwrap();
        assert!(dist(k_matrix(t).matrix, a_mat) <= 1e-10);
    }
}

#[test]
fn beltrami_residual_fields() {
    let g = GridSpec::unit_centered(16).unwrap();
    let df = MatrixField2D::from_fn(g, |x| k_matrix(7.0 * x[0] + 3.0 * x[1]).matrix);
    let (r1, r2) = beltrami_residual(&df);
    assert!(r1.values().iter().chain(r2.values()).all(|&v| v <= 1e-12));
}

#[test]
fn phase_recovery_under_perturbation() {
    assert!((phase_recover([[2.0 / 3.0, 0.0], [0.0, 1.0 / 3.0]], DEFAULT_K_TOLERANCE).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(phase_recover(k_matrix(0.0).matrix, DEFAULT_K_TOLERANCE).unwrap(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let t: f64 = rng.gen_range(0.0..TAU);
        let mut m = k_matrix(t).matrix;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v += rng.gen_range(-1e-8..1e-8);
            }
        }
        let r = phase_recover(m, DEFAULT_K_TOLERANCE).unwrap();
        let d = (r - t).rem_euclid(TAU);
        assert!(d.min(TAU - d) <= 1e-7);
    }
    assert!(matches!(phase_recover([[1.0, 0.0], [0.0, 1.0]], DEFAULT_K_TOLERANCE), Err(Error::FarFromK { .. })));
}

#[test]
fn gamma_inverse_examples() {
    let g = GridSpec::unit_centered(8).unwrap();
    let planar = MatrixField2D::constant(g, [[2.0 / 3.0, 0.0], [0.0, 1.0 / 3.0]]);
    let v = gamma_inverse(&planar, DEFAULT_K_TOLERANCE).unwrap().raw(0, 0);
    assert!((v[0]).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    let m0 = MatrixField2D::constant(g, k_matrix(0.0).matrix);
    let v = gamma_inverse(&m0, DEFAULT_K_TOLERANCE).unwrap().raw(0, 0);
    assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
    let far = MatrixField2D::constant(g, [[1.0, 0.0], [0.0, 1.0]]);
    assert!(matches!(gamma_inverse(&far, DEFAULT_K_TOLERANCE), Err(Error::FarFromK { .. })));
    for k in 0..1000 {
        let t = TAU * k as f64 / 1000.0;
        let m = MatrixField2D::constant(g, gamma_matrix([t.cos(), t.sin()]));
        let v = gamma_inverse(&m, DEFAULT_K_TOLERANCE).unwrap().raw(3, 3);
        assert!((v[0] - t.cos()).abs() <= 1e-12 && (v[1] - t.sin()).abs() <= 1e-12);
    }
}

#[test]
fn gamma_forward_planar() {
    let g = GridSpec::unit_centered(32).unwrap();
    let (u, gu) = EikonalSolution::planar([0.0, 1.0]).unwrap().sample(&g);
    let out = gamma_forward(&u, &gu).unwrap();
    assert!(out.df.values().iter().all(|&a| dist(a, [[2.0 / 3.0, 0.0], [0.0, 1.0 / 3.0]]) < 1e-15));
    assert!(out.path_residual < 1e-13 && out.curl_mass < 1e-12);
    let (ia, ja) = out.anchor;
    assert_eq!(out.f.raw(ia, ja), [0.0, 0.0]);
    for (i, j, f) in out.f.iter_valid() {
        let d = [g.center(i, j)[0] - g.center(ia, ja)[0], g.center(i, j)[1] - g.center(ia, ja)[1]];
        assert!((f[0] - 2.0 / 3.0 * d[0]).abs() < 1e-13 && (f[1] - 1.0 / 3.0 * d[1]).abs() < 1e-13);
    }
    let back = gamma_inverse(&out.df, DEFAULT_K_TOLERANCE).unwrap();
    assert!(back.iter_valid().all(|(i, j, v)| (v[0] - gu.raw(i, j)[0]).abs() <= 1e-12 && (v[1] - gu.raw(i, j)[1]).abs() <= 1e-12));
}

#[test]
fn gamma_forward_vortex_round_trip_and_path_residual() {
    let mut prev = f64::INFINITY;
    for n in [64, 128, 256, 512] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (u, gu) = EikonalSolution::vortex([0.0, 0.0], 1.0).unwrap().sample(&g);
        let out = gamma_forward(&u, &gu).unwrap();
        let back = gamma_inverse(&out.df, DEFAULT_K_TOLERANCE).unwrap();
        for (i, j, v) in back.iter_valid() {
            let e = gu.raw(i, j);
            assert!((v[0] - e[0]).abs() <= 1e-12 && (v[1] - e[1]).abs() <= 1e-12);
        }
        assert!(out.path_residual <= prev / 1.8, "n={n}: {} after {prev}", out.path_residual);
        prev = out.path_residual;
    }
}

#[test]
fn gamma_forward_flags_the_roof() {
    let mut masses = Vec::new();
    for n in [64, 128, 256] {
        let g = GridSpec::unit_centered(n).unwrap();
        let (u, gu) = EikonalSolution::roof(Roof::standard()).sample(&g);
        match gamma_forward(&u, &gu) {
            Err(Error::NotInClass { curl_mass, .. }) => masses.push(curl_mass),
            other => panic!("expected a curl diagnostic, got {other:?}"),
        }
    }
    // the jump of DF across the unit-length line has normal size 4/3
    let last = *masses.last().unwrap();
    assert!((last - 4.0 / 3.0).abs() < 0.02, "{masses:?}");
}

#[test]
fn gamma_forward_requires_unit_gradients() {
    let g = GridSpec::unit_centered(16).unwrap();
    let u = eikonal_core::ScalarField2D::constant(g, 0.0);
    let gu = VectorField2D::constant(g, [0.5, 0.0]);
    assert!(matches!(gamma_forward(&u, &gu), Err(Error::Precondition(_))));
}

#[test]
fn det_kernel_anchors() {
    let k = det_kernel(0.0);
    assert_eq!((k.f, k.g), (0.0, 0.0));
    let k = det_kernel(PI);
    assert!((k.f - 8.0 / 9.0).abs() <= 1e-12 && (k.g - 20.0 / 9.0).abs() <= 1e-12 && (k.ratio - 0.18).abs() <= 1e-12);
    let a = 1e-2;
    let k = det_kernel(a);
    assert!((k.f / a.powi(4) - 1.0 / 6.0).abs() <= 1e-3);
    assert!((k.g / (a * a) - 1.0).abs() <= 1e-3);
    // the cosine polynomials of the kernel
    for t in [0.3, 1.0, 2.0, 4.0, 5.5] {
        let c: f64 = f64::cos(t);
        let k = det_kernel(t);
        assert!((k.f - (4.0 / 9.0 - 2.0 / 3.0 * c + 2.0 / 9.0 * c.powi(3))).abs() < 1e-14);
        assert!((k.g - (10.0 / 9.0 - 2.0 / 3.0 * c - 4.0 / 9.0 * c.powi(3))).abs() < 1e-14);
    }
}

#[test]
fn det_kernel_is_phase_independent() {
    for a in [0.01, 0.7, 2.0, PI, 4.4] {
        let k = det_kernel(a);
        for b in 0..64 {
            let d = det_kernel_direct(TAU * b as f64 / 64.0, a);
            assert!((d.f - k.f).abs() <= 1e-13 && (d.g - k.g).abs() <= 1e-13);
        }
    }
}

#[test]
fn c0_bruteforce_and_positivity() {
    let est = c0_bruteforce(20_000).unwrap();
    assert!((est.c0 - 1.0 / 6.0).abs() <= 1e-3);
    assert!(est.min_f > 0.0);
    let mid = (0..=10_000)
        .map(|k| det_kernel(FRAC_PI_2 + PI * k as f64 / 10_000.0).ratio)
        .fold(f64::INFINITY, f64::min);
    // (2 + c)/(2c² + 2c + 5)² decreases in c on [−1, 0], so the smallest value sits at π
    assert!((mid - 0.18).abs() < 1e-12);
    assert!((det_kernel(3.0 * FRAC_PI_2).ratio - 0.36).abs() < 1e-12);
    assert!((det_kernel(FRAC_PI_2).ratio - 0.36).abs() < 1e-12);
    assert!(matches!(c0_bruteforce(9_999), Err(Error::Argument(_))));
}
