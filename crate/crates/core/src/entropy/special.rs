//! The two cubic entropies built on the bases `{e₁, e₂}` and `{ε₁, ε₂}`.

use super::Entropy;
use crate::field::{Mat2, VectorField2D};

pub const E1: [f64; 2] = [1.0, 0.0];
pub const E2: [f64; 2] = [0.0, 1.0];
pub const EPS1: [f64; 2] = [core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2];
pub const EPS2: [f64; 2] = [-core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2];

/// `Σ̃_{e₁e₂}(x, y) = (y(1 − x² − y²/3), x(1 − y² − x²/3))`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SigmaE1E2;

/// `Σ̃_{ε₁ε₂}(x, y) = (−x(1 − 2x²/3), y(1 − 2y²/3))`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SigmaEps1Eps2;

impl Entropy for SigmaE1E2 {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        let (x, y) = (z[0], z[1]);
        [y * (1.0 - x * x - y * y / 3.0), x * (1.0 - y * y - x * x / 3.0)]
    }
    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        let (x, y) = (z[0], z[1]);
        let d = 1.0 - x * x - y * y;
        [[-2.0 * x * y, d], [d, -2.0 * x * y]]
    }
}

impl Entropy for SigmaEps1Eps2 {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        let (x, y) = (z[0], z[1]);
        [-x * (1.0 - 2.0 * x * x / 3.0), y * (1.0 - 2.0 * y * y / 3.0)]
    }
    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        let (x, y) = (z[0], z[1]);
        [[-1.0 + 2.0 * x * x, 0.0], [0.0, 1.0 - 2.0 * y * y]]
    }
}

/// `Σ_{e₁e₂}u = (u,₁(1 − u,₂² − u,₁²/3), −u,₂(1 − u,₁² − u,₂²/3))`.
pub fn sigma_e1e2(grad_u: &VectorField2D) -> VectorField2D {
    grad_u.map(|g| {
        let (a, b) = (g[0], g[1]);
        [a * (1.0 - b * b - a * a / 3.0), -b * (1.0 - a * a - b * b / 3.0)]
    })
}

/// `Σ_{ε₁ε₂}u = (u,₂(1 − 2u,₂²/3), u,₁(1 − 2u,₁²/3))`.
pub fn sigma_eps1eps2(grad_u: &VectorField2D) -> VectorField2D {
    grad_u.map(|g| {
        let (a, b) = (g[0], g[1]);
        [b * (1.0 - 2.0 * b * b / 3.0), a * (1.0 - 2.0 * a * a / 3.0)]
    })
}

#[cfg(test)]
mod tests {
    use super::super::{apply_entropy, circle_condition_residual};
    use super::*;
    use crate::grid::GridSpec;

    fn close(a: [f64; 2], b: [f64; 2]) -> bool {
        (a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15
    }

    #[test]
    fn unit_values() {
        let g = GridSpec::unit_centered(8).unwrap();
        let at = |v: [f64; 2], f: fn(&VectorField2D) -> VectorField2D| f(&VectorField2D::constant(g, v)).get(3, 3).unwrap();
        assert!(close(at([1.0, 0.0], sigma_e1e2), [2.0 / 3.0, 0.0]));
        assert!(close(at([0.0, 1.0], sigma_e1e2), [0.0, -2.0 / 3.0]));
        assert!(close(at([0.0, -1.0], sigma_e1e2), [0.0, 2.0 / 3.0]));
        assert!(close(at([1.0, 0.0], sigma_eps1eps2), [0.0, 1.0 / 3.0]));
        assert!(close(at([0.0, 1.0], sigma_eps1eps2), [1.0 / 3.0, 0.0]));
        assert!(close(at([0.0, -1.0], sigma_eps1eps2), [-1.0 / 3.0, 0.0]));
    }

    #[test]
    fn roof_normal_jumps() {
        let g = GridSpec::unit_centered(8).unwrap();
        let up = sigma_e1e2(&VectorField2D::constant(g, [0.0, 1.0])).get(0, 0).unwrap();
        let down = sigma_e1e2(&VectorField2D::constant(g, [0.0, -1.0])).get(0, 0).unwrap();
        assert!((up[1] - down[1] + 4.0 / 3.0).abs() < 1e-15);
        let up = sigma_eps1eps2(&VectorField2D::constant(g, [0.0, 1.0])).get(0, 0).unwrap();
        let down = sigma_eps1eps2(&VectorField2D::constant(g, [0.0, -1.0])).get(0, 0).unwrap();
        assert_eq!(up[1] - down[1], 0.0);
    }

    #[test]
    fn composed_fields_equal_tilde_forms_of_the_rotated_gradient() {
        let g = GridSpec::unit_centered(16).unwrap();
        let grad = VectorField2D::from_fn(g, |x| {
            let t = 7.0 * x[0] - 3.0 * x[1];
            [libm::cos(t), libm::sin(t)]
        });
        let w = grad.perp();
        let a = sigma_e1e2(&grad);
        let b = apply_entropy(&SigmaE1E2, &w);
        let c = sigma_eps1eps2(&grad);
        let d = apply_entropy(&SigmaEps1Eps2, &w);
        for (i, j, v) in a.iter_valid() {
            assert!(close(v, b.get(i, j).unwrap()));
            assert!(close(c.get(i, j).unwrap(), d.get(i, j).unwrap()));
        }
    }

    #[test]
    fn circle_conditions_hold() {
        assert!(circle_condition_residual(&SigmaE1E2, 256, false) < 1e-10);
        assert!(circle_condition_residual(&SigmaEps1Eps2, 256, false) < 1e-10);
        assert!(circle_condition_residual(&SigmaE1E2, 256, true) < 1e-5);
    }
}
