//! Entropies of the Eikonal equation and the identities they satisfy.
//!
//! An entropy is a smooth field `Φ: ℝ² → ℝ²` with `z·DΦ(z)z⊥ = 0` on the unit
//! circle. Applied to `w = ∇u⊥`, its distributional divergence detects the
//! gradient jumps of `u`.

use crate::field::{Mat2, VectorField2D};
use crate::math::{dot, perp};

mod phi;
mod production;
mod psi;
mod special;
mod xi;

pub use phi::{make_entropy, NumericPhi, PhiEntropy, PhiFunction, Poly2};
pub use production::{
    divergence_identity_check, entropy_production, entropy_production_strong, lemma18_identity_check, Production,
};
pub use psi::{isotropy_residual, make_psi, psi_antisymmetry, psi_from_phi, Psi, PsiMode};
pub use special::{sigma_e1e2, sigma_eps1eps2, SigmaE1E2, SigmaEps1Eps2, E1, E2, EPS1, EPS2};
pub use xi::{chi_k_bound, s0, special_xi_entropy, ChiKBound, SpecialEntropyXi, XiLimitEntropy, XiPhi};

/// A vector field on `ℝ²` with its Jacobian `J[i][j] = ∂ⱼΦᵢ`.
pub trait Entropy {
    fn value(&self, z: [f64; 2]) -> [f64; 2];
    fn jacobian(&self, z: [f64; 2]) -> Mat2;
}

impl<T: Entropy + ?Sized> Entropy for &T {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        (**self).value(z)
    }
    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        (**self).jacobian(z)
    }
}

impl<T: Entropy + ?Sized> Entropy for alloc::boxed::Box<T> {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        (**self).value(z)
    }
    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        (**self).jacobian(z)
    }
}

/// Fourth-order central-difference Jacobian of `Φ` with step `h`.
pub fn fd_jacobian<E: Entropy + ?Sized>(phi: &E, z: [f64; 2], h: f64) -> Mat2 {
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let at = |s: f64| {
            let mut p = z;
            p[k] += s * h;
            phi.value(p)
        };
        let (a, b, c, d) = (at(2.0), at(1.0), at(-1.0), at(-2.0));
        for i in 0..2 {
            j[i][k] = (-a[i] + 8.0 * b[i] - 8.0 * c[i] + d[i]) / (12.0 * h);
        }
    }
    j
}

fn mat_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// `z·DΦ(z)z⊥` with the analytic Jacobian.
pub fn entropy_condition_residual<E: Entropy + ?Sized>(phi: &E, z: [f64; 2]) -> f64 {
    dot(z, mat_vec(&phi.jacobian(z), perp(z)))
}

/// `z·DΦ(z)z⊥` with a finite-difference Jacobian.
pub fn entropy_condition_residual_fd<E: Entropy + ?Sized>(phi: &E, z: [f64; 2]) -> f64 {
    dot(z, mat_vec(&fd_jacobian(phi, z, 1e-3), perp(z)))
}

/// The field `Φ(w)` for a sampled `w`.
pub fn apply_entropy<E: Entropy + ?Sized>(phi: &E, w: &VectorField2D) -> VectorField2D {
    w.map(|v| phi.value(v))
}

/// Largest `|z·DΦ(z)z⊥|` over `samples` equally spaced points of `S¹`.
pub fn circle_condition_residual<E: Entropy + ?Sized>(phi: &E, samples: usize, finite_difference: bool) -> f64 {
    (0..samples)
        .map(|k| {
            let t = crate::math::TAU * (k as f64 + 0.25) / samples as f64;
            let z = [crate::math::cos(t), crate::math::sin(t)];
            if finite_difference {
                entropy_condition_residual_fd(phi, z).abs()
            } else {
                entropy_condition_residual(phi, z).abs()
            }
        })
        .fold(0.0, f64::max)
}
