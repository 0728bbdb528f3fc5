//! The companion field `Ψ` with `DΦ(z) + 2Ψ(z)⊗z` isotropic.

use super::{Entropy, PhiFunction, make_entropy};
use crate::err;
use crate::error::Result;
use crate::math::{abs, perp};

/// Coordinates closer than this to an axis use the isotropy completion.
pub const AXIS_EPS: f64 = 1e-6;

/// How `Ψ` is evaluated near the coordinate axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiMode {
    /// Only `Ψ₁ = −Φ₁,₂/(2z₂)`, `Ψ₂ = −Φ₂,₁/(2z₁)`; axis points are errors.
    OffAxisOnly,
    /// Off the axes as above; on them, solve the 2×2 isotropy system.
    WithCompletion,
}

/// `Ψ` attached to an entropy.
#[derive(Debug, Clone)]
pub struct Psi<E> {
    entropy: E,
    mode: PsiMode,
}

pub fn make_psi<E: Entropy>(entropy: E, mode: PsiMode) -> Psi<E> {
    Psi { entropy, mode }
}

impl<E: Entropy> Psi<E> {
    pub fn entropy(&self) -> &E {
        &self.entropy
    }

    pub fn eval(&self, z: [f64; 2]) -> Result<[f64; 2]> {
        let d = self.entropy.jacobian(z);
        if abs(z[0]) >= AXIS_EPS && abs(z[1]) >= AXIS_EPS {
            return Ok([-d[0][1] / (2.0 * z[1]), -d[1][0] / (2.0 * z[0])]);
        }
        if self.mode == PsiMode::OffAxisOnly {
            return Err(err!(Singularity, "Psi evaluated on a coordinate axis at {:?}", z));
        }
        // 2z₁Ψ₁ − 2z₂Ψ₂ = D₂₂ − D₁₁ ;  2z₂Ψ₁ + 2z₁Ψ₂ = −D₁₂ − D₂₁
        let det = 4.0 * (z[0] * z[0] + z[1] * z[1]);
        if det < 1e-24 {
            return Err(err!(Singularity, "Psi is undetermined at the origin"));
        }
        let r1 = d[1][1] - d[0][0];
        let r2 = -d[0][1] - d[1][0];
        Ok([(2.0 * z[0] * r1 + 2.0 * z[1] * r2) / det, (-2.0 * z[1] * r1 + 2.0 * z[0] * r2) / det])
    }
}

/// Closed form of `Ψ` in terms of `φ`:
/// `Ψ₁ = −φ,₁ − (z₂/2)φ,₁₂ + (z₁/2)φ,₂₂`, `Ψ₂ = −φ,₂ − (z₁/2)φ,₁₂ + (z₂/2)φ,₁₁`.
pub fn psi_from_phi<P: PhiFunction + ?Sized>(phi: &P, z: [f64; 2]) -> [f64; 2] {
    let g = phi.gradient(z);
    let h = phi.hessian(z);
    [
        -g[0] - 0.5 * z[1] * h[0][1] + 0.5 * z[0] * h[1][1],
        -g[1] - 0.5 * z[0] * h[0][1] + 0.5 * z[1] * h[0][0],
    ]
}

/// Distance of `DΦ(z) + 2Ψ⊗z` from the multiples of the identity:
/// `max(|A₁₁ − A₂₂|, |A₁₂|, |A₂₁|)`.
pub fn isotropy_residual<E: Entropy + ?Sized>(entropy: &E, psi: [f64; 2], z: [f64; 2]) -> f64 {
    let d = entropy.jacobian(z);
    let a = [
        [d[0][0] + 2.0 * psi[0] * z[0], d[0][1] + 2.0 * psi[0] * z[1]],
        [d[1][0] + 2.0 * psi[1] * z[0], d[1][1] + 2.0 * psi[1] * z[1]],
    ];
    abs(a[0][0] - a[1][1]).max(abs(a[0][1])).max(abs(a[1][0]))
}

/// Both sides of `Ψ₁,₂(z) − Ψ₂,₁(z) = ½∇(Δφ)·z⊥`.
///
/// The left side differentiates the off-axis `Ψ` of `make_entropy(φ)` by
/// fourth-order central differences; the right side is analytic.
pub fn psi_antisymmetry<P: PhiFunction + Clone>(phi: &P, z: [f64; 2]) -> Result<(f64, f64)> {
    if abs(z[0]) < AXIS_EPS || abs(z[1]) < AXIS_EPS {
        return Err(err!(Singularity, "antisymmetry probe needs z off the axes, got {:?}", z));
    }
    let psi = make_psi(make_entropy(phi.clone())?, PsiMode::OffAxisOnly);
    let h = 1e-3f64.min(abs(z[0]) / 4.0).min(abs(z[1]) / 4.0);
    let d = |comp: usize, axis: usize| -> Result<f64> {
        let at = |s: f64| -> Result<f64> {
            let mut p = z;
            p[axis] += s * h;
            Ok(psi.eval(p)?[comp])
        };
        Ok((-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h))
    };
    let lhs = d(0, 1)? - d(1, 0)?;
    let gl = phi.grad_laplacian(z);
    let zp = perp(z);
    let rhs = 0.5 * (gl[0] * zp[0] + gl[1] * zp[1]);
    Ok((lhs, rhs))
}
