//! Entropy production against test functions and the divergence identities.

use super::{apply_entropy, make_entropy, psi_from_phi, sigma_e1e2, sigma_eps1eps2, Entropy, PhiFunction};
use crate::eikonal::check_support;
use crate::err;
use crate::error::Result;
use crate::fd;
use crate::field::{ScalarField2D, VectorField2D};
use crate::math::{abs, dot, hypot2};
use crate::mollify::{mollify, Mollifier};

/// Result of a production pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    /// `P_ε(Φ, ζ) = −∫Φ(w_ε)·∇ζ dx`.
    pub value: f64,
    /// Cells in the support of `∇ζ` skipped because `w_ε` is masked out there.
    pub skipped: usize,
    /// Cell density `−Φ(w_ε)·∇ζ` (masked out where skipped or zero weight).
    pub density: ScalarField2D,
}

fn prepare(w: &VectorField2D, zeta: &ScalarField2D, eps: f64) -> Result<(VectorField2D, VectorField2D)> {
    if !w.grid().same_lattice(zeta.grid()) {
        return Err(err!(Configuration, "field and test function live on different grids"));
    }
    if eps < 0.0 || !eps.is_finite() {
        return Err(err!(Argument, "mollification radius must be >= 0"));
    }
    check_support(zeta)?;
    let dz = fd::gradient(zeta)?;
    let we = if eps > 0.0 { mollify(w, &Mollifier::new(eps)?)? } else { w.clone() };
    Ok((dz, we))
}

fn halo_ok(w: &VectorField2D, i: usize, j: usize, eps: f64) -> bool {
    let g = w.grid();
    let c = g.center(i, j);
    let o = g.origin();
    let e = g.extent();
    c[0] - eps >= o[0] && c[1] - eps >= o[1] && c[0] + eps <= o[0] + e[0] && c[1] + eps <= o[1] + e[1]
}

/// Weak entropy production `P_ε(Φ, ζ) = −∫Φ(w_ε)·∇ζ dx` with `w_ε = w * ρ_ε`
/// (`w` itself when `eps = 0`).
///
/// Support cells of `∇ζ` whose `ε`-ball leaves the grid are a domain error;
/// support cells where `w_ε` is masked out by an interior excision are skipped
/// and counted.
pub fn entropy_production<E: Entropy + ?Sized>(phi: &E, w: &VectorField2D, zeta: &ScalarField2D, eps: f64) -> Result<Production> {
    let (dz, we) = prepare(w, zeta, eps)?;
    let grid = *w.grid();
    let mut total = 0.0;
    let mut skipped = 0;
    let mut density = alloc::vec![f64::NAN; grid.len()];
    let mut mask = alloc::vec![false; grid.len()];
    for j in 0..grid.n() {
        let mut row = 0.0;
        for i in 0..grid.n() {
            let Some(g) = dz.get(i, j) else { continue };
            if g == [0.0, 0.0] {
                continue;
            }
            if !halo_ok(w, i, j, eps) {
                return Err(err!(Domain, "eps-halo of the test-function support leaves the grid at ({i}, {j})"));
            }
            match we.get(i, j) {
                Some(v) => {
                    let d = -dot(phi.value(v), g);
                    row += d;
                    density[grid.index(i, j)] = d;
                    mask[grid.index(i, j)] = true;
                }
                None => skipped += 1,
            }
        }
        total += row;
    }
    Ok(Production { value: total * grid.cell_area(), skipped, density: ScalarField2D::from_parts(grid, density, mask)? })
}

/// Strong form `∫ζ ∇·[Φ(w_ε)] dx` with a centred-difference divergence.
pub fn entropy_production_strong<E: Entropy + ?Sized>(phi: &E, w: &VectorField2D, zeta: &ScalarField2D, eps: f64) -> Result<f64> {
    let (_, we) = prepare(w, zeta, eps)?;
    let div = fd::divergence(&apply_entropy(phi, &we))?;
    let grid = *w.grid();
    let mut total = 0.0;
    for j in 0..grid.n() {
        let mut row = 0.0;
        for i in 0..grid.n() {
            let z = zeta.raw(i, j);
            if z == 0.0 {
                continue;
            }
            match div.get(i, j) {
                Some(d) => row += z * d,
                None => {
                    if !halo_ok(w, i, j, eps) {
                        return Err(err!(Domain, "test-function support leaves the valid region at ({i}, {j})"));
                    }
                }
            }
        }
        total += row;
    }
    Ok(total * grid.cell_area())
}

/// Residuals of `∇·Σ_{e₁e₂}v = (v,₁₁ − v,₂₂)(1 − |∇v|²)` and
/// `∇·Σ_{ε₁ε₂}v = 2v,₁₂(1 − |∇v|²)`, maximised over the cells where every
/// stencil is available.
pub fn divergence_identity_check(u_eps: &ScalarField2D) -> Result<(f64, f64)> {
    let grad = fd::gradient(u_eps)?;
    let hess = fd::hessian(u_eps)?;
    let div_e = fd::divergence(&sigma_e1e2(&grad))?;
    let div_eps = fd::divergence(&sigma_eps1eps2(&grad))?;
    let mut r = (0.0f64, 0.0f64);
    for (i, j, de) in div_e.iter_valid() {
        let (Some(dp), Some(h), Some(g)) = (div_eps.get(i, j), hess.get(i, j), grad.get(i, j)) else { continue };
        let defect = 1.0 - hypot2(g);
        r.0 = r.0.max(abs(de - (h[0][0] - h[1][1]) * defect));
        r.1 = r.1.max(abs(dp - 2.0 * h[0][1] * defect));
    }
    Ok(r)
}

/// Max-norm residual of `∇·[Φ(m)] = Ψ(m)·∇(1 − |m|²)` for a discretely
/// divergence-free `m`, with `Φ` and `Ψ` generated by `φ`.
pub fn lemma18_identity_check<P: PhiFunction + Clone>(phi: &P, m: &VectorField2D) -> Result<f64> {
    let div_m = fd::divergence(m)?;
    let worst = fd::max_abs(&div_m, abs);
    if worst > 1e-6 {
        return Err(err!(Precondition, "field is not divergence-free (max |div m| = {worst:.3e})"));
    }
    let entropy = make_entropy(phi.clone())?;
    let lhs = fd::divergence(&apply_entropy(&entropy, m))?;
    let defect_grad = fd::gradient(&m.map(|v| 1.0 - hypot2(v)))?;
    let mut r = 0.0f64;
    for (i, j, l) in lhs.iter_valid() {
        let (Some(v), Some(g)) = (m.get(i, j), defect_grad.get(i, j)) else { continue };
        r = r.max(abs(l - dot(psi_from_phi(phi, v), g)));
    }
    Ok(r)
}
