//! Fractional Sobolev seminorms, the `ε`-scaled difference quotient, the
//! Aviles–Giga energy and the mollification estimates.

use alloc::vec::Vec;

use crate::err;
use crate::error::Result;
use crate::fd;
use crate::field::{ScalarField2D, VectorField2D};
use crate::grid::GridSpec;
use crate::math::{abs, hypot2, pow, sqrt};
use crate::mollify::{ball_offsets, local_sums_at, mollify, Mollifier};
use crate::quadrature::{lp_norm, Region};

/// Integrability exponent used throughout.
pub const P: f64 = 4.0;
/// Relative quadrature slack allowed by [`mollification_bounds_check`].
pub const BOUNDS_SLACK: f64 = 0.05;

fn check_reach(grid: &GridSpec, region: &Region, reach: f64) -> Result<()> {
    let m = region.margin_width(grid);
    if reach > m[0].min(m[1]) * (1.0 + 1e-12) {
        return Err(err!(Domain, "interaction radius {reach} exceeds the region margin {}", m[0].min(m[1])));
    }
    Ok(())
}

/// `Σ_y w(y) Σ_x |v(x+y) − v(x)|⁴ h⁴` over masked-in pairs with `x` in the region.
fn pair_sum(v: &VectorField2D, region: &Region, offsets: &[((isize, isize), f64)]) -> f64 {
    let grid = v.grid();
    let n = grid.n();
    let mut vx = Vec::with_capacity(grid.len());
    let mut vy = Vec::with_capacity(grid.len());
    let mut mk = Vec::with_capacity(grid.len());
    for (val, &ok) in v.values().iter().zip(v.mask()) {
        vx.push(if ok { val[0] } else { 0.0 });
        vy.push(if ok { val[1] } else { 0.0 });
        mk.push(if ok { 1.0 } else { 0.0 });
    }
    let (ri, rj) = region.index_ranges(grid);
    let area = grid.cell_area();
    let mut total = 0.0;
    for &((di, dj), weight) in offsets {
        let i0 = ri.start.max((-di).max(0) as usize);
        let i1 = ri.end.min((n as isize - di).max(0) as usize);
        let j0 = rj.start.max((-dj).max(0) as usize);
        let j1 = rj.end.min((n as isize - dj).max(0) as usize);
        if i0 >= i1 || j0 >= j1 {
            continue;
        }
        let mut s = 0.0;
        for j in j0..j1 {
            let a0 = j * n;
            let b0 = ((j as isize + dj) as usize) * n;
            let xa = &vx[a0 + i0..a0 + i1];
            let ya = &vy[a0 + i0..a0 + i1];
            let ma = &mk[a0 + i0..a0 + i1];
            let bs = (b0 as isize + i0 as isize + di) as usize;
            let len = i1 - i0;
            let xb = &vx[bs..bs + len];
            let yb = &vy[bs..bs + len];
            let mb = &mk[bs..bs + len];
            let mut row = 0.0;
            for k in 0..len {
                let dx = xb[k] - xa[k];
                let dy = yb[k] - ya[k];
                let d2 = dx * dx + dy * dy;
                row += ma[k] * mb[k] * d2 * d2;
            }
            s += row;
        }
        total += weight * s;
    }
    total * area * area
}

/// [`gagliardo_seminorm_strided`] with every offset used.
pub fn gagliardo_seminorm(v: &VectorField2D, sigma: f64, radius: f64, region: &Region) -> Result<f64> {
    gagliardo_seminorm_strided(v, sigma, radius, region, 1)
}

/// `∫_{Ω′}∫_{h ≤ |y| ≤ R} |v(x+y) − v(x)|⁴ / |y|^{2+4σ} dy dx` by a double
/// cell sum (the fourth power of the `W^{σ,4}` seminorm, localised to `R`).
///
/// With `stride > 1` only offsets on the coarser lattice `stride·h` are
/// visited and each carries weight `stride²`. For `R ≤ 1` the value is
/// non-decreasing in `σ`; it is non-decreasing in `R` always.
pub fn gagliardo_seminorm_strided(v: &VectorField2D, sigma: f64, radius: f64, region: &Region, stride: usize) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(err!(Argument, "sigma must lie in (0, 1), got {sigma}"));
    }
    if stride == 0 {
        return Err(err!(Argument, "stride must be positive"));
    }
    let grid = v.grid();
    let h = grid.h();
    let hmin = h[0].min(h[1]);
    if radius < hmin {
        return Err(err!(Resolution, "cutoff radius {radius} is below the cell size {hmin}"));
    }
    check_reach(grid, region, radius)?;
    let s = stride as isize;
    let exponent = 0.5 * (2.0 + P * sigma);
    let offsets: Vec<((isize, isize), f64)> = ball_offsets(grid, radius, true)
        .into_iter()
        .filter(|&(di, dj)| di % s == 0 && dj % s == 0)
        .filter_map(|(di, dj)| {
            let r2 = hypot2(grid.offset(di, dj));
            (r2 >= hmin * hmin * (1.0 - 1e-12)).then(|| ((di, dj), (stride * stride) as f64 / pow(r2, exponent)))
        })
        .collect();
    Ok(pair_sum(v, region, &offsets))
}

/// `ε^{−(2+4/3)} ∫_{Ω′}∫_{B_ε} |v(x+y) − v(x)|⁴ dy dx`.
pub fn eps_scaled_quotient(v: &VectorField2D, eps: f64, region: &Region) -> Result<f64> {
    let grid = v.grid();
    if eps < grid.h_max() {
        return Err(err!(Resolution, "eps = {eps} is below the cell size"));
    }
    check_reach(grid, region, eps)?;
    let offsets: Vec<((isize, isize), f64)> = ball_offsets(grid, eps, true).into_iter().map(|o| (o, 1.0)).collect();
    Ok(pair_sum(v, region, &offsets) / pow(eps, 2.0 + 4.0 / 3.0))
}

/// `I_ε(u) = ∫ (1 − |∇u|²)²/ε + ε|∇²u|² dx` over region cells where both
/// the gradient and the Hessian stencils are available.
pub fn aviles_giga_energy(u: &ScalarField2D, eps: f64, region: &Region) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(err!(Argument, "eps must be positive"));
    }
    let grad = fd::gradient(u)?;
    let hess = fd::hessian(u)?;
    let grid = *u.grid();
    let (ri, rj) = region.index_ranges(&grid);
    let mut total = 0.0;
    for j in rj {
        let mut row = 0.0;
        for i in ri.clone() {
            let (Some(g), Some(m)) = (grad.get(i, j), hess.get(i, j)) else { continue };
            let d = 1.0 - hypot2(g);
            let hs = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
            row += d * d / eps + eps * hs;
        }
        total += row;
    }
    Ok(total * grid.cell_area())
}

/// `(∫ |1 − |∇u_ε|²| |∂ₘ∂ₙu_ε| |f| dx, ‖f‖_{L^r})` with `u_ε = u * ρ_ε`.
///
/// The integral runs over the cells where `f ≠ 0`; such a cell without the
/// derivative stencils of `u_ε` is a domain error.
pub fn key_estimate_probe(u: &ScalarField2D, eps: f64, f: &ScalarField2D, r: f64, m: usize, n: usize) -> Result<(f64, f64)> {
    if r < 4.0 {
        return Err(err!(Argument, "the estimate needs r >= 4, got {r}"));
    }
    if m > 1 || n > 1 {
        return Err(err!(Argument, "derivative indices must be 0 or 1"));
    }
    if !u.grid().same_lattice(f.grid()) {
        return Err(err!(Configuration, "u and f live on different grids"));
    }
    let grid = *u.grid();
    if eps < 4.0 * grid.h_max() {
        return Err(err!(Resolution, "eps = {eps} is below 4h"));
    }
    let ue = mollify(u, &Mollifier::new(eps)?)?;
    let grad = fd::gradient(&ue)?;
    let hess = fd::hessian(&ue)?;
    let mut total = 0.0;
    for j in 0..grid.n() {
        let mut row = 0.0;
        for i in 0..grid.n() {
            let Some(fv) = f.get(i, j) else { continue };
            if fv == 0.0 {
                continue;
            }
            let (Some(g), Some(hm)) = (grad.get(i, j), hess.get(i, j)) else {
                return Err(err!(Domain, "f is supported where u_eps has no second derivatives ({i}, {j})"));
            };
            row += abs(1.0 - hypot2(g)) * abs(hm[m][n]) * abs(fv);
        }
        total += row;
    }
    let norm = lp_norm(f, &Region::whole(), r)?;
    Ok((total * grid.cell_area(), norm))
}

/// Outcome of [`mollification_bounds_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundsCheck {
    /// Cells where `1 − |w_ε|² ≤ (2‖ρ‖∞/ε²)∫_{B_ε}|w(x−z) − w(x)|² dz` fails.
    pub defect_violations: usize,
    /// Cells where `|∂ⱼw_ε| ≤ (‖∇ρ‖∞/ε³)∫_{B_ε}|w(x−z) − w(x)| dz` fails for some `j`.
    pub derivative_violations: usize,
    /// Cells whose whole ball was available.
    pub checked: usize,
}

/// Evaluates both sides of the two pointwise mollification estimates at every
/// cell whose `ε`-ball is masked in, with [`BOUNDS_SLACK`] relative slack.
pub fn mollification_bounds_check(w: &VectorField2D, eps: f64) -> Result<BoundsCheck> {
    for (i, j, v) in w.iter_valid() {
        let dev = abs(sqrt(hypot2(v)) - 1.0);
        if dev > 1e-9 {
            return Err(err!(Precondition, "field is not unit at ({i}, {j}): ||w| - 1| = {dev:.3e}"));
        }
    }
    let moll = Mollifier::new(eps)?;
    moll.check_resolution(w.grid())?;
    let offsets = ball_offsets(w.grid(), eps, false);
    let c1 = 2.0 * moll.sup_rho() / (eps * eps);
    let c2 = moll.sup_grad_rho() / (eps * eps * eps);
    let grid = *w.grid();
    let mut out = BoundsCheck { defect_violations: 0, derivative_violations: 0, checked: 0 };
    for j in 0..grid.n() {
        for i in 0..grid.n() {
            let Some(s) = local_sums_at(w, &moll, &offsets, i, j) else { continue };
            out.checked += 1;
            if s.defect > (1.0 + BOUNDS_SLACK) * c1 * s.sq_oscillation + 1e-14 {
                out.defect_violations += 1;
            }
            let bound = (1.0 + BOUNDS_SLACK) * c2 * s.abs_oscillation + 1e-14;
            if s.derivative.iter().any(|d| sqrt(hypot2(*d)) > bound) {
                out.derivative_violations += 1;
            }
        }
    }
    Ok(out)
}
