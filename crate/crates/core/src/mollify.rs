//! Convolution with the standard exponential bump.
//!
//! `ρ(z) = C·exp(1/(|z|² − 1))` for `|z| < 1` and 0 otherwise, with `C` fixed by
//! `∫ρ = 1`. The scaled kernel is `ρ_ε(z) = ρ(z/ε)/ε²`. The normalising constant
//! and the sup norms of `ρ` and `∇ρ` are measured by quadrature when the
//! mollifier is built.

use alloc::vec::Vec;

use crate::err;
use crate::error::Result;
use crate::field::{Field2D, Linear};
use crate::grid::GridSpec;
use crate::math::{exp, golden_min, hypot2, simpson, sqrt, TAU};

/// `r·exp(1/(r² − 1))`, the radial integrand of the unnormalised bump.
fn radial(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        r * exp(1.0 / (r * r - 1.0))
    }
}

/// Unnormalised profile derivative magnitude `|d/dr exp(1/(r²−1))|`.
fn radial_slope(r: f64) -> f64 {
    if r <= 0.0 || r >= 1.0 {
        0.0
    } else {
        let q = r * r - 1.0;
        exp(1.0 / q) * 2.0 * r / (q * q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    epsilon: f64,
    norm: f64,
    sup_rho: f64,
    sup_grad_rho: f64,
    mass: f64,
}

/// One cell of a discrete kernel: integer offset and quadrature weight
/// `ρ_ε(offset)·h₁h₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilEntry {
    pub di: isize,
    pub dj: isize,
    pub weight: f64,
}

impl Mollifier {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(err!(Argument, "mollifier radius must be positive, got {epsilon}"));
        }
        let integral = simpson(0.0, 1.0, 20_000, radial);
        let norm = 1.0 / (TAU * integral);
        let mass = TAU * norm * midpoint_check();
        if (mass - 1.0).abs() > 1e-10 {
            return Err(err!(Precondition, "kernel mass {mass} differs from 1"));
        }
        let sup_rho = norm * exp(-1.0);
        let mut best = (0.0, 0.0);
        for k in 1..4000 {
            let r = k as f64 / 4000.0;
            let s = radial_slope(r);
            if s > best.1 {
                best = (r, s);
            }
        }
        let (_, neg) = golden_min(best.0 - 2.5e-4, best.0 + 2.5e-4, 80, |r| -radial_slope(r));
        let sup_grad_rho = norm * (-neg);
        Ok(Self { epsilon, norm, sup_rho, sup_grad_rho, mass })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `C` in `ρ = C·exp(1/(|z|²−1))`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// `‖ρ‖_∞ = C/e` for the unit-scale kernel.
    pub fn sup_rho(&self) -> f64 {
        self.sup_rho
    }

    /// `‖∇ρ‖_∞` for the unit-scale kernel.
    pub fn sup_grad_rho(&self) -> f64 {
        self.sup_grad_rho
    }

    /// `∫ρ` measured by an independent quadrature at construction.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Unit-scale profile `ρ(z)`.
    pub fn profile(&self, z: [f64; 2]) -> f64 {
        let r2 = hypot2(z);
        if r2 >= 1.0 {
            0.0
        } else {
            self.norm * exp(1.0 / (r2 - 1.0))
        }
    }

    /// Unit-scale gradient `∇ρ(z)`.
    pub fn profile_grad(&self, z: [f64; 2]) -> [f64; 2] {
        let r2 = hypot2(z);
        if r2 >= 1.0 {
            return [0.0, 0.0];
        }
        let q = r2 - 1.0;
        let s = -self.norm * exp(1.0 / q) * 2.0 / (q * q);
        [s * z[0], s * z[1]]
    }

    /// `ρ_ε(y) = ρ(y/ε)/ε²`.
    pub fn kernel(&self, y: [f64; 2]) -> f64 {
        let e = self.epsilon;
        self.profile([y[0] / e, y[1] / e]) / (e * e)
    }

    /// `∇ρ_ε(y) = (∇ρ)(y/ε)/ε³`.
    pub fn kernel_grad(&self, y: [f64; 2]) -> [f64; 2] {
        let e = self.epsilon;
        let g = self.profile_grad([y[0] / e, y[1] / e]);
        [g[0] / (e * e * e), g[1] / (e * e * e)]
    }

    /// Checks that the kernel is resolved by at least two cells.
    pub fn check_resolution(&self, grid: &GridSpec) -> Result<()> {
        if self.epsilon < 2.0 * grid.h_max() * (1.0 - 1e-12) {
            return Err(err!(Resolution, "epsilon {} < 2h = {}", self.epsilon, 2.0 * grid.h_max()));
        }
        Ok(())
    }

    /// Offsets `y` with `|y| < ε` and their weights `ρ_ε(y)·h₁h₂`.
    pub fn stencil(&self, grid: &GridSpec) -> Result<Vec<StencilEntry>> {
        self.check_resolution(grid)?;
        Ok(ball_offsets(grid, self.epsilon, false)
            .into_iter()
            .map(|(di, dj)| StencilEntry { di, dj, weight: self.kernel(grid.offset(di, dj)) * grid.cell_area() })
            .filter(|e| e.weight > 0.0)
            .collect())
    }
}

/// `∫₀¹ r·exp(1/(r²−1)) dr` rewritten as `½∫₀¹ exp(1/(s−1)) ds` and
/// integrated with a different rule and panel count than the normalisation.
fn midpoint_check() -> f64 {
    0.5 * simpson(0.0, 1.0, 12_002, |s| if s >= 1.0 { 0.0 } else { exp(1.0 / (s - 1.0)) })
}

/// Integer offsets with `|y| < radius` (or `≤` when `closed`), in a fixed order.
pub fn ball_offsets(grid: &GridSpec, radius: f64, closed: bool) -> Vec<(isize, isize)> {
    let h = grid.h();
    let kx = (radius / h[0]) as isize + 1;
    let ky = (radius / h[1]) as isize + 1;
    let r2 = radius * radius;
    let mut out = Vec::new();
    for dj in -ky..=ky {
        for di in -kx..=kx {
            let d = hypot2(grid.offset(di, dj));
            if d < r2 || (closed && d <= r2 * (1.0 + 1e-12)) {
                out.push((di, dj));
            }
        }
    }
    out
}

/// Discrete convolution `f_ε = f * ρ_ε`.
///
/// A cell is masked in only if its whole `ε`-ball lies on the grid and is
/// masked in. Weights are renormalised per cell, so constants are reproduced
/// exactly.
pub fn mollify<T: Linear>(f: &Field2D<T>, m: &Mollifier) -> Result<Field2D<T>> {
    let grid = *f.grid();
    let stencil = m.stencil(&grid)?;
    Ok(Field2D::from_index_fn(grid, |i, j| {
        let mut acc = T::zero();
        let mut wsum = 0.0;
        for e in &stencil {
            let v = f.get_offset(i, j, e.di, e.dj)?;
            acc = acc.add_scaled(v, e.weight);
            wsum += e.weight;
        }
        Some(acc.scale(1.0 / wsum))
    }))
}

/// Convolution of the periodic extension of `f` (indices wrap around).
pub fn mollify_periodic<T: Linear>(f: &Field2D<T>, m: &Mollifier) -> Result<Field2D<T>> {
    let grid = *f.grid();
    let stencil = m.stencil(&grid)?;
    let n = grid.n() as isize;
    Ok(Field2D::from_index_fn(grid, |i, j| {
        let mut acc = T::zero();
        let mut wsum = 0.0;
        for e in &stencil {
            let a = (i as isize + e.di).rem_euclid(n) as usize;
            let b = (j as isize + e.dj).rem_euclid(n) as usize;
            acc = acc.add_scaled(f.get(a, b)?, e.weight);
            wsum += e.weight;
        }
        Some(acc.scale(1.0 / wsum))
    }))
}

/// Per-cell local sums used by the mollification estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSums {
    /// `1 − |w_ε(x)|²` with the renormalised discrete kernel.
    pub defect: f64,
    /// `∫_{B_ε}|w(x−z) − w(x)|² dz`.
    pub sq_oscillation: f64,
    /// `∫_{B_ε}|w(x−z) − w(x)| dz`.
    pub abs_oscillation: f64,
    /// `∂ⱼw_ε(x) = ∫∂ⱼρ_ε(z)(w(x−z) − w(x))dz`, row `j`, component `i` at `[j][i]`.
    pub derivative: [[f64; 2]; 2],
}

/// [`LocalSums`] at cell `(i, j)`, `None` if the ball leaves the valid region.
pub fn local_sums_at(w: &Field2D<[f64; 2]>, m: &Mollifier, offsets: &[(isize, isize)], i: usize, j: usize) -> Option<LocalSums> {
    let grid = w.grid();
    let area = grid.cell_area();
    let c = w.get(i, j)?;
    let mut acc = [0.0; 2];
    let mut wsum = 0.0;
    let mut sq = 0.0;
    let mut ab = 0.0;
    let mut der = [[0.0; 2]; 2];
    for &(di, dj) in offsets {
        // the value at x − z sits at offset −z
        let v = w.get_offset(i, j, -di, -dj)?;
        let z = grid.offset(di, dj);
        let k = m.kernel(z);
        acc[0] += k * v[0];
        acc[1] += k * v[1];
        wsum += k;
        let d = [v[0] - c[0], v[1] - c[1]];
        let d2 = hypot2(d);
        sq += d2 * area;
        ab += sqrt(d2) * area;
        let kg = m.kernel_grad(z);
        for (row, g) in der.iter_mut().zip(kg) {
            row[0] += g * d[0] * area;
            row[1] += g * d[1] * area;
        }
    }
    let we = [acc[0] / wsum, acc[1] / wsum];
    Some(LocalSums { defect: 1.0 - hypot2(we), sq_oscillation: sq, abs_oscillation: ab, derivative: der })
}
