//! Cell-sum quadrature over interior regions and smooth compactly supported
//! test functions.

use crate::err;
use crate::error::Result;
use crate::field::{Field2D, ScalarField2D, VectorField2D};
use crate::grid::GridSpec;
use crate::math::{exp, hypot2, pow, sqrt};

/// Default interior margin as a fraction of the domain extent.
pub const DEFAULT_MARGIN: f64 = 0.2;

/// An interior rectangle obtained by removing a margin `margin·extent` from
/// every side of the grid rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    margin: f64,
}

impl Region {
    pub fn interior(margin: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&margin) {
            return Err(err!(Argument, "margin fraction must lie in [0, 0.5), got {margin}"));
        }
        Ok(Self { margin })
    }

    /// The whole grid.
    pub fn whole() -> Self {
        Self { margin: 0.0 }
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Margin width per axis in domain units.
    pub fn margin_width(&self, grid: &GridSpec) -> [f64; 2] {
        let e = grid.extent();
        [self.margin * e[0], self.margin * e[1]]
    }

    /// Lower and upper corners of the region.
    pub fn bounds(&self, grid: &GridSpec) -> ([f64; 2], [f64; 2]) {
        let o = grid.origin();
        let e = grid.extent();
        let m = self.margin_width(grid);
        ([o[0] + m[0], o[1] + m[1]], [o[0] + e[0] - m[0], o[1] + e[1] - m[1]])
    }

    /// Whether the centre of cell `(i, j)` lies in the closed region.
    pub fn contains(&self, grid: &GridSpec, i: usize, j: usize) -> bool {
        let (lo, hi) = self.bounds(grid);
        let c = grid.center(i, j);
        c[0] >= lo[0] && c[0] <= hi[0] && c[1] >= lo[1] && c[1] <= hi[1]
    }

    /// Half-open index ranges `(i0..i1, j0..j1)` of the cells in the region.
    pub fn index_ranges(&self, grid: &GridSpec) -> (core::ops::Range<usize>, core::ops::Range<usize>) {
        let n = grid.n();
        let first = |axis: usize| (0..n).find(|&k| self.contains(grid, if axis == 0 { k } else { n / 2 }, if axis == 0 { n / 2 } else { k }));
        let last = |axis: usize| (0..n).rev().find(|&k| self.contains(grid, if axis == 0 { k } else { n / 2 }, if axis == 0 { n / 2 } else { k }));
        match (first(0), last(0), first(1), last(1)) {
            (Some(a), Some(b), Some(c), Some(d)) => (a..b + 1, c..d + 1),
            _ => (0..0, 0..0),
        }
    }

    /// Number of cells in the region.
    pub fn cell_count(&self, grid: &GridSpec) -> usize {
        let (a, b) = self.index_ranges(grid);
        a.len() * b.len()
    }
}

/// `h₁h₂·Σ f` over masked-in cells of the region.
///
/// Masked-out cells are skipped; an empty region is a domain error.
pub fn integrate(f: &ScalarField2D, region: &Region) -> Result<f64> {
    let grid = f.grid();
    let (ri, rj) = region.index_ranges(grid);
    if ri.is_empty() || rj.is_empty() {
        return Err(err!(Domain, "integration region contains no cells"));
    }
    let mut total = 0.0;
    let mut used = 0usize;
    for j in rj {
        let mut row = 0.0;
        for i in ri.clone() {
            if let Some(v) = f.get(i, j) {
                row += v;
                used += 1;
            }
        }
        total += row;
    }
    if used == 0 {
        return Err(err!(Domain, "integration region has no masked-in cells"));
    }
    Ok(total * grid.cell_area())
}

/// Number of masked-out cells inside the region.
pub fn masked_in_region<T: crate::field::FieldValue>(f: &Field2D<T>, region: &Region) -> usize {
    let (ri, rj) = region.index_ranges(f.grid());
    let mut k = 0;
    for j in rj {
        for i in ri.clone() {
            if !f.is_valid(i, j) {
                k += 1;
            }
        }
    }
    k
}

/// `(∫|f|^p)^{1/p}` by cell quadrature with the exact exponent.
pub fn lp_norm(f: &ScalarField2D, region: &Region, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(err!(Argument, "L^p norm needs p >= 1, got {p}"));
    }
    let s = integrate(&f.map(|v| pow(v.abs(), p)), region)?;
    Ok(pow(s, 1.0 / p))
}

/// The smooth radial bump `ζ(x) = exp(1 − 1/(1 − r²))`, `r = |x − c|/R`, for
/// `r < 1` and 0 otherwise. It equals 1 at the centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Bump {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(err!(Configuration, "bump radius must be positive"));
        }
        Ok(Self { center, radius })
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let r2 = hypot2([x[0] - self.center[0], x[1] - self.center[1]]) / (self.radius * self.radius);
        if r2 >= 1.0 {
            0.0
        } else {
            exp(1.0 - 1.0 / (1.0 - r2))
        }
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let r2 = hypot2(d) / (self.radius * self.radius);
        if r2 >= 1.0 {
            return [0.0, 0.0];
        }
        let q = 1.0 - r2;
        let s = -exp(1.0 - 1.0 / q) * 2.0 / (q * q * self.radius * self.radius);
        [s * d[0], s * d[1]]
    }

    /// Checks that the support stays at least `halo` away from the grid edge.
    pub fn check_support(&self, grid: &GridSpec, halo: f64) -> Result<()> {
        let lo = grid.origin();
        let e = grid.extent();
        let c = self.center;
        let r = self.radius + halo;
        if c[0] - r < lo[0] || c[1] - r < lo[1] || c[0] + r > lo[0] + e[0] || c[1] + r > lo[1] + e[1] {
            return Err(err!(Configuration, "bump support (centre {:?}, radius {}) plus halo {} leaves the domain", c, self.radius, halo));
        }
        Ok(())
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<ScalarField2D> {
        self.check_support(grid, grid.h_max())?;
        Ok(ScalarField2D::from_fn(*grid, |x| self.value(x)))
    }

    pub fn sample_gradient(&self, grid: &GridSpec) -> Result<VectorField2D> {
        self.check_support(grid, grid.h_max())?;
        Ok(VectorField2D::from_fn(*grid, |x| self.gradient(x)))
    }

    /// `sup |∇ζ|` by a dense radial scan.
    pub fn sup_gradient(&self) -> f64 {
        let mut best: f64 = 0.0;
        for k in 1..20_000 {
            let r = k as f64 / 20_000.0 * self.radius;
            let g = self.gradient([self.center[0] + r, self.center[1]]);
            best = best.max(sqrt(hypot2(g)));
        }
        best
    }
}

/// Samples the bump centred at `center` with support radius `radius`.
pub fn bump_test_function(grid: &GridSpec, center: [f64; 2], radius: f64) -> Result<ScalarField2D> {
    Bump::new(center, radius)?.sample(grid)
}
