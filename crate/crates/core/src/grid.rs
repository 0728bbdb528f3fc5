//! Uniform cell-centred grids on axis-aligned rectangles.

use crate::err;
use crate::error::Result;
use crate::math::{abs, floor, sqrt};

/// Minimum number of cells per axis.
pub const MIN_CELLS: usize = 8;

/// A rectangle `[origin, origin + extent]` split into `n × n` cells.
///
/// Samples live at cell centres `origin + (i + ½, j + ½)·h`, so every sample
/// sits strictly inside the closed rectangle. Cells are stored row-major with
/// `i` running along `x₁` and `j` along `x₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    origin: [f64; 2],
    extent: [f64; 2],
    n: usize,
}

impl GridSpec {
    pub fn new(origin: [f64; 2], extent: [f64; 2], n: usize) -> Result<Self> {
        if n < MIN_CELLS {
            return Err(err!(Configuration, "grid needs n >= {MIN_CELLS}, got {n}"));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(err!(Configuration, "grid origin must be finite"));
        }
        if !(extent[0] > 0.0 && extent[1] > 0.0 && extent[0].is_finite() && extent[1].is_finite()) {
            return Err(err!(Configuration, "grid extent must be positive and finite"));
        }
        Ok(Self { origin, extent, n })
    }

    /// Square grid of side `side` with lower-left corner `origin`.
    pub fn square(origin: [f64; 2], side: f64, n: usize) -> Result<Self> {
        Self::new(origin, [side, side], n)
    }

    /// The unit square `[-½, ½]²`.
    pub fn unit_centered(n: usize) -> Result<Self> {
        Self::square([-0.5, -0.5], 1.0, n)
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn extent(&self) -> [f64; 2] {
        self.extent
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell spacing per axis.
    pub fn h(&self) -> [f64; 2] {
        [self.extent[0] / self.n as f64, self.extent[1] / self.n as f64]
    }

    /// Largest spacing of the two axes.
    pub fn h_max(&self) -> f64 {
        let h = self.h();
        if h[0] > h[1] {
            h[0]
        } else {
            h[1]
        }
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.h();
        h[0] * h[1]
    }

    /// Half the diagonal of one cell.
    pub fn half_diagonal(&self) -> f64 {
        let h = self.h();
        0.5 * sqrt(h[0] * h[0] + h[1] * h[1])
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.h();
        [
            self.origin[0] + (i as f64 + 0.5) * h[0],
            self.origin[1] + (j as f64 + 0.5) * h[1],
        ]
    }

    /// Physical displacement of the integer offset `(di, dj)`.
    #[inline]
    pub fn offset(&self, di: isize, dj: isize) -> [f64; 2] {
        let h = self.h();
        [di as f64 * h[0], dj as f64 * h[1]]
    }

    /// Neighbour `(i + di, j + dj)` if it lies on the grid.
    #[inline]
    pub fn shift(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<(usize, usize)> {
        let a = i as isize + di;
        let b = j as isize + dj;
        let n = self.n as isize;
        if a < 0 || b < 0 || a >= n || b >= n {
            None
        } else {
            Some((a as usize, b as usize))
        }
    }

    /// Whether `p` lies in the closed rectangle.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.origin[0]
            && p[1] >= self.origin[1]
            && p[0] <= self.origin[0] + self.extent[0]
            && p[1] <= self.origin[1] + self.extent[1]
    }

    /// Cell whose closed footprint contains `p`.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        let h = self.h();
        let clamp = |t: f64| -> usize {
            let k = floor(t);
            if k < 0.0 {
                0
            } else if k as usize >= self.n {
                self.n - 1
            } else {
                k as usize
            }
        };
        Some((clamp((p[0] - self.origin[0]) / h[0]), clamp((p[1] - self.origin[1]) / h[1])))
    }

    /// Cell whose centre is nearest to `p` (ties resolved towards lower indices).
    pub fn nearest(&self, p: [f64; 2]) -> (usize, usize) {
        let h = self.h();
        let pick = |t: f64| -> usize {
            let k = floor(t);
            if k < 0.0 {
                0
            } else if k as usize >= self.n {
                self.n - 1
            } else {
                k as usize
            }
        };
        (pick((p[0] - self.origin[0]) / h[0]), pick((p[1] - self.origin[1]) / h[1]))
    }

    /// Distance from `p` to the rectangle boundary (0 outside).
    pub fn dist_to_boundary(&self, p: [f64; 2]) -> f64 {
        if !self.contains(p) {
            return 0.0;
        }
        let dx = (p[0] - self.origin[0]).min(self.origin[0] + self.extent[0] - p[0]);
        let dy = (p[1] - self.origin[1]).min(self.origin[1] + self.extent[1] - p[1]);
        dx.min(dy)
    }

    /// Centre of the rectangle.
    pub fn midpoint(&self) -> [f64; 2] {
        [self.origin[0] + 0.5 * self.extent[0], self.origin[1] + 0.5 * self.extent[1]]
    }

    /// Largest side length.
    pub fn width(&self) -> f64 {
        self.extent[0].max(self.extent[1])
    }

    /// Same rectangle, `n` cells per axis.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.origin, self.extent, n)
    }

    /// Whether two grids describe the same lattice.
    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && abs(self.origin[0] - other.origin[0]) <= 1e-12 * self.width()
            && abs(self.origin[1] - other.origin[1]) <= 1e-12 * self.width()
            && abs(self.extent[0] - other.extent[0]) <= 1e-12 * self.width()
            && abs(self.extent[1] - other.extent[1]) <= 1e-12 * self.width()
    }
}
