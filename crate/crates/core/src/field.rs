//! Masked fields sampled at the cell centres of a [`GridSpec`].
//!
//! A field stores one value per cell and a validity flag per cell. Invalid
//! ("masked-out") cells mark excised singular points or the shrinking halo left
//! by stencil operations; their stored value is meaningless.

use alloc::vec::Vec;

use crate::err;
use crate::error::Result;
use crate::grid::GridSpec;

/// A 2×2 matrix stored by rows: `m[i][j]` is row `i`, column `j`.
pub type Mat2 = [[f64; 2]; 2];

pub type ScalarField2D = Field2D<f64>;
pub type VectorField2D = Field2D<[f64; 2]>;
pub type MatrixField2D = Field2D<Mat2>;

/// Values that can live in a field.
pub trait FieldValue: Copy {
    fn is_finite(&self) -> bool;
    fn nan() -> Self;
}

/// Values closed under linear combinations, used by stencils and convolutions.
pub trait Linear: FieldValue {
    fn zero() -> Self;
    fn add_scaled(self, other: Self, w: f64) -> Self;
    fn scale(self, w: f64) -> Self;
}

impl FieldValue for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn nan() -> Self {
        f64::NAN
    }
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(self, other: Self, w: f64) -> Self {
        self + w * other
    }
    fn scale(self, w: f64) -> Self {
        self * w
    }
}

impl FieldValue for [f64; 2] {
    fn is_finite(&self) -> bool {
        self[0].is_finite() && self[1].is_finite()
    }
    fn nan() -> Self {
        [f64::NAN; 2]
    }
}

impl Linear for [f64; 2] {
    fn zero() -> Self {
        [0.0; 2]
    }
    fn add_scaled(self, o: Self, w: f64) -> Self {
        [self[0] + w * o[0], self[1] + w * o[1]]
    }
    fn scale(self, w: f64) -> Self {
        [self[0] * w, self[1] * w]
    }
}

impl FieldValue for Mat2 {
    fn is_finite(&self) -> bool {
        self[0][0].is_finite() && self[0][1].is_finite() && self[1][0].is_finite() && self[1][1].is_finite()
    }
    fn nan() -> Self {
        [[f64::NAN; 2]; 2]
    }
}

impl Linear for Mat2 {
    fn zero() -> Self {
        [[0.0; 2]; 2]
    }
    fn add_scaled(self, o: Self, w: f64) -> Self {
        [
            [self[0][0] + w * o[0][0], self[0][1] + w * o[0][1]],
            [self[1][0] + w * o[1][0], self[1][1] + w * o[1][1]],
        ]
    }
    fn scale(self, w: f64) -> Self {
        [[self[0][0] * w, self[0][1] * w], [self[1][0] * w, self[1][1] * w]]
    }
}

/// A sampled field with a per-cell validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D<T> {
    grid: GridSpec,
    values: Vec<T>,
    mask: Vec<bool>,
}

impl<T: FieldValue> Field2D<T> {
    /// Builds a field from raw parts.
    ///
    /// Fails if the lengths disagree with the grid or a masked-in value is not
    /// finite.
    pub fn from_parts(grid: GridSpec, values: Vec<T>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || mask.len() != grid.len() {
            return Err(err!(Configuration, "field has {} values / {} flags for {} cells", values.len(), mask.len(), grid.len()));
        }
        if let Some(k) = (0..values.len()).find(|&k| mask[k] && !values[k].is_finite()) {
            let (i, j) = grid.coords(k);
            return Err(err!(Domain, "non-finite value at masked-in cell ({i}, {j})"));
        }
        Ok(Self { grid, values, mask })
    }

    /// Samples `f` at every cell centre. Non-finite samples are masked out.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut([f64; 2]) -> T) -> Self {
        Self::from_fn_masked(grid, |x| Some(f(x)))
    }

    /// Samples `f` at every cell centre; `None` or non-finite samples are
    /// masked out.
    pub fn from_fn_masked(grid: GridSpec, mut f: impl FnMut([f64; 2]) -> Option<T>) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut mask = Vec::with_capacity(grid.len());
        for j in 0..grid.n() {
            for i in 0..grid.n() {
                match f(grid.center(i, j)) {
                    Some(v) if v.is_finite() => {
                        values.push(v);
                        mask.push(true);
                    }
                    _ => {
                        values.push(T::nan());
                        mask.push(false);
                    }
                }
            }
        }
        Self { grid, values, mask }
    }

    /// Per-cell construction from indices: `f(i, j)`.
    pub fn from_index_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> Option<T>) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        let mut mask = Vec::with_capacity(grid.len());
        for j in 0..grid.n() {
            for i in 0..grid.n() {
                match f(i, j) {
                    Some(v) if v.is_finite() => {
                        values.push(v);
                        mask.push(true);
                    }
                    _ => {
                        values.push(T::nan());
                        mask.push(false);
                    }
                }
            }
        }
        Self { grid, values, mask }
    }

    pub fn constant(grid: GridSpec, v: T) -> Self {
        Self::from_fn(grid, |_| v)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn into_parts(self) -> (GridSpec, Vec<T>, Vec<bool>) {
        (self.grid, self.values, self.mask)
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.mask[self.grid.index(i, j)]
    }

    /// Value at `(i, j)` when masked in.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let k = self.grid.index(i, j);
        if self.mask[k] {
            Some(self.values[k])
        } else {
            None
        }
    }

    /// Stored value regardless of the mask.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    /// Value at the neighbour `(i + di, j + dj)` if it exists and is masked in.
    #[inline]
    pub fn get_offset(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<T> {
        let (a, b) = self.grid.shift(i, j, di, dj)?;
        self.get(a, b)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    /// Pointwise map; masked-out cells stay masked out.
    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U) -> Field2D<U> {
        let mut values = Vec::with_capacity(self.values.len());
        let mut mask = Vec::with_capacity(self.values.len());
        for (v, &m) in self.values.iter().zip(&self.mask) {
            if m {
                let u = f(*v);
                if u.is_finite() {
                    values.push(u);
                    mask.push(true);
                    continue;
                }
            }
            values.push(U::nan());
            mask.push(false);
        }
        Field2D { grid: self.grid, values, mask }
    }

    /// Pointwise map that also receives the cell centre.
    pub fn map_with_position<U: FieldValue>(&self, f: impl Fn([f64; 2], T) -> U) -> Field2D<U> {
        Field2D::from_index_fn(self.grid, |i, j| self.get(i, j).map(|v| f(self.grid.center(i, j), v)))
    }

    /// Pointwise combination of two fields on the same lattice; the output mask
    /// is the intersection of both masks.
    pub fn zip_with<U: FieldValue, V: FieldValue>(&self, other: &Field2D<U>, f: impl Fn(T, U) -> V) -> Result<Field2D<V>> {
        if !self.grid.same_lattice(&other.grid) {
            return Err(err!(Configuration, "fields live on different grids"));
        }
        Ok(Field2D::from_index_fn(self.grid, |i, j| match (self.get(i, j), other.get(i, j)) {
            (Some(a), Some(b)) => Some(f(a, b)),
            _ => None,
        }))
    }

    /// Copy with the mask intersected with `keep`.
    pub fn restrict(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        Field2D::from_index_fn(self.grid, |i, j| if keep(i, j) { self.get(i, j) } else { None })
    }

    /// Iterates over `(i, j, value)` of masked-in cells in storage order.
    pub fn iter_valid(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.grid.n();
        self.values
            .iter()
            .zip(&self.mask)
            .enumerate()
            .filter(|(_, (_, m))| **m)
            .map(move |(k, (v, _))| (k % n, k / n, *v))
    }
}

impl ScalarField2D {
    /// Largest masked-in value, `None` when every cell is masked out.
    pub fn max_value(&self) -> Option<f64> {
        self.iter_valid().map(|(_, _, v)| v).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Smallest masked-in value.
    pub fn min_value(&self) -> Option<f64> {
        self.iter_valid().map(|(_, _, v)| v).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }
}

impl VectorField2D {
    pub fn component(&self, c: usize) -> ScalarField2D {
        self.map(|v| v[c])
    }

    /// Pointwise anticlockwise rotation `(v₁, v₂) ↦ (−v₂, v₁)`.
    pub fn perp(&self) -> VectorField2D {
        self.map(|v| [-v[1], v[0]])
    }

    /// Pointwise Euclidean norm.
    pub fn norm(&self) -> ScalarField2D {
        self.map(crate::math::norm)
    }
}

impl MatrixField2D {
    /// Row `r` as a vector field.
    pub fn row(&self, r: usize) -> VectorField2D {
        self.map(|m| m[r])
    }
}

/// Pointwise rotation by `π/2`, the field form of `z⊥ = (−z₂, z₁)`.
pub fn perp(v: &VectorField2D) -> VectorField2D {
    v.perp()
}
