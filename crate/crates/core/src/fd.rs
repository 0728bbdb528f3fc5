//! Centred second-order finite differences on masked fields.
//!
//! An output cell is masked in only when every stencil cell is masked in, so
//! masks shrink by one cell per derivative and never extrapolate.

use crate::err;
use crate::error::Result;
use crate::field::{Field2D, FieldValue, Linear, Mat2, MatrixField2D, ScalarField2D, VectorField2D};
use crate::grid::MIN_CELLS;

fn check<T: FieldValue>(f: &Field2D<T>) -> Result<()> {
    if f.grid().n() < MIN_CELLS {
        return Err(err!(Configuration, "grid too small for finite differences"));
    }
    Ok(())
}

/// `(∂₁f, ∂₂f)` at `(i, j)` from the five-point stencil.
#[inline]
fn partials<T: Linear>(f: &Field2D<T>, i: usize, j: usize) -> Option<(T, T)> {
    f.get(i, j)?;
    let h = f.grid().h();
    let e = f.get_offset(i, j, 1, 0)?;
    let w = f.get_offset(i, j, -1, 0)?;
    let nn = f.get_offset(i, j, 0, 1)?;
    let s = f.get_offset(i, j, 0, -1)?;
    Some((e.add_scaled(w, -1.0).scale(0.5 / h[0]), nn.add_scaled(s, -1.0).scale(0.5 / h[1])))
}

/// Generic centred derivative pair for any linear value type.
pub fn partial_derivatives<T: Linear>(f: &Field2D<T>) -> Result<(Field2D<T>, Field2D<T>)> {
    check(f)?;
    let g = *f.grid();
    let d1 = Field2D::from_index_fn(g, |i, j| partials(f, i, j).map(|p| p.0));
    let d2 = Field2D::from_index_fn(g, |i, j| partials(f, i, j).map(|p| p.1));
    Ok((d1, d2))
}

/// Gradient `(∂₁f, ∂₂f)` by centred differences.
pub fn gradient(f: &ScalarField2D) -> Result<VectorField2D> {
    check(f)?;
    Ok(Field2D::from_index_fn(*f.grid(), |i, j| partials(f, i, j).map(|(a, b)| [a, b])))
}

/// Divergence `∂₁v₁ + ∂₂v₂`.
pub fn divergence(v: &VectorField2D) -> Result<ScalarField2D> {
    check(v)?;
    Ok(Field2D::from_index_fn(*v.grid(), |i, j| partials(v, i, j).map(|(a, b)| a[0] + b[1])))
}

/// Scalar curl `∂₁v₂ − ∂₂v₁`.
pub fn curl(v: &VectorField2D) -> Result<ScalarField2D> {
    check(v)?;
    Ok(Field2D::from_index_fn(*v.grid(), |i, j| partials(v, i, j).map(|(a, b)| a[1] - b[0])))
}

/// Jacobian `J[i][k] = ∂ₖvᵢ`.
pub fn jacobian(v: &VectorField2D) -> Result<MatrixField2D> {
    check(v)?;
    Ok(Field2D::from_index_fn(*v.grid(), |i, j| {
        partials(v, i, j).map(|(a, b)| [[a[0], b[0]], [a[1], b[1]]])
    }))
}

/// Curl of each row of a matrix field: component `r` is `∂₁M_{r2} − ∂₂M_{r1}`.
pub fn curl_rows(m: &MatrixField2D) -> Result<VectorField2D> {
    check(m)?;
    Ok(Field2D::from_index_fn(*m.grid(), |i, j| {
        partials(m, i, j).map(|(a, b)| [a[0][1] - b[0][0], a[1][1] - b[1][0]])
    }))
}

/// Hessian from the nine-point stencil (`u₁₁`, `u₂₂` three-point, `u₁₂` from the corners).
pub fn hessian(f: &ScalarField2D) -> Result<MatrixField2D> {
    check(f)?;
    let g = *f.grid();
    let h = g.h();
    Ok(Field2D::from_index_fn(g, |i, j| {
        let c = f.get(i, j)?;
        let mut s = [[0.0; 3]; 3];
        for (a, row) in s.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = f.get_offset(i, j, a as isize - 1, b as isize - 1)?;
            }
        }
        let u11 = (s[2][1] - 2.0 * c + s[0][1]) / (h[0] * h[0]);
        let u22 = (s[1][2] - 2.0 * c + s[1][0]) / (h[1] * h[1]);
        let u12 = (s[2][2] - s[2][0] - s[0][2] + s[0][0]) / (4.0 * h[0] * h[1]);
        Some([[u11, u12], [u12, u22]])
    }))
}

/// Laplacian as the trace of [`hessian`].
pub fn laplacian(f: &ScalarField2D) -> Result<ScalarField2D> {
    Ok(hessian(f)?.map(|m: Mat2| m[0][0] + m[1][1]))
}

/// Largest masked-in magnitude of a scalar field, 0 when empty.
pub fn max_abs<T: FieldValue>(f: &Field2D<T>, norm: impl Fn(T) -> f64) -> f64 {
    f.iter_valid().map(|(_, _, v)| norm(v)).fold(0.0, f64::max)
}
