//! Closed-form solutions of `|∇u| = 1`, their residuals and the half-space
//! indicator `χ(x, ξ)`.

use alloc::vec::Vec;

use crate::err;
use crate::error::Result;
use crate::fd;
use crate::field::{ScalarField2D, VectorField2D};
use crate::grid::GridSpec;
use crate::math::{abs, dot, norm, perp, sub};

const UNIT_TOL: f64 = 1e-12;

fn check_unit(v: [f64; 2], what: &str) -> Result<()> {
    if (norm(v) - 1.0).abs() > UNIT_TOL {
        return Err(err!(Argument, "{what} must be a unit vector, |v| = {}", norm(v)));
    }
    Ok(())
}

fn check_sign(alpha: f64) -> Result<()> {
    if alpha != 1.0 && alpha != -1.0 {
        return Err(err!(Argument, "vortex sign must be +1 or -1, got {alpha}"));
    }
    Ok(())
}

/// A roof: two planar pieces `u = g±·(x − p)` glued along the line through `p`
/// with unit normal `ν`. The `+` side is `{(x − p)·ν > 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roof {
    point: [f64; 2],
    normal: [f64; 2],
    g_plus: [f64; 2],
    g_minus: [f64; 2],
}

impl Roof {
    /// Validates `|g±| = 1`, `|ν| = 1` and continuity of the tangential
    /// derivative across the line.
    pub fn new(point: [f64; 2], normal: [f64; 2], g_plus: [f64; 2], g_minus: [f64; 2]) -> Result<Self> {
        check_unit(normal, "roof normal")?;
        check_unit(g_plus, "roof gradient g+")?;
        check_unit(g_minus, "roof gradient g-")?;
        let tangent = perp(normal);
        if abs(dot(sub(g_plus, g_minus), tangent)) > 1e-12 {
            return Err(err!(Argument, "roof side gradients must share their tangential component"));
        }
        Ok(Self { point, normal, g_plus, g_minus })
    }

    /// `u(x) = |x₂|`: jump line `x₂ = 0`, side gradients `(0, ±1)`.
    pub fn standard() -> Self {
        Self { point: [0.0, 0.0], normal: [0.0, 1.0], g_plus: [0.0, 1.0], g_minus: [0.0, -1.0] }
    }

    pub fn point(&self) -> [f64; 2] {
        self.point
    }
    pub fn normal(&self) -> [f64; 2] {
        self.normal
    }
    pub fn g_plus(&self) -> [f64; 2] {
        self.g_plus
    }
    pub fn g_minus(&self) -> [f64; 2] {
        self.g_minus
    }

    /// Signed distance to the jump line.
    pub fn signed_distance(&self, x: [f64; 2]) -> f64 {
        dot(sub(x, self.point), self.normal)
    }
}

/// Generators of exact Eikonal solutions.
#[derive(Debug, Clone, PartialEq)]
pub enum EikonalSolution {
    /// `u(x) = α|x − ζ|`.
    Vortex { center: [f64; 2], sign: f64 },
    /// `u(x) = ξ·x`.
    Planar { direction: [f64; 2] },
    Roof(Roof),
    /// `u(x) = |R − |x − c||`, the distance to the circle of radius `R`.
    BallDistance { center: [f64; 2], radius: f64 },
    /// `u(x) = minᵢ |x − ζᵢ|`.
    MultiPoint { points: Vec<[f64; 2]> },
}

impl EikonalSolution {
    pub fn vortex(center: [f64; 2], sign: f64) -> Result<Self> {
        check_sign(sign)?;
        Ok(Self::Vortex { center, sign })
    }

    pub fn planar(direction: [f64; 2]) -> Result<Self> {
        check_unit(direction, "planar direction")?;
        Ok(Self::Planar { direction })
    }

    pub fn roof(roof: Roof) -> Self {
        Self::Roof(roof)
    }

    pub fn ball_distance(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(err!(Argument, "ball radius must be positive"));
        }
        Ok(Self::BallDistance { center, radius })
    }

    pub fn multi_point(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(err!(Argument, "multi-point generator needs at least one point"));
        }
        Ok(Self::MultiPoint { points })
    }

    /// Closed-form `u(x)`.
    pub fn u(&self, x: [f64; 2]) -> f64 {
        match self {
            Self::Vortex { center, sign } => sign * norm(sub(x, *center)),
            Self::Planar { direction } => dot(*direction, x),
            Self::Roof(r) => {
                let g = if r.signed_distance(x) >= 0.0 { r.g_plus } else { r.g_minus };
                dot(g, sub(x, r.point))
            }
            Self::BallDistance { center, radius } => (radius - norm(sub(x, *center))).abs(),
            Self::MultiPoint { points } => points.iter().map(|p| norm(sub(x, *p))).fold(f64::INFINITY, f64::min),
        }
    }

    /// Closed-form `∇u(x)`, `None` exactly where the gradient is undefined.
    pub fn grad(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        let radial = |c: [f64; 2], s: f64| -> Option<[f64; 2]> {
            let d = sub(x, c);
            let r = norm(d);
            (r > 0.0).then(|| [s * d[0] / r, s * d[1] / r])
        };
        match self {
            Self::Vortex { center, sign } => radial(*center, *sign),
            Self::Planar { direction } => Some(*direction),
            Self::Roof(r) => {
                let s = r.signed_distance(x);
                if s > 0.0 {
                    Some(r.g_plus)
                } else if s < 0.0 {
                    Some(r.g_minus)
                } else {
                    None
                }
            }
            Self::BallDistance { center, radius } => {
                let r = norm(sub(x, *center));
                if r == *radius {
                    None
                } else {
                    radial(*center, if r < *radius { -1.0 } else { 1.0 })
                }
            }
            Self::MultiPoint { points } => {
                let (k, d1, d2) = nearest_two(points, x);
                if d1 == d2 {
                    None
                } else {
                    radial(points[k], 1.0)
                }
            }
        }
    }

    /// Whether cell `(i, j)` is excised from the gradient field.
    ///
    /// Point singularities remove the cells with `|x − ζ|_∞ ≤ h` (the 3×3 block
    /// when `ζ` is a cell centre). Line singularities remove the cells whose
    /// interior the singular curve crosses.
    pub fn excised(&self, grid: &GridSpec, i: usize, j: usize) -> bool {
        let x = grid.center(i, j);
        let h = grid.h();
        let near_point = |c: [f64; 2]| abs(x[0] - c[0]) <= h[0] * (1.0 + 1e-9) && abs(x[1] - c[1]) <= h[1] * (1.0 + 1e-9);
        match self {
            Self::Vortex { center, .. } => near_point(*center),
            Self::Planar { .. } => false,
            Self::Roof(r) => {
                let reach = 0.5 * (h[0] * abs(r.normal[0]) + h[1] * abs(r.normal[1]));
                abs(r.signed_distance(x)) < reach * (1.0 - 1e-9)
            }
            Self::BallDistance { center, radius } => {
                near_point(*center) || abs(norm(sub(x, *center)) - radius) < grid.half_diagonal()
            }
            Self::MultiPoint { points } => {
                let (_, d1, d2) = nearest_two(points, x);
                points.iter().any(|p| near_point(*p)) || d2 - d1 < 2.0 * grid.half_diagonal()
            }
        }
    }

    /// Samples `u` everywhere and `∇u` away from excised cells.
    pub fn sample(&self, grid: &GridSpec) -> (ScalarField2D, VectorField2D) {
        let u = ScalarField2D::from_fn(*grid, |x| self.u(x));
        let g = VectorField2D::from_index_fn(*grid, |i, j| {
            if self.excised(grid, i, j) {
                None
            } else {
                self.grad(grid.center(i, j))
            }
        });
        (u, g)
    }

    /// Points where `∇u` is undefined and isolated (vortex centres).
    pub fn point_singularities(&self) -> Vec<[f64; 2]> {
        match self {
            Self::Vortex { center, .. } | Self::BallDistance { center, .. } => alloc::vec![*center],
            Self::MultiPoint { points } => points.clone(),
            _ => Vec::new(),
        }
    }
}

fn nearest_two(points: &[[f64; 2]], x: [f64; 2]) -> (usize, f64, f64) {
    let mut best = (0usize, f64::INFINITY, f64::INFINITY);
    for (k, p) in points.iter().enumerate() {
        let d = norm(sub(x, *p));
        if d < best.1 {
            best = (k, d, best.1);
        } else if d < best.2 {
            best.2 = d;
        }
    }
    best
}

/// `max ||∇u| − 1|` over masked-in cells (0 for an empty field).
pub fn eikonal_residual(grad_u: &VectorField2D) -> f64 {
    grad_u.iter_valid().map(|(_, _, v)| abs(norm(v) - 1.0)).fold(0.0, f64::max)
}

/// The indicator `χ(x, ξ) = 1` if `m(x)·ξ > 0`, else 0 (ties map to 0).
pub fn chi(m: &VectorField2D, xi: [f64; 2]) -> Result<ScalarField2D> {
    check_unit(xi, "xi")?;
    Ok(m.map(|v| if dot(v, xi) > 0.0 { 1.0 } else { 0.0 }))
}

/// Weak form of `ξ·∇χ(·, ξ) = 0`: returns `∫ χ(x, ξ)·(ξ·∇ζ) dx`.
///
/// `∇ζ` is taken by centred differences. Cells of the test function's support
/// where `m` is masked out (excised cores) are skipped. The support of `ζ` must
/// stay two cells away from the grid edge.
pub fn jop_characteristic_residual(m: &VectorField2D, xi: [f64; 2], zeta: &ScalarField2D) -> Result<f64> {
    let c = chi(m, xi)?;
    let grid = *m.grid();
    if !grid.same_lattice(zeta.grid()) {
        return Err(err!(Configuration, "test function and field live on different grids"));
    }
    check_support(zeta)?;
    let dz = fd::gradient(zeta)?;
    let mut total = 0.0;
    for j in 0..grid.n() {
        let mut row = 0.0;
        for i in 0..grid.n() {
            if let (Some(g), Some(x)) = (dz.get(i, j), c.get(i, j)) {
                row += x * dot(xi, g);
            }
        }
        total += row;
    }
    Ok(total * grid.cell_area())
}

/// Fails when a test function is non-zero within two cells of the grid edge.
pub(crate) fn check_support(zeta: &ScalarField2D) -> Result<()> {
    let n = zeta.grid().n();
    for j in 0..n {
        for i in 0..n {
            let edge = i < 2 || j < 2 || i + 2 >= n || j + 2 >= n;
            if edge && zeta.get(i, j).is_some_and(|v| v != 0.0) {
                return Err(err!(Domain, "test function support reaches the grid edge at ({i}, {j})"));
            }
            if !edge && !zeta.is_valid(i, j) {
                return Err(err!(Domain, "test function is masked out at ({i}, {j})"));
            }
        }
    }
    Ok(())
}
