//! Singular-set detection for unit gradient fields and the local vortex fit
//! `u(x) = u(ζ) + α|x − ζ|`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::err;
use crate::error::Result;
use crate::fd;
use crate::field::{ScalarField2D, VectorField2D};
use crate::math::{abs, hypot2, norm, sqrt};
use crate::mollify::ball_offsets;

/// Default exceedance factor over `1/dist(x, ∂Ω)` for [`detect_singularities`].
pub const DEFAULT_THRESHOLD_FACTOR: f64 = 20.0;
/// Clusters wider than this fraction of the domain are line-like.
pub const LINE_LIKE_FRACTION: f64 = 0.1;
/// Acceptance bound of [`vortex_fit`] in units of the cell size.
pub const FIT_TOLERANCE_CELLS: f64 = 5.0;
/// Cells closer than this many cell sizes to `ζ` are left out of the gradient check.
pub const FIT_CORE_CELLS: f64 = 4.0;

/// `sup_{h ≤ |y| ≤ scale} |∇u(x+y) − ∇u(x)|/|y|` over masked-in pairs.
pub fn lipschitz_map(grad_u: &VectorField2D, scale: f64) -> Result<ScalarField2D> {
    let grid = *grad_u.grid();
    let h = grid.h();
    let hmin = h[0].min(h[1]);
    if scale < 2.0 * grid.h_max() * (1.0 - 1e-12) {
        return Err(err!(Resolution, "Lipschitz scale {scale} is below 2h"));
    }
    let offsets: Vec<((isize, isize), f64)> = ball_offsets(&grid, scale, true)
        .into_iter()
        .filter_map(|(di, dj)| {
            let r = norm(grid.offset(di, dj));
            (r >= hmin * (1.0 - 1e-12)).then_some(((di, dj), 1.0 / r))
        })
        .collect();
    Ok(ScalarField2D::from_index_fn(grid, |i, j| {
        let c = grad_u.get(i, j)?;
        let mut best = 0.0f64;
        for &((di, dj), inv) in &offsets {
            if let Some(v) = grad_u.get_offset(i, j, di, dj) {
                best = best.max(norm([v[0] - c[0], v[1] - c[1]]) * inv);
            }
        }
        Some(best)
    }))
}

/// An 8-connected group of cells whose Lipschitz estimate exceeds the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub cells: Vec<(usize, usize)>,
    /// Largest distance between two cell centres of the cluster.
    pub diameter: f64,
    /// Largest Lipschitz estimate in the cluster.
    pub peak: f64,
    /// Centroid of the cells within half of the peak.
    pub centroid: [f64; 2],
    pub line_like: bool,
}

/// Output of [`detect_singularities`].
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub clusters: Vec<Cluster>,
    /// Centroids of the point-like clusters.
    pub candidates: Vec<[f64; 2]>,
    /// Whether some cluster is line-like (the field has a jump set).
    pub line_like: bool,
}

/// Flags cells where the Lipschitz estimate at scale `2h` exceeds
/// `threshold_factor / dist(x, ∂Ω)` and groups them into 8-connected
/// clusters. Masked-out cells, where `∇u` is undefined, join the cluster of an
/// adjacent flagged cell but never start one.
///
/// A cluster wider than [`LINE_LIKE_FRACTION`] of the domain is reported as
/// line-like and yields no candidate. Otherwise its candidate point is the
/// centroid of its cells within half of the cluster peak.
pub fn detect_singularities(grad_u: &VectorField2D, threshold_factor: f64) -> Result<SingularityReport> {
    if !(threshold_factor > 0.0) {
        return Err(err!(Argument, "threshold factor must be positive"));
    }
    let grid = *grad_u.grid();
    let lip = lipschitz_map(grad_u, 2.0 * grid.h_max())?;
    let mut flagged = vec![false; grid.len()];
    for (i, j, l) in lip.iter_valid() {
        let d = grid.dist_to_boundary(grid.center(i, j));
        flagged[grid.index(i, j)] = l * d > threshold_factor;
    }
    let mut seen = vec![false; grid.len()];
    let mut clusters = Vec::new();
    for start in 0..grid.len() {
        if !flagged[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([grid.coords(start)]);
        let mut cells = Vec::new();
        while let Some((i, j)) = queue.pop_front() {
            cells.push((i, j));
            for dj in -1isize..=1 {
                for di in -1isize..=1 {
                    let Some((a, b)) = grid.shift(i, j, di, dj) else { continue };
                    let k = grid.index(a, b);
                    if (flagged[k] || grad_u.get(a, b).is_none()) && !seen[k] {
                        seen[k] = true;
                        queue.push_back((a, b));
                    }
                }
            }
        }
        cells.sort_unstable_by_key(|&(i, j)| (j, i));
        clusters.push(summarise(&grid, &lip, cells));
    }
    let candidates = clusters.iter().filter(|c| !c.line_like).map(|c| c.centroid).collect();
    let line_like = clusters.iter().any(|c| c.line_like);
    Ok(SingularityReport { clusters, candidates, line_like })
}

fn summarise(grid: &crate::grid::GridSpec, lip: &ScalarField2D, cells: Vec<(usize, usize)>) -> Cluster {
    let peak = cells.iter().filter_map(|&(i, j)| lip.get(i, j)).fold(0.0, f64::max);
    let mut sum = [0.0; 2];
    let mut count = 0.0;
    for &(i, j) in &cells {
        if lip.get(i, j).is_some_and(|l| l >= 0.5 * peak) {
            let c = grid.center(i, j);
            sum[0] += c[0];
            sum[1] += c[1];
            count += 1.0;
        }
    }
    // large clusters use the bounding-box side, a lower bound on the diameter
    let pts: Vec<[f64; 2]> = cells.iter().map(|&(i, j)| grid.center(i, j)).collect();
    let diameter = if pts.len() <= 2048 {
        let mut d2 = 0.0f64;
        for (k, a) in pts.iter().enumerate() {
            for b in &pts[k + 1..] {
                d2 = d2.max(hypot2([a[0] - b[0], a[1] - b[1]]));
            }
        }
        sqrt(d2)
    } else {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &pts {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (hi[0] - lo[0]).max(hi[1] - lo[1])
    };
    Cluster {
        cells,
        diameter,
        peak,
        centroid: [sum[0] / count, sum[1] / count],
        line_like: diameter > LINE_LIKE_FRACTION * grid.width(),
    }
}

/// A fitted vortex `u(x) = u(ζ) + α|x − ζ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub zeta: [f64; 2],
    /// `±1`.
    pub alpha: f64,
    /// Fitted `u(ζ)`.
    pub offset: f64,
    /// `max |u(x) − u(ζ) − α|x − ζ||` over the neighbourhood.
    pub fit_residual: f64,
    /// `max |∇_h u − α∇_h|x − ζ||` outside the core.
    pub gradient_residual: f64,
    pub radius: f64,
    pub accepted: bool,
}

/// Fits `α ∈ {−1, +1}` and `u(ζ)` on the ball `|x − ζ| ≤ radius` by minimising
/// the sup residual, then compares the discrete gradients of `u` and
/// `α|x − ζ|` at distance at least `4h` from `ζ`. The fit is accepted when both
/// residuals are at most `5h`; otherwise neither sign describes a vortex and a
/// structure error is returned.
pub fn vortex_fit(u: &ScalarField2D, zeta: [f64; 2], radius: f64) -> Result<SingularPoint> {
    let grid = *u.grid();
    let h = grid.h_max();
    if radius < FIT_CORE_CELLS * h + h {
        return Err(err!(Resolution, "fit radius {radius} is too small for the grid"));
    }
    if grid.dist_to_boundary(zeta) < radius + 2.0 * h || !grid.contains(zeta) {
        return Err(err!(Domain, "fit ball around {zeta:?} with radius {radius} leaves the grid"));
    }
    let du = fd::gradient(u)?;
    let cone = ScalarField2D::from_fn(grid, |x| norm([x[0] - zeta[0], x[1] - zeta[1]]));
    let dcone = fd::gradient(&cone)?;
    let core = FIT_CORE_CELLS * h;
    let mut samples = Vec::new();
    let mut grads = Vec::new();
    for (i, j) in ball_offsets(&grid, radius, true).into_iter().filter_map(|(di, dj)| {
        let (ci, cj) = grid.nearest(zeta);
        grid.shift(ci, cj, di, dj)
    }) {
        let r = cone.raw(i, j);
        if r > radius {
            continue;
        }
        match u.get(i, j) {
            Some(v) => samples.push((v, r)),
            None if r < core => continue,
            None => return Err(err!(Precondition, "u is masked out at ({i}, {j}) outside the core")),
        }
        if r >= core {
            let (Some(g), Some(c)) = (du.get(i, j), dcone.get(i, j)) else {
                return Err(err!(Precondition, "gradient stencil missing at ({i}, {j}) outside the core"));
            };
            grads.push((g, c));
        }
    }
    if samples.is_empty() {
        return Err(err!(Domain, "no cells in the fit ball"));
    }
    let fit = |alpha: f64| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(v, r) in &samples {
            let d = v - alpha * r;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let offset = 0.5 * (lo + hi);
        let res = 0.5 * (hi - lo);
        let gres = grads
            .iter()
            .map(|(g, c)| abs(g[0] - alpha * c[0]).max(abs(g[1] - alpha * c[1])))
            .fold(0.0, f64::max);
        (offset, res, gres)
    };
    let (a, b) = (fit(1.0), fit(-1.0));
    let (alpha, (offset, res, gres)) = if a.1 <= b.1 { (1.0, a) } else { (-1.0, b) };
    let tol = FIT_TOLERANCE_CELLS * h;
    if res > tol || gres > tol {
        return Err(err!(
            Structure,
            "no vortex at {zeta:?}: best sign {alpha} leaves residuals {res:.3e} (values) and {gres:.3e} (gradients) above {tol:.3e}"
        ));
    }
    Ok(SingularPoint { zeta, alpha, offset, fit_residual: res, gradient_residual: gres, radius, accepted: true })
}
