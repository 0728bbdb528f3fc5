//! The matrix set `K`, the transform `Γ` between Eikonal gradients and
//! constrained Beltrami maps, and the determinant kernel of `K`.
//!
//! `K = { M(θ) : θ ∈ [0, 2π) }` with
//!
//! ```text
//! M(θ) = [[ s(1 − c² − s²/3),   c(1 − s² − c²/3) ],
//!         [ −c(1 − 2c²/3),      s(1 − 2s²/3)     ]],   c = cos θ, s = sin θ.
//! ```

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::err;
use crate::error::{Error, Result};
use crate::fd;
use crate::field::{Mat2, MatrixField2D, ScalarField2D, VectorField2D};
use crate::math::{abs, atan2, cos, golden_min, hypot2, sin, sqrt, wrap_tau, TAU};

/// Default distance-to-`K` tolerance for analytic inputs.
pub const DEFAULT_K_TOLERANCE: f64 = 1e-6;
/// Default bound on the L¹ mass of the discrete curl of `DF`.
pub const DEFAULT_CURL_TOLERANCE: f64 = 0.25;
/// Default tolerance on `||∇u| − 1|` accepted by [`gamma_forward`].
pub const DEFAULT_UNIT_TOLERANCE: f64 = 1e-9;

fn frob_sq(a: Mat2) -> f64 {
    a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1]
}

fn mat_sub(a: Mat2, b: Mat2) -> Mat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// `det A`.
pub fn det(a: Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Splits `A` into its conformal part `[A]_c` and anticonformal part `[A]_a`.
///
/// `det A = det [A]_c + det [A]_a` holds exactly up to rounding.
pub fn conformal_split(a: Mat2) -> (Mat2, Mat2) {
    let p = 0.5 * (a[0][0] + a[1][1]);
    let q = 0.5 * (a[0][1] - a[1][0]);
    let r = 0.5 * (a[0][0] - a[1][1]);
    let t = 0.5 * (a[0][1] + a[1][0]);
    ([[p, q], [-q, p]], [[r, t], [t, -r]])
}

/// `M(θ)`.
pub fn k_value(theta: f64) -> Mat2 {
    let (s, c) = (sin(theta), cos(theta));
    [
        [s * (1.0 - c * c - s * s / 3.0), c * (1.0 - s * s - c * c / 3.0)],
        [-c * (1.0 - 2.0 * c * c / 3.0), s * (1.0 - 2.0 * s * s / 3.0)],
    ]
}

/// A point of `K` together with its phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMatrix {
    pub theta: f64,
    pub matrix: Mat2,
}

impl KMatrix {
    /// `½[[sin θ, cos θ], [−cos θ, sin θ]]`.
    pub fn conformal(&self) -> Mat2 {
        conformal_split(self.matrix).0
    }

    /// `(1/6)[[−sin 3θ, cos 3θ], [cos 3θ, sin 3θ]]`.
    pub fn anticonformal(&self) -> Mat2 {
        conformal_split(self.matrix).1
    }

    /// Full Frobenius norm squared; constant `5/9` on `K`.
    ///
    /// Halving this gives the `10/36` of the half-norm convention.
    pub fn frobenius_sq(&self) -> f64 {
        frob_sq(self.matrix)
    }
}

/// `M(θ)` with `θ` reduced to `[0, 2π)`.
pub fn k_matrix(theta: f64) -> KMatrix {
    let t = wrap_tau(theta);
    KMatrix { theta: t, matrix: k_value(t) }
}

/// Complex derivatives of `v = F¹ + iF²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirtingerPair {
    pub dz: Complex64,
    pub dzbar: Complex64,
}

impl WirtingerPair {
    /// Reads `∂v/∂z` from `[DF]_c` and `∂v/∂z̄` from `[DF]_a`.
    pub fn from_jacobian(a: Mat2) -> Self {
        let (c, an) = conformal_split(a);
        WirtingerPair { dz: Complex64::new(c[0][0], -c[0][1]), dzbar: Complex64::new(an[0][0], an[0][1]) }
    }

    /// Rebuilds the Jacobian from the pair.
    pub fn to_jacobian(&self) -> Mat2 {
        let (p, q) = (self.dz.re, -self.dz.im);
        let (r, t) = (self.dzbar.re, self.dzbar.im);
        [[p + r, q + t], [t - q, p - r]]
    }
}

/// `(|∂v/∂z̄ − (4/3)(∂v/∂z)³|, ||∂v/∂z| − ½|)` at one matrix.
pub fn beltrami_pointwise(a: Mat2) -> (f64, f64) {
    let w = WirtingerPair::from_jacobian(a);
    let r1 = (w.dzbar - w.dz * w.dz * w.dz * (4.0 / 3.0)).norm();
    let r2 = abs(w.dz.norm() - 0.5);
    (r1, r2)
}

/// Cellwise [`beltrami_pointwise`].
pub fn beltrami_residual(df: &MatrixField2D) -> (ScalarField2D, ScalarField2D) {
    (df.map(|a| beltrami_pointwise(a).0), df.map(|a| beltrami_pointwise(a).1))
}

/// The phase read from `cos θ = A₁₂ − A₂₁`, `sin θ = A₁₁ + A₂₂`, in `[0, 2π)`.
fn phase_guess(a: Mat2) -> f64 {
    wrap_tau(atan2(a[0][0] + a[1][1], a[0][1] - a[1][0]))
}

/// Frobenius distance from `A` to `K` with the minimising phase.
pub fn distance_to_k(a: Mat2) -> (f64, f64) {
    const COARSE: usize = 256;
    let f = |t: f64| sqrt(frob_sq(mat_sub(a, k_value(t))));
    let mut best = (f(phase_guess(a)), phase_guess(a));
    for k in 0..COARSE {
        let t = TAU * k as f64 / COARSE as f64;
        let d = f(t);
        if d < best.0 {
            best = (d, t);
        }
    }
    let step = TAU / COARSE as f64;
    let (t, d) = golden_min(best.1 - step, best.1 + step, 80, f);
    if d < best.0 {
        best = (d, t);
    }
    (best.0, wrap_tau(best.1))
}

fn check_near_k(a: Mat2, tol: f64) -> Result<f64> {
    let theta = phase_guess(a);
    let quick = sqrt(frob_sq(mat_sub(a, k_value(theta))));
    if quick <= tol {
        return Ok(theta);
    }
    let (d, _) = distance_to_k(a);
    if d > tol {
        return Err(Error::FarFromK { distance: d, tolerance: tol });
    }
    Ok(theta)
}

/// Recovers `θ` with `M(θ) ≈ A`.
pub fn phase_recover(a: Mat2, tol: f64) -> Result<f64> {
    check_near_k(a, tol)
}

/// `DF_u` at one gradient, valid for any vector though it lies in `K` only for
/// unit vectors.
pub fn gamma_matrix(g: [f64; 2]) -> Mat2 {
    let (u1, u2) = (g[0], g[1]);
    [
        [u2 * (1.0 - u1 * u1 - u2 * u2 / 3.0), u1 * (1.0 - u2 * u2 - u1 * u1 / 3.0)],
        [-u1 * (1.0 - 2.0 * u1 * u1 / 3.0), u2 * (1.0 - 2.0 * u2 * u2 / 3.0)],
    ]
}

/// Tolerances for [`gamma_forward_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaOptions {
    pub unit_tolerance: f64,
    pub curl_tolerance: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        GammaOptions { unit_tolerance: DEFAULT_UNIT_TOLERANCE, curl_tolerance: DEFAULT_CURL_TOLERANCE }
    }
}

/// Output of [`gamma_forward`].
#[derive(Debug, Clone, PartialEq)]
pub struct GammaForward {
    pub df: MatrixField2D,
    pub f: VectorField2D,
    /// Cell the potential is pinned to (`F = 0`).
    pub anchor: (usize, usize),
    /// `h² Σ |curl DF|` over both rows.
    pub curl_mass: f64,
    /// Largest disagreement of the two staircase paths.
    pub path_residual: f64,
}

/// [`gamma_forward_with`] under the default options.
pub fn gamma_forward(u: &ScalarField2D, grad_u: &VectorField2D) -> Result<GammaForward> {
    gamma_forward_with(u, grad_u, &GammaOptions::default())
}

/// Assembles `DF_u` cellwise and reconstructs `F_u` by path integration.
///
/// `F` is pinned to zero at the masked-in cell nearest the domain centre and
/// integrated with the trapezoid rule along a row-then-column staircase; the
/// column-then-row staircase is integrated as well and the largest
/// disagreement between the two is reported. Cells reachable by neither path
/// are masked out.
pub fn gamma_forward_with(u: &ScalarField2D, grad_u: &VectorField2D, opts: &GammaOptions) -> Result<GammaForward> {
    if !u.grid().same_lattice(grad_u.grid()) {
        return Err(err!(Configuration, "u and its gradient live on different grids"));
    }
    for (i, j, g) in grad_u.iter_valid() {
        let dev = abs(sqrt(hypot2(g)) - 1.0);
        if dev > opts.unit_tolerance {
            return Err(err!(Precondition, "gradient is not unit at ({i}, {j}): ||grad u| - 1| = {dev:.3e}"));
        }
    }
    let df = grad_u.map(gamma_matrix);
    let curl = fd::curl_rows(&df)?;
    let grid = *df.grid();
    let curl_mass = curl.iter_valid().map(|(_, _, c)| abs(c[0]) + abs(c[1])).sum::<f64>() * grid.cell_area();
    if curl_mass > opts.curl_tolerance {
        return Err(Error::NotInClass { curl_mass, tolerance: opts.curl_tolerance });
    }

    let n = grid.n();
    let mid = grid.midpoint();
    let anchor = df
        .iter_valid()
        .map(|(i, j, _)| {
            let c = grid.center(i, j);
            (hypot2([c[0] - mid[0], c[1] - mid[1]]), i, j)
        })
        .fold(None, |acc: Option<(f64, usize, usize)>, x| match acc {
            Some(a) if a.0 <= x.0 => Some(a),
            _ => Some(x),
        })
        .map(|(_, i, j)| (i, j))
        .ok_or_else(|| err!(Domain, "no masked-in cell to anchor the potential"))?;
    let h = grid.h();

    // Column k of the Jacobian, i.e. ∂ₖF, at a cell.
    let col = |i: usize, j: usize, k: usize| df.get(i, j).map(|a| [a[0][k], a[1][k]]);
    // Trapezoid primitive of ∂ₖF along a line of cells, starting from `start`.
    let line = |len: usize, start: usize, k: usize, at: &dyn Fn(usize) -> (usize, usize)| -> Vec<Option<[f64; 2]>> {
        let mut out = vec![None; len];
        let (si, sj) = at(start);
        if col(si, sj, k).is_none() {
            return out;
        }
        out[start] = Some([0.0, 0.0]);
        for dir in [1isize, -1] {
            let mut idx = start as isize;
            loop {
                let next = idx + dir;
                if next < 0 || next >= len as isize {
                    break;
                }
                let (ai, aj) = at(idx as usize);
                let (bi, bj) = at(next as usize);
                let (Some(prev), Some(a), Some(b)) = (out[idx as usize], col(ai, aj, k), col(bi, bj, k)) else { break };
                let s = dir as f64 * 0.5 * h[k];
                out[next as usize] = Some([prev[0] + s * (a[0] + b[0]), prev[1] + s * (a[1] + b[1])]);
                idx = next;
            }
        }
        out
    };
    let (ia, ja) = anchor;
    let rows: Vec<Vec<Option<[f64; 2]>>> = (0..n).map(|j| line(n, ia, 0, &|i| (i, j))).collect();
    let cols: Vec<Vec<Option<[f64; 2]>>> = (0..n).map(|i| line(n, ja, 1, &|j| (i, j))).collect();

    let mut values = vec![[f64::NAN; 2]; grid.len()];
    let mut mask = vec![false; grid.len()];
    let mut path_residual = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            // row-then-column: along row ja to column i, then up column i
            let a = match (rows[ja][i], cols[i][j], cols[i][ja]) {
                (Some(r), Some(c), Some(c0)) => Some([r[0] + c[0] - c0[0], r[1] + c[1] - c0[1]]),
                _ => None,
            };
            // column-then-row: up column ia to row j, then along row j
            let b = match (cols[ia][j], rows[j][i], rows[j][ia]) {
                (Some(c), Some(r), Some(r0)) => Some([c[0] + r[0] - r0[0], c[1] + r[1] - r0[1]]),
                _ => None,
            };
            let v = match (a, b) {
                (Some(a), Some(b)) => {
                    path_residual = path_residual.max(abs(a[0] - b[0]).max(abs(a[1] - b[1])));
                    Some(a)
                }
                (Some(a), None) => Some(a),
                (None, b) => b,
            };
            if let Some(v) = v {
                values[grid.index(i, j)] = v;
                mask[grid.index(i, j)] = true;
            }
        }
    }
    let f = VectorField2D::from_parts(grid, values, mask)?;
    Ok(GammaForward { df, f, anchor, curl_mass, path_residual })
}

/// `∇u = (DF₁₂ − DF₂₁, DF₁₁ + DF₂₂)` after checking `DF ∈ K` within `tol`.
pub fn gamma_inverse(df: &MatrixField2D, tol: f64) -> Result<VectorField2D> {
    for (_, _, a) in df.iter_valid() {
        check_near_k(a, tol)?;
    }
    Ok(df.map(|a| [a[0][1] - a[1][0], a[0][0] + a[1][1]]))
}

/// Values of the determinant kernel at phase separation `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetKernel {
    /// `det(M(θ + α) − M(θ))`.
    pub f: f64,
    /// `|M(θ + α) − M(θ)|²` (full Frobenius).
    pub g: f64,
    /// `f / g²`.
    pub ratio: f64,
}

/// Closed-form kernel; independent of the base phase.
pub fn det_kernel(alpha: f64) -> DetKernel {
    let c = cos(alpha);
    let s = sin(0.5 * alpha);
    let s2 = s * s;
    let f = (8.0 / 9.0) * s2 * s2 * (2.0 + c);
    let q = 2.0 * c * c + 2.0 * c + 5.0;
    let g = (4.0 / 9.0) * s2 * q;
    let ratio = 4.5 * (2.0 + c) / (q * q);
    DetKernel { f, g, ratio }
}

/// Kernel evaluated from the matrices `M(θ + α)` and `M(θ)`.
pub fn det_kernel_direct(theta: f64, alpha: f64) -> DetKernel {
    let d = mat_sub(k_value(theta + alpha), k_value(theta));
    let f = det(d);
    let g = frob_sq(d);
    DetKernel { f, g, ratio: if g > 0.0 { f / (g * g) } else { f64::NAN } }
}

/// Brute-force estimate of the best constant in `det(A − B) ≥ c₀|A − B|⁴` on `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C0Estimate {
    /// Infimum of `f/g²` over the sampled phases after refinement.
    pub c0: f64,
    /// Phase separation where it is attained.
    pub alpha: f64,
    /// Smallest `f` over `α ∈ [10⁻³, 2π − 10⁻³]`; positive means no rank-one connections.
    pub min_f: f64,
}

/// Samples `α = 2πk/n`, `k = 1..n−1`, from matrix differences at `θ = 0` and
/// refines the minimum of `f/g²` by golden-section search.
pub fn c0_bruteforce(n_samples: usize) -> Result<C0Estimate> {
    if n_samples < 10_000 {
        return Err(err!(Argument, "c0_bruteforce needs at least 10^4 samples, got {n_samples}"));
    }
    let ratio = |a: f64| det_kernel_direct(0.0, a).ratio;
    let step = TAU / n_samples as f64;
    let mut best = (f64::INFINITY, 0usize);
    for k in 1..n_samples {
        let r = ratio(step * k as f64);
        if r < best.0 {
            best = (r, k);
        }
    }
    let lo = (step * (best.1 as f64 - 1.0)).max(step * 1e-3);
    let hi = (step * (best.1 as f64 + 1.0)).min(TAU - step * 1e-3);
    let (a, r) = golden_min(lo, hi, 100, ratio);
    let (c0, alpha) = if r < best.0 { (r, a) } else { (best.0, step * best.1 as f64) };

    let (lo_f, hi_f) = (1e-3, TAU - 1e-3);
    let mut min_f = f64::INFINITY;
    for k in 0..=n_samples {
        let a = lo_f + (hi_f - lo_f) * k as f64 / n_samples as f64;
        min_f = min_f.min(det_kernel_direct(0.0, a).f);
    }
    Ok(C0Estimate { c0, alpha, min_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    fn close(a: Mat2, b: Mat2, tol: f64) -> bool {
        sqrt(frob_sq(mat_sub(a, b))) <= tol
    }

    #[test]
    fn k_values_at_axes() {
        assert!(close(k_value(PI / 2.0), [[2.0 / 3.0, 0.0], [0.0, 1.0 / 3.0]], 1e-15));
        assert!(close(k_value(0.0), [[0.0, 2.0 / 3.0], [-1.0 / 3.0, 0.0]], 1e-15));
        assert!(close(k_matrix(0.0).conformal(), [[0.0, 0.5], [-0.5, 0.0]], 1e-15));
    }

    #[test]
    fn wirtinger_round_trip() {
        let a = [[0.3, -1.2], [0.7, 2.0]];
        assert!(close(WirtingerPair::from_jacobian(a).to_jacobian(), a, 1e-15));
    }

    #[test]
    fn beltrami_on_trivial_matrices() {
        let (r1, r2) = beltrami_pointwise([[1.0, 0.0], [0.0, 1.0]]);
        assert!((r2 - 0.5).abs() < 1e-15 && r1 > 0.0);
        assert_eq!(beltrami_pointwise([[0.0; 2]; 2]), (0.0, 0.5));
    }

    #[test]
    fn distance_to_k_of_a_perturbation() {
        let a = k_value(1.1);
        let b = [[a[0][0] + 1e-3, a[0][1]], [a[1][0], a[1][1]]];
        let (d, t) = distance_to_k(b);
        assert!(d <= 1e-3 && d > 0.0);
        assert!((t - 1.1).abs() < 5e-3);
        assert!(matches!(phase_recover(b, 1e-6), Err(Error::FarFromK { .. })));
    }

    #[test]
    fn kernel_at_pi() {
        let k = det_kernel(PI);
        assert!((k.f - 8.0 / 9.0).abs() < 1e-15);
        assert!((k.g - 20.0 / 9.0).abs() < 1e-15);
        assert!((k.ratio - 0.18).abs() < 1e-15);
        assert!(c0_bruteforce(100).is_err());
    }
}
