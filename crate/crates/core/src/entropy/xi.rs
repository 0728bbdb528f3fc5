//! The half-space entropies `Φ^ξ` and their smooth approximations `Φ_k`.
//!
//! `Φ^ξ(z) = |z|²ξ` when `z·ξ > 0` and 0 otherwise. It is generated by
//! `φ(z) = (z·ξ)₊`; smoothing the kink with `s_k(t) = s₀(kt)/k` gives
//! `φ_k(z) = s_k(z·ξ)` and the entropies `Φ_k`.

use alloc::vec::Vec;

use super::{make_entropy, Entropy, PhiEntropy, PhiFunction};
use crate::err;
use crate::error::Result;
use crate::field::Mat2;
use crate::jet::Jet;
use crate::math::{abs, asin_clamped, cos, dot, norm, perp, sin, PI, TAU};

/// `[s₀, s₀', s₀'', s₀''']` at `x`.
///
/// `s₀(x) = x·S(x)` with the C∞ step `S(x) = g(x)/(g(x) + g(1 − x))`,
/// `g(t) = exp(−1/t)` for `t > 0`. Hence `s₀ = 0` for `x ≤ 0`, `s₀(x) = x` for
/// `x ≥ 1`, and `s₀' = S + xS' ≥ 0`.
pub fn s0(x: f64) -> [f64; 4] {
    // below 2e-3 (above 1 − 2e-3) every derivative of g(x) (g(1 − x)) is smaller than 1e-200
    if x <= 2e-3 {
        return [0.0; 4];
    }
    if x >= 1.0 - 2e-3 {
        return [x, 1.0, 0.0, 0.0];
    }
    let t = Jet::var(x);
    let one = Jet::constant(1.0);
    let neg = Jet::constant(-1.0);
    let g1 = (neg * t.recip()).exp();
    let g2 = (neg * (one - t).recip()).exp();
    let s = g1 / (g1 + g2);
    (t * s).derivatives()
}

/// The generator `φ_k(z) = s_k(z·ξ)` (the radial cutoff equals 1 on `B_k`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPhi {
    xi: [f64; 2],
    k: f64,
}

impl XiPhi {
    /// `[s_k, s_k', s_k'', s_k''']` at `t`.
    pub fn s_k(&self, t: f64) -> [f64; 4] {
        let d = s0(self.k * t);
        [d[0] / self.k, d[1], self.k * d[2], self.k * self.k * d[3]]
    }

    fn at(&self, z: [f64; 2]) -> [f64; 4] {
        assert!(norm(z) <= self.k, "cutoff active: |z| = {} exceeds k = {}", norm(z), self.k);
        self.s_k(dot(z, self.xi))
    }
}

impl PhiFunction for XiPhi {
    fn value(&self, z: [f64; 2]) -> f64 {
        self.at(z)[0]
    }
    fn gradient(&self, z: [f64; 2]) -> [f64; 2] {
        let d = self.at(z)[1];
        [d * self.xi[0], d * self.xi[1]]
    }
    fn hessian(&self, z: [f64; 2]) -> Mat2 {
        let d = self.at(z)[2];
        let x = self.xi;
        [[d * x[0] * x[0], d * x[0] * x[1]], [d * x[1] * x[0], d * x[1] * x[1]]]
    }
    fn third(&self, z: [f64; 2]) -> [f64; 4] {
        let d = self.at(z)[3];
        let x = self.xi;
        [d * x[0] * x[0] * x[0], d * x[0] * x[0] * x[1], d * x[0] * x[1] * x[1], d * x[1] * x[1] * x[1]]
    }
}

/// The limit entropy `Φ^ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiLimitEntropy {
    pub xi: [f64; 2],
}

impl Entropy for XiLimitEntropy {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        if dot(z, self.xi) > 0.0 {
            let r2 = z[0] * z[0] + z[1] * z[1];
            [r2 * self.xi[0], r2 * self.xi[1]]
        } else {
            [0.0, 0.0]
        }
    }
    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        if dot(z, self.xi) > 0.0 {
            let x = self.xi;
            [[2.0 * x[0] * z[0], 2.0 * x[0] * z[1]], [2.0 * x[1] * z[0], 2.0 * x[1] * z[1]]]
        } else {
            [[0.0; 2]; 2]
        }
    }
}

/// The pair `(ξ, k)` with evaluators for `φ_k`, `Φ_k`, `Φ^ξ` and `ψ^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialEntropyXi {
    phi: XiPhi,
}

pub fn special_xi_entropy(xi: [f64; 2], k: u32) -> Result<SpecialEntropyXi> {
    if k < 1 {
        return Err(err!(Argument, "approximation index k must be >= 1"));
    }
    if abs(norm(xi) - 1.0) > 1e-12 {
        return Err(err!(Argument, "xi must be a unit vector"));
    }
    Ok(SpecialEntropyXi { phi: XiPhi { xi, k: k as f64 } })
}

impl SpecialEntropyXi {
    pub fn xi(&self) -> [f64; 2] {
        self.phi.xi
    }

    pub fn k(&self) -> f64 {
        self.phi.k
    }

    pub fn generator(&self) -> XiPhi {
        self.phi
    }

    /// `φ_k(z)`.
    pub fn phi_k(&self, z: [f64; 2]) -> f64 {
        self.phi.value(z)
    }

    /// The entropy `Φ_k` generated by `φ_k`.
    pub fn entropy_k(&self) -> PhiEntropy<XiPhi> {
        make_entropy(self.phi).expect("s_k(0) = 0")
    }

    pub fn limit(&self) -> XiLimitEntropy {
        XiLimitEntropy { xi: self.phi.xi }
    }

    /// `ψ^k(z) = ∇(Δφ_k)·z⊥/4 = s_k'''(z·ξ)(ξ·z⊥)/4`.
    pub fn psi_k(&self, z: [f64; 2]) -> f64 {
        let d = self.phi.at(z)[3];
        d * dot(self.phi.xi, perp(z)) / 4.0
    }

    /// Arcs `[a, b]` (angles) of `S¹` where `0 < z·ξ < 1/k`, i.e. where `ψ^k`
    /// can be non-zero.
    pub fn support_arcs(&self) -> [(f64, f64); 2] {
        let a = crate::math::atan2(self.phi.xi[1], self.phi.xi[0]);
        let w = asin_clamped(1.0 / self.phi.k);
        // z·ξ = cos(θ − a) ∈ (0, 1/k) ⇔ |θ − a| ∈ (π/2 − w, π/2)
        [(a + PI / 2.0 - w, a + PI / 2.0), (a - PI / 2.0, a - PI / 2.0 + w)]
    }

    /// Smallest angle between the support arcs and the coordinate axes;
    /// fails when an arc contains an axis direction.
    pub fn axis_angle(&self) -> Result<f64> {
        let mut best = f64::INFINITY;
        for (lo, hi) in self.support_arcs() {
            for q in 0..4 {
                let axis = q as f64 * PI / 2.0;
                let rel = |t: f64| {
                    let mut d = (t - axis) % TAU;
                    if d > PI {
                        d -= TAU;
                    }
                    if d < -PI {
                        d += TAU;
                    }
                    d
                };
                let (a, b) = (rel(lo), rel(hi));
                if a <= 0.0 && b >= 0.0 {
                    return Err(err!(Hypothesis, "support of psi^k on the circle touches an axis (k = {})", self.phi.k));
                }
                best = best.min(abs(a)).min(abs(b));
            }
        }
        Ok(best)
    }
}

/// Sampled bound on `χ^k = ψ^k/(z₁z₂)` over the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiKBound {
    /// `sup |ψ^k(z)/(z₁z₂)|` over the samples.
    pub sup: f64,
    /// `sup |ψ^k|` over the samples.
    pub psi_sup: f64,
    /// Distance between the support of `ψ^k` on `S¹` and the axes.
    pub alpha: f64,
    pub samples: usize,
}

/// Dense sampling of `|ψ^k(z)/(z₁z₂)|` on `S¹`.
///
/// Requires `ξ ∉ {±e₁, ±e₂}` and `k` large enough that the support arcs of
/// `ψ^k` avoid the axes.
pub fn chi_k_bound(se: &SpecialEntropyXi) -> Result<ChiKBound> {
    let xi = se.xi();
    if abs(xi[0]) < 1e-12 || abs(xi[1]) < 1e-12 {
        return Err(err!(Hypothesis, "xi is a coordinate direction"));
    }
    let angle = se.axis_angle()?;
    let mut thetas: Vec<f64> = (0..65_536).map(|k| TAU * (k as f64 + 0.5) / 65_536.0).collect();
    for (lo, hi) in se.support_arcs() {
        let m = 8192;
        thetas.extend((0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64));
    }
    let (mut sup, mut psi_sup) = (0.0f64, 0.0f64);
    for &t in &thetas {
        let z = [cos(t), sin(t)];
        let p = se.psi_k(z);
        if p == 0.0 {
            continue;
        }
        psi_sup = psi_sup.max(abs(p));
        sup = sup.max(abs(p / (z[0] * z[1])));
    }
    Ok(ChiKBound { sup, psi_sup, alpha: sin(angle), samples: thetas.len() })
}
