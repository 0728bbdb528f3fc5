//! The correspondence `Φ(z) = φ(z)z + (∇φ(z)·z⊥)z⊥` between scalar
//! generators `φ` with `φ(0) = 0` and entropies `Φ`.

use alloc::vec::Vec;

use super::Entropy;
use crate::err;
use crate::error::Result;
use crate::field::Mat2;
use crate::math::{abs, ipow, perp};

/// A scalar generator with derivatives up to third order.
pub trait PhiFunction {
    fn value(&self, z: [f64; 2]) -> f64;
    fn gradient(&self, z: [f64; 2]) -> [f64; 2];
    fn hessian(&self, z: [f64; 2]) -> Mat2;
    /// `[φ,₁₁₁, φ,₁₁₂, φ,₁₂₂, φ,₂₂₂]`.
    fn third(&self, z: [f64; 2]) -> [f64; 4];

    /// `∇(Δφ)`.
    fn grad_laplacian(&self, z: [f64; 2]) -> [f64; 2] {
        let t = self.third(z);
        [t[0] + t[2], t[1] + t[3]]
    }
}

impl<T: PhiFunction + ?Sized> PhiFunction for &T {
    fn value(&self, z: [f64; 2]) -> f64 {
        (**self).value(z)
    }
    fn gradient(&self, z: [f64; 2]) -> [f64; 2] {
        (**self).gradient(z)
    }
    fn hessian(&self, z: [f64; 2]) -> Mat2 {
        (**self).hessian(z)
    }
    fn third(&self, z: [f64; 2]) -> [f64; 4] {
        (**self).third(z)
    }
}

/// A polynomial `Σ c·z₁^p·z₂^q` with exact derivatives.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly2 {
    terms: Vec<(u32, u32, f64)>,
}

fn falling(p: u32, a: u32) -> f64 {
    (0..a).map(|k| (p - k) as f64).product()
}

impl Poly2 {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        Self { terms: terms.into_iter().filter(|t| t.2 != 0.0).collect() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(p: u32, q: u32, c: f64) -> Self {
        Self::new(alloc::vec![(p, q, c)])
    }

    /// `Re (z₁ + i z₂)^k`, harmonic.
    pub fn harmonic_re(k: u32) -> Self {
        Self::new(Self::binomial_terms(k, 0))
    }

    /// `Im (z₁ + i z₂)^k`, harmonic.
    pub fn harmonic_im(k: u32) -> Self {
        Self::new(Self::binomial_terms(k, 1))
    }

    fn binomial_terms(k: u32, parity: u32) -> Vec<(u32, u32, f64)> {
        // (z₁ + i z₂)^k = Σ C(k, q) z₁^{k−q} (i z₂)^q
        let mut out = Vec::new();
        let mut c = 1.0;
        for q in 0..=k {
            if q > 0 {
                c = c * (k - q + 1) as f64 / q as f64;
            }
            if q % 2 == parity {
                let sign = if (q / 2) % 2 == 0 { 1.0 } else { -1.0 };
                out.push((k - q, q, sign * c));
            }
        }
        out
    }

    pub fn terms(&self) -> &[(u32, u32, f64)] {
        &self.terms
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut t = self.terms.clone();
        t.extend_from_slice(&other.terms);
        Poly2::new(t)
    }

    /// `∂₁^a ∂₂^b` of the polynomial at `z`.
    pub fn derivative(&self, a: u32, b: u32, z: [f64; 2]) -> f64 {
        self.terms
            .iter()
            .filter(|(p, q, _)| *p >= a && *q >= b)
            .map(|&(p, q, c)| c * falling(p, a) * falling(q, b) * ipow(z[0], p - a) * ipow(z[1], q - b))
            .sum()
    }

    /// Whether the Laplacian vanishes identically.
    pub fn is_harmonic(&self) -> bool {
        // Δ(z₁^p z₂^q) = p(p−1) z₁^{p−2} z₂^q + q(q−1) z₁^p z₂^{q−2}
        let mut acc: Vec<(u32, u32, f64)> = Vec::new();
        let mut push = |p: u32, q: u32, c: f64| {
            if let Some(e) = acc.iter_mut().find(|e| e.0 == p && e.1 == q) {
                e.2 += c;
            } else {
                acc.push((p, q, c));
            }
        };
        for &(p, q, c) in &self.terms {
            if p >= 2 {
                push(p - 2, q, c * (p * (p - 1)) as f64);
            }
            if q >= 2 {
                push(p, q - 2, c * (q * (q - 1)) as f64);
            }
        }
        acc.iter().all(|e| abs(e.2) < 1e-12)
    }
}

impl PhiFunction for Poly2 {
    fn value(&self, z: [f64; 2]) -> f64 {
        self.derivative(0, 0, z)
    }
    fn gradient(&self, z: [f64; 2]) -> [f64; 2] {
        [self.derivative(1, 0, z), self.derivative(0, 1, z)]
    }
    fn hessian(&self, z: [f64; 2]) -> Mat2 {
        let m = self.derivative(1, 1, z);
        [[self.derivative(2, 0, z), m], [m, self.derivative(0, 2, z)]]
    }
    fn third(&self, z: [f64; 2]) -> [f64; 4] {
        [self.derivative(3, 0, z), self.derivative(2, 1, z), self.derivative(1, 2, z), self.derivative(0, 3, z)]
    }
}

/// A generator given only by point values; derivatives come from
/// fourth-order central differences in `z`.
pub struct NumericPhi<F> {
    f: F,
    step: f64,
}

impl<F: Fn([f64; 2]) -> f64> NumericPhi<F> {
    pub fn new(f: F) -> Self {
        Self { f, step: 1e-3 }
    }

    fn d1(&self, g: &dyn Fn([f64; 2]) -> f64, z: [f64; 2], k: usize, h: f64) -> f64 {
        let at = |s: f64| {
            let mut p = z;
            p[k] += s * h;
            g(p)
        };
        (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h)
    }

    fn d2(&self, z: [f64; 2], a: usize, b: usize) -> f64 {
        let h = 10.0 * self.step;
        if a == b {
            let at = |s: f64| {
                let mut p = z;
                p[a] += s * h;
                (self.f)(p)
            };
            (-at(2.0) + 16.0 * at(1.0) - 30.0 * at(0.0) + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h)
        } else {
            let inner = |p: [f64; 2]| self.d1(&self.f, p, b, h);
            self.d1(&inner, z, a, h)
        }
    }
}

impl<F: Fn([f64; 2]) -> f64> PhiFunction for NumericPhi<F> {
    fn value(&self, z: [f64; 2]) -> f64 {
        (self.f)(z)
    }
    fn gradient(&self, z: [f64; 2]) -> [f64; 2] {
        [self.d1(&self.f, z, 0, self.step), self.d1(&self.f, z, 1, self.step)]
    }
    fn hessian(&self, z: [f64; 2]) -> Mat2 {
        let m = self.d2(z, 0, 1);
        [[self.d2(z, 0, 0), m], [m, self.d2(z, 1, 1)]]
    }
    fn third(&self, z: [f64; 2]) -> [f64; 4] {
        let h = 20.0 * self.step;
        let d = |a: usize, b: usize, c: usize| {
            let inner = |p: [f64; 2]| self.d2(p, b, c);
            self.d1(&inner, z, a, h)
        };
        [d(0, 0, 0), d(1, 0, 0), d(0, 1, 1), d(1, 1, 1)]
    }
}

/// The entropy generated by `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiEntropy<P> {
    phi: P,
}

/// Builds `Φ(z) = φ(z)z + (∇φ(z)·z⊥)z⊥`; requires `φ(0) = 0`.
pub fn make_entropy<P: PhiFunction>(phi: P) -> Result<PhiEntropy<P>> {
    let v = phi.value([0.0, 0.0]);
    if abs(v) > 1e-14 {
        return Err(err!(Argument, "generator must vanish at the origin, phi(0) = {v}"));
    }
    Ok(PhiEntropy { phi })
}

impl<P> PhiEntropy<P> {
    pub fn generator(&self) -> &P {
        &self.phi
    }
}

impl<P: PhiFunction> Entropy for PhiEntropy<P> {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        let f = self.phi.value(z);
        let g = self.phi.gradient(z);
        let zp = perp(z);
        let t = g[0] * zp[0] + g[1] * zp[1];
        [f * z[0] + t * zp[0], f * z[1] + t * zp[1]]
    }

    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        let f = self.phi.value(z);
        let g = self.phi.gradient(z);
        let hs = self.phi.hessian(z);
        let zp = perp(z);
        let t = g[0] * zp[0] + g[1] * zp[1];
        // ∂ⱼ(∇φ·z⊥) = −φ,₁ⱼ z₂ + φ,₂ⱼ z₁ − φ,₁ δ₂ⱼ + φ,₂ δ₁ⱼ
        let dt = [-hs[0][0] * z[1] + hs[1][0] * z[0] + g[1], -hs[0][1] * z[1] + hs[1][1] * z[0] - g[0]];
        // ∂ⱼz⊥ᵢ: z⊥ = (−z₂, z₁)
        let dzp = [[0.0, -1.0], [1.0, 0.0]];
        let mut j = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                let delta = if i == k { 1.0 } else { 0.0 };
                j[i][k] = g[k] * z[i] + f * delta + dt[k] * zp[i] + t * dzp[i][k];
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::super::{circle_condition_residual, fd_jacobian};
    use super::*;

    #[test]
    fn quadratic_harmonic_gives_the_cubic_entropy() {
        let e = make_entropy(Poly2::harmonic_re(2)).unwrap();
        for z in [[0.3, -0.7], [1.0, 0.0], [-0.2, 0.9]] {
            let v = e.value(z);
            let want = [z[0].powi(3) + 3.0 * z[0] * z[1] * z[1], -3.0 * z[0] * z[0] * z[1] - z[1].powi(3)];
            assert!((v[0] - want[0]).abs() < 1e-14 && (v[1] - want[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_and_linear_generators() {
        let e = make_entropy(Poly2::zero()).unwrap();
        assert_eq!(e.value([0.4, 0.1]), [0.0, 0.0]);
        let e = make_entropy(Poly2::monomial(1, 0, 1.0)).unwrap();
        assert_eq!(e.value([0.0, 1.0]), [1.0, 0.0]);
        assert!(make_entropy(Poly2::monomial(0, 0, 1.0)).is_err());
    }

    #[test]
    fn harmonic_polynomials() {
        assert!(Poly2::harmonic_re(3).is_harmonic());
        assert!(Poly2::harmonic_im(4).is_harmonic());
        assert!(!Poly2::monomial(4, 0, 1.0).is_harmonic());
        // Re z³ = z₁³ − 3 z₁ z₂²
        let p = Poly2::harmonic_re(3);
        assert!((p.value([0.5, 2.0]) - (0.125 - 3.0 * 0.5 * 4.0)).abs() < 1e-14);
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let e = make_entropy(Poly2::new(alloc::vec![(4, 0, 1.0), (1, 2, -0.5), (0, 3, 0.25)])).unwrap();
        for z in [[0.3, -0.7], [0.8, 0.6], [-0.1, 0.2]] {
            let a = e.jacobian(z);
            let b = fd_jacobian(&e, z, 1e-3);
            for i in 0..2 {
                for k in 0..2 {
                    assert!((a[i][k] - b[i][k]).abs() < 1e-9);
                }
            }
        }
        assert!(circle_condition_residual(&e, 256, false) < 1e-12);
    }

    #[test]
    fn numeric_generator_tracks_the_polynomial() {
        let p = Poly2::new(alloc::vec![(4, 0, 1.0), (2, 2, 0.5), (1, 1, -1.0)]);
        let q = p.clone();
        let n = NumericPhi::new(move |z| q.value(z));
        let z = [0.4, -0.3];
        let (a, b) = (p.third(z), n.third(z));
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() < 1e-6, "{k}: {} {}", a[k], b[k]);
        }
        let e = make_entropy(n).unwrap();
        assert!(circle_condition_residual(&e, 256, true) < 1e-5);
    }
}
