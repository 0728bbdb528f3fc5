//! Entropy names used by scenario files.
//!
//! * `sigma_e1e2`, `sigma_eps1eps2`: the two cubic entropies;
//! * `harmonic:re<k>`, `harmonic:im<k>`: the entropy generated by `Re zᵏ` or `Im zᵏ`;
//! * `xi:<a>,<b>:<k>`: the entropy `Φ_k` attached to the direction `ξ = (a, b)`.
//!
//! Generators `φ` for the identity probes are written `re<k>`, `im<k>` or
//! `poly:c:p:q,c:p:q,...` for `Σ c·z₁ᵖz₂^q`.

use eikonal_core::entropy::{make_entropy, special_xi_entropy, Entropy, PhiEntropy, Poly2, SigmaE1E2, SigmaEps1Eps2, XiPhi};
use eikonal_core::Mat2;

#[derive(Debug, Clone)]
pub enum EntropySpec {
    SigmaE1E2,
    SigmaEps1Eps2,
    Harmonic(PhiEntropy<Poly2>),
    Xi(PhiEntropy<XiPhi>),
}

impl Entropy for EntropySpec {
    fn value(&self, z: [f64; 2]) -> [f64; 2] {
        match self {
            Self::SigmaE1E2 => SigmaE1E2.value(z),
            Self::SigmaEps1Eps2 => SigmaEps1Eps2.value(z),
            Self::Harmonic(e) => e.value(z),
            Self::Xi(e) => e.value(z),
        }
    }

    fn jacobian(&self, z: [f64; 2]) -> Mat2 {
        match self {
            Self::SigmaE1E2 => SigmaE1E2.jacobian(z),
            Self::SigmaEps1Eps2 => SigmaEps1Eps2.jacobian(z),
            Self::Harmonic(e) => e.jacobian(z),
            Self::Xi(e) => e.jacobian(z),
        }
    }
}

impl EntropySpec {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "sigma_e1e2" => return Ok(Self::SigmaE1E2),
            "sigma_eps1eps2" => return Ok(Self::SigmaEps1Eps2),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix("harmonic:") {
            let phi = parse_harmonic(rest).ok_or_else(|| format!("unknown harmonic generator '{rest}', expected re<k> or im<k>"))?;
            return make_entropy(phi).map(Self::Harmonic).map_err(|e| e.to_string());
        }
        if let Some(rest) = name.strip_prefix("xi:") {
            let (vec, k) = rest.rsplit_once(':').ok_or_else(|| format!("'{name}' should read xi:<a>,<b>:<k>"))?;
            let (a, b) = vec.split_once(',').ok_or_else(|| format!("'{vec}' is not a vector a,b"))?;
            let xi = [num(a)?, num(b)?];
            let k: u32 = k.trim().parse().map_err(|_| format!("'{k}' is not a positive integer"))?;
            let se = special_xi_entropy(xi, k).map_err(|e| e.to_string())?;
            return Ok(Self::Xi(se.entropy_k()));
        }
        Err(format!("unknown entropy '{name}'"))
    }
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a number"))
}

fn parse_harmonic(s: &str) -> Option<Poly2> {
    let (re, k) = if let Some(k) = s.strip_prefix("re") {
        (true, k)
    } else {
        (false, s.strip_prefix("im")?)
    };
    let k: u32 = k.parse().ok().filter(|&k| k >= 1)?;
    Some(if re { Poly2::harmonic_re(k) } else { Poly2::harmonic_im(k) })
}

/// Parses a generator `φ` (see the module documentation).
pub fn parse_phi(s: &str) -> Result<Poly2, String> {
    if let Some(p) = parse_harmonic(s) {
        return Ok(p);
    }
    let body = s.strip_prefix("poly:").ok_or_else(|| format!("unknown generator '{s}'"))?;
    let mut terms = Vec::new();
    for t in body.split(',') {
        let parts: Vec<&str> = t.split(':').collect();
        let [c, p, q] = parts.as_slice() else {
            return Err(format!("term '{t}' should read c:p:q"));
        };
        let p: u32 = p.trim().parse().map_err(|_| format!("'{p}' is not an exponent"))?;
        let q: u32 = q.trim().parse().map_err(|_| format!("'{q}' is not an exponent"))?;
        terms.push((p, q, num(c)?));
    }
    Ok(Poly2::new(terms))
}
