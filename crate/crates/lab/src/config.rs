//! Scenario configuration: JSON on disk, validated before any probe runs.

use std::fmt;
use std::path::Path;

use eikonal_core::eikonal::{EikonalSolution, Roof};
use eikonal_core::GridSpec;
use serde::{Deserialize, Serialize};

use crate::entropies::EntropySpec;

/// A validation failure, located by a JSON-style field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn fail<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { path: path.into(), message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entropies: Vec<String>,
    #[serde(default)]
    pub ladder: LadderSpec,
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub seed: u64,
}

/// The square `[origin, origin + side]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub origin: [f64; 2],
    pub side: f64,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self { origin: [-0.5, -0.5], side: 1.0 }
    }
}

impl DomainSpec {
    pub fn grid(&self, n: usize) -> eikonal_core::Result<GridSpec> {
        GridSpec::square(self.origin, self.side, n)
    }

    pub fn h(&self, n: usize) -> f64 {
        self.side / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Vortex {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default = "one")]
        sign: f64,
    },
    Planar {
        direction: [f64; 2],
    },
    Roof {
        #[serde(default)]
        point: [f64; 2],
        #[serde(default = "e2")]
        normal: [f64; 2],
        #[serde(default = "e2")]
        g_plus: [f64; 2],
        #[serde(default = "minus_e2")]
        g_minus: [f64; 2],
    },
    BallDistance {
        center: [f64; 2],
        radius: f64,
    },
    MultiPoint {
        points: Vec<[f64; 2]>,
    },
}

fn one() -> f64 {
    1.0
}

fn e2() -> [f64; 2] {
    [0.0, 1.0]
}

fn minus_e2() -> [f64; 2] {
    [0.0, -1.0]
}

impl GeneratorSpec {
    pub fn build(&self) -> eikonal_core::Result<EikonalSolution> {
        match self {
            Self::Vortex { center, sign } => EikonalSolution::vortex(*center, *sign),
            Self::Planar { direction } => EikonalSolution::planar(*direction),
            Self::Roof { point, normal, g_plus, g_minus } => Ok(EikonalSolution::roof(Roof::new(*point, *normal, *g_plus, *g_minus)?)),
            Self::BallDistance { center, radius } => EikonalSolution::ball_distance(*center, *radius),
            Self::MultiPoint { points } => EikonalSolution::multi_point(points.clone()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Vortex { .. } => "vortex",
            Self::Planar { .. } => "planar",
            Self::Roof { .. } => "roof",
            Self::BallDistance { .. } => "ball_distance",
            Self::MultiPoint { .. } => "multi_point",
        }
    }
}

/// Refinement ladder shared by the probes: grid sizes, mollification radii
/// (paired with `n` rung by rung) and fractional exponents.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigma: Vec<f64>,
}

/// A smooth bump `ζ` with centre and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self { center: [0.0, 0.0], radius: 0.3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductionExpectation {
    /// `|P|` decreases along the ladder and ends below `1e-2`.
    Vanishing,
    /// The last rung matches the jump of `Φ` across the roof line.
    TraceJump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthExpectation {
    Stable,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    /// `I_ε(u)` of the sampled field at every ladder `ε` on the finest grid; expected zero.
    Sampled,
    /// `I_ε(u * ρ_ε)` rung by rung; expected to decrease.
    Mollified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JopField {
    Grad,
    Perp,
}

fn default_samples() -> usize {
    20_000
}
fn default_phases() -> usize {
    1000
}
fn default_points() -> usize {
    100
}
fn default_width() -> f64 {
    0.1
}
fn default_radius() -> f64 {
    0.25
}
fn default_margin() -> f64 {
    0.25
}
fn default_stride() -> usize {
    1
}
fn default_threshold() -> f64 {
    eikonal_core::regularity::DEFAULT_THRESHOLD_FACTOR
}
fn default_fit_radius() -> f64 {
    0.2
}
fn default_xi_count() -> usize {
    8
}
fn default_r() -> f64 {
    4.0
}
fn default_bound() -> f64 {
    0.1
}
fn default_eps_cells() -> f64 {
    4.0
}
fn default_bounds_cells() -> f64 {
    8.0
}
fn default_profile_eps() -> f64 {
    0.02
}
fn default_profile_n() -> usize {
    1024
}
fn default_ks() -> Vec<u32> {
    vec![4, 8, 16]
}
fn default_xi() -> [f64; 2] {
    [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2]
}
fn default_phi() -> String {
    "poly:0.4:3:1,-1:1:2,0.25:0:4,1:2:0".to_string()
}

/// One probe of a scenario, tagged by `probe`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeSpec {
    /// Determinant kernel anchors and the brute-force `c₀`.
    Kernel {
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Beltrami residuals and phase recovery on `K`.
    Beltrami {
        #[serde(default = "default_phases")]
        phases: usize,
    },
    /// `Γ` forward and inverse along the ladder.
    GammaRoundTrip,
    /// Circle conditions, isotropy, antisymmetry of `Ψ` and the divergence
    /// identity for divergence-free fields.
    EntropyIdentities {
        #[serde(default = "default_points")]
        points: usize,
        #[serde(default = "default_phi")]
        phi: String,
    },
    /// Divergence identities of the two special entropies on `u * ρ_width`.
    DivergenceIdentities {
        #[serde(default = "default_width")]
        width: f64,
    },
    /// Weak entropy production of every configured entropy along the ladder.
    Production {
        #[serde(default)]
        bump: BumpSpec,
        expect: ProductionExpectation,
    },
    Seminorm {
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_margin")]
        margin: f64,
        #[serde(default = "default_stride")]
        stride: usize,
        expect: GrowthExpectation,
    },
    Quotient {
        n: usize,
        eps: Vec<f64>,
        #[serde(default = "default_margin")]
        margin: f64,
        expect: GrowthExpectation,
    },
    Energy {
        mode: EnergyMode,
        #[serde(default = "default_margin")]
        margin: f64,
    },
    /// `I_ε` of the one-dimensional profile `ε log cosh(x₂/ε)`.
    ProfileEnergy {
        #[serde(default = "default_profile_eps")]
        eps: f64,
        #[serde(default = "default_profile_n")]
        n: usize,
    },
    /// `I_ε(u * ρ_ε)` against the `Σ_{e₁e₂}` production pairing, `ε = eps_cells·h`.
    AdmOrdering {
        #[serde(default)]
        bump: BumpSpec,
        #[serde(default = "default_eps_cells")]
        eps_cells: f64,
        #[serde(default = "default_margin")]
        margin: f64,
    },
    Singularities {
        #[serde(default = "default_threshold")]
        threshold_factor: f64,
        #[serde(default = "default_fit_radius")]
        fit_radius: f64,
    },
    Jop {
        #[serde(default)]
        bump: BumpSpec,
        #[serde(default = "default_xi_count")]
        xi_count: usize,
        field: JopField,
    },
    KeyEstimate {
        n: usize,
        eps: Vec<f64>,
        #[serde(default)]
        bump: BumpSpec,
        #[serde(default = "default_r")]
        r: f64,
        #[serde(default)]
        m: usize,
        #[serde(default)]
        k: usize,
        #[serde(default = "default_bound")]
        bound: f64,
    },
    MollificationBounds {
        n: usize,
        #[serde(default = "default_bounds_cells")]
        eps_cells: f64,
    },
    ChiBounds {
        #[serde(default = "default_xi")]
        xi: [f64; 2],
        #[serde(default = "default_ks")]
        k: Vec<u32>,
    },
}

/// Every probe kind, in declaration order.
pub const PROBE_KINDS: [&str; 16] = [
    "kernel",
    "beltrami",
    "gamma_round_trip",
    "entropy_identities",
    "divergence_identities",
    "production",
    "seminorm",
    "quotient",
    "energy",
    "profile_energy",
    "adm_ordering",
    "singularities",
    "jop",
    "key_estimate",
    "mollification_bounds",
    "chi_bounds",
];

impl ProbeSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Kernel { .. } => PROBE_KINDS[0],
            Self::Beltrami { .. } => PROBE_KINDS[1],
            Self::GammaRoundTrip => PROBE_KINDS[2],
            Self::EntropyIdentities { .. } => PROBE_KINDS[3],
            Self::DivergenceIdentities { .. } => PROBE_KINDS[4],
            Self::Production { .. } => PROBE_KINDS[5],
            Self::Seminorm { .. } => PROBE_KINDS[6],
            Self::Quotient { .. } => PROBE_KINDS[7],
            Self::Energy { .. } => PROBE_KINDS[8],
            Self::ProfileEnergy { .. } => PROBE_KINDS[9],
            Self::AdmOrdering { .. } => PROBE_KINDS[10],
            Self::Singularities { .. } => PROBE_KINDS[11],
            Self::Jop { .. } => PROBE_KINDS[12],
            Self::KeyEstimate { .. } => PROBE_KINDS[13],
            Self::MollificationBounds { .. } => PROBE_KINDS[14],
            Self::ChiBounds { .. } => PROBE_KINDS[15],
        }
    }

    fn needs_generator(&self) -> bool {
        !matches!(
            self,
            Self::Kernel { .. } | Self::Beltrami { .. } | Self::EntropyIdentities { .. } | Self::ProfileEnergy { .. } | Self::ChiBounds { .. }
        )
    }

    fn needs_n(&self) -> bool {
        matches!(
            self,
            Self::GammaRoundTrip
                | Self::DivergenceIdentities { .. }
                | Self::Production { .. }
                | Self::Seminorm { .. }
                | Self::Energy { .. }
                | Self::AdmOrdering { .. }
                | Self::Singularities { .. }
                | Self::Jop { .. }
        )
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError { path: "$".into(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    /// Checks the ladder shape, the referenced generator and entropies, and
    /// the probe parameters.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return fail("name", "must be a non-empty string of letters, digits, '_' or '-'");
        }
        if !(self.domain.side > 0.0 && self.domain.side.is_finite()) {
            return fail("domain.side", "must be positive");
        }
        if let Some(g) = &self.generator {
            g.build().map_err(|e| ConfigError { path: "generator".into(), message: e.to_string() })?;
        }
        for (k, e) in self.entropies.iter().enumerate() {
            EntropySpec::parse(e).map_err(|m| ConfigError { path: format!("entropies[{k}]"), message: m })?;
        }
        self.validate_ladder()?;
        for (k, p) in self.probes.iter().enumerate() {
            self.validate_probe(k, p)?;
        }
        Ok(())
    }

    fn validate_ladder(&self) -> Result<(), ConfigError> {
        let l = &self.ladder;
        for (k, w) in l.n.windows(2).enumerate() {
            if w[1] != 2 * w[0] {
                return fail(format!("ladder.n[{}]", k + 1), format!("ladder must double at every rung, {} follows {}", w[1], w[0]));
            }
        }
        if let Some(&n) = l.n.first() {
            if n < eikonal_core::grid::MIN_CELLS {
                return fail("ladder.n[0]", format!("grids need at least {} cells per axis", eikonal_core::grid::MIN_CELLS));
            }
        }
        for (k, w) in l.eps.windows(2).enumerate() {
            if (w[1] * 2.0 - w[0]).abs() > 1e-12 * w[0] {
                return fail(format!("ladder.eps[{}]", k + 1), format!("eps must halve at every rung, {} follows {}", w[1], w[0]));
            }
        }
        if !l.eps.is_empty() {
            if l.eps.len() != l.n.len() {
                return fail("ladder.eps", format!("{} radii for {} grid sizes", l.eps.len(), l.n.len()));
            }
            for (k, (&n, &e)) in l.n.iter().zip(&l.eps).enumerate() {
                let h = self.domain.h(n);
                if e < 4.0 * h * (1.0 - 1e-12) {
                    return fail(format!("ladder.eps[{k}]"), format!("eps = {e} is below 4h = {}", 4.0 * h));
                }
            }
        }
        for (k, w) in l.sigma.windows(2).enumerate() {
            if w[1] <= w[0] {
                return fail(format!("ladder.sigma[{}]", k + 1), "exponents must increase");
            }
        }
        for (k, &s) in l.sigma.iter().enumerate() {
            if !(s > 0.0 && s < 1.0) {
                return fail(format!("ladder.sigma[{k}]"), "exponents must lie in (0, 1)");
            }
        }
        Ok(())
    }

    fn validate_probe(&self, k: usize, p: &ProbeSpec) -> Result<(), ConfigError> {
        let at = |field: &str| format!("probes[{k}].{field}");
        if p.needs_generator() && self.generator.is_none() {
            return fail(format!("probes[{k}]"), format!("probe '{}' needs a generator", p.kind()));
        }
        if p.needs_n() && self.ladder.n.is_empty() {
            return fail(format!("probes[{k}]"), format!("probe '{}' needs ladder.n", p.kind()));
        }
        let dyadic_down = |name: &str, eps: &[f64]| -> Result<(), ConfigError> {
            if eps.is_empty() {
                return fail(at(name), "needs at least one value");
            }
            for (i, w) in eps.windows(2).enumerate() {
                if (w[1] * 2.0 - w[0]).abs() > 1e-12 * w[0] {
                    return fail(at(&format!("{name}[{}]", i + 1)), "values must halve at every step");
                }
            }
            Ok(())
        };
        match p {
            ProbeSpec::Kernel { samples } if *samples < 10_000 => fail(at("samples"), "needs at least 10000 samples"),
            ProbeSpec::Beltrami { phases } if *phases == 0 => fail(at("phases"), "must be positive"),
            ProbeSpec::EntropyIdentities { phi, .. } => {
                crate::entropies::parse_phi(phi).map_err(|m| ConfigError { path: at("phi"), message: m })?;
                Ok(())
            }
            ProbeSpec::Production { .. } if self.entropies.is_empty() => fail("entropies", "production needs at least one entropy"),
            ProbeSpec::Seminorm { radius, margin, stride, .. } => {
                if self.ladder.sigma.is_empty() {
                    return fail("ladder.sigma", "seminorm needs at least one exponent");
                }
                if *stride == 0 {
                    return fail(at("stride"), "must be positive");
                }
                if radius > &(margin * self.domain.side) {
                    return fail(at("radius"), format!("radius {radius} exceeds the margin width {}", margin * self.domain.side));
                }
                Ok(())
            }
            ProbeSpec::Quotient { n, eps, .. } => {
                dyadic_down("eps", eps)?;
                let h = self.domain.h(*n);
                match eps.iter().position(|&e| e < 4.0 * h * (1.0 - 1e-12)) {
                    Some(i) => fail(at(&format!("eps[{i}]")), format!("eps is below 4h = {}", 4.0 * h)),
                    None => Ok(()),
                }
            }
            ProbeSpec::Energy { mode: EnergyMode::Sampled, .. } | ProbeSpec::Energy { mode: EnergyMode::Mollified, .. }
                if self.ladder.eps.is_empty() =>
            {
                fail("ladder.eps", "energy needs the eps ladder")
            }
            ProbeSpec::KeyEstimate { n, eps, r, m, k: kk, .. } => {
                dyadic_down("eps", eps)?;
                if *r < 4.0 {
                    return fail(at("r"), "the estimate needs r >= 4");
                }
                if *m > 1 || *kk > 1 {
                    return fail(at("m"), "derivative indices must be 0 or 1");
                }
                let h = self.domain.h(*n);
                match eps.iter().position(|&e| e < 4.0 * h * (1.0 - 1e-12)) {
                    Some(i) => fail(at(&format!("eps[{i}]")), format!("eps is below 4h = {}", 4.0 * h)),
                    None => Ok(()),
                }
            }
            ProbeSpec::Jop { xi_count, .. } if *xi_count == 0 => fail(at("xi_count"), "must be positive"),
            ProbeSpec::ChiBounds { k: ks, .. } if ks.is_empty() => fail(at("k"), "needs at least one k"),
            _ => Ok(()),
        }
    }
}
