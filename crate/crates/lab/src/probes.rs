//! Probe implementations. Each probe fills a [`ProbeReport`] with tables,
//! verdicts and plots; errors are returned to the runner, which records them.

use std::f64::consts::{PI, TAU};

use anyhow::{anyhow, bail, Context as _};
use eikonal_core::eikonal::{jop_characteristic_residual, EikonalSolution};
use eikonal_core::entropy::{
    chi_k_bound, circle_condition_residual, divergence_identity_check, entropy_production, isotropy_residual, lemma18_identity_check,
    make_entropy, make_psi, psi_antisymmetry, special_xi_entropy, Entropy, PsiMode, SigmaE1E2,
};
use eikonal_core::inclusion::{
    beltrami_pointwise, beltrami_residual, c0_bruteforce, det_kernel, gamma_forward, gamma_inverse, k_matrix, phase_recover,
    DEFAULT_K_TOLERANCE,
};
use eikonal_core::mollify::{mollify, Mollifier};
use eikonal_core::quadrature::{bump_test_function, Bump, Region};
use eikonal_core::regularity::{detect_singularities, lipschitz_map, vortex_fit};
use eikonal_core::sobolev::{
    aviles_giga_energy, eps_scaled_quotient, gagliardo_seminorm_strided, key_estimate_probe, mollification_bounds_check,
};
use eikonal_core::{Error, ScalarField2D, VectorField2D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{
    BumpSpec, EnergyMode, GeneratorSpec, GrowthExpectation, JopField, ProbeSpec, ProductionExpectation, ScenarioConfig,
};
use crate::entropies::{parse_phi, EntropySpec};
use crate::plot::{heatmap, line_plot, Series};
use crate::report::{Plot, ProbeReport, Table};

/// Everything a probe may read.
pub struct Context<'a> {
    pub config: &'a ScenarioConfig,
    pub generator: Option<EikonalSolution>,
    pub entropies: Vec<(String, EntropySpec)>,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ScenarioConfig) -> anyhow::Result<Self> {
        let generator = config.generator.as_ref().map(|g| g.build()).transpose()?;
        let entropies = config
            .entropies
            .iter()
            .map(|name| EntropySpec::parse(name).map(|e| (name.clone(), e)).map_err(|m| anyhow!(m)))
            .collect::<anyhow::Result<_>>()?;
        Ok(Self { config, generator, entropies })
    }

    fn generator(&self) -> anyhow::Result<&EikonalSolution> {
        self.generator.as_ref().ok_or_else(|| anyhow!("the probe needs a generator"))
    }

    fn sample(&self, n: usize) -> anyhow::Result<(ScalarField2D, VectorField2D)> {
        let grid = self.config.domain.grid(n)?;
        Ok(self.generator()?.sample(&grid))
    }

    fn ladder(&self) -> &[usize] {
        &self.config.ladder.n
    }

    fn h(&self, n: usize) -> f64 {
        self.config.domain.h(n)
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(index as u64))
    }
}

/// Successive ratios `v[k+1]/v[k]`.
fn growth(v: &[f64]) -> Vec<f64> {
    v.windows(2).map(|w| w[1] / w[0]).collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn column_name(name: &str) -> String {
    name.replace([',', ':'], "_")
}

/// `∫ ζ dH¹` over the line through `point` with unit normal `normal`, by
/// composite Simpson along the chord.
pub fn line_integral(bump: &BumpSpec, point: [f64; 2], normal: [f64; 2]) -> anyhow::Result<f64> {
    let b = Bump::new(bump.center, bump.radius)?;
    let tangent = [-normal[1], normal[0]];
    let reach = ((point[0] - bump.center[0]).powi(2) + (point[1] - bump.center[1]).powi(2)).sqrt() + bump.radius;
    let panels = 20_000;
    let step = 2.0 * reach / panels as f64;
    let at = |k: usize| {
        let t = -reach + k as f64 * step;
        b.value([point[0] + t * tangent[0], point[1] + t * tangent[1]])
    };
    let mut s = at(0) + at(panels);
    for k in 1..panels {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * at(k);
    }
    Ok(s * step / 3.0)
}

fn perp(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn run_probe(ctx: &Context, spec: &ProbeSpec, rep: &mut ProbeReport) -> anyhow::Result<()> {
    match spec {
        ProbeSpec::Kernel { samples } => kernel(*samples, rep),
        ProbeSpec::Beltrami { phases } => beltrami(ctx, *phases, rep),
        ProbeSpec::GammaRoundTrip => gamma_round_trip(ctx, rep),
        ProbeSpec::EntropyIdentities { points, phi } => entropy_identities(ctx, *points, phi, rep),
        ProbeSpec::DivergenceIdentities { width } => divergence_identities(ctx, *width, rep),
        ProbeSpec::Production { bump, expect } => production(ctx, bump, *expect, rep),
        ProbeSpec::Seminorm { radius, margin, stride, expect } => seminorm(ctx, *radius, *margin, *stride, *expect, rep),
        ProbeSpec::Quotient { n, eps, margin, expect } => quotient(ctx, *n, eps, *margin, *expect, rep),
        ProbeSpec::Energy { mode, margin } => energy(ctx, *mode, *margin, rep),
        ProbeSpec::ProfileEnergy { eps, n } => profile_energy(ctx, *eps, *n, rep),
        ProbeSpec::AdmOrdering { bump, eps_cells, margin } => adm_ordering(ctx, bump, *eps_cells, *margin, rep),
        ProbeSpec::Singularities { threshold_factor, fit_radius } => singularities(ctx, *threshold_factor, *fit_radius, rep),
        ProbeSpec::Jop { bump, xi_count, field } => jop(ctx, bump, *xi_count, *field, rep),
        ProbeSpec::KeyEstimate { n, eps, bump, r, m, k, bound } => key_estimate(ctx, *n, eps, bump, *r, *m, *k, *bound, rep),
        ProbeSpec::MollificationBounds { n, eps_cells } => mollification_bounds(ctx, *n, *eps_cells, rep),
        ProbeSpec::ChiBounds { xi, k } => chi_bounds(*xi, k, rep),
    }
}

/// `(α, f, g, f/g²)` at `samples + 1` equally spaced angles of `[0, 2π]`.
pub fn kcurve_table(samples: usize) -> Table {
    let mut t = Table::new("kcurve", &["alpha", "f", "g", "ratio"]);
    for k in 0..=samples {
        let a = TAU * k as f64 / samples as f64;
        let d = det_kernel(a);
        t.push(vec![a, d.f, d.g, d.ratio]);
    }
    t
}

pub fn kcurve_plot(t: &Table) -> String {
    let a = t.column("alpha").unwrap_or_default();
    let series: Vec<Series> = ["f", "g", "ratio"]
        .iter()
        .map(|c| Series::new(c, a.iter().cloned().zip(t.column(c).unwrap_or_default()).collect()))
        .collect();
    line_plot(&series, "determinant kernel", "alpha", "value", false, false)
}

fn kernel(samples: usize, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let a = 1e-2;
    let d = det_kernel(a);
    rep.check_at_most("taylor_f", (d.f / a.powi(4) - 1.0 / 6.0).abs(), 1e-3);
    rep.check_at_most("taylor_g", (d.g / (a * a) - 1.0).abs(), 1e-3);
    let p = det_kernel(PI);
    rep.check_at_most("f_at_pi", (p.f - 8.0 / 9.0).abs(), 1e-12);
    rep.check_at_most("g_at_pi", (p.g - 20.0 / 9.0).abs(), 1e-12);
    let c0 = c0_bruteforce(samples)?;
    rep.check("min_f_positive", "> 0", c0.min_f, c0.min_f > 0.0);
    rep.check_at_most("c0_conjecture", (c0.c0 - 1.0 / 6.0).abs(), 1e-3);
    rep.records.push(json!({"c0": c0.c0, "alpha": c0.alpha, "min_f": c0.min_f, "samples": samples}));
    let t = kcurve_table(720);
    rep.plots.push(Plot { name: "kcurve".into(), svg: kcurve_plot(&t) });
    rep.tables.push(t);
    Ok(())
}

fn beltrami(ctx: &Context, phases: usize, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let mut t = Table::new("phases", &["theta", "r1", "r2", "recovery_error"]);
    let wrap = |d: f64| {
        let d = d.rem_euclid(TAU);
        d.min(TAU - d)
    };
    for k in 0..phases {
        let th = TAU * k as f64 / phases as f64;
        let m = k_matrix(th).matrix;
        let (r1, r2) = beltrami_pointwise(m);
        let back = phase_recover(m, DEFAULT_K_TOLERANCE)?;
        t.push(vec![th, r1, r2, wrap(back - th)]);
    }
    rep.check_at_most("max_r1", max_of(t.column("r1").unwrap()), 1e-12);
    rep.check_at_most("max_r2", max_of(t.column("r2").unwrap()), 1e-12);
    rep.check_at_most("phase_round_trip", max_of(t.column("recovery_error").unwrap()), 1e-10);
    let mut rng = ctx.rng(rep.index);
    let mut worst = 0.0f64;
    for _ in 0..phases {
        let th: f64 = rng.gen_range(0.0..TAU);
        let mut m = k_matrix(th).matrix;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v += rng.gen_range(-1e-8..1e-8);
            }
        }
        worst = worst.max(wrap(phase_recover(m, DEFAULT_K_TOLERANCE)? - th));
    }
    rep.check_at_most("perturbed_recovery", worst, 1e-7);
    rep.tables.push(t);
    Ok(())
}

fn gamma_round_trip(ctx: &Context, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let spec = ctx.config.generator.as_ref().ok_or_else(|| anyhow!("the probe needs a generator"))?;
    if matches!(spec, GeneratorSpec::MultiPoint { .. } | GeneratorSpec::BallDistance { .. }) {
        bail!("the round trip is defined for vortex, planar and roof generators; '{}' excises its ridge cells", spec.kind());
    }
    let mut t = Table::new("gamma", &["n", "h", "round_trip", "path_residual", "curl_mass"]);
    let mut last_df = None;
    for &n in ctx.ladder() {
        let (u, gu) = ctx.sample(n)?;
        match gamma_forward(&u, &gu) {
            Ok(out) => {
                let back = gamma_inverse(&out.df, DEFAULT_K_TOLERANCE)?;
                let err = max_of(back.iter_valid().map(|(i, j, v)| {
                    let e = gu.raw(i, j);
                    (v[0] - e[0]).abs().max((v[1] - e[1]).abs())
                }));
                t.push(vec![n as f64, ctx.h(n), err, out.path_residual, out.curl_mass]);
                last_df = Some(out.df);
            }
            Err(Error::NotInClass { curl_mass, .. }) => t.push(vec![n as f64, ctx.h(n), f64::NAN, f64::NAN, curl_mass]),
            Err(e) => return Err(e.into()),
        }
    }
    let curl = t.column("curl_mass").unwrap();
    if matches!(spec, GeneratorSpec::Roof { .. }) {
        let tol = eikonal_core::inclusion::DEFAULT_CURL_TOLERANCE;
        for (k, &c) in curl.iter().enumerate() {
            rep.check(&format!("not_in_class_n{}", ctx.ladder()[k]), format!("curl mass > {tol}"), c, c > tol);
        }
    } else {
        let rt = t.column("round_trip").unwrap();
        let pr = t.column("path_residual").unwrap();
        for (k, &e) in rt.iter().enumerate() {
            rep.check_at_most(&format!("round_trip_n{}", ctx.ladder()[k]), if e.is_nan() { f64::INFINITY } else { e }, 1e-12);
        }
        if max_of(pr.iter().cloned()) <= 1e-10 {
            rep.check_at_most("path_residual", max_of(pr.iter().cloned()), 1e-10);
        } else {
            for (k, r) in growth(&pr).into_iter().enumerate() {
                rep.check_at_least(&format!("path_residual_decay_n{}", ctx.ladder()[k + 1]), 1.0 / r, 1.8);
            }
        }
    }
    if let Some(df) = last_df {
        let (r1, _) = beltrami_residual(&df);
        rep.plots.push(Plot { name: "beltrami_r1".into(), svg: heatmap(&r1, "Beltrami residual r1 of DF") });
    }
    rep.tables.push(t);
    Ok(())
}

type VectorFn = fn([f64; 2]) -> [f64; 2];

fn entropy_identities(ctx: &Context, points: usize, phi: &str, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let mut named: Vec<(String, EntropySpec)> = vec![
        ("sigma_e1e2".into(), EntropySpec::SigmaE1E2),
        ("sigma_eps1eps2".into(), EntropySpec::SigmaEps1Eps2),
    ];
    for (n, e) in &ctx.entropies {
        if !named.iter().any(|(m, _)| m == n) {
            named.push((n.clone(), e.clone()));
        }
    }
    let mut t = Table::new("circle", &["entropy", "analytic", "finite_difference"]);
    for (k, (name, e)) in named.iter().enumerate() {
        let a = circle_condition_residual(e, 256, false);
        let f = circle_condition_residual(e, 256, true);
        t.push(vec![k as f64, a, f]);
        rep.check_at_most(&format!("circle_{}", column_name(name)), a.max(f), 1e-5);
    }
    rep.tables.push(t);

    let p = parse_phi(phi).map_err(|m| anyhow!(m))?;
    let entropy = make_entropy(p.clone())?;
    let psi = make_psi(entropy.clone(), PsiMode::WithCompletion);
    let mut iso = 0.0f64;
    for k in 0..points {
        let th = TAU * (k as f64 + 0.5) / points as f64;
        for z in [[th.cos(), th.sin()], [1.0, 0.0], [0.0, 1.0], [-0.7, 0.0]] {
            iso = iso.max(isotropy_residual(&entropy, psi.eval(z)?, z));
        }
    }
    rep.check_at_most("isotropy", iso, 1e-6);

    let mut rng = ctx.rng(rep.index);
    let mut anti = Table::new("antisymmetry", &["z1", "z2", "lhs", "rhs"]);
    while anti.rows.len() < points {
        let z: [f64; 2] = [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)];
        if z[0].abs() < 0.05 || z[1].abs() < 0.05 {
            continue;
        }
        let (l, r) = psi_antisymmetry(&p, z)?;
        anti.push(vec![z[0], z[1], l, r]);
    }
    let worst = max_of(anti.rows.iter().map(|r| (r[2] - r[3]).abs()));
    rep.check_at_most("psi_antisymmetry", worst, 1e-5);
    rep.tables.push(anti);

    let fields: [(&str, VectorFn); 2] = [
        ("hyperbolic", |x| [-x[0], x[1]]),
        ("cellular", |x| [-x[0].sin() * x[1].cos(), x[0].cos() * x[1].sin()]),
    ];
    let ns = [32usize, 64, 128, 256];
    let mut l18 = Table::new("divergence_free_identity", &["n", "hyperbolic", "cellular"]);
    let mut cols = [Vec::new(), Vec::new()];
    for &n in &ns {
        let grid = ctx.config.domain.grid(n)?;
        let mut row = vec![n as f64];
        for (c, (_, f)) in fields.iter().enumerate() {
            let r = lemma18_identity_check(&p, &VectorField2D::from_fn(grid, f))?;
            cols[c].push(r);
            row.push(r);
        }
        l18.push(row);
    }
    for (c, (name, _)) in fields.iter().enumerate() {
        for (k, r) in growth(&cols[c]).into_iter().enumerate() {
            rep.check_within(&format!("divergence_free_{name}_ratio_n{}", ns[k + 1]), 1.0 / r, 3.5, 4.5);
        }
    }
    rep.tables.push(l18);
    Ok(())
}

fn divergence_identities(ctx: &Context, width: f64, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let mut t = Table::new("residuals", &["n", "h", "e1e2", "eps1eps2"]);
    let moll = Mollifier::new(width)?;
    for &n in ctx.ladder() {
        let (u, _) = ctx.sample(n)?;
        let (a, b) = divergence_identity_check(&mollify(&u, &moll)?)?;
        t.push(vec![n as f64, ctx.h(n), a, b]);
    }
    for col in ["e1e2", "eps1eps2"] {
        let v = t.column(col).unwrap();
        for (k, r) in growth(&v).into_iter().enumerate() {
            rep.check_within(&format!("{col}_ratio_n{}", ctx.ladder()[k + 1]), 1.0 / r, 3.5, 4.5);
        }
    }
    let h = t.column("h").unwrap();
    let series: Vec<Series> = ["e1e2", "eps1eps2"].iter().map(|c| Series::new(c, h.iter().cloned().zip(t.column(c).unwrap()).collect())).collect();
    rep.plots.push(Plot { name: "convergence".into(), svg: line_plot(&series, "divergence identity residuals", "h", "max residual", true, true) });
    rep.tables.push(t);
    Ok(())
}

/// `[Φ(w₊) − Φ(w₋)]·ν ∫ζ dH¹` for the roof's side fields `w± = g±⊥`.
fn trace_jump_oracle(e: &dyn Entropy, spec: &GeneratorSpec, bump: &BumpSpec) -> anyhow::Result<f64> {
    let GeneratorSpec::Roof { point, normal, g_plus, g_minus } = spec else {
        bail!("the trace-jump oracle needs a roof generator");
    };
    let jump = {
        let a = e.value(perp(*g_plus));
        let b = e.value(perp(*g_minus));
        dot([a[0] - b[0], a[1] - b[1]], *normal)
    };
    Ok(jump * line_integral(bump, *point, *normal)?)
}

fn production(ctx: &Context, bump: &BumpSpec, expect: ProductionExpectation, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let mut cols = vec!["n", "h", "eps"];
    let names: Vec<String> = ctx.entropies.iter().map(|(n, _)| column_name(n)).collect();
    let skipped: Vec<String> = names.iter().map(|n| format!("skipped_{n}")).collect();
    cols.extend(names.iter().map(String::as_str));
    cols.extend(skipped.iter().map(String::as_str));
    let mut t = Table::new("production", &cols);
    let mut density = None;
    for (k, &n) in ctx.ladder().iter().enumerate() {
        let eps = ctx.config.ladder.eps.get(k).copied().unwrap_or(0.0);
        let grid = ctx.config.domain.grid(n)?;
        let (_, gu) = ctx.sample(n)?;
        let w = gu.perp();
        let zeta = bump_test_function(&grid, bump.center, bump.radius)?;
        let mut values = Vec::new();
        let mut skips = Vec::new();
        for (i, (_, e)) in ctx.entropies.iter().enumerate() {
            let p = entropy_production(e, &w, &zeta, eps)?;
            values.push(p.value);
            skips.push(p.skipped as f64);
            if i == 0 && k + 1 == ctx.ladder().len() {
                density = Some(p.density);
            }
        }
        let mut row = vec![n as f64, ctx.h(n), eps];
        row.extend(values);
        row.extend(skips);
        t.push(row);
    }
    match expect {
        ProductionExpectation::Vanishing => {
            for name in &names {
                let v: Vec<f64> = t.column(name).unwrap().iter().map(|x| x.abs()).collect();
                let worst = max_of(growth(&v));
                rep.check(&format!("{name}_monotone"), "every ratio < 1", worst, worst < 1.0);
                rep.check(&format!("{name}_final"), "< 0.01", *v.last().unwrap(), *v.last().unwrap() < 1e-2);
            }
        }
        ProductionExpectation::TraceJump => {
            let spec = ctx.config.generator.as_ref().ok_or_else(|| anyhow!("the probe needs a generator"))?;
            let oracles: Vec<f64> = ctx.entropies.iter().map(|(_, e)| trace_jump_oracle(e, spec, bump)).collect::<anyhow::Result<_>>()?;
            let scale = max_of(oracles.iter().map(|o| o.abs()));
            let last = t.rows.last().ok_or_else(|| anyhow!("empty ladder"))?;
            for (i, name) in names.iter().enumerate() {
                let got = last[3 + i];
                if oracles[i].abs() > 1e-12 {
                    rep.check_at_most(&format!("{name}_trace_jump"), (got - oracles[i]).abs() / oracles[i].abs(), 0.02);
                } else {
                    rep.check_at_most(&format!("{name}_relative_to_jump"), got.abs() / scale, 0.01);
                }
            }
            rep.records.push(json!({"oracles": oracles, "line_integral": line_integral(bump, spec_point(spec), spec_normal(spec))?}));
        }
    }
    if let Some(d) = density {
        rep.plots.push(Plot { name: "density".into(), svg: heatmap(&d, &format!("production density, {}", ctx.entropies[0].0)) });
    }
    let h = t.column("h").unwrap();
    let series: Vec<Series> = names.iter().map(|c| Series::new(c, h.iter().cloned().zip(t.column(c).unwrap().iter().map(|v| v.abs())).collect())).collect();
    rep.plots.push(Plot { name: "ladder".into(), svg: line_plot(&series, "|production| along the ladder", "h", "|P|", true, true) });
    rep.tables.push(t);
    Ok(())
}

fn spec_point(spec: &GeneratorSpec) -> [f64; 2] {
    match spec {
        GeneratorSpec::Roof { point, .. } => *point,
        _ => [0.0, 0.0],
    }
}

fn spec_normal(spec: &GeneratorSpec) -> [f64; 2] {
    match spec {
        GeneratorSpec::Roof { normal, .. } => *normal,
        _ => [0.0, 1.0],
    }
}

fn seminorm(ctx: &Context, radius: f64, margin: f64, stride: usize, expect: GrowthExpectation, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let region = Region::interior(margin)?;
    let mut t = Table::new("seminorm", &["sigma", "n", "h", "value"]);
    let mut series = Vec::new();
    for &s in &ctx.config.ladder.sigma {
        let mut vals = Vec::new();
        for &n in ctx.ladder() {
            let (_, gu) = ctx.sample(n)?;
            let v = gagliardo_seminorm_strided(&gu, s, radius, &region, stride)?;
            t.push(vec![s, n as f64, ctx.h(n), v]);
            vals.push(v);
        }
        match expect {
            GrowthExpectation::Stable => {
                let spread = max_of(vals.iter().cloned()) / min_of(vals.iter().cloned());
                rep.check_at_most(&format!("sigma{s}_max_over_min"), spread, 1.5);
            }
            GrowthExpectation::Growing => {
                for (k, r) in growth(&vals).into_iter().enumerate() {
                    rep.check_at_least(&format!("sigma{s}_growth_n{}", ctx.ladder()[k + 1]), r, 1.3);
                }
            }
        }
        series.push(Series::new(&format!("sigma={s}"), ctx.ladder().iter().map(|&n| ctx.h(n)).zip(vals).collect()));
    }
    rep.plots.push(Plot { name: "refinement".into(), svg: line_plot(&series, "Gagliardo seminorm (4th power)", "h", "value", true, true) });
    rep.tables.push(t);
    Ok(())
}

fn quotient(ctx: &Context, n: usize, eps: &[f64], margin: f64, expect: GrowthExpectation, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let region = Region::interior(margin)?;
    let (_, gu) = ctx.sample(n)?;
    let mut t = Table::new("quotient", &["eps", "value"]);
    for &e in eps {
        t.push(vec![e, eps_scaled_quotient(&gu, e, &region)?]);
    }
    let vals = t.column("value").unwrap();
    match expect {
        GrowthExpectation::Stable => {
            rep.check_at_most("max_over_min", max_of(vals.iter().cloned()) / min_of(vals.iter().cloned()), 4.0);
        }
        GrowthExpectation::Growing => {
            for (k, r) in growth(&vals).into_iter().enumerate() {
                rep.check_at_least(&format!("growth_eps{}", eps[k + 1]), r, 1.2);
            }
        }
    }
    let series = [Series::new("quotient", eps.iter().cloned().zip(vals).collect())];
    rep.plots.push(Plot { name: "eps".into(), svg: line_plot(&series, "eps-scaled difference quotient", "eps", "value", true, true) });
    rep.tables.push(t);
    Ok(())
}

fn energy(ctx: &Context, mode: EnergyMode, margin: f64, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let region = Region::interior(margin)?;
    let mut t = Table::new("energy", &["n", "eps", "value"]);
    match mode {
        EnergyMode::Sampled => {
            let n = *ctx.ladder().last().unwrap();
            let (u, _) = ctx.sample(n)?;
            for &e in &ctx.config.ladder.eps {
                let v = aviles_giga_energy(&u, e, &region)?;
                t.push(vec![n as f64, e, v]);
                rep.check_at_most(&format!("abs_energy_eps{e}"), v.abs(), 1e-12);
            }
        }
        EnergyMode::Mollified => {
            for (&n, &e) in ctx.ladder().iter().zip(&ctx.config.ladder.eps) {
                let (u, _) = ctx.sample(n)?;
                let ue = mollify(&u, &Mollifier::new(e)?)?;
                t.push(vec![n as f64, e, aviles_giga_energy(&ue, e, &region)?]);
            }
            let v = t.column("value").unwrap();
            let worst = max_of(growth(&v));
            rep.check("decreasing", "every ratio < 1", worst, worst < 1.0);
        }
    }
    rep.tables.push(t);
    Ok(())
}

fn profile_energy(ctx: &Context, eps: f64, n: usize, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let grid = ctx.config.domain.grid(n)?;
    let mid = ctx.config.domain.origin[1] + 0.5 * ctx.config.domain.side;
    let u = ScalarField2D::from_fn(grid, |x| eps * ((x[1] - mid) / eps).cosh().ln());
    let margin = 0.1;
    let length = (1.0 - 2.0 * margin) * ctx.config.domain.side;
    let per_length = aviles_giga_energy(&u, eps, &Region::interior(margin)?)? / length;
    let mut t = Table::new("profile", &["n", "eps", "energy_per_length", "target"]);
    t.push(vec![n as f64, eps, per_length, 8.0 / 3.0]);
    rep.check_at_most("relative_error", (per_length / (8.0 / 3.0) - 1.0).abs(), 0.03);
    rep.tables.push(t);
    Ok(())
}

fn adm_ordering(ctx: &Context, bump: &BumpSpec, eps_cells: f64, margin: f64, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let region = Region::interior(margin)?;
    let mut t = Table::new("ordering", &["n", "eps", "energy", "abs_pairing"]);
    for &n in ctx.ladder() {
        let grid = ctx.config.domain.grid(n)?;
        let eps = eps_cells * ctx.h(n);
        let (u, gu) = ctx.sample(n)?;
        let ue = mollify(&u, &Mollifier::new(eps)?)?;
        let e = aviles_giga_energy(&ue, eps, &region)?;
        let zeta = bump_test_function(&grid, bump.center, bump.radius)?;
        let p = entropy_production(&SigmaE1E2, &gu.perp(), &zeta, eps)?.value.abs();
        t.push(vec![n as f64, eps, e, p]);
        rep.check_at_least(&format!("energy_minus_pairing_n{n}"), e - p, 0.0);
    }
    rep.tables.push(t);
    Ok(())
}

fn singularities(ctx: &Context, factor: f64, fit_radius: f64, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let spec = ctx.config.generator.as_ref().ok_or_else(|| anyhow!("the probe needs a generator"))?;
    let gen = ctx.generator()?;
    let mut t = Table::new("detection", &["n", "clusters", "candidates", "line_like"]);
    let truth = gen.point_singularities();
    for &n in ctx.ladder() {
        let (u, gu) = ctx.sample(n)?;
        let h = ctx.h(n);
        let r = detect_singularities(&gu, factor)?;
        t.push(vec![n as f64, r.clusters.len() as f64, r.candidates.len() as f64, if r.line_like { 1.0 } else { 0.0 }]);
        for c in &r.candidates {
            let z = refine_center(&gu, *c, fit_radius);
            let rec = match vortex_fit(&u, z, fit_radius) {
                Ok(p) => json!({"n": n, "candidate": c, "zeta": p.zeta, "alpha": p.alpha, "residual": p.fit_residual, "accepted": p.accepted}),
                Err(e) => json!({"n": n, "candidate": c, "zeta": z, "alpha": null, "residual": null, "accepted": false, "error": e.to_string()}),
            };
            rep.records.push(rec);
        }
        let near = |p: [f64; 2]| min_of(r.candidates.iter().map(|c| ((c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2)).sqrt()));
        match spec {
            GeneratorSpec::Planar { .. } => {
                rep.check_at_most(&format!("candidates_n{n}"), r.candidates.len() as f64, 0.0);
                rep.check_at_most(&format!("clusters_n{n}"), r.clusters.len() as f64, 0.0);
            }
            GeneratorSpec::Roof { .. } => {
                rep.check(&format!("line_like_n{n}"), "line-like cluster present", if r.line_like { 1.0 } else { 0.0 }, r.line_like);
                rep.check_at_most(&format!("candidates_n{n}"), r.candidates.len() as f64, 0.0);
            }
            GeneratorSpec::Vortex { .. } | GeneratorSpec::MultiPoint { .. } if n >= 256 => {
                let m = truth.len() as f64;
                rep.check(&format!("candidates_n{n}"), format!("== {m}"), r.candidates.len() as f64, r.candidates.len() == truth.len());
                for (k, p) in truth.iter().enumerate() {
                    rep.check_at_most(&format!("distance_{k}_n{n}_over_h"), near(*p) / h, 2.0);
                }
            }
            _ => {}
        }
        if let GeneratorSpec::Vortex { center, sign } = spec {
            let fit = vortex_fit(&u, *center, fit_radius)?;
            rep.check(&format!("fit_alpha_n{n}"), format!("== {sign}"), fit.alpha, fit.alpha == *sign);
            rep.check_at_most(&format!("fit_residual_n{n}"), fit.fit_residual, 1e-12);
        }
        if n == *ctx.ladder().last().unwrap() {
            let lip = lipschitz_map(&gu, 2.0 * h)?.map(|l| (1.0 + l).log10());
            rep.plots.push(Plot { name: "lipschitz".into(), svg: heatmap(&lip, "log10(1 + local Lipschitz estimate)") });
        }
    }
    rep.tables.push(t);
    Ok(())
}

/// Point closest, in the least-squares sense, to the lines through the cell
/// centres `x` along `∇u(x)`, using the cells with `4h ≤ |x − c| ≤ radius`.
/// For a vortex every such line passes through its centre. Returns `c` when
/// the system is degenerate.
pub fn refine_center(grad_u: &VectorField2D, c: [f64; 2], radius: f64) -> [f64; 2] {
    let grid = grad_u.grid();
    let h = grid.h_max();
    let (mut a, mut b) = ([[0.0; 2]; 2], [0.0; 2]);
    for (i, j, g) in grad_u.iter_valid() {
        let x = grid.center(i, j);
        let d = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt();
        if d < 4.0 * h || d > radius {
            continue;
        }
        let p = [[1.0 - g[0] * g[0], -g[0] * g[1]], [-g[0] * g[1], 1.0 - g[1] * g[1]]];
        for r in 0..2 {
            for k in 0..2 {
                a[r][k] += p[r][k];
            }
            b[r] += p[r][0] * x[0] + p[r][1] * x[1];
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if !(det.abs() > 1e-12) {
        return c;
    }
    [(a[1][1] * b[0] - a[0][1] * b[1]) / det, (a[0][0] * b[1] - a[1][0] * b[0]) / det]
}

fn jop(ctx: &Context, bump: &BumpSpec, xi_count: usize, field: JopField, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let spec = ctx.config.generator.as_ref().ok_or_else(|| anyhow!("the probe needs a generator"))?;
    let mut t = Table::new("residuals", &["n", "h", "theta", "residual"]);
    let thetas: Vec<f64> = (0..xi_count).map(|k| 0.3 + TAU * k as f64 / xi_count as f64).collect();
    let mut worst = Vec::new();
    for &n in ctx.ladder() {
        let grid = ctx.config.domain.grid(n)?;
        let (_, gu) = ctx.sample(n)?;
        let m = match field {
            JopField::Grad => gu,
            JopField::Perp => gu.perp(),
        };
        let zeta = bump_test_function(&grid, bump.center, bump.radius)?;
        let mut w = 0.0f64;
        for &th in &thetas {
            let r = jop_characteristic_residual(&m, [th.cos(), th.sin()], &zeta)?;
            t.push(vec![n as f64, ctx.h(n), th, r]);
            w = w.max(r.abs());
        }
        worst.push(w);
    }
    match spec {
        GeneratorSpec::Planar { .. } => rep.check_at_most("max_residual", max_of(worst.iter().cloned()), 1e-10),
        GeneratorSpec::Vortex { .. } => {
            let sup = Bump::new(bump.center, bump.radius)?.sup_gradient();
            for (k, &n) in ctx.ladder().iter().enumerate() {
                let c = 4.0 * bump.radius * sup;
                rep.check_at_most(&format!("residual_over_h_n{n}"), worst[k] / ctx.h(n), c);
            }
            let r = max_of(growth(&worst));
            rep.check("decreasing", "every ratio < 1", r, r < 1.0);
        }
        GeneratorSpec::Roof { normal, g_plus, g_minus, point } => {
            let line = line_integral(bump, *point, *normal)?;
            let (mp, mm) = match field {
                JopField::Grad => (*g_plus, *g_minus),
                JopField::Perp => (perp(*g_plus), perp(*g_minus)),
            };
            let n = *ctx.ladder().last().unwrap();
            for (k, &th) in thetas.iter().enumerate() {
                let xi = [th.cos(), th.sin()];
                let chi = |v: [f64; 2]| if dot(v, xi) > 0.0 { 1.0 } else { 0.0 };
                let oracle = -(chi(mp) - chi(mm)) * dot(xi, *normal) * line;
                if oracle.abs() < 1e-3 * line {
                    continue;
                }
                let got = t.rows[t.rows.len() - thetas.len() + k][3];
                rep.check_at_most(&format!("theta{th:.4}_relative_error_n{n}"), (got - oracle).abs() / oracle.abs(), 0.05);
            }
        }
        _ => {}
    }
    rep.tables.push(t);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn key_estimate(ctx: &Context, n: usize, eps: &[f64], bump: &BumpSpec, r: f64, m: usize, k: usize, bound: f64, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let grid = ctx.config.domain.grid(n)?;
    let (u, _) = ctx.sample(n)?;
    let f = bump_test_function(&grid, bump.center, bump.radius)?;
    let mut t = Table::new("key_estimate", &["eps", "lhs", "norm", "ratio"]);
    for &e in eps {
        let (lhs, norm) = key_estimate_probe(&u, e, &f, r, m, k)?;
        t.push(vec![e, lhs, norm, lhs / norm]);
    }
    rep.check_at_most("max_ratio", max_of(t.column("ratio").unwrap()), bound);
    rep.tables.push(t);
    Ok(())
}

fn mollification_bounds(ctx: &Context, n: usize, eps_cells: f64, rep: &mut ProbeReport) -> anyhow::Result<()> {
    let (_, gu) = ctx.sample(n)?;
    let eps = eps_cells * ctx.h(n);
    let b = mollification_bounds_check(&gu, eps).context("mollification bounds")?;
    let mut t = Table::new("bounds", &["n", "eps", "checked", "defect_violations", "derivative_violations"]);
    t.push(vec![n as f64, eps, b.checked as f64, b.defect_violations as f64, b.derivative_violations as f64]);
    rep.check_at_most("defect_violations", b.defect_violations as f64, 0.0);
    rep.check_at_most("derivative_violations", b.derivative_violations as f64, 0.0);
    rep.check_at_least("checked_cells", b.checked as f64, 1.0);
    rep.tables.push(t);
    Ok(())
}

fn chi_bounds(xi: [f64; 2], ks: &[u32], rep: &mut ProbeReport) -> anyhow::Result<()> {
    let mut t = Table::new("chi_k", &["k", "sup", "psi_sup", "alpha"]);
    for &k in ks {
        let b = chi_k_bound(&special_xi_entropy(xi, k)?)?;
        t.push(vec![k as f64, b.sup, b.psi_sup, b.alpha]);
        let limit = 4.0 * b.psi_sup / (b.alpha * b.alpha) * (1.0 + 1e-12);
        rep.check_at_most(&format!("sup_k{k}"), b.sup, limit);
    }
    rep.tables.push(t);
    Ok(())
}
