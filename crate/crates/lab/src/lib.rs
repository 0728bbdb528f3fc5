//! Scenario runner for `eikonal_core`.
//!
//! A scenario is a JSON file naming a domain, an optional Eikonal generator,
//! a refinement ladder and a list of probes. Running it produces a
//! [`report::ScenarioReport`] whose verdicts compare each measured quantity
//! against a threshold.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod entropies;
pub mod io;
pub mod plot;
pub mod probes;
pub mod report;

use config::ScenarioConfig;
use report::{Metadata, ProbeReport, ScenarioReport};

/// Runs every probe of `config` in order. A probe that errors gets a failing
/// `completed` verdict and the run continues with the next probe.
pub fn run_scenario(config: &ScenarioConfig) -> ScenarioReport {
    let ctx = probes::Context::new(config);
    let mut out = Vec::with_capacity(config.probes.len());
    for (index, spec) in config.probes.iter().enumerate() {
        let mut rep = ProbeReport::new(index, spec.kind());
        let result = match &ctx {
            Ok(ctx) => probes::run_probe(ctx, spec, &mut rep),
            Err(e) => Err(anyhow::anyhow!("{e:#}")),
        };
        if let Err(e) = result {
            rep.fail(format!("{e:#}"));
        }
        out.push(rep);
    }
    let verdict_count = out.iter().map(|p| p.verdicts.len()).sum();
    let failed_verdicts = out.iter().flat_map(|p| &p.verdicts).filter(|v| !v.passed).count();
    ScenarioReport {
        scenario: config.name.clone(),
        description: config.description.clone(),
        metadata: Metadata {
            lab_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            generator: config.generator.as_ref().map(|g| g.kind().to_string()),
            probe_count: out.len(),
            verdict_count,
            failed_verdicts,
        },
        probes: out,
    }
}
