//! Dispatches a scenario to its pipeline and builds the report.

use std::time::Instant;

use moser_core::homo::{certify_trivial, certify_weakly_trivial, PipelineConfig, TrivialityCertificate};
use moser_core::subgroup::{certify_subgroup_trivial, SubgroupCertificate};

use crate::catalog::{Family, Scenario};
use crate::error::CliError;
use crate::report::RunReport;
use crate::spec::{lookup, ScenarioSpec};

/// Radius for the logarithm of reported `g_ε`.
const REPORT_LOG_RADIUS: f64 = 2.5;

#[derive(Clone, Debug)]
pub enum Outcome {
    Homomorphism(TrivialityCertificate),
    Subgroup(SubgroupCertificate),
    Weak(TrivialityCertificate),
}

impl Outcome {
    pub fn certificate(&self) -> &TrivialityCertificate {
        match self {
            Outcome::Homomorphism(c) | Outcome::Weak(c) => c,
            Outcome::Subgroup(s) => &s.certificate,
        }
    }
}

pub fn execute(scenario: &Scenario, cfg: &PipelineConfig) -> Result<Outcome, CliError> {
    Ok(match &scenario.family {
        Family::Homomorphism(d) => Outcome::Homomorphism(certify_trivial(d, cfg)?),
        Family::Subgroup(s) => Outcome::Subgroup(certify_subgroup_trivial(s, cfg)?),
        Family::Weak { deformation, z, u } => {
            Outcome::Weak(certify_weakly_trivial(deformation, z, u, cfg)?)
        }
    })
}

pub fn run(spec: &ScenarioSpec) -> Result<RunReport, CliError> {
    let scenario = lookup(&spec.scenario_id)?;
    let cfg = spec.config(&scenario)?;
    let start = Instant::now();
    let outcome = execute(&scenario, &cfg)?;
    let wall_time = start.elapsed().as_secs_f64();
    Ok(build_report(&scenario, spec, &outcome, wall_time))
}

pub fn build_report(
    scenario: &Scenario,
    spec: &ScenarioSpec,
    outcome: &Outcome,
    wall_time: f64,
) -> RunReport {
    let cert = outcome.certificate();
    let n = cert.eps_grid.len();
    let g_path = if cert.g_path.is_empty() {
        vec![None; n]
    } else {
        cert.g_path
            .iter()
            .map(|g| {
                g.log_within(REPORT_LOG_RADIUS)
                    .ok()
                    .map(|v| v.coords().iter().copied().collect())
            })
            .collect()
    };
    let (condition_number, complement_residual) = match outcome {
        Outcome::Subgroup(s) => (
            Some(s.condition_numbers.clone()),
            Some(s.complement_residual.clone()),
        ),
        _ => (None, None),
    };
    RunReport {
        scenario_id: scenario.id.to_string(),
        kind: scenario.kind.to_string(),
        verdict: cert.verdict.to_string(),
        expected_verdict: scenario.expected.to_string(),
        epsilon: cert.eps_grid.clone(),
        cocycle_defect: cert.cocycle_defect.clone(),
        transgression_residual: cert.transgression.residuals.clone(),
        conjugation_error: cert.conjugation_error.clone(),
        g_path,
        certified_prefix: cert.certified_prefix,
        failing_eps: cert.failing_eps,
        preimage_residual: cert.preimage_residual.clone(),
        condition_number,
        complement_residual,
        wall_time,
        config: spec.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}
