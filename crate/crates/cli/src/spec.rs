//! Scenario specifications (the JSON run configuration).

use moser_core::homo::{Differentiator, PipelineConfig, Tolerances};
use serde::{Deserialize, Serialize};

use crate::catalog::{find, Scenario, ScenarioKind};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub transgression_tol: f64,
    pub certificate_tol: f64,
    pub hom_tol: f64,
}

impl From<Tolerances> for ToleranceSpec {
    fn from(t: Tolerances) -> Self {
        ToleranceSpec {
            transgression_tol: t.transgression_tol,
            certificate_tol: t.certificate_tol,
            hom_tol: t.hom_tol,
        }
    }
}

impl From<ToleranceSpec> for Tolerances {
    fn from(t: ToleranceSpec) -> Self {
        Tolerances {
            transgression_tol: t.transgression_tol,
            certificate_tol: t.certificate_tol,
            hom_tol: t.hom_tol,
        }
    }
}

/// A fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario_id: String,
    pub kind: ScenarioKind,
    pub eps_max: f64,
    pub eps_steps: usize,
    pub quadrature_resolution: usize,
    pub sample_count: usize,
    pub fd_step: f64,
    pub tolerances: ToleranceSpec,
    pub seed: u64,
}

/// The on-disk form: everything but `scenario_id` falls back to the
/// scenario's defaults.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    scenario_id: String,
    kind: Option<ScenarioKind>,
    eps_max: Option<f64>,
    eps_steps: Option<usize>,
    quadrature_resolution: Option<usize>,
    sample_count: Option<usize>,
    fd_step: Option<f64>,
    tolerances: Option<PartialTolerances>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialTolerances {
    transgression_tol: Option<f64>,
    certificate_tol: Option<f64>,
    hom_tol: Option<f64>,
}

/// Overrides given on the command line.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub eps_max: Option<f64>,
    pub eps_steps: Option<usize>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
}

impl ScenarioSpec {
    /// The scenario's default configuration.
    pub fn defaults(scenario: &Scenario) -> Self {
        let d = &scenario.defaults;
        ScenarioSpec {
            scenario_id: scenario.id.to_string(),
            kind: scenario.kind,
            eps_max: d.eps_max,
            eps_steps: d.eps_steps,
            quadrature_resolution: d.quadrature_resolution,
            sample_count: d.sample_count,
            fd_step: d.differentiator.fd_step,
            tolerances: d.tolerances.into(),
            seed: d.seed,
        }
    }

    pub fn for_id(id: &str) -> Result<Self, CliError> {
        Ok(Self::defaults(&lookup(id)?))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: SpecFile = serde_json::from_str(text)?;
        let scenario = lookup(&file.scenario_id)?;
        let mut spec = Self::defaults(&scenario);
        if let Some(kind) = file.kind {
            if kind != scenario.kind {
                return Err(CliError::Spec(format!(
                    "scenario {} has kind {}, spec says {}",
                    scenario.id, scenario.kind, kind
                )));
            }
        }
        spec.eps_max = file.eps_max.unwrap_or(spec.eps_max);
        spec.eps_steps = file.eps_steps.unwrap_or(spec.eps_steps);
        spec.quadrature_resolution = file.quadrature_resolution.unwrap_or(spec.quadrature_resolution);
        spec.sample_count = file.sample_count.unwrap_or(spec.sample_count);
        spec.fd_step = file.fd_step.unwrap_or(spec.fd_step);
        spec.seed = file.seed.unwrap_or(spec.seed);
        if let Some(t) = file.tolerances {
            let cur = &mut spec.tolerances;
            cur.transgression_tol = t.transgression_tol.unwrap_or(cur.transgression_tol);
            cur.certificate_tol = t.certificate_tol.unwrap_or(cur.certificate_tol);
            cur.hom_tol = t.hom_tol.unwrap_or(cur.hom_tol);
        }
        Ok(spec)
    }

    pub fn apply(&mut self, o: &Overrides) {
        self.eps_max = o.eps_max.unwrap_or(self.eps_max);
        self.eps_steps = o.eps_steps.unwrap_or(self.eps_steps);
        self.quadrature_resolution = o.resolution.unwrap_or(self.quadrature_resolution);
        self.seed = o.seed.unwrap_or(self.seed);
    }

    /// Pipeline configuration for this spec on top of the scenario's
    /// defaults. Checks the invariants of the spec.
    pub fn config(&self, scenario: &Scenario) -> Result<PipelineConfig, CliError> {
        let t = &self.tolerances;
        if !(t.transgression_tol > 0.0 && t.certificate_tol > 0.0 && t.hom_tol > 0.0) {
            return Err(CliError::Spec("tolerances must be positive".into()));
        }
        if self.eps_steps < 2 {
            return Err(CliError::Spec("eps_steps must be at least 2".into()));
        }
        if !(self.eps_max > 0.0) {
            return Err(CliError::Spec("eps_max must be positive".into()));
        }
        let domain = match &scenario.family {
            crate::catalog::Family::Homomorphism(d) => d.eps_domain(),
            crate::catalog::Family::Subgroup(s) => s.eps_domain(),
            crate::catalog::Family::Weak { deformation, .. } => deformation.eps_domain(),
        };
        if self.eps_max > domain.1 {
            return Err(CliError::Spec(format!(
                "eps_max {} outside the scenario domain [{}, {}]",
                self.eps_max, domain.0, domain.1
            )));
        }
        let cfg = PipelineConfig {
            eps_max: self.eps_max,
            eps_steps: self.eps_steps,
            quadrature_resolution: self.quadrature_resolution,
            sample_count: self.sample_count,
            differentiator: Differentiator {
                fd_step: self.fd_step,
                ..scenario.defaults.differentiator
            },
            seed: self.seed,
            tolerances: self.tolerances.into(),
            ..scenario.defaults.clone()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn lookup(id: &str) -> Result<Scenario, CliError> {
    if id == "custom" {
        return Err(CliError::Spec(
            "custom scenarios need code; build them with the library API".into(),
        ));
    }
    find(id).ok_or_else(|| CliError::Spec(format!("unknown scenario {id:?}")))
}
