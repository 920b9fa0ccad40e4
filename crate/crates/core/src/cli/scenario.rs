//! Scenario files. See `docs/scenario.md` for the schema.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Failure;
use crate::conservation::{PsiParams, PsiSource};
use crate::dynamics::{StageScenario, Transition};
use crate::integrator::IntegratorOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub params: Params,
    pub initial: Initial,
    #[serde(default)]
    pub stages: Stages,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default = "default_psi")]
    pub psi: PsiSource,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta_tilde: f64,
    pub mu1: f64,
    pub mu2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(rename = "N0")]
    pub n0: f64,
    #[serde(rename = "A10")]
    pub a10: f64,
    #[serde(rename = "A20")]
    pub a20: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stages {
    pub durations: [f64; 3],
    pub transition: Transition,
    /// Length in `t` of the window checked by `conservation`.
    #[serde(default = "default_conservation_span")]
    pub conservation_span: f64,
}

impl Default for Stages {
    fn default() -> Self {
        Self { durations: [50.0, 200.0, 50.0], transition: Transition::Event, conservation_span: default_conservation_span() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_count: usize,
    pub extinction_threshold: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorOptions::default();
        Self { rel_tol: d.rel_tol, abs_tol: d.abs_tol, sample_count: 1001, extinction_threshold: d.extinction_threshold }
    }
}

fn default_psi() -> PsiSource {
    PsiSource::Derived
}

fn default_conservation_span() -> f64 {
    5.0
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let sc: Self = serde_json::from_str(text).map_err(|e| Failure::Validation(format!("scenario: {e}")))?;
        sc.stage_scenario().validate()?;
        sc.options().validate()?;
        sc.psi_params().validate()?;
        if !(sc.stages.conservation_span > 0.0 && sc.stages.conservation_span.is_finite()) {
            return Err(Failure::Validation("conservation_span must be positive".into()));
        }
        Ok(sc)
    }

    pub fn stage_scenario(&self) -> StageScenario {
        let p = &self.params;
        StageScenario {
            lambda: p.lambda,
            k: p.k,
            k1: p.k1,
            k2: p.k2,
            delta: p.delta,
            delta1: p.delta1,
            delta2: p.delta2,
            delta_tilde: p.delta_tilde,
            mu1: p.mu1,
            mu2: p.mu2,
            initial: [self.initial.n0, self.initial.a10, self.initial.a20],
            durations: self.stages.durations,
            transition: self.stages.transition,
        }
    }

    /// Tolerances and sampling; spans are set per command.
    pub fn options(&self) -> IntegratorOptions {
        let i = &self.integrator;
        IntegratorOptions {
            rel_tol: i.rel_tol,
            abs_tol: i.abs_tol,
            sample_count: i.sample_count,
            extinction_threshold: i.extinction_threshold,
            ..IntegratorOptions::default()
        }
    }

    pub fn psi_params(&self) -> PsiParams {
        let p = &self.params;
        PsiParams { lambda: p.lambda, k: p.k, k1: p.k1, delta: p.delta, delta1: p.delta1 }
    }
}
