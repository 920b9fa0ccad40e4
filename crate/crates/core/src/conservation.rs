//! Production-cost functional `F = e^{ψ} v^a / u^b` on intrinsic-time
//! host/symbiont flows, with `u = dx/ds`, `v = dy/ds`, `a = 1 + 1/λ`,
//! `b = 1/λ` and `ψ = c_x x + c_y y`.
//!
//! Along `u' = -Γ^x_xx u² - 2Γ^x_xy u v`, `v' = -Γ^y_yy v² - 2Γ^y_xy u v`
//! the logarithmic derivative is
//! `c_x u + c_y v + a v'/v - b u'/u`, which vanishes identically when
//! `c_x = 2a Γ^y_xy - b Γ^x_xx` and `c_y = a Γ^y_yy - 2b Γ^x_xy`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate_second_order, IntegratorOptions};
use crate::model::{QuadraticSode, Trajectory};
use crate::production::{intrinsic_initial, symbiosis_spray, SprayForm, TimeMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiSource {
    /// Coefficients as published for the pre-bleaching system.
    Paper,
    /// Coefficients solved from the conservation requirement.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostFunctional {
    pub c_x: f64,
    pub c_y: f64,
    pub a: f64,
    pub b: f64,
    pub source: PsiSource,
}

impl CostFunctional {
    pub fn new(lambda: f64, (c_x, c_y): (f64, f64), source: PsiSource) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be > 0")));
        }
        if !(c_x.is_finite() && c_y.is_finite()) {
            return Err(Error::InvalidParameter("psi coefficients must be finite".into()));
        }
        Ok(Self { c_x, c_y, a: 1.0 + 1.0 / lambda, b: 1.0 / lambda, source })
    }

    /// Conserved functional of an arbitrary 2-D spray without `u²` terms in
    /// the second equation or `v²` terms in the first.
    pub fn for_sode(sode: &QuadraticSode, lambda: f64) -> Result<Self> {
        Self::new(lambda, psi_for_sode(sode, lambda)?, PsiSource::Derived)
    }
}

/// Host/symbiont parameters entering ψ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    pub lambda: f64,
    pub k: f64,
    pub k1: f64,
    pub delta: f64,
    pub delta1: f64,
}

impl PsiParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("K", self.k), ("K1", self.k1)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.delta.is_finite() && self.delta1.is_finite()) {
            return Err(Error::InvalidParameter("symbiosis coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn spray(&self, form: SprayForm) -> Result<QuadraticSode> {
        symbiosis_spray(form, self.lambda, self.k, self.k1, self.delta, self.delta1)
    }
}

/// ψ coefficients in the published closed form. `K1` does not enter.
pub fn psi_paper(lambda: f64, k: f64, _k1: f64, delta: f64, delta1: f64) -> (f64, f64) {
    let c_x = lambda * delta1 / k + (-k + delta1 * k) / (k * k);
    let c_y = lambda * delta / k + (1.0 + lambda) * (-k + delta * k) / (k * k);
    (c_x, c_y)
}

/// ψ coefficients that make `F` a first integral of the printed-sign spray
/// `x'' + (λ/K)x'² + (δλ/K)x'y' = 0`, `y'' + (λ/K1)y'² + (δ1λ/K1)y'x' = 0`.
pub fn psi_derived(lambda: f64, k: f64, k1: f64, delta: f64, delta1: f64) -> (f64, f64) {
    let c_x = (lambda + 1.0) * delta1 / k1 - 1.0 / k;
    let c_y = (lambda + 1.0) / k1 - delta / k;
    (c_x, c_y)
}

/// Solves the two coefficient-matching equations for a general 2-D spray.
pub fn psi_for_sode(sode: &QuadraticSode, lambda: f64) -> Result<(f64, f64)> {
    if sode.n() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: sode.n() });
    }
    if sode.get(0, 1, 1) != 0.0 || sode.get(1, 0, 0) != 0.0 {
        return Err(Error::Precondition(
            "no exponential-linear first integral: spray has v² in the first or u² in the second equation".into(),
        ));
    }
    let a = 1.0 + 1.0 / lambda;
    let b = 1.0 / lambda;
    // coefficient of u: c_x - 2a Γ^y_xy + b Γ^x_xx = 0
    // coefficient of v: c_y - a Γ^y_yy + 2b Γ^x_xy = 0
    let c_x = 2.0 * a * sode.get(1, 0, 1) - b * sode.get(0, 0, 0);
    let c_y = a * sode.get(1, 1, 1) - 2.0 * b * sode.get(0, 0, 1);
    Ok((c_x, c_y))
}

/// `F = e^{c_x x + c_y y} v^a / u^b`, evaluated in log space.
pub fn evaluate_f(x: f64, y: f64, u: f64, v: f64, f: &CostFunctional) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::NonPositiveVelocity { index: 0, value: u });
    }
    if !(v > 0.0) {
        return Err(Error::NonPositiveVelocity { index: 1, value: v });
    }
    Ok((f.c_x * x + f.c_y * y + f.a * v.ln() - f.b * u.ln()).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    /// `max_j |F(s_j) - F(s_0)| / |F(s_0)|`.
    pub max_rel_drift: f64,
    pub series: Vec<f64>,
}

/// Evaluates `F` along a 2-D intrinsic-time trajectory.
pub fn conservation_drift(traj_s: &Trajectory, f: &CostFunctional) -> Result<DriftReport> {
    let vel = traj_s.velocities().ok_or(Error::MissingComponent("velocities"))?;
    let mut series = Vec::with_capacity(traj_s.len());
    for (st, v) in traj_s.states().iter().zip(vel) {
        let x = st.productions.as_ref().ok_or(Error::MissingComponent("positions"))?;
        if x.len() != 2 || v.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
        }
        series.push(evaluate_f(x[0], x[1], v[0], v[1], f)?);
    }
    let f0 = *series.first().ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
    let max_rel_drift = series.iter().map(|&fj| (fj - f0).abs() / f0.abs()).fold(0.0, f64::max);
    Ok(DriftReport { max_rel_drift, series })
}

/// Intrinsic-time flow of a host/symbiont spray started from populations
/// `(n0, a0)` at `t = 0` with zero production, over the `s` interval that
/// corresponds to `t ∈ [0, duration]`.
pub fn intrinsic_flow(
    sode: &QuadraticSode,
    lambda: f64,
    populations: [f64; 2],
    duration: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let tm = TimeMap::new(lambda)?;
    let (s0, v0) = intrinsic_initial(&tm, 0.0, &populations);
    let opts = opts.with_span(s0, tm.to_s(duration));
    Ok(integrate_second_order(sode, &[0.0, 0.0], &v0, &opts)?.trajectory)
}

/// Disagreement factor between the two drifts above which the comparison
/// is flagged.
pub const DRIFT_FLAG_RATIO: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiComparison {
    pub params: PsiParams,
    pub paper: (f64, f64),
    pub derived: (f64, f64),
    pub paper_drift: f64,
    pub derived_drift: f64,
    /// Drifts differ by more than [`DRIFT_FLAG_RATIO`].
    pub flagged: bool,
    /// `K1 != K`: the derived coefficients depend on `K1`, the published
    /// ones do not.
    pub k1_structural_difference: bool,
}

/// Tabulates both ψ versions and their drifts along the same printed-sign
/// flow.
pub fn compare_psi(
    params: &PsiParams,
    populations: [f64; 2],
    duration: f64,
    opts: &IntegratorOptions,
) -> Result<PsiComparison> {
    params.validate()?;
    let PsiParams { lambda, k, k1, delta, delta1 } = *params;
    let traj = intrinsic_flow(&params.spray(SprayForm::Printed)?, lambda, populations, duration, opts)?;
    let paper = psi_paper(lambda, k, k1, delta, delta1);
    let derived = psi_derived(lambda, k, k1, delta, delta1);
    let paper_drift = conservation_drift(&traj, &CostFunctional::new(lambda, paper, PsiSource::Paper)?)?.max_rel_drift;
    let derived_drift =
        conservation_drift(&traj, &CostFunctional::new(lambda, derived, PsiSource::Derived)?)?.max_rel_drift;
    let hi = paper_drift.max(derived_drift);
    let lo = paper_drift.min(derived_drift);
    Ok(PsiComparison {
        params: *params,
        paper,
        derived,
        paper_drift,
        derived_drift,
        flagged: hi > DRIFT_FLAG_RATIO * lo,
        k1_structural_difference: k1 != k,
    })
}
