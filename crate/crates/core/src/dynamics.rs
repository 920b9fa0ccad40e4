//! Coral/alga stage models, the two-species competition classifier and the
//! three-stage bleaching recovery pipeline.
//!
//! Species order is `(N, A1, A2)` for the three-species stages, `(A1, A2)`
//! for the reduced competition system and `(N, A2)` after recovery.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, integrate_until, EventRecord, Integration, IntegratorOptions};
use crate::model::{vh_from_params, ModelParams, State, VhSystem};

/// Ratios closer than this to a classification threshold are degenerate.
pub const DEGENERATE_BAND: f64 = 1e-12;
/// Relative distance to an equilibrium accepted as "converged".
pub const EQUILIBRIUM_RTOL: f64 = 1e-3;
/// Default starting algae as fractions of `(K1, K2)` when probing a
/// competition by simulation.
pub const PROBE_FRACTIONS: (f64, f64) = (0.6, 0.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    /// Leave the competition stage when A1 goes extinct.
    Event,
    /// Leave the competition stage after its full duration.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageScenario {
    pub lambda: f64,
    /// Carrying capacities of coral N, symbiont A1 and commensal A2.
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    /// Symbiosis coefficients: A1 on N, N on A1, N on A2.
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Benefit of either alga to the coral during competition.
    pub delta_tilde: f64,
    /// Competitive impact of A2 on A1 and of A1 on A2.
    pub mu1: f64,
    pub mu2: f64,
    /// `(N, A1, A2)` at the start of the first stage.
    pub initial: [f64; 3],
    pub durations: [f64; 3],
    pub transition: Transition,
}

impl StageScenario {
    /// Reference scenario: λ=1, K=2, K1=K2=1, all symbiosis coefficients 0.1,
    /// μ1=2, μ2=0.5.
    pub fn desk() -> Self {
        Self {
            lambda: 1.0,
            k: 2.0,
            k1: 1.0,
            k2: 1.0,
            delta: 0.1,
            delta1: 0.1,
            delta2: 0.1,
            delta_tilde: 0.1,
            mu1: 2.0,
            mu2: 0.5,
            initial: [1.0, 0.5, 0.5],
            durations: [50.0, 200.0, 50.0],
            transition: Transition::Event,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("K", self.k),
            ("K1", self.k1),
            ("K2", self.k2),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [
            ("delta", self.delta),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("delta_tilde", self.delta_tilde),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        if self.initial.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("initial densities must be finite and >= 0".into()));
        }
        if self.durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidParameter("stage durations must be positive".into()));
        }
        Ok(())
    }

    /// Recovery requires the warming to hurt A1 more than A2.
    pub fn validate_recovery(&self) -> Result<()> {
        self.validate()?;
        if self.mu1 <= self.mu2 {
            return Err(Error::Precondition(format!(
                "recovery needs mu1 > mu2 (got mu1 = {}, mu2 = {})",
                self.mu1, self.mu2
            )));
        }
        Ok(())
    }

    /// Same scenario with the recovered alga's niche parameters in the
    /// symbiont slot (A1 → A2, K1 → K2, δ1 → δ2).
    pub fn with_symbiont_replaced(&self) -> Self {
        Self { k1: self.k2, delta1: self.delta2, ..self.clone() }
    }

    pub fn competition(&self) -> Competition {
        Competition { lambda: self.lambda, k1: self.k1, k2: self.k2, mu1: self.mu1, mu2: self.mu2 }
    }
}

fn common_lambda(lambda: f64, n: usize) -> Vec<f64> {
    vec![lambda; n]
}

/// Host and one symbiont: `dN/dt = λN(1 - N/K + δ A/K)`,
/// `dA/dt = λA(1 - A/Ka + δa N/Ka)`.
pub fn symbiosis_pair(lambda: f64, k: f64, ka: f64, delta: f64, delta_a: f64) -> Result<VhSystem> {
    let p = ModelParams::new(
        common_lambda(lambda, 2),
        vec![k, ka],
        vec![vec![0.0, delta], vec![delta_a, 0.0]],
    )?;
    Ok(vh_from_params(&p))
}

/// Commensal + symbiosis: A2 benefits from N but does not affect it.
pub fn stage1_field(sc: &StageScenario) -> Result<VhSystem> {
    sc.validate()?;
    let p = ModelParams::new(
        common_lambda(sc.lambda, 3),
        vec![sc.k, sc.k1, sc.k2],
        vec![
            vec![0.0, sc.delta, 0.0],
            vec![sc.delta1, 0.0, 0.0],
            vec![sc.delta2, 0.0, 0.0],
        ],
    )?;
    Ok(vh_from_params(&p))
}

/// Symbiosis + competition between the two algae.
pub fn stage2_field(sc: &StageScenario) -> Result<VhSystem> {
    sc.validate()?;
    let p = ModelParams::new(
        common_lambda(sc.lambda, 3),
        vec![sc.k, sc.k1, sc.k2],
        vec![
            vec![0.0, sc.delta_tilde, sc.delta_tilde],
            vec![sc.delta1, 0.0, -sc.mu1],
            vec![sc.delta2, -sc.mu2, 0.0],
        ],
    )?;
    Ok(vh_from_params(&p))
}

/// Competition-only system in `(A1, A2)` obtained when `μ1, μ2` dominate the
/// symbiosis coefficients.
pub fn stage2_reduced_field(sc: &StageScenario) -> Result<VhSystem> {
    sc.validate()?;
    sc.competition().field()
}

/// Symbiosis between N and the new alga A2.
pub fn stage3_field(sc: &StageScenario) -> Result<VhSystem> {
    sc.validate()?;
    symbiosis_pair(sc.lambda, sc.k, sc.k2, sc.delta, sc.delta2)
}

/// The `(N, A1)` production system before bleaching.
pub fn system_before(sc: &StageScenario) -> Result<VhSystem> {
    sc.validate()?;
    symbiosis_pair(sc.lambda, sc.k, sc.k1, sc.delta, sc.delta1)
}

/// Positive equilibrium of a host/symbiont pair, when `δ δa < 1`.
pub fn symbiotic_equilibrium(k: f64, ka: f64, delta: f64, delta_a: f64) -> Option<(f64, f64)> {
    let det = 1.0 - delta * delta_a;
    if det <= 0.0 {
        return None;
    }
    let n = (k + delta * ka) / det;
    let a = (ka + delta_a * k) / det;
    (n > 0.0 && a > 0.0).then_some((n, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompetitionOutcome {
    /// Bistable: the winner depends on the starting proportions.
    FounderControl,
    Species1Excluded,
    Species2Excluded,
    StableCoexistence,
    /// A ratio sits on a classification threshold.
    Degenerate,
}

/// Two-species Gause-Witt competition:
/// `dA1/dt = λA1(1 - A1/K1 - μ1 A2/K1)`, `dA2/dt = λA2(1 - A2/K2 - μ2 A1/K2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Competition {
    pub lambda: f64,
    pub k1: f64,
    pub k2: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl Competition {
    pub fn field(&self) -> Result<VhSystem> {
        let p = ModelParams::from_gause_witt(
            common_lambda(self.lambda, 2),
            vec![self.k1, self.k2],
            vec![vec![0.0, self.mu1], vec![self.mu2, 0.0]],
        )?;
        Ok(vh_from_params(&p))
    }

    pub fn classify(&self) -> Result<CompetitionOutcome> {
        classify_competition(self.k1, self.k2, self.mu1, self.mu2)
    }

    /// Interior equilibrium from the two linear nullclines.
    pub fn interior_equilibrium(&self) -> Option<(f64, f64)> {
        let det = 1.0 - self.mu1 * self.mu2;
        if det == 0.0 {
            return None;
        }
        let a1 = (self.k1 - self.mu1 * self.k2) / det;
        let a2 = (self.k2 - self.mu2 * self.k1) / det;
        (a1 > 0.0 && a2 > 0.0).then_some((a1, a2))
    }

    /// Two starts displaced by the relative offset `eps` from the interior
    /// saddle, one towards each axis. The saddle's stable manifold is an
    /// increasing curve, so in the bistable case the two starts lie in
    /// different basins.
    pub fn saddle_straddle(&self, eps: f64) -> Option<[(f64, f64); 2]> {
        let (a1, a2) = self.interior_equilibrium()?;
        Some([(a1 * (1.0 + eps), a2 * (1.0 - eps)), (a1 * (1.0 - eps), a2 * (1.0 + eps))])
    }
}

/// Relative offset from the saddle used to confirm founder control.
pub const STRADDLE_OFFSET: f64 = 0.05;

pub fn classify_competition(k1: f64, k2: f64, mu1: f64, mu2: f64) -> Result<CompetitionOutcome> {
    for (name, v) in [("K1", k1), ("K2", k2), ("mu1", mu1), ("mu2", mu2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
        }
    }
    let t1 = k1 / k2;
    let t2 = k2 / k1;
    if (mu1 - t1).abs() <= DEGENERATE_BAND || (mu2 - t2).abs() <= DEGENERATE_BAND {
        return Ok(CompetitionOutcome::Degenerate);
    }
    Ok(match (mu1 > t1, mu2 > t2) {
        (true, true) => CompetitionOutcome::FounderControl,
        (true, false) => CompetitionOutcome::Species1Excluded,
        (false, true) => CompetitionOutcome::Species2Excluded,
        (false, false) => CompetitionOutcome::StableCoexistence,
    })
}

/// One simulated competition run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetitionRun {
    pub initial: (f64, f64),
    pub final_state: (f64, f64),
    pub events: Vec<EventRecord>,
    /// Outcome read off this run alone; founder control needs two runs.
    pub observed: Option<CompetitionOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeReport {
    pub predicted: CompetitionOutcome,
    /// `None` when the horizon was too short to decide.
    pub observed: Option<CompetitionOutcome>,
    pub agree: bool,
    pub runs: Vec<CompetitionRun>,
}

fn near(value: f64, target: f64) -> bool {
    (value - target).abs() <= EQUILIBRIUM_RTOL * target.abs()
}

/// Integrates the competition system from `(a1, a2)` and reads off which
/// equilibrium was reached.
pub fn observe_competition(c: &Competition, a1: f64, a2: f64, opts: &IntegratorOptions) -> Result<CompetitionRun> {
    let run = integrate(&c.field()?, &State::new(vec![a1, a2]), opts)?;
    let last = &run.trajectory.final_state().expect("trajectory has samples").populations;
    let (f1, f2) = (last[0], last[1]);
    let dead1 = run.extinction_of(0).is_some() && f1 == 0.0;
    let dead2 = run.extinction_of(1).is_some() && f2 == 0.0;
    let observed = match (dead1, dead2) {
        (true, false) if near(f2, c.k2) => Some(CompetitionOutcome::Species1Excluded),
        (false, true) if near(f1, c.k1) => Some(CompetitionOutcome::Species2Excluded),
        (false, false) => c
            .interior_equilibrium()
            .filter(|&(e1, e2)| near(f1, e1) && near(f2, e2))
            .map(|_| CompetitionOutcome::StableCoexistence),
        _ => None,
    };
    Ok(CompetitionRun { initial: (a1, a2), final_state: (f1, f2), events: run.events, observed })
}

/// Checks the classifier against simulation from `(a1, a2)`. Founder control
/// is confirmed when that run ends in an exclusion and two runs straddling
/// the interior saddle end with different winners.
pub fn verify_competition(c: &Competition, a1: f64, a2: f64, opts: &IntegratorOptions) -> Result<OutcomeReport> {
    let predicted = c.classify()?;
    if predicted == CompetitionOutcome::Degenerate {
        return Err(Error::Precondition("parameters lie on a classification threshold".into()));
    }
    let mut runs = vec![observe_competition(c, a1, a2, opts)?];
    let observed = if predicted == CompetitionOutcome::FounderControl {
        let starts = c.saddle_straddle(STRADDLE_OFFSET).expect("bistable systems have an interior saddle");
        for (s1, s2) in starts {
            runs.push(observe_competition(c, s1, s2, opts)?);
        }
        match (runs[0].observed, runs[1].observed, runs[2].observed) {
            (Some(x), Some(y), Some(z)) if is_exclusion(x) && is_exclusion(y) && is_exclusion(z) && y != z => {
                Some(CompetitionOutcome::FounderControl)
            }
            (Some(x), Some(y), Some(z)) if x == y && y == z => Some(x),
            _ => None,
        }
    } else {
        runs[0].observed
    };
    Ok(OutcomeReport { predicted, observed, agree: observed == Some(predicted), runs })
}

fn is_exclusion(o: CompetitionOutcome) -> bool {
    matches!(o, CompetitionOutcome::Species1Excluded | CompetitionOutcome::Species2Excluded)
}

/// [`verify_competition`] for the scenario's competition stage, starting
/// from its initial algae.
pub fn verify_outcome(sc: &StageScenario, opts: &IntegratorOptions) -> Result<OutcomeReport> {
    sc.validate()?;
    verify_competition(&sc.competition(), sc.initial[1], sc.initial[2], opts)
}

/// Random non-degenerate competition with both threshold ratios at least
/// `margin` (relative) away from one. Each of the four outcomes is equally
/// likely.
pub fn draw_competition<R: Rng + ?Sized>(rng: &mut R, margin: f64) -> Competition {
    let lambda = rng.gen_range(0.5..2.0);
    let k1 = rng.gen_range(0.5..5.0);
    let k2 = rng.gen_range(0.5..5.0);
    let case: u8 = rng.gen_range(0..4);
    let mut ratio = |strong: bool| {
        if strong {
            rng.gen_range(1.0 + margin..3.0)
        } else {
            rng.gen_range(0.2..1.0 - margin)
        }
    };
    // r1 = μ1 K2 / K1, r2 = μ2 K1 / K2
    let r1 = ratio(case & 1 == 1);
    let r2 = ratio(case & 2 == 2);
    Competition { lambda, k1, k2, mu1: r1 * k1 / k2, mu2: r2 * k2 / k1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryStatus {
    /// A1 went extinct and (N, A2) settled at the symbiotic equilibrium.
    Recovered,
    /// A1 went extinct but the coral or the new alga did not persist.
    Failed,
    /// A1 survived the competition horizon or the last stage did not settle.
    Undecided,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub stage1: Integration,
    pub stage2: Integration,
    pub stage3: Integration,
    /// Stage start times on the shared clock.
    pub stage_starts: [f64; 3],
    pub a1_extinction: Option<f64>,
    /// Analytic equilibrium of the recovered symbiosis, if positive.
    pub equilibrium: Option<(f64, f64)>,
    pub status: RecoveryStatus,
}

impl PipelineResult {
    pub fn final_state(&self) -> &State {
        self.stage3.trajectory.final_state().expect("trajectory has samples")
    }
}

fn stage_options(base: &IntegratorOptions, start: f64, duration: f64) -> IntegratorOptions {
    base.with_span(start, start + duration)
}

/// Runs the three stages back to back on one clock. `opts` supplies
/// tolerances and sample counts; spans come from the scenario durations.
pub fn run_recovery_pipeline(sc: &StageScenario, opts: &IntegratorOptions) -> Result<PipelineResult> {
    sc.validate_recovery()?;
    let t0 = 0.0;
    let s1 = integrate(&stage1_field(sc)?, &State::new(sc.initial.to_vec()), &stage_options(opts, t0, sc.durations[0]))?;

    let t1 = sc.durations[0];
    let seed2 = s1.trajectory.final_state().expect("samples").clone();
    let stop = (sc.transition == Transition::Event).then_some(1);
    let s2 = integrate_until(&stage2_field(sc)?, &seed2, &stage_options(opts, t1, sc.durations[1]), stop)?;
    let a1_extinction = s2.extinction_of(1);

    let t2 = *s2.trajectory.times().last().expect("samples");
    let end2 = &s2.trajectory.final_state().expect("samples").populations;
    let seed3 = State::new(vec![end2[0], end2[2]]);
    let s3 = integrate(&stage3_field(sc)?, &seed3, &stage_options(opts, t2, sc.durations[2]))?;

    let equilibrium = symbiotic_equilibrium(sc.k, sc.k2, sc.delta, sc.delta2);
    let last = &s3.trajectory.final_state().expect("samples").populations;
    let status = match (a1_extinction, equilibrium) {
        (None, _) => RecoveryStatus::Undecided,
        (Some(_), _) if last[0] == 0.0 || last[1] == 0.0 => RecoveryStatus::Failed,
        (Some(_), Some((n, a))) if near(last[0], n) && near(last[1], a) => RecoveryStatus::Recovered,
        (Some(_), None) => RecoveryStatus::Failed,
        (Some(_), Some(_)) => RecoveryStatus::Undecided,
    };
    Ok(PipelineResult {
        stage1: s1,
        stage2: s2,
        stage3: s3,
        stage_starts: [t0, t1, t2],
        a1_extinction,
        equilibrium,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionGap {
    /// Largest componentwise difference in `(A1, A2)` between the full and
    /// reduced competition stages on the shared sample grid.
    pub max_gap: f64,
    /// Index (1 or 2) of the alga driven extinct in each run, if any.
    pub full_excluded: Option<usize>,
    pub reduced_excluded: Option<usize>,
}

/// Measures how far the coral-coupled competition stage departs from the
/// pure competition system started from the same algae.
pub fn reduction_gap(sc: &StageScenario, opts: &IntegratorOptions) -> Result<ReductionGap> {
    sc.validate()?;
    let full = integrate(&stage2_field(sc)?, &State::new(sc.initial.to_vec()), opts)?;
    let reduced = integrate(
        &stage2_reduced_field(sc)?,
        &State::new(vec![sc.initial[1], sc.initial[2]]),
        opts,
    )?;
    let max_gap = full
        .trajectory
        .states()
        .iter()
        .zip(reduced.trajectory.states())
        .map(|(f, r)| {
            let d1 = (f.populations[1] - r.populations[0]).abs();
            let d2 = (f.populations[2] - r.populations[1]).abs();
            d1.max(d2)
        })
        .fold(0.0, f64::max);
    let excluded = |run: &Integration, idx: [usize; 2]| {
        if run.extinction_of(idx[0]).is_some() {
            Some(1)
        } else if run.extinction_of(idx[1]).is_some() {
            Some(2)
        } else {
            None
        }
    };
    Ok(ReductionGap {
        max_gap,
        full_excluded: excluded(&full, [1, 2]),
        reduced_excluded: excluded(&reduced, [0, 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::State;

    fn unit_sc() -> StageScenario {
        StageScenario {
            lambda: 1.0,
            k: 1.0,
            k1: 1.0,
            k2: 1.0,
            delta: 0.1,
            delta1: 0.1,
            delta2: 0.1,
            delta_tilde: 0.1,
            mu1: 2.0,
            mu2: 1.0,
            ..StageScenario::desk()
        }
    }

    #[test]
    fn stage1_without_symbiont_is_logistic() {
        let sc = StageScenario::desk();
        let f = stage1_field(&sc).unwrap();
        let n = 0.7;
        let r = f.rhs(&State::new(vec![n, 0.0, 0.3])).unwrap();
        assert!((r[0] - sc.lambda * n * (1.0 - n / sc.k)).abs() < 1e-15);
    }

    #[test]
    fn stage1_commensal_does_not_feed_coral() {
        let sc = StageScenario::desk();
        let f = stage1_field(&sc).unwrap();
        let a = f.rhs(&State::new(vec![1.0, 0.4, 0.0])).unwrap();
        let b = f.rhs(&State::new(vec![1.0, 0.4, 5.0])).unwrap();
        assert_eq!(a[0], b[0]);
    }

    #[test]
    fn stage2_rates_at_unit_state() {
        let r = stage2_field(&unit_sc()).unwrap().rhs(&State::new(vec![1.0, 1.0, 1.0])).unwrap();
        assert!((r[0] - 0.2).abs() < 1e-15);
        assert!((r[1] + 1.9).abs() < 1e-15);
        assert!((r[2] + 0.9).abs() < 1e-15);
    }

    #[test]
    fn stage3_matches_stage1_after_substitution() {
        let sc = StageScenario { k1: 0.8, k2: 1.7, delta1: 0.05, delta2: 0.3, ..StageScenario::desk() };
        let s3 = stage3_field(&sc).unwrap();
        let s1 = stage1_field(&sc.with_symbiont_replaced()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(s3.sode.get(i, j, k), s1.sode.get(i, j, k));
                }
            }
        }
    }

    #[test]
    fn reduced_without_competition_is_decoupled() {
        let c = Competition { lambda: 1.0, k1: 1.0, k2: 1.0, mu1: 0.0, mu2: 0.0 };
        let f = c.field().unwrap();
        let r = f.rhs(&State::new(vec![0.5, 0.25])).unwrap();
        assert!((r[0] - 0.5 * 0.5).abs() < 1e-15);
        assert!((r[1] - 0.25 * 0.75).abs() < 1e-15);
    }

    #[test]
    fn interior_equilibrium_is_a_zero() {
        let c = Competition { lambda: 1.3, k1: 2.0, k2: 1.5, mu1: 0.4, mu2: 0.6 };
        let (a1, a2) = c.interior_equilibrium().unwrap();
        let r = c.field().unwrap().rhs(&State::new(vec![a1, a2])).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14), "{r:?}");
    }

    #[test]
    fn classifier_cases() {
        use CompetitionOutcome::*;
        assert_eq!(classify_competition(1.0, 1.0, 2.0, 2.0).unwrap(), FounderControl);
        assert_eq!(classify_competition(1.0, 1.0, 2.0, 0.5).unwrap(), Species1Excluded);
        assert_eq!(classify_competition(1.0, 1.0, 0.5, 2.0).unwrap(), Species2Excluded);
        assert_eq!(classify_competition(1.0, 1.0, 0.5, 0.5).unwrap(), StableCoexistence);
        assert_eq!(classify_competition(1.0, 1.0, 1.0, 0.7).unwrap(), Degenerate);
        assert_eq!(classify_competition(2.0, 1.0, 0.3, 0.5 + 5e-13).unwrap(), Degenerate);
        assert!(classify_competition(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(classify_competition(1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn symbiotic_equilibrium_exceeds_capacities() {
        let (n, a) = symbiotic_equilibrium(2.0, 1.0, 0.1, 0.1).unwrap();
        let r = symbiosis_pair(1.0, 2.0, 1.0, 0.1, 0.1).unwrap().rhs(&State::new(vec![n, a])).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14));
        assert!(n > 2.0 && a > 1.0);
        assert!(symbiotic_equilibrium(1.0, 1.0, 2.0, 1.0).is_none());
    }

    #[test]
    fn recovery_needs_mu_ordering() {
        let sc = StageScenario { mu2: 2.0, ..StageScenario::desk() };
        let err = run_recovery_pipeline(&sc, &IntegratorOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn verify_rejects_degenerate() {
        let c = Competition { lambda: 1.0, k1: 1.0, k2: 1.0, mu1: 1.0, mu2: 0.7 };
        assert!(verify_competition(&c, 0.5, 0.5, &IntegratorOptions::default()).is_err());
    }

    #[test]
    fn straddle_points_sit_on_either_side_of_the_saddle() {
        let c = Competition { lambda: 1.0, k1: 1.0, k2: 1.0, mu1: 2.0, mu2: 2.0 };
        let [(a, b), (p, q)] = c.saddle_straddle(0.1).unwrap();
        assert!((a - 1.1 / 3.0).abs() < 1e-15 && (b - 0.9 / 3.0).abs() < 1e-15);
        assert!(p < 1.0 / 3.0 && q > 1.0 / 3.0);
        let coexist = Competition { mu1: 0.5, mu2: 0.5, ..c };
        assert!(coexist.saddle_straddle(0.1).is_some());
        let excl = Competition { mu1: 2.0, mu2: 0.5, ..c };
        assert!(excl.saddle_straddle(0.1).is_none());
    }

    #[test]
    fn founder_control_confirmed_by_simulation() {
        let c = Competition { lambda: 1.0, k1: 1.0, k2: 1.5, mu1: 2.5, mu2: 2.0 };
        let opts = IntegratorOptions::default().with_span(0.0, 400.0);
        let rep = verify_competition(&c, 0.6, 0.2 * 1.5, &opts).unwrap();
        assert_eq!(rep.predicted, CompetitionOutcome::FounderControl);
        assert!(rep.agree, "{rep:?}");
        assert_eq!(rep.runs.len(), 3);
    }
}
