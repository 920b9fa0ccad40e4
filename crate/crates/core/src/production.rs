//! Volterra production variables and the intrinsic time scale.
//!
//! With a common growth rate λ and unit production rates, the substitution
//! `s = e^{λt} / λ` turns `dx/dt = N`, `dN/dt = -Γ N N + λ N` into the
//! geodesic form `d²x/ds² = -Γ (dx/ds)(dx/ds)` with the same Γ, and
//! `dx/ds = N / (λ s)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{QuadraticSode, State, TimeScale, Trajectory, VhSystem};

/// `s = e^{λt} / λ` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMap {
    pub lambda: f64,
}

impl TimeMap {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be > 0")));
        }
        Ok(Self { lambda })
    }

    pub fn to_s(&self, t: f64) -> f64 {
        (self.lambda * t).exp() / self.lambda
    }

    pub fn to_t(&self, s: f64) -> f64 {
        (self.lambda * s).ln() / self.lambda
    }

    /// `dx/ds` for a population `n` at intrinsic time `s`.
    pub fn velocity(&self, population: f64, s: f64) -> f64 {
        population / (self.lambda * s)
    }

    pub fn population(&self, velocity: f64, s: f64) -> f64 {
        velocity * self.lambda * s
    }
}

/// Cumulative production `x^i(t) = k_i ∫ N^i dτ + x^i(t_0)` on a uniform
/// grid by composite Simpson. Odd-indexed samples close the last interval
/// with the three-point quadratic rule. Starting productions are taken from
/// the first state when present, else zero.
pub fn production_curve(traj: &Trajectory, k: &[f64]) -> Result<Trajectory> {
    let h = traj.uniform_step()?;
    let first = traj.first_state().expect("uniform_step checked length");
    let n = first.populations.len();
    check_dim(n, k.len())?;
    if let Some(i) = k.iter().position(|&r| !(r > 0.0)) {
        return Err(Error::InvalidParameter(format!("production rate k[{i}] must be > 0")));
    }
    let x0 = first.productions.clone().unwrap_or_else(|| vec![0.0; n]);
    check_dim(n, x0.len())?;

    let m = traj.len();
    let mut integrals = vec![vec![0.0; n]; m];
    for i in 0..n {
        let f: Vec<f64> = traj.states().iter().map(|s| s.populations[i]).collect();
        for j in 1..m {
            integrals[j][i] = if m == 2 {
                0.5 * h * (f[0] + f[1])
            } else if j % 2 == 0 {
                integrals[j - 2][i] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j])
            } else if j == 1 {
                h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
            } else {
                integrals[j - 1][i] + h / 12.0 * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j])
            };
        }
    }

    let states = traj
        .states()
        .iter()
        .zip(&integrals)
        .map(|(s, acc)| {
            let x = (0..n).map(|i| x0[i] + k[i] * acc[i]).collect();
            State::with_productions(s.populations.clone(), x)
        })
        .collect();
    Trajectory::new(traj.time_scale, traj.times().to_vec(), states, traj.velocities().map(<[_]>::to_vec))
}

/// Intrinsic-time form of a VH system: the same Γ, read as a spray in `s`.
pub fn to_intrinsic_time(v: &VhSystem) -> Result<(QuadraticSode, TimeMap)> {
    let lambda = v.common_lambda().ok_or_else(|| {
        Error::Precondition("intrinsic time needs one growth rate shared by all species".into())
    })?;
    if v.prod_rate.iter().any(|&k| k != 1.0) {
        return Err(Error::Precondition("intrinsic time needs unit production rates".into()));
    }
    Ok((v.sode.clone(), TimeMap::new(lambda)?))
}

/// Sign convention for the intrinsic-time host/symbiont spray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SprayForm {
    /// `x'' + (λ/K) x'^2 + (δλ/K) x' y' = 0`, cross terms added.
    Printed,
    /// Cross terms as obtained by expanding the population model, where a
    /// symbiotic benefit enters `-Γ` with a positive sign.
    Derived,
}

/// Intrinsic-time spray of a host/symbiont pair with capacities `(k, ka)`
/// and symbiosis coefficients `(delta, delta_a)`.
pub fn symbiosis_spray(form: SprayForm, lambda: f64, k: f64, ka: f64, delta: f64, delta_a: f64) -> Result<QuadraticSode> {
    let sign = match form {
        SprayForm::Printed => -1.0,
        SprayForm::Derived => 1.0,
    };
    let v = crate::dynamics::symbiosis_pair(lambda, k, ka, sign * delta, sign * delta_a)?;
    Ok(to_intrinsic_time(&v)?.0)
}

/// Starting point of the intrinsic-time flow for populations observed at
/// physical time `t0`: returns `(s0, dx/ds)`.
pub fn intrinsic_initial(tm: &TimeMap, t0: f64, populations: &[f64]) -> (f64, Vec<f64>) {
    let s0 = tm.to_s(t0);
    (s0, populations.iter().map(|&n| tm.velocity(n, s0)).collect())
}

/// Resamples a `t` trajectory carrying populations and productions onto
/// `s_j = e^{λ t_j}/λ` with velocities `N / (λ s)`.
pub fn transform_trajectory(traj: &Trajectory, tm: &TimeMap) -> Result<Trajectory> {
    if traj.time_scale != TimeScale::T {
        return Err(Error::InvalidParameter("trajectory is already in intrinsic time".into()));
    }
    let mut times = Vec::with_capacity(traj.len());
    let mut states = Vec::with_capacity(traj.len());
    let mut velocities = Vec::with_capacity(traj.len());
    for (&t, st) in traj.times().iter().zip(traj.states()) {
        let x = st.productions.clone().ok_or(Error::MissingComponent("productions"))?;
        let s = tm.to_s(t);
        velocities.push(st.populations.iter().map(|&n| tm.velocity(n, s)).collect());
        times.push(s);
        states.push(State::with_productions(st.populations.clone(), x));
    }
    Trajectory::new(TimeScale::S, times, states, Some(velocities))
}

/// Largest `|x'' + Γ ẋ ẋ|` over interior samples, with `x''` from the
/// three-point second difference on the (possibly non-uniform) grid and `ẋ`
/// from the stored velocities.
pub fn second_order_residual(traj_s: &Trajectory, sode: &QuadraticSode) -> Result<f64> {
    if traj_s.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: traj_s.len() });
    }
    let vel = traj_s.velocities().ok_or(Error::MissingComponent("velocities"))?;
    let n = sode.n();
    let pos: Vec<&Vec<f64>> = traj_s
        .states()
        .iter()
        .map(|s| s.productions.as_ref().ok_or(Error::MissingComponent("positions")))
        .collect::<Result<_>>()?;
    check_dim(n, pos[0].len())?;
    let s = traj_s.times();
    let mut g = vec![0.0; n];
    let mut worst: f64 = 0.0;
    for j in 1..s.len() - 1 {
        let hm = s[j] - s[j - 1];
        let hp = s[j + 1] - s[j];
        sode.spray_into(&vel[j], &mut g);
        for i in 0..n {
            let second = 2.0 * ((pos[j + 1][i] - pos[j][i]) / hp - (pos[j][i] - pos[j - 1][i]) / hm) / (hp + hm);
            worst = worst.max((second + g[i]).abs());
        }
    }
    Ok(worst)
}
