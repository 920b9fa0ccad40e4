//! Ecological parameters, the constant-coefficient quadratic form and
//! Volterra-Hamilton systems built from them.
//!
//! Interactions are stored as one signed matrix `interaction[i][j]`: the
//! per-capita effect of species `j` on species `i`, positive when `j`
//! benefits `i`. Symbiosis therefore has both entries of a pair positive and
//! competition has both negative. The classical Gause-Witt form
//! `dN_i/dt = λ_i N_i (1 - N_i/K_i - δ_j N_j/K_i)` uses the opposite sign,
//! see [`ModelParams::from_gause_witt`].

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Per-species growth rates, carrying capacities and signed interactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    lambda: Vec<f64>,
    capacity: Vec<f64>,
    interaction: Vec<Vec<f64>>,
}

impl ModelParams {
    /// `interaction[i][j]` is the benefit species `j` confers on species `i`.
    /// Diagonal entries are ignored.
    pub fn new(lambda: Vec<f64>, capacity: Vec<f64>, interaction: Vec<Vec<f64>>) -> Result<Self> {
        let n = lambda.len();
        if n == 0 {
            return Err(Error::InvalidParameter("species count must be at least 1".into()));
        }
        check_dim(n, capacity.len())?;
        check_dim(n, interaction.len())?;
        for (i, row) in interaction.iter().enumerate() {
            check_dim(n, row.len())?;
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "interaction[{i}][{j}] is not finite"
                )));
            }
        }
        for (i, &l) in lambda.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter(format!("lambda[{i}] = {l} must be > 0")));
            }
        }
        for (i, &k) in capacity.iter().enumerate() {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter(format!("capacity[{i}] = {k} must be > 0")));
            }
        }
        Ok(Self { lambda, capacity, interaction })
    }

    /// Builds parameters from Gause-Witt coefficients where a positive
    /// `delta[i][j]` means species `j` suppresses species `i`.
    pub fn from_gause_witt(
        lambda: Vec<f64>,
        capacity: Vec<f64>,
        delta: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let interaction = delta
            .into_iter()
            .map(|row| row.into_iter().map(|d| -d).collect())
            .collect();
        Self::new(lambda, capacity, interaction)
    }

    /// Independent species with no interaction terms.
    pub fn uncoupled(lambda: Vec<f64>, capacity: Vec<f64>) -> Result<Self> {
        let n = lambda.len();
        Self::new(lambda, capacity, vec![vec![0.0; n]; n])
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn capacity(&self) -> &[f64] {
        &self.capacity
    }

    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        self.interaction[i][j]
    }
}

/// Constant coefficients `Γ^i_jk` of `ẍ^i + Γ^i_jk ẋ^j ẋ^k = 0`, symmetric
/// in the lower pair.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSode {
    n: usize,
    gamma: Vec<f64>,
}

impl QuadraticSode {
    /// Builds the coefficient set from `f(i, j, k)`, symmetrizing in `(j, k)`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut gamma = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + j) * n + k] = 0.5 * (f(i, j, k) + f(i, k, j));
                }
            }
        }
        Self { n, gamma }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, gamma: vec![0.0; n * n * n] }
    }

    /// Nested `[i][j][k]` form, as read from a system file.
    pub fn from_nested(gamma: &[Vec<Vec<f64>>]) -> Result<Self> {
        let n = gamma.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty coefficient tensor".into()));
        }
        for plane in gamma {
            check_dim(n, plane.len())?;
            for row in plane {
                check_dim(n, row.len())?;
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("coefficient is not finite".into()));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j, k| gamma[i][j][k]))
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| (0..self.n).map(|k| self.get(i, j, k)).collect()).collect())
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    /// `g^i = Γ^i_jk v^j v^k`.
    pub fn spray_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for j in 0..n {
                let mut row = 0.0;
                for k in 0..n {
                    row += self.get(i, j, k) * v[k];
                }
                acc += row * v[j];
            }
            *o = acc;
        }
    }

    pub fn spray(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.spray_into(v, &mut out);
        out
    }

    /// Velocity Jacobian `g^i_{;r} = 2 Γ^i_rk v^k`, row-major `[i][r]`.
    pub fn velocity_jacobian(&self, v: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|r| 2.0 * (0..n).map(|k| self.get(i, r, k) * v[k]).sum::<f64>())
                    .collect()
            })
            .collect()
    }

    /// Relabels coordinates: coordinate `i` of `self` becomes `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        let inv = crate::util::invert_permutation(map, self.n)?;
        Ok(Self::from_fn(self.n, |i, j, k| self.get(inv[i], inv[j], inv[k])))
    }
}

/// Volterra-Hamilton system: `dx^i/dt = k_i N^i`,
/// `dN^i/dt = -Γ^i_jk N^j N^k + λ_i N^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VhSystem {
    pub sode: QuadraticSode,
    pub lambda: Vec<f64>,
    pub prod_rate: Vec<f64>,
}

impl VhSystem {
    pub fn new(sode: QuadraticSode, lambda: Vec<f64>, prod_rate: Vec<f64>) -> Result<Self> {
        check_dim(sode.n(), lambda.len())?;
        check_dim(sode.n(), prod_rate.len())?;
        if let Some(i) = prod_rate.iter().position(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidParameter(format!("prod_rate[{i}] must be > 0")));
        }
        Ok(Self { sode, lambda, prod_rate })
    }

    pub fn n(&self) -> usize {
        self.sode.n()
    }

    pub fn with_prod_rate(mut self, prod_rate: Vec<f64>) -> Result<Self> {
        check_dim(self.n(), prod_rate.len())?;
        if let Some(i) = prod_rate.iter().position(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidParameter(format!("prod_rate[{i}] must be > 0")));
        }
        self.prod_rate = prod_rate;
        Ok(self)
    }

    /// Population rates without dimension checks; used on the integrator's
    /// hot path.
    pub fn rhs_into(&self, populations: &[f64], out: &mut [f64]) {
        self.sode.spray_into(populations, out);
        for ((o, &l), &p) in out.iter_mut().zip(&self.lambda).zip(populations) {
            *o = l * p - *o;
        }
    }

    pub fn rhs(&self, state: &State) -> Result<Vec<f64>> {
        check_dim(self.n(), state.populations.len())?;
        let mut out = vec![0.0; self.n()];
        self.rhs_into(&state.populations, &mut out);
        Ok(out)
    }

    pub fn common_lambda(&self) -> Option<f64> {
        let first = *self.lambda.first()?;
        self.lambda.iter().all(|&l| l == first).then_some(first)
    }
}

/// Maps ecological parameters onto the quadratic form: `Γ^i_ii = λ_i/K_i`
/// and `Γ^i_ij = Γ^i_ji = -ι_ij λ_i / (2 K_i)` for `j != i`.
pub fn vh_from_params(p: &ModelParams) -> VhSystem {
    let n = p.n();
    let sode = QuadraticSode::from_fn(n, |i, j, k| {
        let scale = p.lambda[i] / p.capacity[i];
        if j == i && k == i {
            scale
        } else if j == i {
            -0.5 * p.interaction[i][k] * scale
        } else if k == i {
            -0.5 * p.interaction[i][j] * scale
        } else {
            0.0
        }
    });
    VhSystem { sode, lambda: p.lambda.clone(), prod_rate: vec![1.0; n] }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub populations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub productions: Option<Vec<f64>>,
}

impl State {
    pub fn new(populations: Vec<f64>) -> Self {
        Self { populations, productions: None }
    }

    pub fn with_productions(populations: Vec<f64>, productions: Vec<f64>) -> Self {
        Self { populations, productions: Some(productions) }
    }

    pub fn is_finite(&self) -> bool {
        self.populations.iter().all(|v| v.is_finite())
            && self.productions.as_ref().is_none_or(|p| p.iter().all(|v| v.is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScale {
    /// Physical time `t`.
    T,
    /// Intrinsic time `s`.
    S,
}

/// Sampled flow. Second-order (intrinsic time) trajectories keep positions in
/// `State::productions` and carry `velocities`; their `populations` may be
/// empty when no growth rate is known.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time_scale: TimeScale,
    times: Vec<f64>,
    states: Vec<State>,
    velocities: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn new(
        time_scale: TimeScale,
        times: Vec<f64>,
        states: Vec<State>,
        velocities: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        check_dim(times.len(), states.len())?;
        if let Some(v) = &velocities {
            check_dim(times.len(), v.len())?;
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
        }
        Ok(Self { time_scale, times, states, velocities })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn velocities(&self) -> Option<&[Vec<f64>]> {
        self.velocities.as_deref()
    }

    pub fn first_state(&self) -> Option<&State> {
        self.states.first()
    }

    pub fn final_state(&self) -> Option<&State> {
        self.states.last()
    }

    /// Population series of one species.
    pub fn population(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.populations[i]).collect()
    }

    /// Position (production) series of one coordinate, if present.
    pub fn position(&self, i: usize) -> Option<Vec<f64>> {
        self.states.iter().map(|s| s.productions.as_ref().map(|p| p[i])).collect()
    }

    /// Grid spacing when uniform (relative tolerance 1e-9 on the spacing).
    pub fn uniform_step(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: self.times.len() });
        }
        let span = self.times[self.times.len() - 1] - self.times[0];
        let h = span / (self.times.len() - 1) as f64;
        let scale = self.times.iter().fold(span, |m, t| m.max(t.abs()));
        for (k, w) in self.times.windows(2).enumerate() {
            let expected = self.times[0] + (k + 1) as f64 * h;
            if (w[1] - expected).abs() > 1e-9 * scale {
                return Err(Error::NonUniformGrid);
            }
        }
        Ok(h)
    }
}
