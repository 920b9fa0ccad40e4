//! Adaptive Dormand-Prince 5(4) integration with PI step control, dense
//! output on a uniform sample grid and extinction events.
//!
//! Components marked as populations are clamped to zero once they fall below
//! `extinction_threshold` while decreasing. Each clamp is logged as an
//! [`EventRecord`], which gives "eliminated by competition" a finite-time
//! meaning.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::model::{QuadraticSode, State, TimeScale, Trajectory, VhSystem};

/// Right-hand side `dy/dt = f(t, y)`.
pub trait Field {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

impl Field for VhSystem {
    fn dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        self.rhs_into(y, dydt)
    }
}

/// Closure-backed field.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64])> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64])> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        (self.f)(t, y, dydt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_span: (f64, f64),
    pub sample_count: usize,
    pub extinction_threshold: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            t_span: (0.0, 1.0),
            sample_count: 101,
            extinction_threshold: 1e-8,
            max_steps: 5_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn with_span(mut self, start: f64, end: f64) -> Self {
        self.t_span = (start, end);
        self
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.t_span.0.is_finite() && self.t_span.1.is_finite() && self.t_span.0 < self.t_span.1) {
            return bad("t_span must satisfy start < end");
        }
        if self.sample_count < 2 {
            return bad("sample_count must be at least 2");
        }
        if !(self.max_step > 0.0) {
            return bad("max_step must be positive");
        }
        if !(self.extinction_threshold >= 0.0) {
            return bad("extinction_threshold must be nonnegative");
        }
        Ok(())
    }

    /// Uniform output grid over `t_span` with exact endpoints.
    pub fn sample_grid(&self) -> Vec<f64> {
        let (a, b) = self.t_span;
        let m = self.sample_count;
        (0..m)
            .map(|k| if k + 1 == m { b } else { a + (b - a) * k as f64 / (m - 1) as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossing {
    /// Dropped below the threshold; the component was clamped to zero.
    Falling,
    /// Rose above the threshold from below.
    Rising,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub species: usize,
    pub time: f64,
    pub direction: Crossing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Sampled output of a first-order run on plain vectors.
#[derive(Debug, Clone)]
pub struct RawSolution {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub events: Vec<EventRecord>,
    /// Set when the run halted at an extinction event before `t_span.1`.
    pub stopped_at: Option<f64>,
    pub stats: StepStats,
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub trajectory: Trajectory,
    pub events: Vec<EventRecord>,
    pub stopped_at: Option<f64>,
    pub stats: StepStats,
}

impl Integration {
    pub fn extinction_of(&self, species: usize) -> Option<f64> {
        self.events
            .iter()
            .find(|e| e.species == species && e.direction == Crossing::Falling)
            .map(|e| e.time)
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order solution minus embedded fourth-order solution
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One Dormand-Prince step with stage buffers reused across calls.
struct Stepper {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
    evaluations: usize,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
            evaluations: 0,
        }
    }

    /// Requires `k[0] = f(t, y)`. Leaves the new state in `y_new`, its
    /// derivative in `k[6]` and the error estimate in `err`.
    fn step<F: Field + ?Sized>(&mut self, f: &F, t: f64, y: &[f64], h: f64) {
        let n = y.len();
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            f.eval(t + C[s] * h, &self.tmp, &mut self.k[s]);
            self.evaluations += 1;
        }
        // stage 7 is evaluated at the fifth-order solution (FSAL)
        self.y_new.copy_from_slice(&self.tmp);
        for i in 0..n {
            let mut e = 0.0;
            for (s, es) in E.iter().enumerate() {
                e += es * self.k[s][i];
            }
            self.err[i] = h * e;
        }
    }

    /// Continuous extension coefficients for the step just taken.
    fn dense(&self, y: &[f64], h: f64) -> Dense {
        let n = y.len();
        let mut c = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for i in 0..n {
            let ydiff = self.y_new[i] - y[i];
            let bspl = h * self.k[0][i] - ydiff;
            c[0][i] = y[i];
            c[1][i] = ydiff;
            c[2][i] = bspl;
            c[3][i] = ydiff - h * self.k[6][i] - bspl;
            let mut d = 0.0;
            for (s, ds) in D.iter().enumerate() {
                d += ds * self.k[s][i];
            }
            c[4][i] = h * d;
        }
        Dense { c }
    }
}

struct Dense {
    c: [Vec<f64>; 5],
}

impl Dense {
    fn component(&self, i: usize, theta: f64) -> f64 {
        let th1 = 1.0 - theta;
        let c = &self.c;
        c[0][i] + theta * (c[1][i] + th1 * (c[2][i] + theta * (c[3][i] + th1 * c[4][i])))
    }

    fn eval(&self, theta: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.component(i, theta);
        }
    }

    /// Fraction of the step where component `i` crosses `level`, found by
    /// bisection on the interpolant. Assumes a sign change over [0, 1].
    fn crossing(&self, i: usize, level: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let f_lo = self.component(i, lo) - level;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.component(i, mid) - level;
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Single fixed-size Dormand-Prince step from `(t, y)`; returns the
/// fifth-order state and the embedded error estimate. Exposed for order
/// studies.
pub fn dopri5_step<F: Field + ?Sized>(f: &F, t: f64, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let mut st = Stepper::new(y.len());
    f.eval(t, y, &mut st.k[0]);
    st.step(f, t, y, h);
    (st.y_new, st.err)
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], opts: &IntegratorOptions) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..y.len() {
        let scale = opts.abs_tol.max(opts.rel_tol * y[i].abs().max(y_new[i].abs()));
        let r = err[i].abs() / scale;
        if r.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(r);
    }
    worst
}

fn initial_step<F: Field + ?Sized>(f: &F, t0: f64, y0: &[f64], f0: &[f64], opts: &IntegratorOptions) -> f64 {
    let n = y0.len().max(1) as f64;
    let rms = |v: &mut dyn Iterator<Item = f64>| (v.map(|x| x * x).sum::<f64>() / n).sqrt();
    let sc: Vec<f64> = y0.iter().map(|y| opts.abs_tol + opts.rel_tol * y.abs()).collect();
    let d0 = rms(&mut y0.iter().zip(&sc).map(|(y, s)| y / s));
    let d1 = rms(&mut f0.iter().zip(&sc).map(|(d, s)| d / s));
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let span = opts.t_span.1 - opts.t_span.0;
    h0 = h0.min(span).min(opts.max_step);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + h0 * d).collect();
    let mut f1 = vec![0.0; y0.len()];
    f.eval(t0 + h0, &y1, &mut f1);
    let d2 = rms(&mut f1.iter().zip(f0).zip(&sc).map(|((a, b), s)| (a - b) / s)) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dmax).powf(0.2) };
    (100.0 * h0).min(h1).min(span).min(opts.max_step)
}

/// Integrates `field` from `y0` over `opts.t_span`.
///
/// `guarded[i]` marks population components subject to extinction clamping
/// and nonnegative sampling. With `stop_on = Some(i)` the run ends at the
/// first falling event of component `i`; the terminal state is appended after
/// the grid samples taken so far.
pub fn integrate_raw<F: Field + ?Sized>(
    field: &F,
    y0: &[f64],
    opts: &IntegratorOptions,
    guarded: &[bool],
    stop_on: Option<usize>,
) -> Result<RawSolution> {
    opts.validate()?;
    solve(field, y0, opts, &opts.sample_grid(), guarded, stop_on)
}

/// Like [`integrate_raw`] with no guarded components, sampled at the given
/// increasing `times` (which must start at `t_span.0` and end at `t_span.1`).
pub fn integrate_raw_at<F: Field + ?Sized>(
    field: &F,
    y0: &[f64],
    opts: &IntegratorOptions,
    times: &[f64],
) -> Result<RawSolution> {
    let mut opts = *opts;
    opts.sample_count = times.len();
    opts.validate()?;
    let ok_ends = times.first() == Some(&opts.t_span.0) && times.last() == Some(&opts.t_span.1);
    if !ok_ends || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "output times must increase and span t_span exactly".into(),
        ));
    }
    solve(field, y0, &opts, times, &vec![false; field.dim()], None)
}

fn solve<F: Field + ?Sized>(
    field: &F,
    y0: &[f64],
    opts: &IntegratorOptions,
    grid: &[f64],
    guarded: &[bool],
    stop_on: Option<usize>,
) -> Result<RawSolution> {
    let n = field.dim();
    check_dim(n, y0.len())?;
    check_dim(n, guarded.len())?;
    let (t0, t1) = opts.t_span;
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }

    let mut st = Stepper::new(n);
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut events = Vec::new();
    let mut stats = StepStats::default();

    field.eval(t, &y, &mut st.k[0]);
    st.evaluations += 1;
    let mut h = initial_step(field, t, &y, &st.k[0], opts);
    st.evaluations += 1;

    let mut times = Vec::with_capacity(opts.sample_count);
    let mut values = Vec::with_capacity(opts.sample_count);
    times.push(t0);
    values.push(y.clone());
    let mut next = 1;

    // PI controller (Hairer & Wanner constants for order 5)
    const BETA: f64 = 0.04;
    const ALPHA: f64 = 0.2 - 0.75 * BETA;
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;
    let mut stopped_at = None;
    let mut sample = vec![0.0; n];

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        h = h.min(opts.max_step);
        let last = t + h >= t1 - 1e-12 * t1.abs().max(1.0);
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        st.step(field, t, &y, h);
        let finite = st.y_new.iter().chain(&st.k[6]).all(|v| v.is_finite());
        let err = if finite { error_norm(&y, &st.y_new, &st.err, opts) } else { f64::INFINITY };

        if err > 1.0 {
            stats.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-ALPHA)).max(0.2) } else { 0.2 };
            h *= if rejected_last { fac.min(1.0) } else { fac };
            rejected_last = true;
            if !finite && h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::NonFinite { t });
            }
            continue;
        }

        stats.accepted += 1;
        let t_new = if last { t1 } else { t + h };
        let dense = st.dense(&y, h);

        // events: falling below or rising above the extinction threshold
        let thr = opts.extinction_threshold;
        let mut clamped = false;
        let mut stop_at: Option<f64> = None;
        for i in (0..n).filter(|&i| guarded[i]) {
            let before = y[i];
            let after = st.y_new[i];
            let falling = after < 0.0 || (after < thr && st.k[6][i] < 0.0);
            if falling && after != 0.0 {
                let time = if before >= thr && before > 0.0 {
                    t + h * dense.crossing(i, thr)
                } else {
                    t
                };
                if before != 0.0 {
                    events.push(EventRecord { species: i, time, direction: Crossing::Falling });
                    if stop_on == Some(i) {
                        stop_at = Some(time);
                    }
                }
                st.y_new[i] = 0.0;
                clamped = true;
            } else if before < thr && after >= thr {
                let time = t + h * dense.crossing(i, thr);
                events.push(EventRecord { species: i, time, direction: Crossing::Rising });
            }
        }
        if clamped {
            field.eval(t_new, &st.y_new, &mut st.k[6]);
            st.evaluations += 1;
        }

        let horizon = stop_at.unwrap_or(t_new);
        while next < grid.len() {
            let ts = grid[next];
            if ts > horizon {
                break;
            }
            if ts == t_new && stop_at.is_none() {
                sample.copy_from_slice(&st.y_new);
            } else {
                dense.eval((ts - t) / h, &mut sample);
                for i in (0..n).filter(|&i| guarded[i]) {
                    sample[i] = sample[i].max(0.0);
                }
            }
            times.push(ts);
            values.push(sample.clone());
            next += 1;
        }

        if let Some(ts) = stop_at.filter(|&ts| ts < t1) {
            // terminal state at the event itself, with the stopping species removed
            dense.eval((ts - t) / h, &mut sample);
            for i in (0..n).filter(|&i| guarded[i]) {
                sample[i] = sample[i].max(0.0);
            }
            sample[stop_on.expect("stop species")] = 0.0;
            if times.last().is_some_and(|&last| ts > last) {
                times.push(ts);
                values.push(sample.clone());
            } else if let Some(v) = values.last_mut() {
                v.copy_from_slice(&sample);
            }
            stopped_at = Some(ts);
            break;
        }

        t = t_new;
        y.copy_from_slice(&st.y_new);
        let (head, tail) = st.k.split_at_mut(6);
        head[0].copy_from_slice(&tail[0]);

        let mut fac = err.max(1e-10).powf(-ALPHA) * err_prev.powf(BETA);
        fac = (0.9 * fac).clamp(0.2, 10.0);
        if rejected_last {
            fac = fac.min(1.0);
        }
        h *= fac;
        err_prev = err.max(1e-4);
        rejected_last = false;
    }

    stats.evaluations = st.evaluations;
    Ok(RawSolution { times, values, events, stopped_at, stats })
}

/// Integrates a population field; every component is a population.
pub fn integrate<F: Field + ?Sized>(field: &F, y0: &State, opts: &IntegratorOptions) -> Result<Integration> {
    integrate_until(field, y0, opts, None)
}

/// Like [`integrate`] but halts at the first extinction of `stop_on`.
pub fn integrate_until<F: Field + ?Sized>(
    field: &F,
    y0: &State,
    opts: &IntegratorOptions,
    stop_on: Option<usize>,
) -> Result<Integration> {
    if !y0.is_finite() {
        return Err(Error::NonFinite { t: opts.t_span.0 });
    }
    let guarded = vec![true; field.dim()];
    let raw = integrate_raw(field, &y0.populations, opts, &guarded, stop_on)?;
    let states = raw.values.into_iter().map(State::new).collect();
    Ok(Integration {
        trajectory: Trajectory::new(TimeScale::T, raw.times, states, None)?,
        events: raw.events,
        stopped_at: raw.stopped_at,
        stats: raw.stats,
    })
}

/// Integrates `ẍ^i = -Γ^i_jk ẋ^j ẋ^k` over `opts.t_span` (read as an `s`
/// span) by reduction to first order in `(x, ẋ)`. Positions are stored as
/// productions; populations are left empty.
pub fn integrate_second_order(
    sode: &QuadraticSode,
    x0: &[f64],
    v0: &[f64],
    opts: &IntegratorOptions,
) -> Result<Integration> {
    second_order(sode, x0, v0, opts, None)
}

/// [`integrate_second_order`] sampled at caller-supplied times.
pub fn integrate_second_order_at(
    sode: &QuadraticSode,
    x0: &[f64],
    v0: &[f64],
    opts: &IntegratorOptions,
    times: &[f64],
) -> Result<Integration> {
    second_order(sode, x0, v0, opts, Some(times))
}

fn second_order(
    sode: &QuadraticSode,
    x0: &[f64],
    v0: &[f64],
    opts: &IntegratorOptions,
    times: Option<&[f64]>,
) -> Result<Integration> {
    let n = sode.n();
    check_dim(n, x0.len())?;
    check_dim(n, v0.len())?;
    if let Some(i) = v0.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveVelocity { index: i, value: v0[i] });
    }
    let field = FnField::new(2 * n, |_t, y: &[f64], dy: &mut [f64]| {
        let (x_dot, v_dot) = dy.split_at_mut(n);
        x_dot.copy_from_slice(&y[n..]);
        sode.spray_into(&y[n..], v_dot);
        for a in v_dot.iter_mut() {
            *a = -*a;
        }
    });
    let y0: Vec<f64> = x0.iter().chain(v0).copied().collect();
    let raw = match times {
        Some(times) => integrate_raw_at(&field, &y0, opts, times)?,
        None => integrate_raw(&field, &y0, opts, &vec![false; 2 * n], None)?,
    };
    let mut states = Vec::with_capacity(raw.values.len());
    let mut velocities = Vec::with_capacity(raw.values.len());
    for mut v in raw.values {
        let vel = v.split_off(n);
        states.push(State::with_productions(Vec::new(), v));
        velocities.push(vel);
    }
    Ok(Integration {
        trajectory: Trajectory::new(TimeScale::S, raw.times, states, Some(velocities))?,
        events: raw.events,
        stopped_at: raw.stopped_at,
        stats: raw.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{vh_from_params, ModelParams};

    fn growth() -> FnField<impl Fn(f64, &[f64], &mut [f64])> {
        FnField::new(1, |_t, y: &[f64], d: &mut [f64]| d[0] = y[0])
    }

    #[test]
    fn exponential_growth_hits_e() {
        let opts = IntegratorOptions::default().with_span(0.0, 1.0);
        let sol = integrate_raw(&growth(), &[1.0], &opts, &[false], None).unwrap();
        let end = sol.values.last().unwrap()[0];
        assert!((end / std::f64::consts::E - 1.0).abs() < 1e-8, "{end}");
        assert_eq!(*sol.times.last().unwrap(), 1.0);
        assert_eq!(sol.times.len(), 101);
    }

    #[test]
    fn grid_samples_match_closed_form() {
        let opts = IntegratorOptions::default().with_span(0.0, 2.0).with_samples(37);
        let sol = integrate_raw(&growth(), &[1.0], &opts, &[false], None).unwrap();
        for (t, y) in sol.times.iter().zip(&sol.values) {
            assert!((y[0] / t.exp() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn fixed_point_is_preserved() {
        let v = vh_from_params(&ModelParams::uncoupled(vec![1.0], vec![10.0]).unwrap());
        let opts = IntegratorOptions::default().with_span(0.0, 20.0);
        let run = integrate(&v, &State::new(vec![10.0]), &opts).unwrap();
        for s in run.trajectory.states() {
            assert!((s.populations[0] - 10.0).abs() <= opts.abs_tol);
        }
        assert!(run.events.is_empty());
    }

    #[test]
    fn decay_triggers_extinction_clamp() {
        let decay = FnField::new(1, |_t, y: &[f64], d: &mut [f64]| d[0] = -y[0]);
        let opts = IntegratorOptions::default().with_span(0.0, 30.0);
        let run = integrate(&decay, &State::new(vec![1.0]), &opts).unwrap();
        let t_ext = run.extinction_of(0).unwrap();
        // e^{-t} = 1e-8
        assert!((t_ext - 1e8f64.ln()).abs() < 1e-4, "{t_ext}");
        assert_eq!(run.trajectory.final_state().unwrap().populations[0], 0.0);
    }

    #[test]
    fn stop_on_extinction_ends_run() {
        let decay = FnField::new(2, |_t, y: &[f64], d: &mut [f64]| {
            d[0] = -y[0];
            d[1] = 0.0;
        });
        let opts = IntegratorOptions::default().with_span(0.0, 50.0);
        let run = integrate_until(&decay, &State::new(vec![1.0, 1.0]), &opts, Some(0)).unwrap();
        let stop = run.stopped_at.unwrap();
        assert!(stop < 20.0 && stop > 18.0);
        assert_eq!(*run.trajectory.times().last().unwrap(), stop);
        assert_eq!(run.trajectory.final_state().unwrap().populations[0], 0.0);
    }

    #[test]
    fn rejects_bad_options() {
        let bad = IntegratorOptions::default().with_span(1.0, 1.0);
        assert!(integrate(&growth(), &State::new(vec![1.0]), &bad).is_err());
        let bad = IntegratorOptions::default().with_samples(1);
        assert!(integrate(&growth(), &State::new(vec![1.0]), &bad).is_err());
        let bad = IntegratorOptions::default().with_tolerances(0.0, 1e-12);
        assert!(integrate(&growth(), &State::new(vec![1.0]), &bad).is_err());
        let opts = IntegratorOptions::default();
        assert!(integrate(&growth(), &State::new(vec![f64::NAN]), &opts).is_err());
    }

    #[test]
    fn blowup_is_reported() {
        // y' = y^2 from y(0)=1 blows up at t = 1
        let f = FnField::new(1, |_t, y: &[f64], d: &mut [f64]| d[0] = y[0] * y[0]);
        let opts = IntegratorOptions::default().with_span(0.0, 2.0);
        let err = integrate_raw(&f, &[1.0], &opts, &[false], None).unwrap_err();
        assert!(matches!(err, Error::StepSizeUnderflow { .. } | Error::NonFinite { .. }), "{err:?}");
    }

    #[test]
    fn flat_second_order_is_straight_line() {
        let sode = QuadraticSode::zeros(2);
        let opts = IntegratorOptions::default().with_span(0.0, 3.0).with_samples(7);
        let run = integrate_second_order(&sode, &[0.0, 0.0], &[1.0, 1.0], &opts).unwrap();
        for (s, st) in run.trajectory.times().iter().zip(run.trajectory.states()) {
            let x = st.productions.as_ref().unwrap();
            assert!((x[0] - s).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_needs_positive_velocity() {
        let sode = QuadraticSode::zeros(1);
        let opts = IntegratorOptions::default();
        assert!(integrate_second_order(&sode, &[0.0], &[0.0], &opts).is_err());
    }
}
