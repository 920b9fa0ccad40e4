use serde::Serialize;

use super::{covariant_unchecked, curvature_at, deviation_curvature};
use crate::error::{check_dim, Error, Result};
use crate::integrator::{integrate_raw_at, FnField, IntegratorOptions};
use crate::model::{QuadraticSode, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationState {
    pub xi: Vec<f64>,
    pub xi_dot: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    /// `max |D²ξ - Pξ|` over the interior samples.
    pub max_defect: f64,
    /// Largest position difference between the supplied base and the base
    /// recomputed alongside the variation.
    pub base_mismatch: f64,
    pub states: Vec<VariationState>,
}

/// Integrates the Jacobi field `ξ̈^i = -2Γ^i_rk ẋ^k ξ̇^r` along `base` and
/// measures how well it satisfies `D²ξ = Pξ`. `D` of the sampled covariant
/// derivative is taken with a fourth-order five-point stencil, so `base` must
/// be sampled on a uniform grid.
pub fn variational_check(
    sode: &QuadraticSode,
    base: &Trajectory,
    xi0: &[f64],
    xi_dot0: &[f64],
    opts: &IntegratorOptions,
) -> Result<VariationReport> {
    let n = sode.n();
    check_dim(n, xi0.len())?;
    check_dim(n, xi_dot0.len())?;
    let vel = base.velocities().ok_or(Error::MissingComponent("velocities"))?;
    let x0 = base
        .first_state()
        .and_then(|s| s.productions.clone())
        .ok_or(Error::MissingComponent("productions"))?;
    check_dim(n, x0.len())?;
    if base.len() < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: base.len() });
    }
    let h = base.uniform_step()?;
    let times = base.times();

    let field = FnField::new(4 * n, |_s, y: &[f64], dy: &mut [f64]| {
        let (v, rest) = y[n..].split_at(n);
        let xi_dot = &rest[n..];
        dy[..n].copy_from_slice(v);
        sode.spray_into(v, &mut dy[n..2 * n]);
        for a in &mut dy[n..2 * n] {
            *a = -*a;
        }
        dy[2 * n..3 * n].copy_from_slice(xi_dot);
        let jac = sode.velocity_jacobian(v);
        for i in 0..n {
            dy[3 * n + i] = -jac[i].iter().zip(xi_dot).map(|(a, b)| a * b).sum::<f64>();
        }
    });
    let y0: Vec<f64> = x0.iter().chain(&vel[0]).chain(xi0).chain(xi_dot0).copied().collect();
    let opts = opts.with_span(times[0], times[times.len() - 1]);
    let raw = integrate_raw_at(&field, &y0, &opts, times)?;

    let mut base_mismatch: f64 = 0.0;
    for (y, st) in raw.values.iter().zip(base.states()) {
        if let Some(x) = &st.productions {
            for (a, b) in y[..n].iter().zip(x) {
                base_mismatch = base_mismatch.max((a - b).abs());
            }
        }
    }

    let eta: Vec<Vec<f64>> = raw
        .values
        .iter()
        .map(|y| covariant_unchecked(&y[2 * n..3 * n], &y[3 * n..], sode, &y[n..2 * n]))
        .collect();
    let p = deviation_curvature(sode);
    let mut max_defect: f64 = 0.0;
    for j in 2..eta.len() - 2 {
        let v = &raw.values[j][n..2 * n];
        let xi = &raw.values[j][2 * n..3 * n];
        let d_eta: Vec<f64> = (0..n)
            .map(|i| (eta[j - 2][i] - 8.0 * eta[j - 1][i] + 8.0 * eta[j + 1][i] - eta[j + 2][i]) / (12.0 * h))
            .collect();
        let d2 = covariant_unchecked(&eta[j], &d_eta, sode, v);
        let pm = curvature_at(&p, v);
        for i in 0..n {
            let p_xi: f64 = (0..n).map(|k| pm[i][k] * xi[k]).sum();
            max_defect = max_defect.max((d2[i] - p_xi).abs());
        }
    }

    let states = raw
        .values
        .iter()
        .map(|y| VariationState { xi: y[2 * n..3 * n].to_vec(), xi_dot: y[3 * n..].to_vec() })
        .collect();
    Ok(VariationReport { max_defect, base_mismatch, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::integrate_second_order;

    fn base(sode: &QuadraticSode, samples: usize) -> Trajectory {
        let opts = IntegratorOptions::default().with_span(1.0, 3.0).with_samples(samples);
        integrate_second_order(sode, &[0.0, 0.0], &[1.0, 0.5], &opts).unwrap().trajectory
    }

    #[test]
    fn flat_jacobi_fields_are_linear() {
        let sode = QuadraticSode::zeros(2);
        let b = base(&sode, 41);
        let rep = variational_check(&sode, &b, &[1.0, 2.0], &[0.5, -1.0], &IntegratorOptions::default()).unwrap();
        assert!(rep.max_defect < 1e-9, "{}", rep.max_defect);
        let last = rep.states.last().unwrap();
        assert!((last.xi[0] - 2.0).abs() < 1e-9 && (last.xi[1] - 0.0).abs() < 1e-9);
    }

    #[test]
    fn curved_spray_defect_shrinks_with_refinement() {
        let sode = QuadraticSode::from_fn(2, |i, j, k| [[[0.4, 0.1], [0.1, -0.3]], [[-0.2, 0.25], [0.25, 0.6]]][i][j][k]);
        let opts = IntegratorOptions::default().with_tolerances(1e-12, 1e-14);
        let coarse = variational_check(&sode, &base(&sode, 41), &[1.0, 0.0], &[0.0, 1.0], &opts).unwrap();
        let fine = variational_check(&sode, &base(&sode, 321), &[1.0, 0.0], &[0.0, 1.0], &opts).unwrap();
        assert!(fine.max_defect < 1e-6, "{}", fine.max_defect);
        assert!(fine.max_defect < coarse.max_defect);
        assert!(fine.base_mismatch < 1e-9);
    }

    #[test]
    fn base_without_velocities_is_rejected() {
        let sode = QuadraticSode::zeros(1);
        let mut st = crate::model::State::new(vec![]);
        st.productions = Some(vec![0.0]);
        let t = Trajectory::new(crate::model::TimeScale::S, vec![0.0; 1], vec![st], None).unwrap();
        assert_eq!(
            variational_check(&sode, &t, &[1.0], &[0.0], &IntegratorOptions::default()).unwrap_err(),
            Error::MissingComponent("velocities")
        );
    }
}
