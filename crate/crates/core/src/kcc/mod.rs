//! KCC invariants of second-order systems `ẍ^i + g^i(x, ẋ, t) = 0`.
//!
//! For constant-coefficient sprays `g^i = Γ^i_jk ẋ^j ẋ^k` every invariant is
//! a polynomial in the velocity with constant coefficients, so the bundle is
//! stored as coefficient tensors:
//!
//! * `epsilon[i][m][n]`: first invariant, quadratic in `ẋ` (zero for sprays),
//! * `p[i][j][m][n]`: deviation curvature `P^i_j = p[i][j][m][n] ẋ^m ẋ^n`,
//! * `r[i][j][k][m]`: third invariant `R^i_jk = r[i][j][k][m] ẋ^m`,
//! * `b[i][j][k][l]`: fourth invariant (constant),
//! * the fifth invariant `g^i_{;j;k;l}` vanishes for any quadratic `g`.
//!
//! [`fd`] evaluates the same quantities for general `g` by central
//! differences and serves as the independent check of the closed forms.

pub mod fd;
mod tensor;
mod variation;

use serde::{Deserialize, Serialize};

pub use fd::{deviation_curvature_fd, first_invariant_fd, third_invariant_fd, FnSystem, SecondOrderSystem};
pub use tensor::Tensor;
pub use variation::{variational_check, VariationReport, VariationState};

use crate::error::{check_dim, Result};
use crate::model::QuadraticSode;
use crate::util::max_abs;

/// `Dξ^i/dt = dξ^i/dt + ½ g^i_{;r} ξ^r`; for sprays `½ g^i_{;r} = Γ^i_rk ẋ^k`.
pub fn covariant_derivative(xi: &[f64], xi_dot: &[f64], sode: &QuadraticSode, velocity: &[f64]) -> Result<Vec<f64>> {
    let n = sode.n();
    check_dim(n, xi.len())?;
    check_dim(n, xi_dot.len())?;
    check_dim(n, velocity.len())?;
    Ok(covariant_unchecked(xi, xi_dot, sode, velocity))
}

pub(crate) fn covariant_unchecked(xi: &[f64], xi_dot: &[f64], sode: &QuadraticSode, velocity: &[f64]) -> Vec<f64> {
    let n = sode.n();
    (0..n)
        .map(|i| {
            let mut acc = xi_dot[i];
            for r in 0..n {
                for k in 0..n {
                    acc += sode.get(i, r, k) * velocity[k] * xi[r];
                }
            }
            acc
        })
        .collect()
}

/// `ε^i = ½ g^i_{;r} ẋ^r - g^i` evaluated at one velocity. Vanishes up to
/// rounding for every spray.
pub fn first_invariant(sode: &QuadraticSode, velocity: &[f64]) -> Result<Vec<f64>> {
    check_dim(sode.n(), velocity.len())?;
    let jac = sode.velocity_jacobian(velocity);
    let g = sode.spray(velocity);
    Ok(jac
        .iter()
        .zip(&g)
        .map(|(row, gi)| 0.5 * row.iter().zip(velocity).map(|(a, v)| a * v).sum::<f64>() - gi)
        .collect())
}

/// Coefficients of `ε` as a quadratic form in the velocity:
/// `½ (2Γ^i_mn) - Γ^i_mn`.
pub fn first_invariant_coeffs(sode: &QuadraticSode) -> Tensor {
    let n = sode.n();
    Tensor::from_fn(&[n, n, n], |ix| {
        let g = sode.get(ix[0], ix[1], ix[2]);
        0.5 * (2.0 * g) - g
    })
}

/// Deviation curvature of an autonomous spray:
/// `P^i_j = (Γ^i_rm Γ^r_jn - Γ^i_rj Γ^r_mn) ẋ^m ẋ^n`, symmetrized in `(m, n)`.
pub fn deviation_curvature(sode: &QuadraticSode) -> Tensor {
    let n = sode.n();
    let raw = |i: usize, j: usize, m: usize, q: usize| -> f64 {
        (0..n).map(|r| sode.get(i, r, m) * sode.get(r, j, q) - sode.get(i, r, j) * sode.get(r, m, q)).sum()
    };
    Tensor::from_fn(&[n, n, n, n], |ix| {
        let (i, j, m, q) = (ix[0], ix[1], ix[2], ix[3]);
        0.5 * (raw(i, j, m, q) + raw(i, j, q, m))
    })
}

/// Evaluates `p[i][j][m][n] ẋ^m ẋ^n`.
pub fn curvature_at(p: &Tensor, velocity: &[f64]) -> Vec<Vec<f64>> {
    let n = velocity.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = 0.0;
                    for m in 0..n {
                        for q in 0..n {
                            acc += p.get(&[i, j, m, q]) * velocity[m] * velocity[q];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `R^i_jk = ⅓ (P^i_{j;k} - P^i_{k;j})` and `B^i_jkl = R^i_{jk;l}` from the
/// quadratic-form coefficients of `P`, plus the fifth-invariant flag.
pub fn third_fourth_fifth(sode: &QuadraticSode) -> (Tensor, Tensor, bool) {
    let p = deviation_curvature(sode);
    let n = sode.n();
    // P^i_{j;k} = 2 p[i][j][k][m] ẋ^m
    let r = Tensor::from_fn(&[n, n, n, n], |ix| {
        let (i, j, k, m) = (ix[0], ix[1], ix[2], ix[3]);
        (2.0 / 3.0) * (p.get(&[i, j, k, m]) - p.get(&[i, k, j, m]))
    });
    // R is linear in ẋ, so its velocity derivative is its coefficient tensor
    let b = r.clone();
    // g is a quadratic polynomial in ẋ: three velocity derivatives annihilate it
    (r, b, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsBundle {
    pub dimension: usize,
    pub epsilon: Tensor,
    pub deviation_curvature: Tensor,
    pub third: Tensor,
    pub fourth: Tensor,
    pub fifth_is_zero: bool,
}

impl InvariantsBundle {
    pub fn for_sode(sode: &QuadraticSode) -> Self {
        let (third, fourth, fifth_is_zero) = third_fourth_fifth(sode);
        Self {
            dimension: sode.n(),
            epsilon: first_invariant_coeffs(sode),
            deviation_curvature: deviation_curvature(sode),
            third,
            fourth,
            fifth_is_zero,
        }
    }

    /// Renames coordinates: index `i` becomes `map[i]` in every slot.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        Ok(Self {
            dimension: self.dimension,
            epsilon: self.epsilon.relabel(map)?,
            deviation_curvature: self.deviation_curvature.relabel(map)?,
            third: self.third.relabel(map)?,
            fourth: self.fourth.relabel(map)?,
            fifth_is_zero: self.fifth_is_zero,
        })
    }

    pub fn is_flat(&self) -> bool {
        let zero = |t: &Tensor| t.data().iter().all(|&v| v == 0.0);
        zero(&self.epsilon) && zero(&self.deviation_curvature) && zero(&self.third) && zero(&self.fourth) && self.fifth_is_zero
    }
}

/// Default coefficient tolerance for equivalence checks.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub tol: f64,
    pub epsilon_deviation: f64,
    pub deviation_curvature_deviation: f64,
    pub third_deviation: f64,
    pub fourth_deviation: f64,
    pub fifth_match: bool,
}

/// Compares two bundles after renaming the coordinates of `a` by `map`.
pub fn compare_bundles(a: &InvariantsBundle, b: &InvariantsBundle, map: &[usize], tol: f64) -> Result<EquivalenceReport> {
    check_dim(a.dimension, b.dimension)?;
    let a = a.relabel(map)?;
    let dev = |x: &Tensor, y: &Tensor| -> Result<f64> {
        check_dim(x.data().len(), y.data().len())?;
        Ok(max_abs(x.data().iter().zip(y.data()).map(|(p, q)| p - q)))
    };
    let epsilon_deviation = dev(&a.epsilon, &b.epsilon)?;
    let deviation_curvature_deviation = dev(&a.deviation_curvature, &b.deviation_curvature)?;
    let third_deviation = dev(&a.third, &b.third)?;
    let fourth_deviation = dev(&a.fourth, &b.fourth)?;
    let fifth_match = a.fifth_is_zero == b.fifth_is_zero;
    let equivalent = fifth_match
        && [epsilon_deviation, deviation_curvature_deviation, third_deviation, fourth_deviation]
            .iter()
            .all(|&d| d <= tol);
    Ok(EquivalenceReport {
        equivalent,
        tol,
        epsilon_deviation,
        deviation_curvature_deviation,
        third_deviation,
        fourth_deviation,
        fifth_match,
    })
}

/// Equivalence of two sprays under the coordinate renaming `map`
/// (coordinate `i` of `a` corresponds to coordinate `map[i]` of `b`).
pub fn equivalence(a: &QuadraticSode, b: &QuadraticSode, map: &[usize], tol: f64) -> Result<EquivalenceReport> {
    check_dim(a.n(), b.n())?;
    compare_bundles(&InvariantsBundle::for_sode(a), &InvariantsBundle::for_sode(b), map, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_spray() -> QuadraticSode {
        QuadraticSode::from_fn(2, |i, j, k| [[[0.5, -0.2], [-0.2, 0.0]], [[0.0, 0.3], [0.3, 1.1]]][i][j][k])
    }

    #[test]
    fn flat_covariant_derivative_is_ordinary() {
        let d = covariant_derivative(&[1.0, 2.0], &[0.3, -0.4], &QuadraticSode::zeros(2), &[5.0, 6.0]).unwrap();
        assert_eq!(d, vec![0.3, -0.4]);
    }

    #[test]
    fn covariant_derivative_1d_hand_value() {
        let sode = QuadraticSode::from_fn(1, |_, _, _| 1.0);
        assert_eq!(covariant_derivative(&[3.0], &[0.0], &sode, &[2.0]).unwrap(), vec![6.0]);
    }

    #[test]
    fn velocity_is_covariantly_constant() {
        let sode = sample_spray();
        let v = [0.7, 1.3];
        let accel: Vec<f64> = sode.spray(&v).iter().map(|g| -g).collect();
        let d = covariant_derivative(&v, &accel, &sode, &v).unwrap();
        assert!(d.iter().all(|x| x.abs() < 1e-15), "{d:?}");
    }

    #[test]
    fn first_invariant_vanishes_for_spray() {
        let eps = first_invariant(&sample_spray(), &[0.4, -2.5]).unwrap();
        assert!(eps.iter().all(|e| e.abs() < 1e-15));
        assert!(first_invariant_coeffs(&sample_spray()).data().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn one_dimensional_sprays_are_flat() {
        let sode = QuadraticSode::from_fn(1, |_, _, _| 0.37);
        let b = InvariantsBundle::for_sode(&sode);
        assert!(b.is_flat());
    }

    #[test]
    fn third_invariant_is_antisymmetric() {
        let (r, b, d) = third_fourth_fifth(&sample_spray());
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for m in 0..2 {
                        assert_eq!(r.get(&[i, j, k, m]), -r.get(&[i, k, j, m]));
                    }
                }
            }
        }
        assert_eq!(r, b);
        assert!(d);
    }

    #[test]
    fn reflexive_equivalence() {
        let s = sample_spray();
        let rep = equivalence(&s, &s, &[0, 1], EQUIVALENCE_TOL).unwrap();
        assert!(rep.equivalent);
        assert_eq!(rep.deviation_curvature_deviation, 0.0);
    }

    #[test]
    fn relabeled_spray_is_equivalent_under_the_map() {
        let s = sample_spray();
        let t = s.relabel(&[1, 0]).unwrap();
        assert!(equivalence(&s, &t, &[1, 0], EQUIVALENCE_TOL).unwrap().equivalent);
        assert!(!equivalence(&s, &t, &[0, 1], EQUIVALENCE_TOL).unwrap().equivalent);
    }

    #[test]
    fn equivalence_checks_dimensions() {
        assert!(equivalence(&QuadraticSode::zeros(2), &QuadraticSode::zeros(3), &[0, 1], 1e-9).is_err());
        assert!(equivalence(&QuadraticSode::zeros(2), &QuadraticSode::zeros(2), &[0, 0], 1e-9).is_err());
    }

    #[test]
    fn flat_system_matches_free_motion() {
        let free = QuadraticSode::zeros(3);
        let rep = equivalence(&QuadraticSode::from_fn(3, |_, _, _| 0.0), &free, &[0, 1, 2], EQUIVALENCE_TOL).unwrap();
        assert!(rep.equivalent);
        assert!(InvariantsBundle::for_sode(&free).is_flat());
    }
}
