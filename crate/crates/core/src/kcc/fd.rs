//! Finite-difference evaluation of KCC invariants for general
//! `g^i(x, ẋ, t)`. Steps are `ε^{1/3}·max(1, |arg|)` for first derivatives
//! and `ε^{1/4}·max(1, |arg|)` for second ones.

use crate::error::{check_dim, Result};
use crate::model::QuadraticSode;

/// `ẍ^i + g^i(x, ẋ, t) = 0`.
pub trait SecondOrderSystem {
    fn dim(&self) -> usize;
    fn g(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]);
}

impl SecondOrderSystem for QuadraticSode {
    fn dim(&self) -> usize {
        self.n()
    }

    fn g(&self, _x: &[f64], v: &[f64], _t: f64, out: &mut [f64]) {
        self.spray_into(v, out);
    }
}

pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &[f64], f64, &mut [f64])> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &[f64], f64, &mut [f64])> SecondOrderSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn g(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        (self.f)(x, v, t, out)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    X(usize),
    V(usize),
    T,
}

struct Probe<'a, S: ?Sized> {
    sys: &'a S,
    x: &'a [f64],
    v: &'a [f64],
    t: f64,
}

fn step(base: f64, power: f64) -> f64 {
    f64::EPSILON.powf(power) * base.abs().max(1.0)
}

impl<S: SecondOrderSystem + ?Sized> Probe<'_, S> {
    fn arg(&self, s: Slot) -> f64 {
        match s {
            Slot::X(i) => self.x[i],
            Slot::V(i) => self.v[i],
            Slot::T => self.t,
        }
    }

    fn eval(&self, shifts: &[(Slot, f64)]) -> Vec<f64> {
        let mut x = self.x.to_vec();
        let mut v = self.v.to_vec();
        let mut t = self.t;
        for &(s, d) in shifts {
            match s {
                Slot::X(i) => x[i] += d,
                Slot::V(i) => v[i] += d,
                Slot::T => t += d,
            }
        }
        let mut out = vec![0.0; self.sys.dim()];
        self.sys.g(&x, &v, t, &mut out);
        out
    }

    fn first(&self, s: Slot) -> Vec<f64> {
        let h = step(self.arg(s), 1.0 / 3.0);
        let p = self.eval(&[(s, h)]);
        let m = self.eval(&[(s, -h)]);
        p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    }

    fn second(&self, a: Slot, b: Slot) -> Vec<f64> {
        let ha = step(self.arg(a), 0.25);
        if a == b {
            let p = self.eval(&[(a, ha)]);
            let c = self.eval(&[]);
            let m = self.eval(&[(a, -ha)]);
            return (0..p.len()).map(|i| (p[i] - 2.0 * c[i] + m[i]) / (ha * ha)).collect();
        }
        let hb = step(self.arg(b), 0.25);
        let pp = self.eval(&[(a, ha), (b, hb)]);
        let pm = self.eval(&[(a, ha), (b, -hb)]);
        let mp = self.eval(&[(a, -ha), (b, hb)]);
        let mm = self.eval(&[(a, -ha), (b, -hb)]);
        (0..pp.len()).map(|i| (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * ha * hb)).collect()
    }
}

fn probe<'a, S: SecondOrderSystem + ?Sized>(sys: &'a S, x: &'a [f64], v: &'a [f64], t: f64) -> Result<Probe<'a, S>> {
    check_dim(sys.dim(), x.len())?;
    check_dim(sys.dim(), v.len())?;
    Ok(Probe { sys, x, v, t })
}

/// `ε^i = ½ g^i_{;r} ẋ^r - g^i`.
pub fn first_invariant_fd<S: SecondOrderSystem + ?Sized>(sys: &S, x: &[f64], v: &[f64], t: f64) -> Result<Vec<f64>> {
    let pr = probe(sys, x, v, t)?;
    let n = sys.dim();
    let g = pr.eval(&[]);
    let gv: Vec<Vec<f64>> = (0..n).map(|r| pr.first(Slot::V(r))).collect();
    Ok((0..n).map(|i| 0.5 * (0..n).map(|r| gv[r][i] * v[r]).sum::<f64>() - g[i]).collect())
}

/// `P^i_j = -g^i_{,j} - ½ g^r g^i_{;r;j} + ½ ẋ^r g^i_{,r;j}
///          + ¼ g^i_{;r} g^r_{;j} + ½ ∂_t g^i_{;j}`, returned as `[i][j]`.
pub fn deviation_curvature_fd<S: SecondOrderSystem + ?Sized>(
    sys: &S,
    x: &[f64],
    v: &[f64],
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    let pr = probe(sys, x, v, t)?;
    let n = sys.dim();
    let g = pr.eval(&[]);
    let gx: Vec<Vec<f64>> = (0..n).map(|j| pr.first(Slot::X(j))).collect();
    let gv: Vec<Vec<f64>> = (0..n).map(|j| pr.first(Slot::V(j))).collect();
    let gtv: Vec<Vec<f64>> = (0..n).map(|j| pr.second(Slot::T, Slot::V(j))).collect();
    let mut gvv = vec![vec![Vec::new(); n]; n];
    let mut gxv = vec![vec![Vec::new(); n]; n];
    for r in 0..n {
        for j in 0..n {
            gvv[r][j] = pr.second(Slot::V(r), Slot::V(j));
            gxv[r][j] = pr.second(Slot::X(r), Slot::V(j));
        }
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut p = -gx[j][i] + 0.5 * gtv[j][i];
                    for r in 0..n {
                        p += -0.5 * g[r] * gvv[r][j][i] + 0.5 * v[r] * gxv[r][j][i] + 0.25 * gv[r][i] * gv[j][r];
                    }
                    p
                })
                .collect()
        })
        .collect())
}

/// `R^i_jk = ⅓ (∂P^i_j/∂ẋ^k - ∂P^i_k/∂ẋ^j)` by central differences of
/// [`deviation_curvature_fd`] with velocity step `h`, returned as `[i][j][k]`.
pub fn third_invariant_fd<S: SecondOrderSystem + ?Sized>(
    sys: &S,
    x: &[f64],
    v: &[f64],
    t: f64,
    h: f64,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = sys.dim();
    check_dim(n, v.len())?;
    let mut dp = Vec::with_capacity(n);
    for k in 0..n {
        let mut vp = v.to_vec();
        let mut vm = v.to_vec();
        vp[k] += h;
        vm[k] -= h;
        let pp = deviation_curvature_fd(sys, x, &vp, t)?;
        let pm = deviation_curvature_fd(sys, x, &vm, t)?;
        // dp[k][i][j] = ∂P^i_j/∂ẋ^k
        dp.push(
            (0..n)
                .map(|i| (0..n).map(|j| (pp[i][j] - pm[i][j]) / (2.0 * h)).collect::<Vec<f64>>())
                .collect::<Vec<_>>(),
        );
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| (dp[k][i][j] - dp[j][i][k]) / 3.0).collect())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_force_first_invariant() {
        let sys = FnSystem::new(2, |_: &[f64], _: &[f64], _: f64, out: &mut [f64]| {
            out[0] = 1.5;
            out[1] = -0.5;
        });
        let e = first_invariant_fd(&sys, &[0.0, 0.0], &[2.0, 3.0], 0.0).unwrap();
        assert!((e[0] + 1.5).abs() < 1e-9 && (e[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn linear_damping_first_invariant() {
        let sys = FnSystem::new(1, |_: &[f64], v: &[f64], _: f64, out: &mut [f64]| out[0] = 0.8 * v[0]);
        let e = first_invariant_fd(&sys, &[0.0], &[2.0], 0.0).unwrap();
        assert!((e[0] + 0.8).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn harmonic_oscillator_curvature() {
        // ẍ + ω² x = 0 has P = -ω²
        let sys = FnSystem::new(1, |x: &[f64], _: &[f64], _: f64, out: &mut [f64]| out[0] = 4.0 * x[0]);
        let p = deviation_curvature_fd(&sys, &[0.3], &[1.0], 0.0).unwrap();
        assert!((p[0][0] + 4.0).abs() < 1e-8, "{p:?}");
    }

    #[test]
    fn time_dependent_damping_curvature() {
        for t in [0.0, 0.7, 2.0] {
            let sys = FnSystem::new(2, |_: &[f64], v: &[f64], t: f64, out: &mut [f64]| {
                out[0] = t * v[0];
                out[1] = t * v[1];
            });
            let p = deviation_curvature_fd(&sys, &[0.1, 0.2], &[1.0, -1.0], t).unwrap();
            let want = t * t / 4.0 + 0.5;
            assert!((p[0][0] - want).abs() < 1e-6 && (p[1][1] - want).abs() < 1e-6, "{p:?}");
            assert!(p[0][1].abs() < 1e-6 && p[1][0].abs() < 1e-6);
        }
    }

    #[test]
    fn dimension_checked() {
        assert!(deviation_curvature_fd(&QuadraticSode::zeros(2), &[0.0], &[0.0, 0.0], 0.0).is_err());
    }
}
