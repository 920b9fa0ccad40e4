use proptest::prelude::*;
use vh_reef::dynamics::symbiosis_pair;
use vh_reef::integrator::{integrate, integrate_second_order_at, IntegratorOptions};
use vh_reef::model::State;
use vh_reef::production::{
    intrinsic_initial, production_curve, second_order_residual, to_intrinsic_time, transform_trajectory, TimeMap,
};

proptest! {
    #[test]
    fn time_map_round_trip(lambda in 0.1f64..4.0, t in -3.0f64..8.0) {
        let tm = TimeMap::new(lambda).unwrap();
        prop_assert!((tm.to_t(tm.to_s(t)) - t).abs() <= 1e-12 * t.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn t_run_and_s_run_commute(
        lambda in 0.5f64..2.0,
        k in 0.5f64..4.0,
        ka in 0.5f64..4.0,
        delta in 0.0f64..0.6,
        delta_a in 0.0f64..0.6,
        n0 in 0.2f64..2.0,
        a0 in 0.2f64..2.0,
    ) {
        let sys = symbiosis_pair(lambda, k, ka, delta, delta_a).unwrap();
        let opts = IntegratorOptions::default().with_tolerances(1e-11, 1e-13).with_span(0.0, 2.0).with_samples(801);
        let run = integrate(&sys, &State::new(vec![n0, a0]), &opts).unwrap();
        let (sode, tm) = to_intrinsic_time(&sys).unwrap();
        let s_form = transform_trajectory(&production_curve(&run.trajectory, &[1.0, 1.0]).unwrap(), &tm).unwrap();
        let (s0, v0) = intrinsic_initial(&tm, 0.0, &[n0, a0]);
        let direct = integrate_second_order_at(&sode, &[0.0, 0.0], &v0, &opts.with_span(s0, tm.to_s(2.0)), s_form.times()).unwrap();
        for (j, (a, b)) in s_form.states().iter().zip(direct.trajectory.states()).enumerate().skip(1) {
            let (xa, xb) = (a.productions.as_ref().unwrap(), b.productions.as_ref().unwrap());
            let (va, vb) = (&s_form.velocities().unwrap()[j], &direct.trajectory.velocities().unwrap()[j]);
            for i in 0..2 {
                prop_assert!((xa[i] - xb[i]).abs() <= 1e-6 * xb[i].abs());
                prop_assert!((va[i] - vb[i]).abs() <= 1e-6 * vb[i].abs());
            }
        }
    }

    #[test]
    fn productions_never_decrease(delta in -0.8f64..0.8, n0 in 0.0f64..2.0, a0 in 0.0f64..2.0) {
        let sys = symbiosis_pair(1.0, 2.0, 1.0, delta, -delta).unwrap();
        let opts = IntegratorOptions::default().with_span(0.0, 10.0).with_samples(201);
        let run = integrate(&sys, &State::new(vec![n0, a0]), &opts).unwrap();
        let prod = production_curve(&run.trajectory, &[1.0, 1.0]).unwrap();
        for i in 0..2 {
            let x = prod.position(i).unwrap();
            prop_assert!(x.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}

#[test]
fn residual_is_second_order_in_grid_spacing() {
    let sys = symbiosis_pair(1.0, 2.0, 1.0, 0.1, 0.1).unwrap();
    let (sode, tm) = to_intrinsic_time(&sys).unwrap();
    let residual = |m: usize| {
        let opts = IntegratorOptions::default().with_tolerances(1e-12, 1e-14).with_span(0.0, 2.0).with_samples(m);
        let run = integrate(&sys, &State::new(vec![1.0, 0.5]), &opts).unwrap();
        let s_form = transform_trajectory(&production_curve(&run.trajectory, &[1.0, 1.0]).unwrap(), &tm).unwrap();
        second_order_residual(&s_form, &sode).unwrap()
    };
    let (r1, r2, r3) = (residual(81), residual(161), residual(321));
    assert!((r1 / r2).log2() > 1.8 && (r2 / r3).log2() > 1.8, "{r1:e} {r2:e} {r3:e}");
}

#[test]
fn simpson_production_matches_logistic_integral() {
    // ∫ N dt for logistic growth is K ln(1 + N0 (e^{λt} - 1)/K) / λ
    let (lambda, k, n0) = (1.2, 2.0, 0.3);
    let sys = vh_reef::model::vh_from_params(&vh_reef::model::ModelParams::uncoupled(vec![lambda], vec![k]).unwrap());
    let opts = IntegratorOptions::default().with_tolerances(1e-12, 1e-14).with_span(0.0, 4.0).with_samples(401);
    let run = integrate(&sys, &State::new(vec![n0]), &opts).unwrap();
    let prod = production_curve(&run.trajectory, &[1.0]).unwrap();
    for (t, x) in prod.times().iter().zip(prod.position(0).unwrap()) {
        let exact = k * (1.0 + n0 * ((lambda * t).exp() - 1.0) / k).ln() / lambda;
        assert!((x - exact).abs() < 1e-8, "t={t}: {x} vs {exact}");
    }
}
