//! Rewrites a host/symbiont run in intrinsic time `s = e^{λt}/λ`, where
//! productions follow a geodesic spray, and compares with integrating the
//! spray directly.

use vh_reef::dynamics::{symbiosis_pair, StageScenario};
use vh_reef::integrator::{integrate, integrate_second_order_at, IntegratorOptions};
use vh_reef::model::State;
use vh_reef::production::{
    intrinsic_initial, production_curve, second_order_residual, to_intrinsic_time, transform_trajectory,
};

fn main() -> vh_reef::Result<()> {
    let sc = StageScenario::desk();
    let system = symbiosis_pair(sc.lambda, sc.k, sc.k1, sc.delta, sc.delta1)?;
    let opts = IntegratorOptions::default().with_tolerances(1e-11, 1e-13).with_span(0.0, 3.0).with_samples(601);

    let t_run = integrate(&system, &State::new(vec![sc.initial[0], sc.initial[1]]), &opts)?;
    let with_x = production_curve(&t_run.trajectory, &[1.0, 1.0])?;
    let (sode, tm) = to_intrinsic_time(&system)?;
    let s_form = transform_trajectory(&with_x, &tm)?;

    let (s0, v0) = intrinsic_initial(&tm, 0.0, &[sc.initial[0], sc.initial[1]]);
    let direct = integrate_second_order_at(&sode, &[0.0, 0.0], &v0, &opts.with_span(s0, tm.to_s(3.0)), s_form.times())?;

    let mut worst: f64 = 0.0;
    for (a, b) in s_form.states().iter().zip(direct.trajectory.states()) {
        let (pa, pb) = (a.productions.as_ref().unwrap(), b.productions.as_ref().unwrap());
        for (x, y) in pa.iter().zip(pb) {
            worst = worst.max((x - y).abs() / y.abs().max(1e-12));
        }
    }
    println!("Γ^N_NN = {:.4}, Γ^N_NA = {:.4}", sode.get(0, 0, 0), sode.get(0, 0, 1));
    println!("s range: [{:.4}, {:.4}]", s0, tm.to_s(3.0));
    println!("max relative production mismatch: {worst:.2e}");
    println!("second-order residual of transformed run: {:.2e}", second_order_residual(&s_form, &sode)?);
    Ok(())
}
