//! Single-species logistic growth through the production model, checked
//! against the closed-form solution.

use vh_reef::integrator::{integrate, IntegratorOptions};
use vh_reef::model::{vh_from_params, ModelParams, State};

fn main() -> vh_reef::Result<()> {
    let (lambda, k, n0) = (0.8, 3.0, 0.1);
    let params = ModelParams::uncoupled(vec![lambda], vec![k])?;
    let system = vh_from_params(&params);

    let opts = IntegratorOptions::default().with_span(0.0, 15.0).with_samples(7);
    let run = integrate(&system, &State::new(vec![n0]), &opts)?;

    println!("{:>6} {:>14} {:>14}", "t", "N(t)", "exact");
    for (t, s) in run.trajectory.times().iter().zip(run.trajectory.states()) {
        let exact = k / (1.0 + (k / n0 - 1.0) * (-lambda * t).exp());
        println!("{t:>6.2} {:>14.10} {exact:>14.10}", s.populations[0]);
    }
    println!("steps: {:?}", run.stats);
    Ok(())
}
