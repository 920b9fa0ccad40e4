//! KCC invariants of the pre-bleaching spray: closed forms against finite
//! differences, and a Jacobi field checked against the deviation equation.

use vh_reef::dynamics::StageScenario;
use vh_reef::integrator::{integrate_second_order, IntegratorOptions};
use vh_reef::kcc::{curvature_at, deviation_curvature_fd, first_invariant, variational_check, InvariantsBundle};
use vh_reef::production::{symbiosis_spray, SprayForm};

fn main() -> vh_reef::Result<()> {
    let sc = StageScenario::desk();
    let sode = symbiosis_spray(SprayForm::Printed, sc.lambda, sc.k, sc.k1, sc.delta, sc.delta1)?;
    let bundle = InvariantsBundle::for_sode(&sode);

    let v = [1.0, 0.5];
    println!("ε at v = {v:?}: {:?}", first_invariant(&sode, &v)?);
    let closed = curvature_at(&bundle.deviation_curvature, &v);
    let fd = deviation_curvature_fd(&sode, &[0.0, 0.0], &v, 0.0)?;
    for (i, (c, f)) in closed.iter().zip(&fd).enumerate() {
        println!("P[{i}] closed {c:+.8?}  fd {f:+.8?}");
    }
    println!("fifth invariant vanishes: {}", bundle.fifth_is_zero);

    let opts = IntegratorOptions::default().with_tolerances(1e-12, 1e-14).with_span(1.0, 4.0).with_samples(601);
    let base = integrate_second_order(&sode, &[0.0, 0.0], &v, &opts)?.trajectory;
    let rep = variational_check(&sode, &base, &[1.0, 0.0], &[0.0, 0.2], &opts)?;
    let last = rep.states.last().unwrap();
    println!("Jacobi field at s = 4: ξ = {:?}", last.xi);
    println!("max |D²ξ - Pξ| = {:.2e}", rep.max_defect);
    Ok(())
}
