//! Symbiosis, bleaching competition, and recovery with the new alga.

use vh_reef::dynamics::{reduction_gap, run_recovery_pipeline, StageScenario};
use vh_reef::integrator::IntegratorOptions;

fn main() -> vh_reef::Result<()> {
    let sc = StageScenario::desk();
    let opts = IntegratorOptions::default().with_samples(501);
    let res = run_recovery_pipeline(&sc, &opts)?;

    println!("stage starts: {:?}", res.stage_starts);
    match res.a1_extinction {
        Some(t) => println!("A1 lost at t = {t:.4}"),
        None => println!("A1 survived the competition stage"),
    }
    let fin = &res.final_state().populations;
    println!("final (N, A2) = ({:.6}, {:.6})", fin[0], fin[1]);
    if let Some((n, a)) = res.equilibrium {
        println!("equilibrium   = ({n:.6}, {a:.6})");
    }
    println!("status: {:?}", res.status);

    let gap = reduction_gap(&sc, &opts.with_span(0.0, sc.durations[1]))?;
    println!(
        "coral-coupled vs pure competition: max gap {:.3e}, excluded {:?} / {:?}",
        gap.max_gap, gap.full_excluded, gap.reduced_excluded
    );
    Ok(())
}
