//! Classifies the four competition regimes and confirms each one by
//! simulation.

use vh_reef::dynamics::{verify_competition, Competition, PROBE_FRACTIONS};
use vh_reef::integrator::IntegratorOptions;

fn main() -> vh_reef::Result<()> {
    let opts = IntegratorOptions::default().with_span(0.0, 400.0);
    let cases = [
        ("A1 loses", 2.0, 0.5),
        ("A2 loses", 0.5, 2.0),
        ("both persist", 0.5, 0.5),
        ("first come, first served", 2.0, 2.0),
    ];
    for (label, mu1, mu2) in cases {
        let c = Competition { lambda: 1.0, k1: 1.0, k2: 1.0, mu1, mu2 };
        let rep = verify_competition(&c, PROBE_FRACTIONS.0 * c.k1, PROBE_FRACTIONS.1 * c.k2, &opts)?;
        println!("{label:<26} predicted {:?}, observed {:?}", rep.predicted, rep.observed);
        for run in &rep.runs {
            println!("    from ({:.3}, {:.3}) -> ({:.4}, {:.4})", run.initial.0, run.initial.1, run.final_state.0, run.final_state.1);
        }
    }
    Ok(())
}
