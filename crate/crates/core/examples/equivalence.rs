//! Before/after bleaching sprays compared through their invariants.

use vh_reef::dynamics::StageScenario;
use vh_reef::kcc::{equivalence, EQUIVALENCE_TOL};
use vh_reef::production::{symbiosis_spray, SprayForm};

fn main() -> vh_reef::Result<()> {
    let sc = StageScenario::desk();
    let before = symbiosis_spray(SprayForm::Printed, sc.lambda, sc.k, sc.k1, sc.delta, sc.delta1)?;
    for (k2, d2) in [(sc.k1, sc.delta1), (2.0 * sc.k1, sc.delta1), (sc.k1, 3.0 * sc.delta1)] {
        let after = symbiosis_spray(SprayForm::Printed, sc.lambda, sc.k, k2, sc.delta, d2)?;
        let rep = equivalence(&before, &after, &[0, 1], EQUIVALENCE_TOL)?;
        println!(
            "K2={k2} δ2={d2}: equivalent={} (P dev {:.3e}, R dev {:.3e})",
            rep.equivalent, rep.deviation_curvature_deviation, rep.third_deviation
        );
    }
    // swapping coordinates needs the matching renaming
    let swapped = before.relabel(&[1, 0])?;
    println!("swapped, identity map: {}", equivalence(&before, &swapped, &[0, 1], EQUIVALENCE_TOL)?.equivalent);
    println!("swapped, map [1, 0]:   {}", equivalence(&before, &swapped, &[1, 0], EQUIVALENCE_TOL)?.equivalent);
    Ok(())
}
