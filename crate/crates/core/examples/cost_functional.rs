//! Production cost `F = e^ψ v^a / u^b` along an intrinsic-time flow for the
//! published and the solved ψ coefficients.

use vh_reef::conservation::{compare_psi, PsiParams};
use vh_reef::integrator::IntegratorOptions;

fn main() -> vh_reef::Result<()> {
    let opts = IntegratorOptions::default().with_tolerances(1e-11, 1e-13).with_samples(401);
    for params in [
        PsiParams { lambda: 1.0, k: 2.0, k1: 2.0, delta: 0.1, delta1: 0.1 },
        PsiParams { lambda: 1.0, k: 2.0, k1: 1.0, delta: 0.1, delta1: 0.1 },
        PsiParams { lambda: 0.6, k: 1.5, k1: 3.0, delta: 0.3, delta1: 0.2 },
    ] {
        let c = compare_psi(&params, [1.0, 0.5], 5.0, &opts)?;
        println!("λ={} K={} K1={} δ={} δ1={}", params.lambda, params.k, params.k1, params.delta, params.delta1);
        println!("  published (c_x, c_y) = ({:+.4}, {:+.4})  drift {:.2e}", c.paper.0, c.paper.1, c.paper_drift);
        println!("  solved    (c_x, c_y) = ({:+.4}, {:+.4})  drift {:.2e}", c.derived.0, c.derived.1, c.derived_drift);
        println!("  flagged: {}  K1 enters solved ψ: {}", c.flagged, c.k1_structural_difference);
    }
    Ok(())
}
