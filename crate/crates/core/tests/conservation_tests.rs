use proptest::prelude::*;
use vh_reef::conservation::{
    compare_psi, conservation_drift, evaluate_f, intrinsic_flow, psi_derived, psi_for_sode, psi_paper, CostFunctional,
    PsiParams, PsiSource,
};
use vh_reef::dynamics::{stage3_field, system_before, StageScenario};
use vh_reef::integrator::IntegratorOptions;
use vh_reef::model::QuadraticSode;
use vh_reef::production::{symbiosis_spray, to_intrinsic_time, SprayForm};

fn drift(p: &PsiParams, rtol: f64, atol: f64) -> f64 {
    let opts = IntegratorOptions::default().with_tolerances(rtol, atol).with_samples(301);
    let flow = intrinsic_flow(&p.spray(SprayForm::Printed).unwrap(), p.lambda, [1.0, 0.5], 5.0, &opts).unwrap();
    let f = CostFunctional::new(p.lambda, psi_derived(p.lambda, p.k, p.k1, p.delta, p.delta1), PsiSource::Derived).unwrap();
    conservation_drift(&flow, &f).unwrap().max_rel_drift
}

#[test]
fn drift_shrinks_as_tolerances_tighten() {
    let p = PsiParams { lambda: 1.4, k: 2.0, k1: 3.0, delta: 0.4, delta1: 0.7 };
    let coarse = drift(&p, 1e-6, 1e-9);
    let fine = drift(&p, 1e-10, 1e-13);
    assert!(fine < coarse && fine <= 1e-6, "{coarse:e} -> {fine:e}");
}

#[test]
fn published_coefficients_hand_values() {
    // c_x = -2λ(1+δ)/K, c_y = -(1+λ)(1+δ1)/K at λ=1, K=2, δ=δ1=0.1
    let (cx, cy) = psi_paper(1.0, 2.0, 1.0, 0.1, 0.1);
    assert!((cx + 0.4).abs() < 1e-15 && (cy + 0.85).abs() < 1e-15, "{cx} {cy}");
}

#[test]
fn published_and_solved_agree_on_c_x_only_when_capacities_match() {
    let (px, _) = psi_paper(1.0, 2.0, 2.0, 0.1, 0.1);
    let (dx, _) = psi_derived(1.0, 2.0, 2.0, 0.1, 0.1);
    assert!((px - dx).abs() < 1e-15);
    let (px, _) = psi_paper(1.0, 2.0, 1.0, 0.1, 0.1);
    let (dx, _) = psi_derived(1.0, 2.0, 1.0, 0.1, 0.1);
    assert!((px - dx).abs() > 0.05);
}

#[test]
fn comparison_flags_the_published_functional() {
    let p = PsiParams { lambda: 1.0, k: 2.0, k1: 1.0, delta: 0.1, delta1: 0.1 };
    let opts = IntegratorOptions::default().with_tolerances(1e-11, 1e-13);
    let c = compare_psi(&p, [1.0, 0.5], 5.0, &opts).unwrap();
    assert!(c.derived_drift <= 1e-6);
    assert!(c.paper_drift > 1e-3);
    assert!(c.flagged && c.k1_structural_difference);
}

#[test]
fn nonpositive_velocity_rejected() {
    let f = CostFunctional::new(1.0, (0.0, 0.0), PsiSource::Derived).unwrap();
    assert!(evaluate_f(0.0, 0.0, 0.0, 1.0, &f).is_err());
    assert!(evaluate_f(0.0, 0.0, 1.0, -1.0, &f).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solved_functional_is_conserved_for_both_sign_forms(
        lambda in 0.5f64..2.0,
        k in 0.5f64..5.0,
        k1 in 0.5f64..5.0,
        delta in 0.0f64..0.9,
        delta1 in 0.0f64..0.9,
        derived in any::<bool>(),
    ) {
        let form = if derived { SprayForm::Derived } else { SprayForm::Printed };
        let sode = symbiosis_spray(form, lambda, k, k1, delta, delta1).unwrap();
        let f = CostFunctional::for_sode(&sode, lambda).unwrap();
        let opts = IntegratorOptions::default().with_tolerances(1e-11, 1e-13).with_samples(201);
        let flow = intrinsic_flow(&sode, lambda, [0.8, 0.6], 3.0, &opts).unwrap();
        prop_assert!(conservation_drift(&flow, &f).unwrap().max_rel_drift <= 1e-6);
    }

    #[test]
    fn substituting_the_new_alga_reproduces_stage_three(
        lambda in 0.5f64..2.0,
        k in 0.5f64..5.0,
        k1 in 0.5f64..5.0,
        k2 in 0.5f64..5.0,
        delta in 0.0f64..1.0,
        delta1 in 0.0f64..1.0,
        delta2 in 0.0f64..1.0,
    ) {
        let sc = StageScenario { lambda, k, k1, k2, delta, delta1, delta2, ..StageScenario::desk() };
        let (before, _) = to_intrinsic_time(&system_before(&sc.with_symbiont_replaced()).unwrap()).unwrap();
        let (after, _) = to_intrinsic_time(&stage3_field(&sc).unwrap()).unwrap();
        prop_assert_eq!(&before, &after);
        prop_assert_eq!(
            CostFunctional::for_sode(&before, lambda).unwrap(),
            CostFunctional::for_sode(&after, lambda).unwrap()
        );
    }
}

#[test]
fn foreign_quadratic_terms_rejected() {
    let sode = QuadraticSode::from_fn(2, |i, j, k| if i == 0 && j == 1 && k == 1 { 0.3 } else { 0.0 });
    assert!(psi_for_sode(&sode, 1.0).is_err());
}
