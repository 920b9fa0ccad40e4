use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vh_reef::dynamics::{
    classify_competition, draw_competition, reduction_gap, run_recovery_pipeline, stage1_field, stage3_field,
    verify_outcome, CompetitionOutcome, RecoveryStatus, StageScenario, Transition,
};
use vh_reef::integrator::IntegratorOptions;

#[test]
fn stitched_stages_continue_exactly() {
    let res = run_recovery_pipeline(&StageScenario::desk(), &IntegratorOptions::default()).unwrap();
    let end1 = res.stage1.trajectory.final_state().unwrap();
    assert_eq!(res.stage2.trajectory.first_state().unwrap().populations, end1.populations);
    let end2 = &res.stage2.trajectory.final_state().unwrap().populations;
    assert_eq!(res.stage3.trajectory.first_state().unwrap().populations, vec![end2[0], end2[2]]);
    assert_eq!(res.stage_starts[2], res.a1_extinction.unwrap());
    assert_eq!(*res.stage2.trajectory.times().last().unwrap(), res.stage_starts[2]);
}

#[test]
fn fixed_transition_runs_full_competition_stage() {
    let sc = StageScenario { transition: Transition::Fixed, ..StageScenario::desk() };
    let res = run_recovery_pipeline(&sc, &IntegratorOptions::default()).unwrap();
    assert_eq!(res.stage_starts[2], sc.durations[0] + sc.durations[1]);
    assert_eq!(res.status, RecoveryStatus::Recovered);
}

#[test]
fn short_competition_stage_is_undecided() {
    let sc = StageScenario { durations: [50.0, 1.0, 50.0], ..StageScenario::desk() };
    let res = run_recovery_pipeline(&sc, &IntegratorOptions::default()).unwrap();
    assert_eq!(res.a1_extinction, None);
    assert_eq!(res.status, RecoveryStatus::Undecided);
}

#[test]
fn recovery_needs_a1_hit_harder() {
    let sc = StageScenario { mu1: 0.5, mu2: 2.0, ..StageScenario::desk() };
    assert!(run_recovery_pipeline(&sc, &IntegratorOptions::default()).is_err());
}

#[test]
fn stage_three_is_stage_one_subsystem_after_substitution() {
    let sc = StageScenario { k2: 1.7, delta2: 0.35, ..StageScenario::desk() };
    let one = stage1_field(&sc.with_symbiont_replaced()).unwrap();
    let three = stage3_field(&sc).unwrap();
    for (a, b) in [(0, 0), (1, 1)] {
        for (c, d) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(one.sode.get(a, c, d), three.sode.get(b, c, d));
        }
    }
    assert_eq!(&one.lambda[..2], &three.lambda[..]);
}

#[test]
fn desk_competition_excludes_a1() {
    let opts = IntegratorOptions::default().with_span(0.0, 200.0);
    let rep = verify_outcome(&StageScenario::desk(), &opts).unwrap();
    assert_eq!(rep.predicted, CompetitionOutcome::Species1Excluded);
    assert!(rep.agree);
}

#[test]
fn coral_coupling_keeps_competition_winner() {
    let sc = StageScenario::desk();
    let gap = reduction_gap(&sc, &IntegratorOptions::default().with_span(0.0, 100.0)).unwrap();
    assert_eq!(gap.full_excluded, Some(1));
    assert_eq!(gap.reduced_excluded, Some(1));
}

#[test]
fn draws_cover_all_four_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..100 {
        let c = draw_competition(&mut rng, 0.1);
        seen.insert(format!("{:?}", c.classify().unwrap()));
    }
    assert_eq!(seen.len(), 4, "{seen:?}");
}

proptest! {
    #[test]
    fn classifier_symmetric_under_species_swap(k1 in 0.2f64..5.0, k2 in 0.2f64..5.0, mu1 in 0.1f64..4.0, mu2 in 0.1f64..4.0) {
        use CompetitionOutcome::*;
        let a = classify_competition(k1, k2, mu1, mu2).unwrap();
        let b = classify_competition(k2, k1, mu2, mu1).unwrap();
        let swapped = match a {
            Species1Excluded => Species2Excluded,
            Species2Excluded => Species1Excluded,
            other => other,
        };
        prop_assert_eq!(b, swapped);
    }

    #[test]
    fn classifier_invariant_under_common_rescaling(k1 in 0.2f64..5.0, k2 in 0.2f64..5.0, mu1 in 0.1f64..4.0, mu2 in 0.1f64..4.0) {
        let a = classify_competition(k1, k2, mu1, mu2).unwrap();
        let b = classify_competition(4.0 * k1, 4.0 * k2, mu1, mu2).unwrap();
        prop_assert_eq!(a, b);
    }
}
