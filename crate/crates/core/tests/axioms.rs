use std::sync::Arc;

use proptest::prelude::*;
use vk_core::algebra::{
    check_core_axioms, check_idempotency_axiom, check_neutral_axiom, check_null_axiom, information_algebra_suite,
    Axiom, AxiomOutcome, SuiteLimits, Valuation, WithNeutral, WithNull,
};
use vk_core::csp::adjointness_suite;
use vk_core::potential::{BooleanPotential, Potential, ProbabilityPotential};
use vk_core::relation::{natural_join, project_relation, Relation};
use vk_core::sampling::{self, random_domain, random_rational_potential, random_relation};
use vk_core::semiring::ratio;
use vk_core::universe::VariableUniverse;

fn small_universe() -> Arc<VariableUniverse> {
    Arc::new(
        VariableUniverse::from_frames([
            ("x", vec!["0", "1"]),
            ("y", vec!["0", "1", "2"]),
            ("z", vec!["0", "1"]),
        ])
        .unwrap(),
    )
}

fn relation_samples(seed: u64, count: usize) -> Vec<Relation> {
    let u = small_universe();
    let mut rng = sampling::rng(seed);
    let mut out = Vec::new();
    for k in 0..count {
        let d = random_domain(&mut rng, &u, 3);
        // include the extremes so the order and null axioms see them
        let r = match k % 6 {
            0 => Relation::full(&u, d).unwrap(),
            1 => Relation::empty(&u, d).unwrap(),
            _ => random_relation(&mut rng, &u, &d, 0.6).unwrap(),
        };
        out.push(r);
    }
    out
}

#[test]
fn relations_satisfy_every_axiom() {
    let samples = relation_samples(7, 24);
    let report = information_algebra_suite(&samples, SuiteLimits::default()).unwrap();
    assert_eq!(report.axioms(), Axiom::ALL.to_vec());
    for (axiom, outcome) in &report.results {
        match outcome {
            AxiomOutcome::Pass(n) => assert!(*n > 0, "{axiom:?} checked nothing"),
            AxiomOutcome::Fail(c) => panic!("{axiom:?} failed: {c:?}"),
        }
    }
}

#[test]
fn rational_potentials_satisfy_a1_to_a8_but_not_a9() {
    let u = small_universe();
    let mut rng = sampling::rng(11);
    let mut samples: Vec<ProbabilityPotential> = (0..16)
        .map(|_| {
            let d = random_domain(&mut rng, &u, 3);
            random_rational_potential(&mut rng, &u, &d, 3).unwrap()
        })
        .collect();
    samples.push(ProbabilityPotential::null(&u, &u.domain(["x", "y"]).unwrap()).unwrap());

    let mut report = check_core_axioms(&samples, SuiteLimits::default()).unwrap();
    report.merge(check_neutral_axiom(&samples).unwrap());
    report.merge(check_null_axiom(&samples).unwrap());
    assert!(report.all_passed(), "{report:?}");

    let a9 = check_idempotency_axiom(&samples).unwrap();
    match a9.outcome(Axiom::A9).unwrap() {
        AxiomOutcome::Fail(c) => {
            let phi = &c.valuations[0];
            let s = &c.domains[0];
            assert_ne!(phi.combine(&phi.project(s).unwrap()).unwrap(), *phi);
        }
        other => panic!("expected an A9 counterexample, got {other:?}"),
    }
}

#[test]
fn stored_a9_counterexample() {
    // φ(x=0) = 2, φ(x=1) = 1: φ↓∅ = 3, so φ ⊗ φ↓∅ = 3φ
    let u = small_universe();
    let phi: ProbabilityPotential = Potential::from_table(&u, u.domain(["x"]).unwrap(), vec![ratio(2, 1), ratio(1, 1)]).unwrap();
    let total = phi.project(&vk_core::universe::Domain::empty()).unwrap();
    assert_eq!(total.table(), &[ratio(3, 1)]);
    let combined = phi.combine(&total).unwrap();
    assert_eq!(combined.table(), &[ratio(6, 1), ratio(3, 1)]);
    assert_ne!(combined, phi);
}

#[test]
fn boolean_potentials_are_idempotent() {
    let u = small_universe();
    let mut rng = sampling::rng(3);
    let samples: Vec<BooleanPotential> = (0..16)
        .map(|_| {
            let d = random_domain(&mut rng, &u, 3);
            BooleanPotential::from_relation(&random_relation(&mut rng, &u, &d, 0.5).unwrap())
        })
        .collect();
    let mut report = check_core_axioms(&samples, SuiteLimits::default()).unwrap();
    report.merge(check_neutral_axiom(&samples).unwrap());
    report.merge(check_null_axiom(&samples).unwrap());
    report.merge(check_idempotency_axiom(&samples).unwrap());
    assert!(report.all_passed(), "{report:?}");
}

#[test]
fn adjointness_on_seeded_relations() {
    let samples = relation_samples(200, 200);
    let report = adjointness_suite(&samples).unwrap();
    assert!(report.passed(), "{:?}", report.failure);
    assert!(report.counit_checks >= 2 * 200 * 200);
}

#[test]
fn neutral_and_null_shapes() {
    let u = small_universe();
    let d = u.domain(["x", "y"]).unwrap();
    assert_eq!(Relation::neutral(&u, &d).unwrap().len(), 6);
    assert!(Relation::null(&u, &d).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn join_commutes_and_projects_back_below(seed in any::<u64>()) {
        let u = small_universe();
        let mut rng = sampling::rng(seed);
        let d1 = random_domain(&mut rng, &u, 3);
        let d2 = random_domain(&mut rng, &u, 3);
        let r1 = random_relation(&mut rng, &u, &d1, 0.5).unwrap();
        let r2 = random_relation(&mut rng, &u, &d2, 0.5).unwrap();
        let j = natural_join(&r1, &r2).unwrap();
        prop_assert_eq!(&j, &natural_join(&r2, &r1).unwrap());
        prop_assert!(project_relation(&j, &d1).unwrap().is_subset(&r1));
        prop_assert!(project_relation(&j, &d2).unwrap().is_subset(&r2));
        // membership oracle: x ∈ r1 ⊗ r2 iff both restrictions are members
        for x in vk_core::universe::enumerate_assignments(&d1.union(&d2), &u).unwrap() {
            let a = vk_core::universe::project_assignment(&x, &d1).unwrap();
            let b = vk_core::universe::project_assignment(&x, &d2).unwrap();
            prop_assert_eq!(j.contains(&x), r1.contains(&a) && r2.contains(&b));
        }
    }

    #[test]
    fn potential_combination_is_pointwise(seed in any::<u64>()) {
        let u = small_universe();
        let mut rng = sampling::rng(seed);
        let d1 = random_domain(&mut rng, &u, 2);
        let d2 = random_domain(&mut rng, &u, 2);
        let p = random_rational_potential(&mut rng, &u, &d1, 4).unwrap();
        let q = random_rational_potential(&mut rng, &u, &d2, 4).unwrap();
        let c = p.combine(&q).unwrap();
        for x in vk_core::universe::enumerate_assignments(&d1.union(&d2), &u).unwrap() {
            let a = vk_core::universe::project_assignment(&x, &d1).unwrap();
            let b = vk_core::universe::project_assignment(&x, &d2).unwrap();
            prop_assert_eq!(c.value(&x).unwrap(), &(p.value(&a).unwrap() * q.value(&b).unwrap()));
        }
    }
}
