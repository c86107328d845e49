mod common;

use rand::Rng;
use vk_core::disagreement::{
    check_complete_disagreement, check_global_agreement_adjoint, check_global_agreement_potentials,
    check_local_agreement, verify_truth_maximality, GlobalVerdict, Knowledgebase, PotentialGlobalVerdict,
    DEFAULT_FEASIBILITY_LIMIT,
};
use vk_core::inference::{joint_domain, InferenceConfig};
use vk_core::lp::solve_feasibility;
use vk_core::potential::ProbabilityPotential;
use vk_core::relation::{project_relation, Relation};
use vk_core::sampling::{self, random_domain, random_relation, random_universe};
use vk_core::universe::{enumerate_assignments, project_assignment, Assignment};

/// Every `δ ⊆ Ω_X` with `δ↓d(φ) = φ` for all `φ`, by enumeration.
fn truth_valuations(kb: &[Relation]) -> Vec<Vec<Assignment>> {
    let u = kb[0].universe().clone();
    let joint = joint_domain(kb);
    let all = enumerate_assignments(&joint, &u).unwrap();
    let mut out = Vec::new();
    for mask in 0u32..(1 << all.len()) {
        let delta: Vec<&Assignment> = (0..all.len()).filter(|k| mask & (1 << k) != 0).map(|k| &all[k]).collect();
        let ok = kb.iter().all(|phi| {
            let mut image: Vec<Assignment> =
                delta.iter().map(|x| project_assignment(x, phi.domain()).unwrap()).collect();
            image.sort();
            image.dedup();
            let mut expected: Vec<Assignment> = phi.iter().collect();
            expected.sort();
            image == expected
        });
        if ok {
            out.push(delta.into_iter().cloned().collect());
        }
    }
    out
}

use vk_core::algebra::Valuation;

#[test]
fn truth_proposition_both_directions() {
    let cfg = InferenceConfig::default();
    let mut rng = sampling::rng(8);
    let mut agreeing = 0;
    let mut checked = 0;
    while checked < 200 {
        let vars = rng.gen_range(1..=4);
        let u = random_universe(&mut rng, vars, 2);
        if u.state_count(&u.full_domain()).unwrap() > 16 {
            continue;
        }
        let n = rng.gen_range(1..=4);
        let density = if rng.gen_bool(0.5) { 0.9 } else { 0.6 };
        let kb: Vec<Relation> = (0..n)
            .map(|_| {
                let d = random_domain(&mut rng, &u, 3);
                random_relation(&mut rng, &u, &d, density).unwrap()
            })
            .collect();
        checked += 1;
        let truths = truth_valuations(&kb);
        let verdict = check_global_agreement_adjoint(&kb, &cfg).unwrap();
        assert_eq!(verdict.agrees(), !truths.is_empty(), "{kb:?}");
        let gamma = common::compatible_assignments(&kb);
        if let GlobalVerdict::Agree { truth } = &verdict {
            agreeing += 1;
            let mut rows: Vec<Assignment> = truth.iter().collect();
            rows.sort();
            assert_eq!(rows, gamma);
            assert!(truths.contains(&gamma), "γ itself must be a truth valuation");
            for delta in &truths {
                assert!(delta.iter().all(|x| truth.contains(x)), "δ ⊄ γ");
            }
            assert!(verify_truth_maximality(&kb, truth).unwrap().passed());
        }
        assert_eq!(check_complete_disagreement(&kb, &cfg).unwrap(), gamma.is_empty());
    }
    assert!(agreeing > 20, "only {agreeing} agreeing samples");
}

#[test]
fn local_failure_names_the_first_pair() {
    let kb = vk_core::builtins::screening();
    let u = kb[0].universe().clone();
    let mut broken = kb.clone();
    broken[2] = Relation::from_named_rows(&u, &["a", "f"], [["54-", "Y"]]).unwrap();
    match check_local_agreement(&broken).unwrap() {
        vk_core::disagreement::LocalVerdict::Fail { first, second, overlap, .. } => {
            // R1 and the truncated R3 already differ on f
            assert_eq!((first, second), (0, 2));
            assert_eq!(overlap, u.domain(["f"]).unwrap());
        }
        other => panic!("expected failure, got {other:?}"),
    }
}

#[test]
fn potential_agreement_matches_direct_feasibility() {
    // conditional-product construction: two distributions sharing a marginal always agree
    let mut rng = sampling::rng(77);
    for _ in 0..40 {
        let model = sampling::random_two_context_model(&mut rng, 4).unwrap();
        let kb = common::probability_sections(&model).to_vec();
        match check_global_agreement_potentials(&kb, DEFAULT_FEASIBILITY_LIMIT).unwrap() {
            PotentialGlobalVerdict::Agree { truth } => {
                for phi in &kb {
                    assert_eq!(truth.project(phi.label()).unwrap(), *phi);
                }
            }
            other => panic!("expected agreement, got {other:?}"),
        }
    }
}

#[test]
fn inconsistent_potentials_yield_valid_certificates() {
    let model = vk_core::builtins::pr_box();
    let kb: Vec<ProbabilityPotential> = common::probability_sections(&model).to_vec();
    let system = vk_core::disagreement::MarginalSystem::build(&kb, DEFAULT_FEASIBILITY_LIMIT).unwrap();
    match check_global_agreement_potentials(&kb, DEFAULT_FEASIBILITY_LIMIT).unwrap() {
        PotentialGlobalVerdict::Disagree { certificate } => assert!(certificate.verify(&system.system)),
        other => panic!("expected disagreement, got {other:?}"),
    }
    assert!(!solve_feasibility(&system.system).is_feasible());
}

#[test]
fn feasibility_limit_is_a_resource_error() {
    let kb = common::probability_sections(&vk_core::builtins::ghz()).to_vec();
    assert!(matches!(check_global_agreement_potentials(&kb, 8), Err(vk_core::Error::Resource(_))));
}

#[test]
fn potentials_refuse_the_adjoint_path() {
    let kb = Knowledgebase::Probabilities(common::probability_sections(&vk_core::builtins::bell()).to_vec());
    assert!(!kb.is_adjoint());
    assert!(matches!(
        kb.check_global_agreement_adjoint(&InferenceConfig::default()),
        Err(vk_core::Error::Capability(_))
    ));
    let rels = Knowledgebase::Relations(vk_core::builtins::screening());
    assert!(rels.is_adjoint());
}

#[test]
fn empty_knowledgebase_is_rejected() {
    let kb: Vec<Relation> = Vec::new();
    assert!(check_global_agreement_adjoint(&kb, &InferenceConfig::default()).is_err());
    assert!(check_complete_disagreement(&kb, &InferenceConfig::default()).is_err());
    assert!(check_local_agreement(&kb).unwrap().passed());
}

#[test]
fn projection_of_gamma_never_exceeds_valuations() {
    let mut rng = sampling::rng(31);
    for _ in 0..50 {
        let u = random_universe(&mut rng, 4, 2);
        let kb: Vec<Relation> = (0..3)
            .map(|_| {
                let d = random_domain(&mut rng, &u, 2);
                random_relation(&mut rng, &u, &d, 0.7).unwrap()
            })
            .collect();
        let joint = joint_domain(&kb);
        let gamma = Relation::from_assignments(&u, joint, common::compatible_assignments(&kb)).unwrap();
        for phi in &kb {
            assert!(project_relation(&gamma, phi.domain()).unwrap().is_subset(phi));
        }
    }
}
