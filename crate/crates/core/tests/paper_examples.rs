mod common;

use std::sync::Arc;

use vk_core::algebra::{Valuation, WithNull};
use vk_core::builtins::{self, BELL_TABLE};
use vk_core::contextuality::check_no_signalling;
use vk_core::csp::{liar_cycle, truth_teller_cycle};
use vk_core::disagreement::{
    analyze_adjoint, check_complete_disagreement, check_global_agreement_adjoint, check_local_agreement,
    verify_truth_maximality, GlobalVerdict,
};
use vk_core::inference::{solve_fusion, solve_naive, Heuristic, InferenceConfig, InferenceProblem, OrderChoice};
use vk_core::relation::{natural_join, project_relation, Relation};
use vk_core::semiring::ratio;
use vk_core::universe::{enumerate_assignments, Assignment};

fn cfg() -> InferenceConfig {
    InferenceConfig::default()
}

#[test]
fn bell_table_entries() {
    let model = builtins::bell();
    let u = model.scenario().universe().clone();
    let sections = common::probability_sections(&model);
    let rows = [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")];
    let columns = [("0", "0"), ("1", "0"), ("0", "1"), ("1", "1")];
    for (r, (a, b)) in rows.iter().enumerate() {
        for (c, (oa, ob)) in columns.iter().enumerate() {
            let x = Assignment::from_labels(&u, [(*a, *oa), (*b, *ob)]).unwrap();
            let (p, q) = BELL_TABLE[r][c];
            assert_eq!(*sections[r].value(&x).unwrap(), ratio(p, q), "row {r} column {c}");
        }
    }
    // literal spot checks
    let x = Assignment::from_labels(&u, [("a2", "0"), ("b2", "0")]).unwrap();
    assert_eq!(*sections[3].value(&x).unwrap(), ratio(1, 8));
    let x = Assignment::from_labels(&u, [("a1", "0"), ("b2", "1")]).unwrap();
    assert_eq!(*sections[1].value(&x).unwrap(), ratio(1, 8));
    assert!(check_no_signalling(&model).unwrap().is_none());
}

#[test]
fn screening_combination_and_disagreement() {
    let kb = builtins::screening();
    let u = kb[0].universe().clone();
    assert!(check_local_agreement(&kb).unwrap().passed());

    let g = natural_join(&natural_join(&kb[0], &kb[1]).unwrap(), &kb[2]).unwrap();
    let expected =
        Relation::from_named_rows(&u, &["e", "f", "a"], [["M", "Y", "54-"], ["CBE", "2Y", "54+"]]).unwrap();
    assert_eq!(g, expected);

    let back = project_relation(&g, kb[0].domain()).unwrap();
    let expected_back = Relation::from_named_rows(&u, &["e", "f"], [["M", "Y"], ["CBE", "2Y"]]).unwrap();
    assert_eq!(back, expected_back);
    assert_ne!(back, kb[0]);

    match check_global_agreement_adjoint(&kb, &cfg()).unwrap() {
        GlobalVerdict::Disagree { index, projection } => {
            assert_eq!(index, 0);
            assert_eq!(projection, expected_back);
        }
        other => panic!("expected disagreement, got {other:?}"),
    }
    assert!(!check_complete_disagreement(&kb, &cfg()).unwrap());

    let oracle = common::brute_relation_marginal(&kb, &u.domain(["e", "f"]).unwrap());
    assert_eq!(oracle, vec![vec!["CBE", "2Y"], vec!["M", "Y"]]);
}

#[test]
fn malawi_is_completely_inconsistent() {
    let kb = builtins::malawi();
    let mut pairs = 0;
    for i in 0..kb.len() {
        for j in i + 1..kb.len() {
            pairs += 1;
            let overlap = kb[i].domain().intersection(kb[j].domain());
            assert_eq!(
                project_relation(&kb[i], &overlap).unwrap(),
                project_relation(&kb[j], &overlap).unwrap()
            );
        }
    }
    assert_eq!(pairs, 28);
    let report = analyze_adjoint(&kb, &cfg()).unwrap();
    assert!(report.local.passed());
    assert!(!report.global.agrees());
    assert!(report.complete);

    // brute force over all 243 colourings
    let csp = builtins::malawi_csp();
    let all = enumerate_assignments(csp.variables(), csp.universe()).unwrap();
    assert_eq!(all.len(), 243);
    let proper = all
        .iter()
        .filter(|x| csp.constraints().iter().all(|c| csp.satisfies(x, c).unwrap()))
        .count();
    assert_eq!(proper, 0);
    assert!(common::compatible_assignments(&kb).is_empty());
}

#[test]
fn malawi_printed_borders_admit_a_colouring() {
    // with the printed T6 = {MWI, ZWE} the graph is 3-colourable
    let kb = builtins::malawi();
    let u = kb[0].universe().clone();
    let different: Vec<[&str; 2]> = builtins::COLOURS
        .iter()
        .flat_map(|x| builtins::COLOURS.iter().filter(move |y| *y != x).map(move |y| [*x, *y]))
        .collect();
    let mut printed = builtins::MALAWI_BORDERS;
    printed[5] = ["MWI", "ZWE"];
    let rels: Vec<Relation> =
        printed.iter().map(|t| Relation::from_named_rows(&u, t, &different).unwrap()).collect();
    assert!(!common::compatible_assignments(&rels).is_empty());
}

#[test]
fn malawi_query_is_empty() {
    let kb = builtins::malawi();
    let q = kb[0].universe().domain(["MOZ", "MWI"]).unwrap();
    let problem = InferenceProblem::new(kb, q).unwrap();
    let out = solve_fusion(&problem, &OrderChoice::Heuristic(Heuristic::MinDegree), &cfg()).unwrap();
    assert!(out.is_empty());
    assert!(out.is_null());
}

#[test]
fn liar_cycles_disagree_completely() {
    for n in 2..=10 {
        let kb = builtins::liar(n).unwrap();
        assert_eq!(kb.len(), n);
        let report = analyze_adjoint(&kb, &cfg()).unwrap();
        // with n = 2 both formulas live on {s1, s2} and contradict each other directly
        assert_eq!(report.local.passed(), n >= 3, "n = {n}");
        assert!(report.complete, "n = {n}");
        assert!(common::compatible_assignments(&kb).is_empty());
        let problem = InferenceProblem::new(kb.clone(), kb[0].domain().clone()).unwrap();
        assert!(solve_naive(&problem, &cfg()).unwrap().is_null());
    }
}

#[test]
fn truth_teller_cycles_agree_on_constants() {
    for n in 2..=10 {
        let sys = truth_teller_cycle(n).unwrap();
        let kb = sys.knowledgebase();
        let u = sys.universe().clone();
        match check_global_agreement_adjoint(&kb, &cfg()).unwrap() {
            GlobalVerdict::Agree { truth } => {
                let zeros = vec!["0"; n];
                let ones = vec!["1"; n];
                let expected = Relation::from_rows(&u, u.full_domain(), [zeros, ones]).unwrap();
                assert_eq!(truth, expected, "n = {n}");
                if n <= 4 {
                    assert!(verify_truth_maximality(&kb, &truth).unwrap().passed());
                }
            }
            other => panic!("n = {n}: expected agreement, got {other:?}"),
        }
    }
    // the liar system is the truth-teller with one edge negated
    let liar = liar_cycle(3).unwrap();
    assert_eq!(liar.formulas()[2].text, "s3 <-> !s1");
}

#[test]
fn liar_scenario_gamma_is_empty() {
    use vk_core::contextuality::{classify, gamma, ClassifyConfig, ContextualityClass};
    for n in 3..=6 {
        let model = builtins::liar_scenario(n).unwrap();
        assert!(gamma(&model, &cfg()).unwrap().is_empty());
        let report = classify(&model, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.class, ContextualityClass::Strong);
    }
    let _ = Arc::new(());
}
