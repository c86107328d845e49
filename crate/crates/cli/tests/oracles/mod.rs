//! Brute-force oracles for the acceptance run.
//!
//! Everything here works on explicit enumerations of global assignments and
//! avoids the library's combination, projection and inference code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use vk_core::algebra::Valuation;
use vk_core::contextuality::{EmpiricalModel, Sections};
use vk_core::potential::ProbabilityPotential;
use vk_core::relation::Relation;
use vk_core::semiring::Rational;
use vk_core::universe::{enumerate_assignments, project_assignment, Assignment, Domain};

pub fn union_of(domains: impl IntoIterator<Item = Domain>) -> Domain {
    domains.into_iter().fold(Domain::empty(), |acc, d| acc.union(&d))
}

/// Global assignments whose restriction lies in every relation.
pub fn compatible_assignments(kb: &[Relation]) -> Vec<Assignment> {
    let universe = kb[0].universe().clone();
    let joint = union_of(kb.iter().map(|r| r.domain().clone()));
    enumerate_assignments(&joint, &universe)
        .unwrap()
        .into_iter()
        .filter(|x| kb.iter().all(|r| r.contains(&project_assignment(x, r.domain()).unwrap())))
        .collect()
}

/// `(⊗kb)↓query` for relations, as a set of label rows.
pub fn brute_relation_marginal(kb: &[Relation], query: &Domain) -> Vec<Vec<String>> {
    let universe = kb[0].universe().clone();
    let mut rows: Vec<Vec<String>> = compatible_assignments(kb)
        .iter()
        .map(|x| {
            project_assignment(x, query)
                .unwrap()
                .labels(&universe)
                .into_iter()
                .map(String::from)
                .collect()
        })
        .collect();
    rows.sort();
    rows.dedup();
    rows
}

/// `(⊗kb)↓query` for rational potentials, keyed by the outcome key.
pub fn brute_potential_marginal(kb: &[ProbabilityPotential], query: &Domain) -> BTreeMap<String, Rational> {
    let universe = kb[0].universe().clone();
    let joint = union_of(kb.iter().map(|p| p.label().clone()));
    let mut out: BTreeMap<String, Rational> = enumerate_assignments(query, &universe)
        .unwrap()
        .iter()
        .map(|y| (y.key(&universe), Rational::zero()))
        .collect();
    for x in enumerate_assignments(&joint, &universe).unwrap() {
        let mut product = Rational::one();
        for p in kb {
            product *= p.value(&project_assignment(&x, p.label()).unwrap()).unwrap();
        }
        *out.get_mut(&project_assignment(&x, query).unwrap().key(&universe)).unwrap() += product;
    }
    out
}

/// Global sections of a model: assignments to all measurements whose
/// restriction to every context is supported.
pub fn global_sections(model: &EmpiricalModel) -> Vec<Assignment> {
    compatible_assignments(&model.supports())
}

/// Supported sections that extend to no global section.
pub fn non_extendable_sections(model: &EmpiricalModel) -> Vec<(usize, Assignment)> {
    let globals = global_sections(model);
    let mut out = Vec::new();
    for (k, support) in model.supports().iter().enumerate() {
        for s in support.iter() {
            let extends = globals.iter().any(|g| project_assignment(g, support.domain()).unwrap() == s);
            if !extends {
                out.push((k, s));
            }
        }
    }
    out
}

/// Section tables of a probabilistic model.
pub fn probability_sections(model: &EmpiricalModel) -> &[ProbabilityPotential] {
    match model.sections() {
        Sections::Probabilistic(s) => s,
        Sections::Possibilistic(_) => panic!("expected a probabilistic model"),
    }
}
