//! Re-checks every witness in a report against its input.
//!
//! The checks recompute what they need with the naive solver and direct
//! projections rather than reusing the analysis path.

use vk_core::algebra::Valuation;
use vk_core::contextuality::{ContextualityClass, EmpiricalModel, Sections};
use vk_core::disagreement::MarginalSystem;
use vk_core::inference::{joint_domain, solve_naive, InferenceConfig, InferenceProblem};
use vk_core::lp::FarkasCertificate;
use vk_core::potential::ProbabilityPotential;
use vk_core::relation::{project_relation, Relation};
use vk_core::semiring::parse_rational;
use vk_core::universe::Domain;

use crate::document::{from_document, Body, DocumentKind, Input, KnowledgebaseDoc, ModelDocument, ValuationDoc};
use crate::report::{
    analyze, class_from_code, AgreementAnalysis, AnalyzeOptions, Analysis, ContextualityAnalysis, FarkasDoc,
    PairCheck, Report,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &str, outcome: Result<(), String>) {
        let (passed, detail) = match outcome {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn verify(report: &Report, input: &Input) -> Verification {
    let mut v = Verification::default();
    v.record("input-hash", ensure(report.input.sha256 == input.sha256, || {
        format!("report hash {} but input hashes to {}", report.input.sha256, input.sha256)
    }));
    v.record("input-kind", ensure(report.input.kind == input.kind(), || {
        format!("report kind {} but input is {}", report.input.kind, input.kind())
    }));
    let limit = report.cell_limit.parse::<u128>().unwrap_or(vk_core::inference::DEFAULT_CELL_LIMIT);
    let config = InferenceConfig::with_cell_limit(limit);
    match (&report.analysis, &input.body) {
        (Analysis::Contextuality(a), Body::Model(m)) => verify_model(&mut v, a, m, &config),
        (Analysis::Agreement(a), Body::Relations(kb) | Body::Csp { knowledgebase: kb, .. }) => {
            verify_relations(&mut v, a, kb, &config)
        }
        (Analysis::Agreement(a), Body::Probabilities(kb)) => verify_potentials(&mut v, a, kb, &config),
        _ => v.record("analysis-type", Err("analysis type does not match the input".into())),
    }
    // the report must also be what a fresh analysis produces
    let mut options = AnalyzeOptions::default();
    options.inference.cell_limit = limit;
    options.inference.method = match report.method.as_str() {
        "naive" => vk_core::inference::Method::Naive,
        _ => vk_core::inference::Method::Fusion,
    };
    let fresh = analyze(input, &options).map_err(err).and_then(|mut r| {
        r.timing_ms = report.timing_ms;
        ensure(r == *report, || "report differs from a fresh analysis".into())
    });
    v.record("reproducible", fresh);
    v
}

/// Parses a valuation document in the universe of `like`.
fn relation_from(doc: &ValuationDoc, like: &Relation) -> Result<Relation, String> {
    let u = like.universe();
    let decls = u
        .variables()
        .map(|var| crate::document::VariableDecl {
            name: var.as_str().into(),
            frame: u.frame(var).expect("declared").values().to_vec(),
        })
        .collect();
    let wrapped = ModelDocument::Knowledgebase(KnowledgebaseDoc {
        kind: DocumentKind::Knowledgebase,
        universe: decls,
        algebra: crate::document::AlgebraDoc::Relation,
        valuations: vec![doc.clone()],
    });
    match from_document(&wrapped)? {
        Body::Relations(mut r) => Ok(r.remove(0)),
        _ => unreachable!("relation knowledgebase"),
    }
}

fn potential_from(doc: &ValuationDoc, like: &ProbabilityPotential) -> Result<ProbabilityPotential, String> {
    let u = like.universe();
    let decls = u
        .variables()
        .map(|var| crate::document::VariableDecl {
            name: var.as_str().into(),
            frame: u.frame(var).expect("declared").values().to_vec(),
        })
        .collect();
    let wrapped = ModelDocument::Knowledgebase(KnowledgebaseDoc {
        kind: DocumentKind::Knowledgebase,
        universe: decls,
        algebra: crate::document::AlgebraDoc::Probability,
        valuations: vec![doc.clone()],
    });
    match from_document(&wrapped)? {
        Body::Probabilities(mut p) => Ok(p.remove(0)),
        _ => unreachable!("probability knowledgebase"),
    }
}

/// First pair whose projections on the overlap differ, by direct projection.
fn first_disagreeing_pair<V: Valuation>(kb: &[V]) -> Result<Option<(usize, usize, Domain)>, String> {
    for i in 0..kb.len() {
        for j in i + 1..kb.len() {
            let overlap = kb[i].label().intersection(kb[j].label());
            if kb[i].project(&overlap).map_err(err)? != kb[j].project(&overlap).map_err(err)? {
                return Ok(Some((i, j, overlap)));
            }
        }
    }
    Ok(None)
}

fn verify_pairs<V: Valuation>(check: &PairCheck, kb: &[V]) -> Outcome {
    let found = first_disagreeing_pair(kb)?;
    match (&check.witness, found) {
        (None, None) => ensure(check.passed, || "no disagreeing pair, yet the check is marked failed".into()),
        (Some(w), Some((i, j, overlap))) => {
            let names: Vec<String> = overlap.iter().map(|v| v.as_str().to_string()).collect();
            ensure(!check.passed && w.pair == [i + 1, j + 1] && w.overlap == names, || {
                format!("witness {:?} does not match the first disagreeing pair ({}, {})", w.pair, i + 1, j + 1)
            })
        }
        (None, Some((i, j, _))) => Err(format!("pair ({}, {}) disagrees but no witness is reported", i + 1, j + 1)),
        (Some(w), None) => Err(format!("witness {:?} names a pair that agrees", w.pair)),
    }
}

fn naive_gamma(kb: &[Relation], config: &InferenceConfig) -> Result<Relation, String> {
    let problem = InferenceProblem::new(kb.to_vec(), joint_domain(kb)).map_err(err)?;
    solve_naive(&problem, config).map_err(err)
}

fn verify_farkas(doc: &FarkasDoc, kb: &[ProbabilityPotential]) -> Outcome {
    let system = MarginalSystem::build(kb, u128::MAX).map_err(err)?;
    let mut multipliers = vec![vk_core::semiring::Rational::default(); system.row_origin.len()];
    for row in &doc.rows {
        let i = row.valuation.checked_sub(1).filter(|&i| i < kb.len()).ok_or("valuation out of range")?;
        let u = kb[i].universe();
        let offset = kb[i]
            .entries()
            .position(|(x, _)| x.key(u) == row.outcome)
            .ok_or_else(|| format!("unknown outcome {:?}", row.outcome))?;
        let k = system.row_origin.iter().position(|&o| o == (i, offset)).ok_or("row not in the system")?;
        multipliers[k] = parse_rational(&row.multiplier).ok_or("multiplier is not a rational")?;
    }
    ensure(FarkasCertificate { multipliers }.verify(&system.system), || {
        "certificate fails A^T y >= 0, b^T y < 0".into()
    })
}

fn verify_distribution(doc: &ValuationDoc, kb: &[ProbabilityPotential]) -> Outcome {
    let truth = potential_from(doc, &kb[0])?;
    ensure(*truth.label() == joint_domain(kb), || "distribution is not over all variables".into())?;
    for (i, phi) in kb.iter().enumerate() {
        ensure(truth.project(phi.label()).map_err(err)? == *phi, || format!("marginal on valuation {} differs", i + 1))?;
    }
    Ok(())
}

fn verify_model(v: &mut Verification, a: &ContextualityAnalysis, m: &EmpiricalModel, config: &InferenceConfig) {
    let supports = m.supports();
    let pairs = match m.sections() {
        Sections::Probabilistic(s) => verify_pairs(&a.no_signalling, s),
        Sections::Possibilistic(s) => verify_pairs(&a.no_signalling, s),
    };
    v.record("no-signalling", pairs);
    if !a.no_signalling.passed {
        v.record("signalling-report", ensure(a.class.is_none() && a.gamma.is_none(), || {
            "signalling models carry no class".into()
        }));
        return;
    }
    let gamma = match naive_gamma(&supports, config) {
        Ok(g) => g,
        Err(e) => return v.record("gamma", Err(e)),
    };
    v.record("gamma", (|| {
        let doc = a.gamma.as_ref().ok_or("missing gamma")?;
        ensure(relation_from(doc, &gamma)? == gamma, || "gamma differs from the join of the supports".into())
    })());
    let Some(w) = &a.witnesses else {
        return v.record("witnesses", Err("missing witnesses".into()));
    };
    let Some(class) = a.class.as_deref().and_then(class_from_code) else {
        return v.record("class", Err("missing or unknown class".into()));
    };

    // logical: some supported section outside Γ↓C, or none at all
    let mut restricted = Vec::new();
    for s in &supports {
        match project_relation(&gamma, s.domain()) {
            Ok(r) => restricted.push(r),
            Err(e) => return v.record("logical", Err(err(e))),
        }
    }
    let lc = supports.iter().zip(&restricted).any(|(s, r)| s != r);
    v.record("logical", match &w.logical {
        Some(s) => (|| {
            let k = s.context.checked_sub(1).filter(|&k| k < supports.len()).ok_or("context out of range")?;
            let u = m.scenario().universe();
            let section = supports[k].iter().find(|x| x.key(u) == s.section).ok_or("section is not supported")?;
            ensure(!restricted[k].contains(&section), || "section extends to a global assignment".into())
        })(),
        None => ensure(!lc, || "a non-extendable section exists but none is reported".into()),
    });
    let sc = gamma.is_empty();
    v.record("strong", ensure(w.strong.is_some() == sc, || format!("Γ empty is {sc}")));

    let pc = match m.sections() {
        Sections::Probabilistic(kb) => {
            let outcome = match (&w.farkas, &w.global_distribution) {
                (Some(f), None) => verify_farkas(f, kb).map(|_| true),
                (None, Some(d)) => verify_distribution(d, kb).map(|_| false),
                _ => Err("exactly one of farkas and global-distribution is expected".into()),
            };
            let pc = *outcome.as_ref().unwrap_or(&false);
            v.record("probabilistic", outcome.map(|_| ()));
            pc
        }
        Sections::Possibilistic(_) => lc,
    };
    let expected = if sc {
        ContextualityClass::Strong
    } else if lc {
        ContextualityClass::Logical
    } else if pc {
        ContextualityClass::Probabilistic
    } else {
        ContextualityClass::NonContextual
    };
    v.record("class", ensure(class == expected, || format!("class {} but witnesses give {}", class.code(), expected.code())));
}

fn verify_relations(v: &mut Verification, a: &AgreementAnalysis, kb: &[Relation], config: &InferenceConfig) {
    v.record("local", verify_pairs(&a.local, kb));
    let gamma = match naive_gamma(kb, config) {
        Ok(g) => g,
        Err(e) => return v.record("gamma", Err(e)),
    };
    v.record("gamma", (|| {
        let doc = a.gamma.as_ref().ok_or("missing gamma")?;
        ensure(relation_from(doc, &gamma)? == gamma, || "gamma differs from the naive combination".into())
    })());
    v.record("global", (|| {
        match (&a.global.truth, &a.global.disagreement) {
            (Some(t), None) => {
                let truth = relation_from(t, &gamma)?;
                for (i, phi) in kb.iter().enumerate() {
                    ensure(project_relation(&truth, phi.domain()).map_err(err)? == *phi, || {
                        format!("truth does not project onto valuation {}", i + 1)
                    })?;
                }
                ensure(a.global.agrees, || "truth reported but agreement is false".into())
            }
            (None, Some(d)) => {
                let i = d.valuation.checked_sub(1).filter(|&i| i < kb.len()).ok_or("valuation out of range")?;
                let projection = project_relation(&gamma, kb[i].domain()).map_err(err)?;
                ensure(relation_from(&d.projection, &gamma)? == projection, || "projection differs from γ↓d(φi)".into())?;
                ensure(projection != kb[i], || "γ↓d(φi) equals φi".into())?;
                // earlier valuations must all be reproduced
                for (j, phi) in kb.iter().enumerate().take(i) {
                    ensure(project_relation(&gamma, phi.domain()).map_err(err)? == *phi, || {
                        format!("valuation {} is the first disagreeing one", j + 1)
                    })?;
                }
                ensure(!a.global.agrees, || "disagreement reported but agreement is true".into())
            }
            _ => Err("exactly one of truth and disagreement is expected".into()),
        }
    })());
    v.record("complete", ensure(a.complete == gamma.is_empty(), || format!("Γ empty is {}", gamma.is_empty())));
}

fn verify_potentials(v: &mut Verification, a: &AgreementAnalysis, kb: &[ProbabilityPotential], config: &InferenceConfig) {
    v.record("local", verify_pairs(&a.local, kb));
    v.record("global", match (&a.global.truth, &a.global.farkas) {
        (Some(t), None) => verify_distribution(t, kb).and_then(|_| ensure(a.global.agrees, || "inconsistent flag".into())),
        (None, Some(f)) => verify_farkas(f, kb).and_then(|_| ensure(!a.global.agrees, || "inconsistent flag".into())),
        _ => Err("exactly one of truth and farkas is expected".into()),
    });
    v.record("complete", (|| {
        let problem = InferenceProblem::new(kb.to_vec(), kb[0].label().clone()).map_err(err)?;
        let null = vk_core::algebra::WithNull::is_null(&solve_naive(&problem, config).map_err(err)?);
        ensure(a.complete == null, || format!("combination null is {null}"))
    })());
}
