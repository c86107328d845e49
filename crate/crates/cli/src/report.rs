//! Analyses and their JSON reports.
//!
//! Context and valuation numbers in reports start at 1.

use serde::{Deserialize, Serialize};
use vk_core::algebra::Valuation;
use vk_core::contextuality::{
    check_no_signalling, classify, ClassifyConfig, ContextualityClass, EmpiricalModel, ModelKind, Sections,
};
use vk_core::disagreement::{
    check_complete_disagreement, check_global_agreement_adjoint, check_global_agreement_potentials,
    check_local_agreement, GlobalVerdict, LocalVerdict, MarginalSystem, PotentialGlobalVerdict,
};
use vk_core::inference::{solve, InferenceConfig, InferenceProblem, Method};
use vk_core::lp::FarkasCertificate;
use vk_core::potential::ProbabilityPotential;
use vk_core::relation::Relation;
use vk_core::semiring::format_rational;
use vk_core::universe::Domain;

use crate::document::{potential_doc, relation_doc, Body, Input, ValuationDoc};
use crate::error::Result;

pub const TOOL: &str = concat!("vk ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub input: InputEcho,
    pub method: String,
    pub cell_limit: String,
    pub analysis: Analysis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct InputEcho {
    pub source: String,
    pub kind: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Analysis {
    Contextuality(ContextualityAnalysis),
    Agreement(AgreementAnalysis),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ContextualityAnalysis {
    pub model_kind: String,
    pub contexts: Vec<String>,
    pub no_signalling: PairCheck,
    /// `NC`, `PC`, `LC` or `SC`; absent when the model signals.
    pub class: Option<String>,
    pub witnesses: Option<ContextualityWitnesses>,
    /// `Γ`, the compatible global assignments.
    pub gamma: Option<ValuationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ContextualityWitnesses {
    /// Present when no global distribution exists.
    pub farkas: Option<FarkasDoc>,
    /// Present when one does: a global distribution with the given marginals.
    pub global_distribution: Option<ValuationDoc>,
    pub logical: Option<SectionWitness>,
    /// Context `C` with `Γ↓C = ∅`.
    pub strong: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SectionWitness {
    pub context: usize,
    pub section: String,
}

/// Pairwise check: local agreement or no-signalling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PairCheck {
    pub passed: bool,
    pub witness: Option<PairWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PairWitness {
    pub pair: [usize; 2],
    pub overlap: Vec<String>,
}

/// Nonzero multipliers of a Farkas certificate, one per marginal constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FarkasDoc {
    pub rows: Vec<FarkasRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FarkasRow {
    pub valuation: usize,
    pub outcome: String,
    pub multiplier: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AgreementAnalysis {
    pub algebra: String,
    pub valuations: usize,
    pub local: PairCheck,
    pub global: GlobalDoc,
    pub complete: bool,
    /// `⊗φi` for relational knowledgebases.
    pub gamma: Option<ValuationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GlobalDoc {
    pub agrees: bool,
    /// A truth valuation when the sources agree.
    pub truth: Option<ValuationDoc>,
    /// `γ↓d(φi) ≠ φi` for relations.
    pub disagreement: Option<DisagreementWitness>,
    pub farkas: Option<FarkasDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DisagreementWitness {
    pub valuation: usize,
    pub projection: ValuationDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub inference: InferenceConfig,
    pub feasibility_limit: u128,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            inference: InferenceConfig::default(),
            feasibility_limit: vk_core::disagreement::DEFAULT_FEASIBILITY_LIMIT,
        }
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Naive => "naive",
        Method::Fusion => "fusion",
    }
}

fn names(d: &Domain) -> Vec<String> {
    d.iter().map(|v| v.as_str().to_string()).collect()
}

fn pair_check<V>(verdict: LocalVerdict<V>) -> PairCheck {
    match verdict {
        LocalVerdict::Pass => PairCheck { passed: true, witness: None },
        LocalVerdict::Fail { first, second, overlap, .. } => PairCheck {
            passed: false,
            witness: Some(PairWitness { pair: [first + 1, second + 1], overlap: names(&overlap) }),
        },
    }
}

/// Rows of the certificate with nonzero multipliers.
pub fn farkas_doc(kb: &[ProbabilityPotential], system: &MarginalSystem, cert: &FarkasCertificate) -> FarkasDoc {
    use num_traits::Zero;
    let rows = system
        .row_origin
        .iter()
        .zip(&cert.multipliers)
        .filter(|(_, y)| !y.is_zero())
        .map(|(&(i, offset), y)| {
            let (x, _) = kb[i].entries().nth(offset).expect("row offset within table");
            FarkasRow { valuation: i + 1, outcome: x.key(kb[i].universe()), multiplier: format_rational(y) }
        })
        .collect();
    FarkasDoc { rows }
}

/// Nonzero cells only.
fn sparse_potential_doc(p: &ProbabilityPotential) -> ValuationDoc {
    use num_traits::Zero;
    let mut doc = potential_doc(p);
    if let Some(table) = doc.table.as_mut() {
        table.retain(|_, v| v.as_str().map(|s| !vk_core::semiring::parse_rational(s).unwrap().is_zero()).unwrap_or(true));
    }
    doc
}

pub fn analyze(input: &Input, options: &AnalyzeOptions) -> Result<Report> {
    let analysis = match &input.body {
        Body::Model(m) => Analysis::Contextuality(analyze_model(m, options)?),
        Body::Relations(kb) | Body::Csp { knowledgebase: kb, .. } => {
            Analysis::Agreement(analyze_relations(kb, &options.inference)?)
        }
        Body::Probabilities(kb) => Analysis::Agreement(analyze_potentials(kb, options)?),
    };
    Ok(Report {
        tool: TOOL.to_string(),
        input: InputEcho { source: input.source.clone(), kind: input.kind().to_string(), sha256: input.sha256.clone() },
        method: method_name(options.inference.method).to_string(),
        cell_limit: options.inference.cell_limit.to_string(),
        analysis,
        timing_ms: None,
    })
}

fn analyze_model(model: &EmpiricalModel, options: &AnalyzeOptions) -> Result<ContextualityAnalysis> {
    let contexts = model.scenario().contexts().iter().map(|c| names(c).join(",")).collect();
    let model_kind = match model.kind() {
        ModelKind::Probabilistic => "probabilistic",
        ModelKind::Possibilistic => "possibilistic",
    }
    .to_string();
    if let Some(w) = check_no_signalling(model)? {
        return Ok(ContextualityAnalysis {
            model_kind,
            contexts,
            no_signalling: PairCheck {
                passed: false,
                witness: Some(PairWitness { pair: [w.first + 1, w.second + 1], overlap: names(&w.overlap) }),
            },
            class: None,
            witnesses: None,
            gamma: None,
        });
    }
    let config = ClassifyConfig { inference: options.inference, feasibility_limit: options.feasibility_limit };
    let report = classify(model, &config)?;
    let mut witnesses = ContextualityWitnesses { farkas: None, global_distribution: None, logical: None, strong: None };
    if let (Some(verdict), Sections::Probabilistic(kb)) = (&report.probabilistic, model.sections()) {
        match verdict {
            PotentialGlobalVerdict::Agree { truth } => witnesses.global_distribution = Some(sparse_potential_doc(truth)),
            PotentialGlobalVerdict::Disagree { certificate } => {
                let system = MarginalSystem::build(kb, options.feasibility_limit)?;
                witnesses.farkas = Some(farkas_doc(kb, &system, certificate));
            }
        }
    }
    if let Some(w) = &report.logical_witness {
        witnesses.logical = Some(SectionWitness {
            context: w.context + 1,
            section: w.section.key(model.scenario().universe()),
        });
    }
    if report.strong {
        witnesses.strong = Some(1);
    }
    Ok(ContextualityAnalysis {
        model_kind,
        contexts,
        no_signalling: PairCheck { passed: true, witness: None },
        class: Some(report.class.code().to_string()),
        witnesses: Some(witnesses),
        gamma: Some(relation_doc(&report.gamma)),
    })
}

fn analyze_relations(kb: &[Relation], config: &InferenceConfig) -> Result<AgreementAnalysis> {
    let local = pair_check(check_local_agreement(kb)?);
    let global = match check_global_agreement_adjoint(kb, config)? {
        GlobalVerdict::Agree { truth } => {
            GlobalDoc { agrees: true, truth: Some(relation_doc(&truth)), disagreement: None, farkas: None }
        }
        GlobalVerdict::Disagree { index, projection } => GlobalDoc {
            agrees: false,
            truth: None,
            disagreement: Some(DisagreementWitness { valuation: index + 1, projection: relation_doc(&projection) }),
            farkas: None,
        },
    };
    let complete = check_complete_disagreement(kb, config)?;
    let joint = vk_core::inference::joint_domain(kb);
    let gamma = solve(&InferenceProblem::new(kb.to_vec(), joint)?, config)?;
    Ok(AgreementAnalysis {
        algebra: "relation".into(),
        valuations: kb.len(),
        local,
        global,
        complete,
        gamma: Some(relation_doc(&gamma)),
    })
}

fn analyze_potentials(kb: &[ProbabilityPotential], options: &AnalyzeOptions) -> Result<AgreementAnalysis> {
    let local = pair_check(check_local_agreement(kb)?);
    let global = match check_global_agreement_potentials(kb, options.feasibility_limit)? {
        PotentialGlobalVerdict::Agree { truth } => {
            GlobalDoc { agrees: true, truth: Some(sparse_potential_doc(&truth)), disagreement: None, farkas: None }
        }
        PotentialGlobalVerdict::Disagree { certificate } => {
            let system = MarginalSystem::build(kb, options.feasibility_limit)?;
            GlobalDoc { agrees: false, truth: None, disagreement: None, farkas: Some(farkas_doc(kb, &system, &certificate)) }
        }
    };
    let complete = check_complete_disagreement(kb, &options.inference)?;
    Ok(AgreementAnalysis {
        algebra: "probability".into(),
        valuations: kb.len(),
        local,
        global,
        complete,
        gamma: None,
    })
}

/// `key=value` lines for people.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    line("input", format!("{} ({})", report.input.source, report.input.kind));
    line("sha256", report.input.sha256.clone());
    line("method", report.method.clone());
    match &report.analysis {
        Analysis::Contextuality(a) => {
            line("model-kind", a.model_kind.clone());
            line("contexts", a.contexts.join(" | "));
            line("no-signalling", pass_fail(&a.no_signalling));
            if let Some(w) = &a.no_signalling.witness {
                line("signalling-pair", format!("{} vs {} on {}", a.contexts[w.pair[0] - 1], a.contexts[w.pair[1] - 1], w.overlap.join(",")));
            }
            if let Some(class) = &a.class {
                line("class", class.clone());
            }
            if let Some(w) = &a.witnesses {
                if let Some(f) = &w.farkas {
                    line("probabilistic-witness", format!("Farkas certificate with {} nonzero multipliers", f.rows.len()));
                }
                if w.global_distribution.is_some() {
                    line("probabilistic-witness", "global distribution found".into());
                }
                if let Some(s) = &w.logical {
                    line("logical-witness", format!("{} = {}", a.contexts[s.context - 1], s.section));
                }
                line("strong", if w.strong.is_some() { "yes" } else { "no" }.into());
            }
            if let Some(g) = &a.gamma {
                line("gamma", format!("{} global assignments", g.tuples.as_ref().map_or(0, Vec::len)));
            }
        }
        Analysis::Agreement(a) => {
            line("algebra", a.algebra.clone());
            line("valuations", a.valuations.to_string());
            line("local", pass_fail(&a.local));
            if let Some(w) = &a.local.witness {
                line("local-witness", format!("phi{} vs phi{} on {}", w.pair[0], w.pair[1], w.overlap.join(",")));
            }
            line("global", if a.global.agrees { "agree" } else { "disagree" }.into());
            if let Some(d) = &a.global.disagreement {
                line(
                    "global-witness",
                    format!("gamma projected on d(phi{}) has {} tuples", d.valuation, d.projection.tuples.as_ref().map_or(0, Vec::len)),
                );
            }
            if let Some(f) = &a.global.farkas {
                line("global-witness", format!("Farkas certificate with {} nonzero multipliers", f.rows.len()));
            }
            line("complete", if a.complete { "yes" } else { "no" }.into());
            if let Some(g) = &a.gamma {
                line("gamma", format!("{} tuples", g.tuples.as_ref().map_or(0, Vec::len)));
            }
        }
    }
    if let Some(ms) = report.timing_ms {
        line("timing-ms", ms.to_string());
    }
    out
}

fn pass_fail(c: &PairCheck) -> String {
    if c.passed { "pass" } else { "fail" }.into()
}

pub fn class_from_code(code: &str) -> Option<ContextualityClass> {
    [
        ContextualityClass::NonContextual,
        ContextualityClass::Probabilistic,
        ContextualityClass::Logical,
        ContextualityClass::Strong,
    ]
    .into_iter()
    .find(|c| c.code() == code)
}
