//! The JSON input format and its conversion to library objects.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use vk_core::builtins::{self, Builtin};
use vk_core::contextuality::{EmpiricalModel, MeasurementScenario, Sections};
use vk_core::csp::{csp_to_knowledgebase, Constraint, CspInstance};
use vk_core::potential::{BooleanPotential, Potential, ProbabilityPotential};
use vk_core::relation::Relation;
use vk_core::semiring::{format_rational, parse_rational, Rational};
use vk_core::universe::{Assignment, Domain, VariableUniverse};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub frame: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKindDoc {
    Probabilistic,
    Possibilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraDoc {
    Relation,
    Probability,
}

/// A relation (`tuples`) or a probability potential (`table`) over `variables`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationDoc {
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Map<String, Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub scheme: Vec<String>,
    pub allowed: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocumentKind {
    EmpiricalModel,
    Knowledgebase,
    Csp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EmpiricalModelDoc {
    pub kind: DocumentKind,
    pub universe: Vec<VariableDecl>,
    pub contexts: Vec<Vec<String>>,
    pub model_kind: ModelKindDoc,
    pub sections: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct KnowledgebaseDoc {
    pub kind: DocumentKind,
    pub universe: Vec<VariableDecl>,
    pub algebra: AlgebraDoc,
    pub valuations: Vec<ValuationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CspDoc {
    pub kind: DocumentKind,
    pub universe: Vec<VariableDecl>,
    pub constraints: Vec<ConstraintDoc>,
}

/// A whole input document, discriminated by its `"kind"` field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelDocument {
    EmpiricalModel(EmpiricalModelDoc),
    Knowledgebase(KnowledgebaseDoc),
    Csp(CspDoc),
}

#[derive(Deserialize)]
struct KindProbe {
    kind: DocumentKind,
}

impl ModelDocument {
    /// Reads the `"kind"` first, then the matching layout, so that errors
    /// keep their line and column.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        let probe: KindProbe = serde_json::from_str(text)?;
        Ok(match probe.kind {
            DocumentKind::EmpiricalModel => ModelDocument::EmpiricalModel(serde_json::from_str(text)?),
            DocumentKind::Knowledgebase => ModelDocument::Knowledgebase(serde_json::from_str(text)?),
            DocumentKind::Csp => ModelDocument::Csp(serde_json::from_str(text)?),
        })
    }
}

/// Parsed input, ready for analysis.
#[derive(Debug, Clone)]
pub enum Body {
    Model(EmpiricalModel),
    Relations(Vec<Relation>),
    Probabilities(Vec<ProbabilityPotential>),
    /// A CSP, analysed through its knowledgebase `M_{T_i}(C)`.
    Csp { csp: CspInstance, knowledgebase: Vec<Relation> },
}

#[derive(Debug, Clone)]
pub struct Input {
    /// File path or `builtin:NAME`, as given.
    pub source: String,
    pub sha256: String,
    pub body: Body,
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self.body {
            Body::Model(_) => "empirical-model",
            Body::Relations(_) | Body::Probabilities(_) => "knowledgebase",
            Body::Csp { .. } => "csp",
        }
    }
}

pub const BUILTIN_PREFIX: &str = "builtin:";

/// Loads a file, or a built-in when `source` starts with `builtin:`.
pub fn load(source: &str) -> Result<Input> {
    if let Some(name) = source.strip_prefix(BUILTIN_PREFIX) {
        let body = match builtins::builtin(name).map_err(|e| CliError::Usage(e.to_string()))? {
            Builtin::Model(m) => Body::Model(m),
            Builtin::Knowledgebase(kb) => Body::Relations(kb),
        };
        // built-ins are hashed through their canonical document
        let text = canonical_text(&to_document(&body));
        return Ok(Input { source: source.to_string(), sha256: sha256_hex(text.as_bytes()), body });
    }
    let bytes = std::fs::read(source).map_err(|e| CliError::Io { path: source.to_string(), source: e })?;
    parse_bytes(source, &bytes)
}

pub fn parse_bytes(source_name: &str, bytes: &[u8]) -> Result<Input> {
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::Document {
        source_name: source_name.to_string(),
        message: format!("input is not UTF-8: {e}"),
    })?;
    let doc = ModelDocument::from_json(text).map_err(|e| CliError::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let body = from_document(&doc).map_err(|message| CliError::Document {
        source_name: source_name.to_string(),
        message,
    })?;
    Ok(Input { source: source_name.to_string(), sha256: sha256_hex(bytes), body })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty JSON with a trailing newline.
pub fn canonical_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

type DocResult<T> = std::result::Result<T, String>;

fn universe_of(decls: &[VariableDecl]) -> DocResult<Arc<VariableUniverse>> {
    let mut u = VariableUniverse::new();
    for d in decls {
        let var = vk_core::universe::VariableId::new(&d.name).map_err(|e| format!("universe: {e}"))?;
        let frame = vk_core::universe::Frame::new(&d.frame).map_err(|e| format!("universe[{}]: {e}", d.name))?;
        u.insert(var, frame).map_err(|e| format!("universe: {e}"))?;
    }
    Ok(Arc::new(u))
}

/// Domain from names given in declared order; duplicates are rejected.
fn domain_of(u: &VariableUniverse, names: &[String], what: &str) -> DocResult<Domain> {
    let d = u.domain(names.iter()).map_err(|e| format!("{what}: {e}"))?;
    if d.len() != names.len() {
        return Err(format!("{what}: repeated variable"));
    }
    Ok(d)
}

/// Outcome key: labels in declared variable order, joined by commas.
fn assignment_from_key(u: &VariableUniverse, names: &[String], key: &str, what: &str) -> DocResult<Assignment> {
    let labels: Vec<&str> = if names.is_empty() && key.is_empty() { Vec::new() } else { key.split(',').collect() };
    if labels.len() != names.len() {
        return Err(format!("{what}: outcome {key:?} has {} labels, expected {}", labels.len(), names.len()));
    }
    Assignment::from_labels(u, names.iter().map(String::as_str).zip(labels)).map_err(|e| format!("{what}: {e}"))
}

fn assignment_from_row(u: &VariableUniverse, names: &[String], row: &[String], what: &str) -> DocResult<Assignment> {
    if row.len() != names.len() {
        return Err(format!("{what}: row has {} labels, expected {}", row.len(), names.len()));
    }
    Assignment::from_labels(u, names.iter().map(String::as_str).zip(row.iter().map(String::as_str)))
        .map_err(|e| format!("{what}: {e}"))
}

fn rational_value(v: &Value, what: &str) -> DocResult<Rational> {
    let parsed = match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        _ => None,
    };
    let r = parsed.ok_or_else(|| format!("{what}: {v} is not an exact rational (use \"p/q\" or an integer)"))?;
    if r < Rational::default() {
        return Err(format!("{what}: negative value {v}"));
    }
    Ok(r)
}

fn boolean_value(v: &Value, what: &str) -> DocResult<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
        Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
        _ => Err(format!("{what}: {v} is not a possibility (use true/false or 1/0)")),
    }
}

fn relation_of(u: &Arc<VariableUniverse>, v: &ValuationDoc, what: &str) -> DocResult<Relation> {
    if v.table.is_some() {
        return Err(format!("{what}: relations take \"tuples\", not \"table\""));
    }
    let rows = v.tuples.as_ref().ok_or_else(|| format!("{what}: missing \"tuples\""))?;
    let d = domain_of(u, &v.variables, what)?;
    let mut r = Relation::empty(u, d).map_err(|e| format!("{what}: {e}"))?;
    for row in rows {
        r.insert(assignment_from_row(u, &v.variables, row, what)?).map_err(|e| format!("{what}: {e}"))?;
    }
    Ok(r)
}

fn potential_of(u: &Arc<VariableUniverse>, v: &ValuationDoc, what: &str) -> DocResult<ProbabilityPotential> {
    if v.tuples.is_some() {
        return Err(format!("{what}: probability valuations take \"table\", not \"tuples\""));
    }
    let table = v.table.as_ref().ok_or_else(|| format!("{what}: missing \"table\""))?;
    let d = domain_of(u, &v.variables, what)?;
    let mut p = Potential::constant(u, d, Rational::default()).map_err(|e| format!("{what}: {e}"))?;
    for (key, value) in table {
        let x = assignment_from_key(u, &v.variables, key, what)?;
        p.set(&x, rational_value(value, &format!("{what}[{key:?}]"))?).map_err(|e| format!("{what}: {e}"))?;
    }
    Ok(p)
}

pub fn from_document(doc: &ModelDocument) -> DocResult<Body> {
    match doc {
        ModelDocument::EmpiricalModel(EmpiricalModelDoc { universe, contexts, model_kind, sections, .. }) => {
            let u = universe_of(universe)?;
            let domains = contexts
                .iter()
                .enumerate()
                .map(|(i, c)| domain_of(&u, c, &format!("contexts[{i}]")))
                .collect::<DocResult<Vec<_>>>()?;
            let keys: Vec<String> = contexts.iter().map(|c| c.join(",")).collect();
            for key in sections.keys() {
                if !keys.contains(key) {
                    return Err(format!("sections: {key:?} is not a declared context"));
                }
            }
            let scenario = MeasurementScenario::new(u.clone(), domains.clone()).map_err(|e| e.to_string())?;
            let mut prob = Vec::new();
            let mut poss = Vec::new();
            for ((names, domain), key) in contexts.iter().zip(&domains).zip(&keys) {
                let what = format!("sections[{key:?}]");
                let entries = sections
                    .get(key)
                    .ok_or_else(|| format!("{what}: missing"))?
                    .as_object()
                    .ok_or_else(|| format!("{what}: expected an object of outcomes"))?;
                match model_kind {
                    ModelKindDoc::Probabilistic => {
                        let mut p = Potential::constant(&u, domain.clone(), Rational::default())
                            .map_err(|e| format!("{what}: {e}"))?;
                        for (outcome, value) in entries {
                            let x = assignment_from_key(&u, names, outcome, &what)?;
                            p.set(&x, rational_value(value, &format!("{what}[{outcome:?}]"))?)
                                .map_err(|e| format!("{what}: {e}"))?;
                        }
                        prob.push(p);
                    }
                    ModelKindDoc::Possibilistic => {
                        let mut p: BooleanPotential =
                            Potential::constant(&u, domain.clone(), false).map_err(|e| format!("{what}: {e}"))?;
                        for (outcome, value) in entries {
                            let x = assignment_from_key(&u, names, outcome, &what)?;
                            p.set(&x, boolean_value(value, &format!("{what}[{outcome:?}]"))?)
                                .map_err(|e| format!("{what}: {e}"))?;
                        }
                        if p.support().is_empty() {
                            return Err(format!("{what}: no supported outcome"));
                        }
                        poss.push(p);
                    }
                }
            }
            let model = match model_kind {
                ModelKindDoc::Probabilistic => EmpiricalModel::probabilistic(scenario, prob),
                ModelKindDoc::Possibilistic => EmpiricalModel::possibilistic(scenario, poss),
            }
            .map_err(|e| e.to_string())?;
            Ok(Body::Model(model))
        }
        ModelDocument::Knowledgebase(KnowledgebaseDoc { universe, algebra, valuations, .. }) => {
            let u = universe_of(universe)?;
            if valuations.is_empty() {
                return Err("valuations: the knowledgebase is empty".into());
            }
            let what = |i: usize| format!("valuations[{i}]");
            Ok(match algebra {
                AlgebraDoc::Relation => Body::Relations(
                    valuations.iter().enumerate().map(|(i, v)| relation_of(&u, v, &what(i))).collect::<DocResult<_>>()?,
                ),
                AlgebraDoc::Probability => Body::Probabilities(
                    valuations.iter().enumerate().map(|(i, v)| potential_of(&u, v, &what(i))).collect::<DocResult<_>>()?,
                ),
            })
        }
        ModelDocument::Csp(CspDoc { universe, constraints, .. }) => {
            let u = universe_of(universe)?;
            if constraints.is_empty() {
                return Err("constraints: the CSP has no constraints".into());
            }
            let mut cs = Vec::new();
            for (i, c) in constraints.iter().enumerate() {
                let doc = ValuationDoc { variables: c.scheme.clone(), tuples: Some(c.allowed.clone()), table: None };
                cs.push(Constraint::new(relation_of(&u, &doc, &format!("constraints[{i}]"))?));
            }
            let csp = CspInstance::new(u.clone(), u.full_domain(), cs).map_err(|e| e.to_string())?;
            let knowledgebase = csp_to_knowledgebase(&csp, &csp.schemes()).map_err(|e| e.to_string())?;
            Ok(Body::Csp { csp, knowledgebase })
        }
    }
}

fn decls(u: &VariableUniverse) -> Vec<VariableDecl> {
    u.variables()
        .map(|v| VariableDecl {
            name: v.as_str().to_string(),
            frame: u.frame(v).expect("declared variable").values().to_vec(),
        })
        .collect()
}

fn names(d: &Domain) -> Vec<String> {
    d.iter().map(|v| v.as_str().to_string()).collect()
}

pub fn relation_doc(r: &Relation) -> ValuationDoc {
    ValuationDoc { variables: names(r.domain()), tuples: Some(r.label_rows()), table: None }
}

/// Every cell, zeros included, in enumeration order.
pub fn potential_doc(p: &ProbabilityPotential) -> ValuationDoc {
    use vk_core::algebra::Valuation;
    let u = p.universe();
    let table = p.entries().map(|(x, v)| (x.key(u), Value::String(format_rational(v)))).collect();
    ValuationDoc { variables: names(p.domain()), tuples: None, table: Some(table) }
}

/// Document describing `body`; parsing it back gives an equal object.
pub fn to_document(body: &Body) -> ModelDocument {
    use vk_core::algebra::Valuation;
    match body {
        Body::Model(m) => {
            let u = m.scenario().universe();
            let contexts: Vec<Vec<String>> = m.scenario().contexts().iter().map(names).collect();
            let mut sections = Map::new();
            let model_kind = match m.sections() {
                Sections::Probabilistic(s) => {
                    for (c, p) in contexts.iter().zip(s) {
                        let cells = p.entries().map(|(x, v)| (x.key(u), Value::String(format_rational(v)))).collect();
                        sections.insert(c.join(","), Value::Object(cells));
                    }
                    ModelKindDoc::Probabilistic
                }
                Sections::Possibilistic(s) => {
                    for (c, p) in contexts.iter().zip(s) {
                        let cells = p.entries().filter(|(_, v)| **v).map(|(x, _)| (x.key(u), Value::Bool(true))).collect();
                        sections.insert(c.join(","), Value::Object(cells));
                    }
                    ModelKindDoc::Possibilistic
                }
            };
            ModelDocument::EmpiricalModel(EmpiricalModelDoc {
                kind: DocumentKind::EmpiricalModel,
                universe: decls(u),
                contexts,
                model_kind,
                sections,
            })
        }
        Body::Relations(kb) => ModelDocument::Knowledgebase(KnowledgebaseDoc {
            kind: DocumentKind::Knowledgebase,
            universe: decls(kb[0].universe()),
            algebra: AlgebraDoc::Relation,
            valuations: kb.iter().map(relation_doc).collect(),
        }),
        Body::Probabilities(kb) => ModelDocument::Knowledgebase(KnowledgebaseDoc {
            kind: DocumentKind::Knowledgebase,
            universe: decls(kb[0].universe()),
            algebra: AlgebraDoc::Probability,
            valuations: kb.iter().map(potential_doc).collect(),
        }),
        Body::Csp { csp, .. } => ModelDocument::Csp(CspDoc {
            kind: DocumentKind::Csp,
            universe: decls(csp.universe()),
            constraints: csp
                .constraints()
                .iter()
                .map(|c| ConstraintDoc { scheme: names(c.scheme()), allowed: c.allowed().label_rows() })
                .collect(),
        }),
    }
}
