//! Measurement scenarios, empirical models and the contextuality hierarchy.
//!
//! An empirical model is a knowledgebase with one section per context.
//! No-signalling is local agreement. Probabilistic contextuality is global
//! disagreement of the rational potentials, decided by exact feasibility.
//! Logical and strong contextuality are read off the relational join
//! `Γ = ⊗_C S(C)` of the supports: a section outside `Γ↓C` is logically
//! contextual, and `Γ = ∅` is strong contextuality.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::One;

use crate::algebra::{Valuation, WithNull};
use crate::disagreement::{check_global_agreement_potentials, check_local_agreement, LocalVerdict, PotentialGlobalVerdict};
use crate::error::{Error, Result};
use crate::inference::{solve, InferenceConfig, InferenceProblem};
use crate::potential::{possibilistic_collapse, BooleanPotential, ProbabilityPotential};
use crate::relation::{project_relation, Relation};
use crate::universe::{Assignment, Domain, VariableUniverse};

/// `⟨X, ℳ, (O_m)⟩`; outcome sets are the frames of the universe.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScenario {
    universe: Arc<VariableUniverse>,
    measurements: Domain,
    contexts: Vec<Domain>,
}

impl MeasurementScenario {
    /// Builds a scenario whose measurements are the union of the contexts.
    pub fn new(universe: Arc<VariableUniverse>, contexts: Vec<Domain>) -> Result<Self> {
        let measurements = contexts.iter().fold(Domain::empty(), |acc, c| acc.union(c));
        Self::with_measurements(universe, measurements, contexts)
    }

    pub fn with_measurements(
        universe: Arc<VariableUniverse>,
        measurements: Domain,
        contexts: Vec<Domain>,
    ) -> Result<Self> {
        universe.check_domain(&measurements)?;
        if contexts.is_empty() {
            return Err(Error::Invalid("a scenario needs at least one context".into()));
        }
        for (i, c) in contexts.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Invalid(format!("context {i} is empty")));
            }
            if !c.is_subset(&measurements) {
                return Err(Error::Invalid(format!("context {c} is not within the measurements")));
            }
            for (j, other) in contexts.iter().enumerate() {
                if i != j && c.is_subset(other) {
                    return Err(Error::Invalid(format!("context {c} is contained in context {other}")));
                }
            }
        }
        let covered = contexts.iter().fold(Domain::empty(), |acc, c| acc.union(c));
        if covered != measurements {
            return Err(Error::Invalid(format!(
                "measurements {:?} belong to no context",
                measurements.difference(&covered)
            )));
        }
        Ok(MeasurementScenario { universe, measurements, contexts })
    }

    pub fn universe(&self) -> &Arc<VariableUniverse> {
        &self.universe
    }

    pub fn measurements(&self) -> &Domain {
        &self.measurements
    }

    pub fn contexts(&self) -> &[Domain] {
        &self.contexts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Probabilistic,
    Possibilistic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sections {
    Probabilistic(Vec<ProbabilityPotential>),
    Possibilistic(Vec<BooleanPotential>),
}

/// One section per context of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalModel {
    scenario: MeasurementScenario,
    sections: Sections,
}

impl EmpiricalModel {
    /// Every section must live on its context and sum to exactly 1.
    pub fn probabilistic(scenario: MeasurementScenario, sections: Vec<ProbabilityPotential>) -> Result<Self> {
        check_section_domains(&scenario, sections.iter().map(Valuation::label))?;
        for (c, s) in scenario.contexts.iter().zip(&sections) {
            if !s.total().is_one() {
                return Err(Error::Invalid(format!("section on {c} sums to {}, not 1", s.total())));
            }
        }
        Ok(EmpiricalModel { scenario, sections: Sections::Probabilistic(sections) })
    }

    /// Every section must live on its context and have a nonempty support.
    pub fn possibilistic(scenario: MeasurementScenario, sections: Vec<BooleanPotential>) -> Result<Self> {
        check_section_domains(&scenario, sections.iter().map(Valuation::label))?;
        for (c, s) in scenario.contexts.iter().zip(&sections) {
            if s.is_null() {
                return Err(Error::Invalid(format!("section on {c} has empty support")));
            }
        }
        Ok(EmpiricalModel { scenario, sections: Sections::Possibilistic(sections) })
    }

    /// Possibilistic model from support relations.
    pub fn from_supports(scenario: MeasurementScenario, supports: &[Relation]) -> Result<Self> {
        let sections = supports.iter().map(BooleanPotential::from_relation).collect();
        Self::possibilistic(scenario, sections)
    }

    pub fn scenario(&self) -> &MeasurementScenario {
        &self.scenario
    }

    pub fn sections(&self) -> &Sections {
        &self.sections
    }

    pub fn kind(&self) -> ModelKind {
        match self.sections {
            Sections::Probabilistic(_) => ModelKind::Probabilistic,
            Sections::Possibilistic(_) => ModelKind::Possibilistic,
        }
    }

    /// Supports `S(C)` of every section, in context order.
    pub fn supports(&self) -> Vec<Relation> {
        match &self.sections {
            Sections::Probabilistic(s) => s.iter().map(|p| p.support()).collect(),
            Sections::Possibilistic(s) => s.iter().map(|p| p.support()).collect(),
        }
    }

    /// The possibilistic model with the same supports.
    pub fn possibilistic_collapse(&self) -> EmpiricalModel {
        let sections = match &self.sections {
            Sections::Probabilistic(s) => s.iter().map(possibilistic_collapse).collect(),
            Sections::Possibilistic(s) => s.clone(),
        };
        EmpiricalModel { scenario: self.scenario.clone(), sections: Sections::Possibilistic(sections) }
    }
}

fn check_section_domains<'a>(
    scenario: &MeasurementScenario,
    domains: impl ExactSizeIterator<Item = &'a Domain>,
) -> Result<()> {
    if domains.len() != scenario.contexts.len() {
        return Err(Error::Invalid(format!(
            "{} sections for {} contexts",
            domains.len(),
            scenario.contexts.len()
        )));
    }
    for (d, c) in domains.zip(&scenario.contexts) {
        if d != c {
            return Err(Error::Invalid(format!("section on {d} does not match context {c}")));
        }
    }
    Ok(())
}

/// Two contexts whose marginals on their overlap differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignallingWitness {
    pub first: usize,
    pub second: usize,
    pub overlap: Domain,
}

fn witness_of<V>(verdict: LocalVerdict<V>) -> Option<SignallingWitness> {
    match verdict {
        LocalVerdict::Pass => None,
        LocalVerdict::Fail { first, second, overlap, .. } => Some(SignallingWitness { first, second, overlap }),
    }
}

/// `e_C↓(C∩C′) = e_C′↓(C∩C′)` for every pair of contexts; `None` means no-signalling holds.
pub fn check_no_signalling(model: &EmpiricalModel) -> Result<Option<SignallingWitness>> {
    Ok(match &model.sections {
        Sections::Probabilistic(s) => witness_of(check_local_agreement(s)?),
        Sections::Possibilistic(s) => witness_of(check_local_agreement(s)?),
    })
}

fn require_no_signalling(model: &EmpiricalModel) -> Result<()> {
    match check_no_signalling(model)? {
        None => Ok(()),
        Some(w) => Err(Error::Precondition(format!(
            "model is signalling: contexts {} and {} disagree on {}",
            w.first, w.second, w.overlap
        ))),
    }
}

/// `Γ = ⊗_C S(C)`, the compatible global assignments.
pub fn gamma(model: &EmpiricalModel, config: &InferenceConfig) -> Result<Relation> {
    require_no_signalling(model)?;
    let problem = InferenceProblem::new(model.supports(), model.scenario.measurements.clone())?;
    solve(&problem, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContextualityClass {
    NonContextual,
    Probabilistic,
    Logical,
    Strong,
}

impl ContextualityClass {
    pub fn code(self) -> &'static str {
        match self {
            ContextualityClass::NonContextual => "NC",
            ContextualityClass::Probabilistic => "PC",
            ContextualityClass::Logical => "LC",
            ContextualityClass::Strong => "SC",
        }
    }
}

/// A supported section that extends to no compatible global assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalWitness {
    pub context: usize,
    pub section: Assignment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextualityReport {
    pub class: ContextualityClass,
    /// Outcome of the feasibility check; `None` for possibilistic models.
    pub probabilistic: Option<PotentialGlobalVerdict>,
    pub logical_witness: Option<LogicalWitness>,
    pub strong: bool,
    pub gamma: Relation,
}

impl ContextualityReport {
    /// No global section exists for the model as given.
    pub fn is_contextual(&self) -> bool {
        self.class != ContextualityClass::NonContextual
    }

    pub fn is_logical(&self) -> bool {
        self.logical_witness.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyConfig {
    pub inference: InferenceConfig,
    pub feasibility_limit: u128,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            inference: InferenceConfig::default(),
            feasibility_limit: crate::disagreement::DEFAULT_FEASIBILITY_LIMIT,
        }
    }
}

/// Places the model in the hierarchy NC < PC < LC < SC.
pub fn classify(model: &EmpiricalModel, config: &ClassifyConfig) -> Result<ContextualityReport> {
    require_no_signalling(model)?;
    let supports = model.supports();

    // strong: one inference problem onto the first context
    let first = InferenceProblem::new(supports.clone(), model.scenario.contexts[0].clone())?;
    let strong = solve(&first, &config.inference)?.is_null();

    // logical: Γ↓C̄ ≠ S(C̄) for some context
    let mut logical_witness = None;
    for (k, (context, support)) in model.scenario.contexts.iter().zip(&supports).enumerate() {
        let problem = InferenceProblem::new(supports.clone(), context.clone())?;
        let restricted = solve(&problem, &config.inference)?;
        if restricted != *support {
            let section = support
                .iter()
                .find(|s| !restricted.contains(s))
                .expect("Γ↓C is always contained in S(C)");
            logical_witness = Some(LogicalWitness { context: k, section });
            break;
        }
    }

    let probabilistic = match &model.sections {
        Sections::Probabilistic(s) => Some(check_global_agreement_potentials(s, config.feasibility_limit)?),
        Sections::Possibilistic(_) => None,
    };

    let gamma = gamma(model, &config.inference)?;
    let pc = match &probabilistic {
        Some(v) => !v.agrees(),
        None => logical_witness.is_some(),
    };
    let class = if strong {
        ContextualityClass::Strong
    } else if logical_witness.is_some() {
        ContextualityClass::Logical
    } else if pc {
        ContextualityClass::Probabilistic
    } else {
        ContextualityClass::NonContextual
    };
    Ok(ContextualityReport { class, probabilistic, logical_witness, strong, gamma })
}

/// `LC(S, s)`: `s ∈ S(C)` is not the restriction of any compatible global assignment.
pub fn lc_at(model: &EmpiricalModel, context: usize, section: &Assignment, config: &InferenceConfig) -> Result<bool> {
    let supports = model.supports();
    let support = supports
        .get(context)
        .ok_or_else(|| Error::Argument(format!("no context with index {context}")))?;
    if !support.contains(section) {
        return Err(Error::Argument(format!("{section:?} is not in the support of context {context}")));
    }
    let problem = InferenceProblem::new(supports.clone(), support.domain().clone())?;
    let restricted = solve(&problem, config)?;
    Ok(!restricted.contains(section))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlasqueReport {
    /// Contexts with an empty support.
    pub empty_contexts: Vec<usize>,
    /// First `(U, U′)` whose restriction map is not surjective.
    pub non_surjective: Option<(Domain, Domain)>,
}

impl FlasqueReport {
    pub fn passed(&self) -> bool {
        self.empty_contexts.is_empty() && self.non_surjective.is_none()
    }
}

/// Checks nonempty supports and surjectivity of `S(U′) → S(U)` for all
/// `U ⊆ U′ ⊆ C`, where `S(U)` is the union of the projections of the
/// supports of the contexts containing `U`.
pub fn flasque_check(model: &EmpiricalModel) -> Result<FlasqueReport> {
    flasque_check_family(&model.scenario, &model.supports())
}

/// [`flasque_check`] on a raw family of supports, which may include empty ones.
pub fn flasque_check_family(scenario: &MeasurementScenario, supports: &[Relation]) -> Result<FlasqueReport> {
    check_section_domains(scenario, supports.iter().map(Relation::domain))?;
    let contexts = &scenario.contexts;
    let empty_contexts = supports.iter().enumerate().filter(|(_, s)| s.is_empty()).map(|(i, _)| i).collect();

    let sections_on = |u: &Domain| -> Result<Relation> {
        let mut acc = Relation::empty(scenario.universe(), u.clone())?;
        for (c, s) in contexts.iter().zip(supports) {
            if u.is_subset(c) {
                acc = acc.union(&project_relation(s, u)?)?;
            }
        }
        Ok(acc)
    };

    let mut seen: BTreeSet<(Domain, Domain)> = BTreeSet::new();
    let mut non_surjective = None;
    'outer: for c in contexts {
        for upper in c.subsets() {
            let upper_sections = sections_on(&upper)?;
            for lower in upper.subsets() {
                if !seen.insert((lower.clone(), upper.clone())) {
                    continue;
                }
                if project_relation(&upper_sections, &lower)? != sections_on(&lower)? {
                    non_surjective = Some((lower, upper));
                    break 'outer;
                }
            }
        }
    }
    Ok(FlasqueReport { empty_contexts, non_surjective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::ratio;

    fn bell_scenario() -> MeasurementScenario {
        let u = Arc::new(VariableUniverse::from_frames(["a1", "a2", "b1", "b2"].map(|n| (n, vec!["0", "1"]))).unwrap());
        let contexts = [["a1", "b1"], ["a1", "b2"], ["a2", "b1"], ["a2", "b2"]]
            .iter()
            .map(|c| u.domain(c).unwrap())
            .collect();
        MeasurementScenario::new(u, contexts).unwrap()
    }

    #[test]
    fn scenario_rejects_nested_and_empty_contexts() {
        let u = Arc::new(VariableUniverse::from_frames(["x", "y"].map(|n| (n, vec!["0", "1"]))).unwrap());
        let nested = vec![u.domain(["x"]).unwrap(), u.domain(["x", "y"]).unwrap()];
        assert!(MeasurementScenario::new(u.clone(), nested).is_err());
        assert!(MeasurementScenario::new(u.clone(), vec![Domain::empty()]).is_err());
        assert!(MeasurementScenario::new(u.clone(), vec![]).is_err());
        let uncovered = MeasurementScenario::with_measurements(u.clone(), u.full_domain(), vec![u.domain(["x"]).unwrap()]);
        assert!(uncovered.is_err());
    }

    #[test]
    fn probabilistic_sections_must_normalise() {
        let s = bell_scenario();
        let u = s.universe().clone();
        let half = ProbabilityPotential::constant(&u, s.contexts()[0].clone(), ratio(1, 8)).unwrap();
        let sections = vec![half; 4];
        assert!(EmpiricalModel::probabilistic(s.clone(), sections).is_err());
        let uniform: Vec<_> = s
            .contexts()
            .iter()
            .map(|c| ProbabilityPotential::constant(&u, c.clone(), ratio(1, 4)).unwrap())
            .collect();
        let m = EmpiricalModel::probabilistic(s, uniform).unwrap();
        assert_eq!(check_no_signalling(&m).unwrap(), None);
        let report = classify(&m, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.class, ContextualityClass::NonContextual);
        assert_eq!(report.gamma.len(), 16);
    }

    #[test]
    fn empty_support_fails_condition_one() {
        let s = bell_scenario();
        let u = s.universe().clone();
        let mut sections: Vec<_> = s
            .contexts()
            .iter()
            .map(|c| BooleanPotential::constant(&u, c.clone(), true).unwrap())
            .collect();
        sections[2] = BooleanPotential::constant(&u, s.contexts()[2].clone(), false).unwrap();
        assert!(EmpiricalModel::possibilistic(s, sections).is_err());
    }

    #[test]
    fn lc_at_rejects_unsupported_sections() {
        let s = bell_scenario();
        let u = s.universe().clone();
        let supports: Vec<_> = s
            .contexts()
            .iter()
            .map(|c| Relation::from_rows(&u, c.clone(), [["0", "0"], ["1", "1"]]).unwrap())
            .collect();
        let m = EmpiricalModel::from_supports(s.clone(), &supports).unwrap();
        let off = Assignment::from_ordered_labels(&u, &s.contexts()[0], &["0", "1"]).unwrap();
        assert!(matches!(lc_at(&m, 0, &off, &InferenceConfig::default()), Err(Error::Argument(_))));
        let on = Assignment::from_ordered_labels(&u, &s.contexts()[0], &["0", "0"]).unwrap();
        assert!(!lc_at(&m, 0, &on, &InferenceConfig::default()).unwrap());
    }
}
