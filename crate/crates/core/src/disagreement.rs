//! Local, global and complete disagreement of knowledgebases.
//!
//! For adjoint algebras (relations) global agreement is decided by the
//! inference problems `(φ1 ⊗ … ⊗ φn)↓d(φi)`: the knowledgebase agrees iff
//! each of them returns `φi`, and then `γ = ⊗φi` is the largest truth
//! valuation. Rational potentials are not idempotent, so there the
//! existence of `γ` is decided as an exact linear feasibility problem.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{Adjoint, Valuation, WithNull};
use crate::error::{Error, Result};
use crate::inference::{joint_domain, solve, InferenceConfig, InferenceProblem};
use crate::lp::{solve_feasibility, EqualitySystem, FarkasCertificate, Feasibility};
use crate::potential::{Potential, ProbabilityPotential};
use crate::relation::Relation;
use crate::semiring::{NonNegativeRational, Rational};
use crate::universe::{project_assignment, strides, Domain, MixedRadix, VariableUniverse};

/// Outcome of the pairwise check.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalVerdict<V> {
    Pass,
    /// First pair `(first, second)` in index order whose projections onto
    /// `overlap` differ.
    Fail { first: usize, second: usize, overlap: Domain, first_projection: V, second_projection: V },
}

impl<V> LocalVerdict<V> {
    pub fn passed(&self) -> bool {
        matches!(self, LocalVerdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GlobalVerdict<V> {
    Agree { truth: V },
    /// `γ↓d(φ_index) = projection ≠ φ_index`.
    Disagree { index: usize, projection: V },
}

impl<V> GlobalVerdict<V> {
    pub fn agrees(&self) -> bool {
        matches!(self, GlobalVerdict::Agree { .. })
    }
}

/// Local, global and complete verdicts for one knowledgebase.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport<V> {
    pub local: LocalVerdict<V>,
    pub global: GlobalVerdict<V>,
    pub complete: bool,
}

/// `φi↓(d(φi)∩d(φj)) = φj↓(d(φi)∩d(φj))` for all pairs.
pub fn check_local_agreement<V: Valuation>(kb: &[V]) -> Result<LocalVerdict<V>> {
    for (i, a) in kb.iter().enumerate() {
        for (j, b) in kb.iter().enumerate().skip(i + 1) {
            let overlap = a.label().intersection(b.label());
            let pa = a.project(&overlap)?;
            let pb = b.project(&overlap)?;
            if pa != pb {
                return Ok(LocalVerdict::Fail {
                    first: i,
                    second: j,
                    overlap,
                    first_projection: pa,
                    second_projection: pb,
                });
            }
        }
    }
    Ok(LocalVerdict::Pass)
}

fn marginal<V: Valuation>(kb: &[V], query: &Domain, config: &InferenceConfig) -> Result<V> {
    let problem = InferenceProblem::new(kb.to_vec(), query.clone())?;
    solve(&problem, config)
}

/// Global agreement for adjoint algebras, through one inference problem per valuation.
pub fn check_global_agreement_adjoint<V: Adjoint>(kb: &[V], config: &InferenceConfig) -> Result<GlobalVerdict<V>> {
    if kb.is_empty() {
        return Err(Error::Argument("empty knowledgebase".into()));
    }
    for (i, phi) in kb.iter().enumerate() {
        let projection = marginal(kb, phi.label(), config)?;
        if projection != *phi {
            return Ok(GlobalVerdict::Disagree { index: i, projection });
        }
    }
    let truth = marginal(kb, &joint_domain(kb), config)?;
    Ok(GlobalVerdict::Agree { truth })
}

/// `(φ1 ⊗ … ⊗ φn)↓d(φ1) = z`, which by the null-element axiom decides `⊗φi = z`.
pub fn check_complete_disagreement<V: WithNull>(kb: &[V], config: &InferenceConfig) -> Result<bool> {
    let first = kb.first().ok_or_else(|| Error::Argument("empty knowledgebase".into()))?;
    Ok(marginal(kb, first.label(), config)?.is_null())
}

/// All three verdicts for an adjoint knowledgebase.
pub fn analyze_adjoint<V: Adjoint>(kb: &[V], config: &InferenceConfig) -> Result<AgreementReport<V>> {
    Ok(AgreementReport {
        local: check_local_agreement(kb)?,
        global: check_global_agreement_adjoint(kb, config)?,
        complete: check_complete_disagreement(kb, config)?,
    })
}

/// Default bound on `|Ω_X|` for the feasibility path.
pub const DEFAULT_FEASIBILITY_LIMIT: u128 = 4096;

/// Marginal constraints `γ↓d(φi) = φi` over the unknowns `γ(x)`, `x ∈ Ω_X`.
///
/// Rows follow the knowledgebase order, and within each valuation the
/// enumeration order of `Ω_{d(φi)}`; columns follow the enumeration of `Ω_X`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSystem {
    pub universe: Arc<VariableUniverse>,
    pub joint: Domain,
    pub system: EqualitySystem,
    /// `(valuation index, offset within its table)` of each row.
    pub row_origin: Vec<(usize, usize)>,
}

impl MarginalSystem {
    pub fn build(kb: &[ProbabilityPotential], limit: u128) -> Result<Self> {
        let first = kb.first().ok_or_else(|| Error::Argument("empty knowledgebase".into()))?;
        let universe = first.universe().clone();
        let joint = joint_domain(kb);
        let states = universe.state_count(&joint)?;
        if states > limit {
            return Err(Error::Resource(format!(
                "|Ω_X| = {states} over {joint} exceeds the feasibility limit {limit}"
            )));
        }
        let joint_shape = universe.shape(&joint)?;
        let columns = states as usize;
        let mut system = EqualitySystem::new(columns);
        let mut row_origin = Vec::new();
        for (i, phi) in kb.iter().enumerate() {
            let positions = joint.positions_of(phi.label())?;
            let local_shape = universe.shape(phi.label())?;
            let local_strides = strides(&local_shape);
            let cells: usize = local_shape.iter().product();
            let mut rows = vec![vec![Rational::zero(); columns]; cells];
            for (col, idx) in MixedRadix::new(&joint_shape).enumerate() {
                let offset: usize = positions.iter().zip(&local_strides).map(|(&p, &s)| idx[p] as usize * s).sum();
                rows[offset][col] = Rational::from_integer(1.into());
            }
            for (offset, (row, value)) in rows.into_iter().zip(phi.table()).enumerate() {
                system.push_row(row, value.clone())?;
                row_origin.push((i, offset));
            }
        }
        Ok(MarginalSystem { universe, joint, system, row_origin })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialGlobalVerdict {
    Agree { truth: ProbabilityPotential },
    Disagree { certificate: FarkasCertificate },
}

impl PotentialGlobalVerdict {
    pub fn agrees(&self) -> bool {
        matches!(self, PotentialGlobalVerdict::Agree { .. })
    }
}

/// Existence of `γ: Ω_X → ℚ≥0` with `γ↓d(φi) = φi` for all `i`.
pub fn check_global_agreement_potentials(
    kb: &[ProbabilityPotential],
    limit: u128,
) -> Result<PotentialGlobalVerdict> {
    let marginals = MarginalSystem::build(kb, limit)?;
    match solve_feasibility(&marginals.system) {
        Feasibility::Feasible(x) => {
            let truth = Potential::<NonNegativeRational>::from_table(&marginals.universe, marginals.joint.clone(), x)?;
            Ok(PotentialGlobalVerdict::Agree { truth })
        }
        Feasibility::Infeasible(certificate) => Ok(PotentialGlobalVerdict::Disagree { certificate }),
    }
}

/// Result of exhaustively enumerating truth valuations.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthMaximality {
    pub candidates: u64,
    pub truth_valuations: u64,
    /// A truth valuation not below `γ`, if any.
    pub violation: Option<Relation>,
}

impl TruthMaximality {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Largest `|Ω_X|` accepted by [`verify_truth_maximality`].
pub const TRUTH_SEARCH_LIMIT: u128 = 20;

/// Enumerates every relation `δ ⊆ Ω_X` and checks that each truth
/// valuation (`δ↓d(φi) = φi` for all `i`) satisfies `δ ⊆ γ`.
pub fn verify_truth_maximality(kb: &[Relation], gamma: &Relation) -> Result<TruthMaximality> {
    let first = kb.first().ok_or_else(|| Error::Argument("empty knowledgebase".into()))?;
    let universe = first.universe();
    let joint = joint_domain(kb);
    if *gamma.domain() != joint {
        return Err(Error::Domain(format!("γ lives on {}, expected {joint}", gamma.domain())));
    }
    let states = universe.state_count(&joint)?;
    if states > TRUTH_SEARCH_LIMIT {
        return Err(Error::Resource(format!("2^{states} candidate valuations is too many to enumerate")));
    }
    let all: Vec<_> = crate::universe::enumerate_assignments(&joint, universe)?;
    let mut report = TruthMaximality { candidates: 0, truth_valuations: 0, violation: None };
    for mask in 0u64..(1u64 << all.len()) {
        report.candidates += 1;
        let delta = Relation::from_assignments(
            universe,
            joint.clone(),
            all.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, a)| a.clone()),
        )?;
        let is_truth = kb.iter().all(|phi| {
            delta.project(phi.label()).map(|p| p == *phi).unwrap_or(false)
        });
        if is_truth {
            report.truth_valuations += 1;
            if !delta.is_subset(gamma) && report.violation.is_none() {
                report.violation = Some(delta);
            }
        }
    }
    Ok(report)
}

/// A knowledgebase whose algebra is chosen at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Knowledgebase {
    Relations(Vec<Relation>),
    Probabilities(Vec<ProbabilityPotential>),
}

impl Knowledgebase {
    pub fn len(&self) -> usize {
        match self {
            Knowledgebase::Relations(kb) => kb.len(),
            Knowledgebase::Probabilities(kb) => kb.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_adjoint(&self) -> bool {
        match self {
            Knowledgebase::Relations(_) => <Relation as Valuation>::capabilities().adjoint,
            Knowledgebase::Probabilities(_) => <ProbabilityPotential as Valuation>::capabilities().adjoint,
        }
    }

    /// Inference-based global agreement; only adjoint algebras qualify.
    pub fn check_global_agreement_adjoint(&self, config: &InferenceConfig) -> Result<GlobalVerdict<Relation>> {
        match self {
            Knowledgebase::Relations(kb) => check_global_agreement_adjoint(kb, config),
            Knowledgebase::Probabilities(_) => Err(Error::Capability(
                "probability potentials are not an adjoint algebra; use the feasibility check for potentials".into(),
            )),
        }
    }
}

/// Whether `x↓d(φ)` lands in the support of `φ` for every `x` in `gamma`.
pub fn relation_respects(gamma: &Relation, phi: &Relation) -> Result<bool> {
    for x in gamma.iter() {
        if !phi.contains(&project_assignment(&x, phi.domain())?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::ratio;

    fn two_var() -> Arc<VariableUniverse> {
        Arc::new(VariableUniverse::from_frames([("a", vec!["0", "1"]), ("b", vec!["0", "1"])]).unwrap())
    }

    #[test]
    fn relation_with_own_projection_agrees() {
        let u = two_var();
        let r = Relation::from_named_rows(&u, &["a", "b"], [["0", "1"], ["1", "1"], ["1", "0"]]).unwrap();
        let kb = vec![r.clone(), r.project(&u.domain(["a"]).unwrap()).unwrap()];
        let verdict = check_global_agreement_adjoint(&kb, &InferenceConfig::default()).unwrap();
        assert_eq!(verdict, GlobalVerdict::Agree { truth: r.clone() });
        let max = verify_truth_maximality(&kb, &r).unwrap();
        assert!(max.passed());
        assert_eq!(max.candidates, 16);
        assert!(max.truth_valuations >= 1);
    }

    #[test]
    fn local_failure_reports_first_pair() {
        let u = two_var();
        let r = Relation::from_named_rows(&u, &["a", "b"], [["0", "1"], ["1", "1"]]).unwrap();
        let s = Relation::from_named_rows(&u, &["a"], [["0"]]).unwrap();
        match check_local_agreement(&[r.clone(), r, s]).unwrap() {
            LocalVerdict::Fail { first, second, .. } => assert_eq!((first, second), (0, 2)),
            LocalVerdict::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn single_potential_agrees_with_itself() {
        let u = two_var();
        let p = Potential::<NonNegativeRational>::from_table(
            &u,
            u.full_domain(),
            vec![ratio(1, 4), ratio(1, 4), ratio(0, 1), ratio(1, 2)],
        )
        .unwrap();
        match check_global_agreement_potentials(std::slice::from_ref(&p), DEFAULT_FEASIBILITY_LIMIT).unwrap() {
            PotentialGlobalVerdict::Agree { truth } => assert_eq!(truth, p),
            other => panic!("expected agreement, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_limit_is_enforced() {
        let u = two_var();
        let p = Potential::<NonNegativeRational>::constant(&u, u.full_domain(), ratio(1, 4)).unwrap();
        assert!(matches!(check_global_agreement_potentials(&[p], 3), Err(Error::Resource(_))));
    }

    #[test]
    fn potentials_lack_adjoint_capability() {
        let u = two_var();
        let p = Potential::<NonNegativeRational>::constant(&u, u.full_domain(), ratio(1, 4)).unwrap();
        let kb = Knowledgebase::Probabilities(vec![p]);
        assert!(!kb.is_adjoint());
        assert!(matches!(kb.check_global_agreement_adjoint(&InferenceConfig::default()), Err(Error::Capability(_))));
    }

    #[test]
    fn full_relations_have_full_truth() {
        let u = two_var();
        let ea = Relation::full(&u, u.domain(["a"]).unwrap()).unwrap();
        let eb = Relation::full(&u, u.domain(["b"]).unwrap()).unwrap();
        let kb = vec![ea, eb];
        match check_global_agreement_adjoint(&kb, &InferenceConfig::default()).unwrap() {
            GlobalVerdict::Agree { truth } => {
                assert_eq!(truth, Relation::full(&u, u.full_domain()).unwrap());
                assert!(verify_truth_maximality(&kb, &truth).unwrap().passed());
            }
            other => panic!("expected agreement, got {other:?}"),
        }
    }
}
