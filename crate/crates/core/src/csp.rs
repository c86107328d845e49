//! Constraint satisfaction problems and propositional systems, compiled to
//! information sets (relations).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relation::{project_relation, Relation};
use crate::universe::{enumerate_assignments, project_assignment, Assignment, Domain, Frame, VariableId, VariableUniverse};

/// A constraint `⟨scheme, allowed⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    scheme: Domain,
    allowed: Relation,
}

impl Constraint {
    pub fn new(allowed: Relation) -> Self {
        Constraint { scheme: allowed.domain().clone(), allowed }
    }

    pub fn scheme(&self) -> &Domain {
        &self.scheme
    }

    pub fn allowed(&self) -> &Relation {
        &self.allowed
    }
}

/// A CSP `⟨X, D, C⟩`; the frames of the universe play the role of `D`.
#[derive(Debug, Clone)]
pub struct CspInstance {
    universe: Arc<VariableUniverse>,
    variables: Domain,
    constraints: Vec<Constraint>,
}

impl CspInstance {
    pub fn new(universe: Arc<VariableUniverse>, variables: Domain, constraints: Vec<Constraint>) -> Result<Self> {
        universe.check_domain(&variables)?;
        for (i, c) in constraints.iter().enumerate() {
            if !c.scheme.is_subset(&variables) {
                return Err(Error::Domain(format!("constraint {i} has scheme {} outside the variables", c.scheme)));
            }
        }
        Ok(CspInstance { universe, variables, constraints })
    }

    pub fn universe(&self) -> &Arc<VariableUniverse> {
        &self.universe
    }

    pub fn variables(&self) -> &Domain {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// The schemes of the constraints, in order.
    pub fn schemes(&self) -> Vec<Domain> {
        self.constraints.iter().map(|c| c.scheme.clone()).collect()
    }

    /// `v ⊨_S c` for the domain `S = d(v)`.
    ///
    /// A constraint whose scheme misses `S` is vacuously satisfied; on a
    /// partial overlap the restriction of `v` must extend to an allowed tuple.
    pub fn satisfies(&self, v: &Assignment, constraint: &Constraint) -> Result<bool> {
        let overlap = v.domain().intersection(&constraint.scheme);
        if overlap.is_empty() {
            return Ok(true);
        }
        let restricted = project_assignment(v, &overlap)?;
        if overlap == constraint.scheme {
            Ok(constraint.allowed.contains(&restricted))
        } else {
            Ok(project_relation(&constraint.allowed, &overlap)?.contains(&restricted))
        }
    }

    /// Complete assignments satisfying every constraint, by enumeration.
    pub fn solutions(&self) -> Result<Relation> {
        let models = csp_to_knowledgebase(self, std::slice::from_ref(&self.variables))?;
        Ok(models.into_iter().next().expect("one cover"))
    }
}

/// `φ_T := ℳ_T(C)` for each cover set `T`: the evaluations on `T` that
/// satisfy every constraint under `⊨_T`.
pub fn csp_to_knowledgebase(csp: &CspInstance, covers: &[Domain]) -> Result<Vec<Relation>> {
    covers
        .iter()
        .map(|cover| {
            if !cover.is_subset(&csp.variables) {
                return Err(Error::Domain(format!("cover set {cover} is not within the CSP variables")));
            }
            // restrictions of each constraint to this cover, computed once
            let checks: Vec<(Domain, Relation)> = csp
                .constraints
                .iter()
                .filter_map(|c| {
                    let overlap = cover.intersection(&c.scheme);
                    (!overlap.is_empty()).then(|| project_relation(&c.allowed, &overlap).map(|r| (overlap, r)))
                })
                .collect::<Result<_>>()?;
            let mut out = Relation::empty(&csp.universe, cover.clone())?;
            for v in enumerate_assignments(cover, &csp.universe)? {
                let mut ok = true;
                for (overlap, allowed) in &checks {
                    if !allowed.contains(&project_assignment(&v, overlap)?) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    out.insert(v)?;
                }
            }
            Ok(out)
        })
        .collect()
}

/// A formula kept as its set of models over its support.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub text: String,
    pub models: Relation,
}

/// Propositional formulas over Boolean symbols, pre-compiled to model sets.
#[derive(Debug, Clone)]
pub struct PropositionalSystem {
    universe: Arc<VariableUniverse>,
    symbols: Domain,
    formulas: Vec<Formula>,
}

impl PropositionalSystem {
    pub fn new(universe: Arc<VariableUniverse>, formulas: Vec<Formula>) -> Result<Self> {
        let symbols = universe.full_domain();
        for var in symbols.iter() {
            if *universe.frame(var)? != Frame::boolean() {
                return Err(Error::Invalid(format!("symbol {var} must have the frame {{0,1}}")));
            }
        }
        Ok(PropositionalSystem { universe, symbols, formulas })
    }

    pub fn universe(&self) -> &Arc<VariableUniverse> {
        &self.universe
    }

    pub fn symbols(&self) -> &Domain {
        &self.symbols
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    /// One relation per formula.
    pub fn knowledgebase(&self) -> Vec<Relation> {
        self.formulas.iter().map(|f| f.models.clone()).collect()
    }
}

fn symbol(i: usize) -> String {
    format!("s{i}")
}

fn cycle_system(n: usize, negate_last: bool) -> Result<PropositionalSystem> {
    if n < 2 {
        return Err(Error::Argument(format!("a cycle needs at least 2 statements, got {n}")));
    }
    let mut universe = VariableUniverse::new();
    for i in 1..=n {
        universe.insert(VariableId::new(symbol(i))?, Frame::boolean())?;
    }
    let universe = Arc::new(universe);
    let mut formulas = Vec::with_capacity(n);
    for i in 1..n {
        let cols = [symbol(i), symbol(i + 1)];
        let models = Relation::from_named_rows(&universe, &cols, [["0", "0"], ["1", "1"]])?;
        formulas.push(Formula { text: format!("{} <-> {}", cols[0], cols[1]), models });
    }
    let cols = [symbol(n), symbol(1)];
    let (text, rows) = if negate_last {
        (format!("{} <-> !{}", cols[0], cols[1]), [["1", "0"], ["0", "1"]])
    } else {
        (format!("{} <-> {}", cols[0], cols[1]), [["0", "0"], ["1", "1"]])
    };
    let models = Relation::from_named_rows(&universe, &cols, rows)?;
    formulas.push(Formula { text, models });
    PropositionalSystem::new(universe, formulas)
}

/// The liar cycle `s1↔s2, …, s(n-1)↔sn, sn↔¬s1`.
pub fn liar_cycle(n: usize) -> Result<PropositionalSystem> {
    cycle_system(n, true)
}

/// The same cycle with the last edge a plain biconditional, which is consistent.
pub fn truth_teller_cycle(n: usize) -> Result<PropositionalSystem> {
    cycle_system(n, false)
}

/// Outcome of checking the two adjunction inequalities on information sets.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointnessReport {
    pub unit_checks: usize,
    pub counit_checks: usize,
    pub failure: Option<String>,
}

impl AdjointnessReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `M ⊆ M↓Q ⊗ M↓U` for every cover `Q ∪ U = d(M)` of every sample,
/// and `(M1 ⊗ M2)↓d(Mi) ⊆ Mi` for every ordered pair of samples.
pub fn adjointness_suite(samples: &[Relation]) -> Result<AdjointnessReport> {
    use crate::relation::natural_join;
    let mut report = AdjointnessReport { unit_checks: 0, counit_checks: 0, failure: None };
    for m in samples {
        let d = m.domain();
        for q in d.subsets() {
            for extra in q.subsets() {
                // U = (d \ Q) ∪ extra ranges over every U with Q ∪ U = d
                let u = d.difference(&q).union(&extra);
                let rebuilt = natural_join(&project_relation(m, &q)?, &project_relation(m, &u)?)?;
                report.unit_checks += 1;
                if !m.is_subset(&rebuilt) {
                    report.failure = Some(format!("{m:?} ⊄ M↓{q} ⊗ M↓{u}"));
                    return Ok(report);
                }
            }
        }
    }
    for m1 in samples {
        for m2 in samples {
            let joined = natural_join(m1, m2)?;
            for m in [m1, m2] {
                report.counit_checks += 1;
                if !project_relation(&joined, m.domain())?.is_subset(m) {
                    report.failure = Some(format!("(M1⊗M2)↓{} ⊄ {m:?}", m.domain()));
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liar_three_edges() {
        let sys = liar_cycle(3).unwrap();
        let kb = sys.knowledgebase();
        assert_eq!(kb.len(), 3);
        let u = sys.universe();
        assert_eq!(*kb[2].domain(), u.domain(["s1", "s3"]).unwrap());
        // rows in name order (s1, s3): ⟨1,0⟩ and ⟨0,1⟩ read as (s1, s3)
        let expected = Relation::from_named_rows(u, &["s1", "s3"], [["1", "0"], ["0", "1"]]).unwrap();
        assert_eq!(kb[2], expected);
        let edge = Relation::from_named_rows(u, &["s1", "s2"], [["0", "0"], ["1", "1"]]).unwrap();
        assert_eq!(kb[0], edge);
    }

    #[test]
    fn liar_two_is_equality_and_inequality() {
        let sys = liar_cycle(2).unwrap();
        let kb = sys.knowledgebase();
        assert_eq!(kb[0].domain(), kb[1].domain());
        assert_eq!(kb[0].label_rows(), vec![vec!["0", "0"], vec!["1", "1"]]);
        assert_eq!(kb[1].label_rows(), vec![vec!["0", "1"], vec!["1", "0"]]);
    }

    #[test]
    fn liar_single_variable_projections_are_full() {
        for n in 2..=6 {
            let sys = liar_cycle(n).unwrap();
            for r in sys.knowledgebase() {
                for v in r.domain().iter() {
                    let p = project_relation(&r, &Domain::new([v.clone()])).unwrap();
                    assert_eq!(p.len(), 2);
                }
            }
        }
    }

    #[test]
    fn liar_rejects_short_cycles() {
        assert!(matches!(liar_cycle(1), Err(Error::Argument(_))));
        assert!(matches!(liar_cycle(0), Err(Error::Argument(_))));
    }

    #[test]
    fn vacuous_cover_gives_full_relation() {
        let u = Arc::new(VariableUniverse::from_frames([("x", vec!["0", "1"]), ("y", vec!["0", "1"]), ("w", vec!["a", "b", "c"])]).unwrap());
        let c = Constraint::new(Relation::from_named_rows(&u, &["x", "y"], [["0", "1"]]).unwrap());
        let csp = CspInstance::new(u.clone(), u.full_domain(), vec![c]).unwrap();
        let kb = csp_to_knowledgebase(&csp, &[u.domain(["w"]).unwrap()]).unwrap();
        assert_eq!(kb[0].len(), 3);
        // partial overlap restricts x to the projection of the allowed relation
        let kb = csp_to_knowledgebase(&csp, &[u.domain(["x", "w"]).unwrap()]).unwrap();
        assert_eq!(kb[0].len(), 3);
        assert!(kb[0].iter().all(|a| a.get(&u.var("x").unwrap()) == Some(0)));
    }

    #[test]
    fn adjointness_on_small_relation() {
        let u = Arc::new(VariableUniverse::from_frames([("a", vec!["0", "1"]), ("b", vec!["0", "1"])]).unwrap());
        let m = Relation::from_named_rows(&u, &["a", "b"], [["0", "1"], ["1", "0"]]).unwrap();
        let report = adjointness_suite(&[m]).unwrap();
        assert!(report.passed());
        assert!(report.unit_checks > 0);
    }
}
