//! The valuation-algebra contract and an executable axiom suite.
//!
//! Every instance implements [`Valuation`] (labelling, projection,
//! combination). Neutral elements, null elements and the information order
//! are opt-in through [`WithNeutral`], [`WithNull`] and [`Ordered`]; the
//! [`Capabilities`] flags of an instance say which axioms it claims.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::universe::{Domain, VariableUniverse};

/// Which optional axiom groups an instance claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Capabilities {
    pub has_neutral: bool,
    pub has_null: bool,
    pub idempotent: bool,
    pub ordered: bool,
    pub adjoint: bool,
}

pub trait Valuation: Clone + PartialEq + Debug + Send + Sync {
    /// `d(φ)`.
    fn label(&self) -> &Domain;

    fn universe(&self) -> &Arc<VariableUniverse>;

    /// `φ↓T`; `T` must be a subset of `d(φ)`.
    fn project(&self, target: &Domain) -> Result<Self>;

    /// `φ ⊗ ψ`.
    fn combine(&self, other: &Self) -> Result<Self>;

    /// Upper bound on the cells (or tuples) materialised by `self.combine(other)`.
    fn combine_cost(&self, other: &Self) -> u128;

    fn capabilities() -> Capabilities;

    /// Projection that removes a single variable.
    fn marginalize(&self, var: &crate::universe::VariableId) -> Result<Self> {
        self.project(&self.label().without(var))
    }
}

/// Axiom A7: neutral elements `e_S`.
pub trait WithNeutral: Valuation {
    fn neutral(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Self>;
}

/// Axiom A8: null elements `z_S`.
pub trait WithNull: Valuation {
    fn null(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Self>;

    fn is_null(&self) -> bool;
}

/// Axioms A10–A13: a partial order `⪯` on each `Φ_S` with infima.
pub trait Ordered: WithNull {
    /// `self ⪯ other`; valuations on different domains are incomparable.
    fn precedes(&self, other: &Self) -> bool;

    /// Greatest lower bound of `items`, all of which live on `domain`.
    /// The infimum of the empty family is the top element of `Φ_S`.
    fn infimum(universe: &Arc<VariableUniverse>, domain: &Domain, items: &[Self]) -> Result<Self>;
}

/// Ordered algebras whose combination is right adjoint to the pair of restrictions.
pub trait Adjoint: Ordered + WithNeutral {}

pub(crate) fn check_same_universe(a: &Arc<VariableUniverse>, b: &Arc<VariableUniverse>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::Domain("valuations come from incompatible universes".into()))
    }
}

/// Identifier of an axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// Commutative semigroup.
    A1,
    /// Labelling.
    A2,
    /// Transitivity.
    A3,
    /// Projection onto the own domain.
    A4,
    /// Labelling of combinations.
    A5,
    /// Combination.
    A6,
    /// Neutral elements.
    A7,
    /// Null elements and the projection biconditional.
    A8,
    /// Idempotency.
    A9,
    /// Partial order with infima.
    A10,
    /// Null element is the infimum.
    A11,
    /// Monotone combination.
    A12,
    /// Monotone projection.
    A13,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::A1,
        Axiom::A2,
        Axiom::A3,
        Axiom::A4,
        Axiom::A5,
        Axiom::A6,
        Axiom::A7,
        Axiom::A8,
        Axiom::A9,
        Axiom::A10,
        Axiom::A11,
        Axiom::A12,
        Axiom::A13,
    ];
}

/// Concrete valuations and domains that violate an axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<V> {
    pub axiom: Axiom,
    pub valuations: Vec<V>,
    pub domains: Vec<Domain>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxiomOutcome<V> {
    /// Held on every checked instance; carries the number of checks.
    Pass(usize),
    Fail(Box<Counterexample<V>>),
}

impl<V> AxiomOutcome<V> {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomOutcome::Pass(_))
    }
}

/// Per-axiom outcomes of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<V> {
    pub results: Vec<(Axiom, AxiomOutcome<V>)>,
}

impl<V> Default for AxiomReport<V> {
    fn default() -> Self {
        AxiomReport { results: Vec::new() }
    }
}

impl<V> AxiomReport<V> {
    pub fn outcome(&self, axiom: Axiom) -> Option<&AxiomOutcome<V>> {
        self.results.iter().find(|(a, _)| *a == axiom).map(|(_, o)| o)
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|(_, o)| o.passed())
    }

    pub fn axioms(&self) -> Vec<Axiom> {
        self.results.iter().map(|(a, _)| *a).collect()
    }

    pub fn merge(&mut self, other: AxiomReport<V>) {
        self.results.extend(other.results);
    }
}

/// Bounds how many pairs and triples a suite examines.
#[derive(Debug, Clone, Copy)]
pub struct SuiteLimits {
    pub max_pairs: usize,
    pub max_triples: usize,
}

impl Default for SuiteLimits {
    fn default() -> Self {
        SuiteLimits { max_pairs: 4_000, max_triples: 20_000 }
    }
}

struct Checker<V> {
    axiom: Axiom,
    checks: usize,
    failure: Option<Counterexample<V>>,
}

impl<V: Clone> Checker<V> {
    fn new(axiom: Axiom) -> Self {
        Checker { axiom, checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, valuations: &[&V], domains: &[&Domain], detail: impl FnOnce() -> String) {
        if self.failure.is_some() {
            return;
        }
        self.checks += 1;
        if !ok {
            self.failure = Some(Counterexample {
                axiom: self.axiom,
                valuations: valuations.iter().map(|v| (*v).clone()).collect(),
                domains: domains.iter().map(|d| (*d).clone()).collect(),
                detail: detail(),
            });
        }
    }

    fn done(&self) -> bool {
        self.failure.is_some()
    }

    fn finish(self) -> (Axiom, AxiomOutcome<V>) {
        match self.failure {
            Some(c) => (self.axiom, AxiomOutcome::Fail(Box::new(c))),
            None => (self.axiom, AxiomOutcome::Pass(self.checks)),
        }
    }
}

fn pairs(n: usize, limit: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).take(limit)
}

fn triples(n: usize, limit: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n)
        .flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .take(limit)
}

/// Axioms A1–A6, which every instance must satisfy.
///
/// Every subset of every sample's domain is examined, so the quantifiers
/// over domains are exhaustive; quantifiers over valuations range over
/// the supplied samples.
pub fn check_core_axioms<V: Valuation>(samples: &[V], limits: SuiteLimits) -> Result<AxiomReport<V>> {
    let mut a1 = Checker::new(Axiom::A1);
    let mut a2 = Checker::new(Axiom::A2);
    let mut a3 = Checker::new(Axiom::A3);
    let mut a4 = Checker::new(Axiom::A4);
    let mut a5 = Checker::new(Axiom::A5);
    let mut a6 = Checker::new(Axiom::A6);

    for phi in samples {
        let d = phi.label();
        a4.check(phi.project(d)? == *phi, &[phi], &[d], || "φ↓d(φ) ≠ φ".into());
        let subsets = d.subsets();
        let mut projections = Vec::with_capacity(subsets.len());
        for s in &subsets {
            let p = phi.project(s)?;
            a2.check(p.label() == s, &[phi], &[s], || format!("d(φ↓S) = {:?}", p.label()));
            projections.push(p);
        }
        for (ti, t) in subsets.iter().enumerate() {
            for (si, s) in subsets.iter().enumerate() {
                if !s.is_subset(t) {
                    continue;
                }
                let via = projections[ti].project(s)?;
                a3.check(via == projections[si], &[phi], &[s, t], || "(φ↓T)↓S ≠ φ↓S".into());
            }
        }
    }

    for (i, j) in pairs(samples.len(), limits.max_pairs) {
        let (phi, psi) = (&samples[i], &samples[j]);
        let c = phi.combine(psi)?;
        let expected = phi.label().union(psi.label());
        a5.check(*c.label() == expected, &[phi, psi], &[], || format!("d(φ⊗ψ) = {:?}", c.label()));
        a1.check(c == psi.combine(phi)?, &[phi, psi], &[], || "φ⊗ψ ≠ ψ⊗φ".into());

        if !a6.done() {
            let s = phi.label();
            let t = psi.label();
            for extra in t.difference(s).subsets() {
                let u = s.union(&extra);
                let lhs = c.project(&u)?;
                let rhs = phi.combine(&psi.project(&u.intersection(t))?)?;
                a6.check(lhs == rhs, &[phi, psi], &[&u], || "(φ⊗ψ)↓U ≠ φ⊗ψ↓(U∩T)".into());
            }
        }
    }

    for (i, j, k) in triples(samples.len(), limits.max_triples) {
        if a1.done() {
            break;
        }
        let (x, y, z) = (&samples[i], &samples[j], &samples[k]);
        let left = x.combine(y)?.combine(z)?;
        let right = x.combine(&y.combine(z)?)?;
        a1.check(left == right, &[x, y, z], &[], || "(φ⊗ψ)⊗χ ≠ φ⊗(ψ⊗χ)".into());
    }

    Ok(AxiomReport {
        results: vec![a1.finish(), a2.finish(), a3.finish(), a4.finish(), a5.finish(), a6.finish()],
    })
}

/// Axiom A7 over the supplied samples and every pair of their subdomains.
pub fn check_neutral_axiom<V: WithNeutral>(samples: &[V]) -> Result<AxiomReport<V>> {
    let mut a7 = Checker::new(Axiom::A7);
    for phi in samples {
        let e = V::neutral(phi.universe(), phi.label())?;
        a7.check(phi.combine(&e)? == *phi, &[phi], &[phi.label()], || "φ⊗e_S ≠ φ".into());
        a7.check(e.combine(phi)? == *phi, &[phi], &[phi.label()], || "e_S⊗φ ≠ φ".into());
        let subsets = phi.label().subsets();
        for s in &subsets {
            for t in &subsets {
                let es = V::neutral(phi.universe(), s)?;
                let et = V::neutral(phi.universe(), t)?;
                let est = V::neutral(phi.universe(), &s.union(t))?;
                a7.check(es.combine(&et)? == est, &[], &[s, t], || "e_S⊗e_T ≠ e_{S∪T}".into());
            }
        }
    }
    Ok(AxiomReport { results: vec![a7.finish()] })
}

/// Axiom A8: absorption by `z_S` and `φ↓S = z_S ⟺ φ = z_T`.
pub fn check_null_axiom<V: WithNull>(samples: &[V]) -> Result<AxiomReport<V>> {
    let mut a8 = Checker::new(Axiom::A8);
    for phi in samples {
        let d = phi.label();
        let z = V::null(phi.universe(), d)?;
        a8.check(phi.combine(&z)? == z, &[phi], &[d], || "φ⊗z_S ≠ z_S".into());
        a8.check(z.combine(phi)? == z, &[phi], &[d], || "z_S⊗φ ≠ z_S".into());
        a8.check(z.is_null(), &[&z], &[d], || "z_S not recognised as null".into());
        for s in d.subsets() {
            let zs = V::null(phi.universe(), &s)?;
            let lhs = phi.project(&s)? == zs;
            let rhs = *phi == z;
            a8.check(lhs == rhs, &[phi], &[&s], || format!("φ↓S = z_S is {lhs} but φ = z_T is {rhs}"));
            // absorption with a null on a smaller domain lands on the null of the union
            let absorbed = phi.combine(&zs)?;
            a8.check(absorbed.is_null(), &[phi], &[&s], || "φ⊗z_S is not null".into());
        }
    }
    Ok(AxiomReport { results: vec![a8.finish()] })
}

/// Axiom A9: `φ ⊗ φ↓S = φ`.
pub fn check_idempotency_axiom<V: Valuation>(samples: &[V]) -> Result<AxiomReport<V>> {
    let mut a9 = Checker::new(Axiom::A9);
    for phi in samples {
        for s in phi.label().subsets() {
            let combined = phi.combine(&phi.project(&s)?)?;
            a9.check(combined == *phi, &[phi], &[&s], || "φ⊗φ↓S ≠ φ".into());
            if a9.done() {
                break;
            }
        }
    }
    Ok(AxiomReport { results: vec![a9.finish()] })
}

/// Axioms A10–A13 on sampled pairs, with comparable pairs taken wherever
/// the samples supply them.
pub fn check_order_axioms<V: Ordered>(samples: &[V], limits: SuiteLimits) -> Result<AxiomReport<V>> {
    let mut a10 = Checker::new(Axiom::A10);
    let mut a11 = Checker::new(Axiom::A11);
    let mut a12 = Checker::new(Axiom::A12);
    let mut a13 = Checker::new(Axiom::A13);

    for phi in samples {
        let d = phi.label();
        let z = V::null(phi.universe(), d)?;
        a10.check(phi.precedes(phi), &[phi], &[], || "⪯ is not reflexive".into());
        a11.check(z.precedes(phi), &[phi], &[d], || "z_S is not below φ".into());
    }

    for (i, j) in pairs(samples.len(), limits.max_pairs) {
        let (phi, psi) = (&samples[i], &samples[j]);
        if phi.precedes(psi) {
            a10.check(phi.label() == psi.label(), &[phi, psi], &[], || "comparable across domains".into());
            if psi.precedes(phi) {
                a10.check(phi == psi, &[phi, psi], &[], || "⪯ is not antisymmetric".into());
            }
            for s in phi.label().subsets() {
                let ok = phi.project(&s)?.precedes(&psi.project(&s)?);
                a13.check(ok, &[phi, psi], &[&s], || "φ↓S ⪯ ψ↓S fails".into());
            }
        }
        if phi.label() == psi.label() {
            let d = phi.label();
            let inf = V::infimum(phi.universe(), d, &[phi.clone(), psi.clone()])?;
            let lower = inf.precedes(phi) && inf.precedes(psi);
            a10.check(lower, &[phi, psi], &[d], || "infimum is not a lower bound".into());
            // every sampled common lower bound must sit below the infimum
            for chi in samples.iter().filter(|c| c.label() == d) {
                if chi.precedes(phi) && chi.precedes(psi) {
                    a10.check(chi.precedes(&inf), &[phi, psi, chi], &[d], || "infimum is not greatest".into());
                }
            }
            let z = V::null(phi.universe(), d)?;
            let inf_all = V::infimum(
                phi.universe(),
                d,
                &samples.iter().filter(|c| c.label() == d).cloned().collect::<Vec<_>>(),
            )?;
            a11.check(z.precedes(&inf_all), &[phi], &[d], || "z_S is not below inf(Φ_S)".into());
        }
    }

    // A12 needs two comparable pairs; walk comparable pairs (φ1 ⪯ φ2) and (ψ1 ⪯ ψ2)
    let comparable: Vec<(usize, usize)> = pairs(samples.len(), limits.max_pairs)
        .filter(|&(i, j)| samples[i].precedes(&samples[j]))
        .collect();
    'outer: for &(i1, i2) in &comparable {
        for &(j1, j2) in &comparable {
            if a12.checks >= limits.max_triples {
                break 'outer;
            }
            let lhs = samples[i1].combine(&samples[j1])?;
            let rhs = samples[i2].combine(&samples[j2])?;
            a12.check(
                lhs.precedes(&rhs),
                &[&samples[i1], &samples[i2], &samples[j1], &samples[j2]],
                &[],
                || "φ1⊗ψ1 ⪯ φ2⊗ψ2 fails".into(),
            );
        }
    }

    Ok(AxiomReport { results: vec![a10.finish(), a11.finish(), a12.finish(), a13.finish()] })
}

/// Runs every axiom group an ordered information algebra claims (A1–A13).
pub fn information_algebra_suite<V: Ordered + WithNeutral>(
    samples: &[V],
    limits: SuiteLimits,
) -> Result<AxiomReport<V>> {
    let mut report = check_core_axioms(samples, limits)?;
    report.merge(check_neutral_axiom(samples)?);
    report.merge(check_null_axiom(samples)?);
    report.merge(check_idempotency_axiom(samples)?);
    report.merge(check_order_axioms(samples, limits)?);
    Ok(report)
}
