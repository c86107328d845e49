//! Relations (information sets): finite sets of tuples over a domain.
//!
//! Combination is the natural join, projection is tuple-wise restriction,
//! `e_S = Ω_S`, `z_S = ∅` and the order is inclusion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::algebra::{check_same_universe, Adjoint, Capabilities, Ordered, Valuation, WithNeutral, WithNull};
use crate::error::{Error, Result};
use crate::universe::{Assignment, Domain, MixedRadix, VariableUniverse};

#[derive(Clone)]
pub struct Relation {
    universe: Arc<VariableUniverse>,
    domain: Domain,
    tuples: BTreeSet<Vec<u32>>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Relation {
    /// Empty relation over `domain`.
    pub fn empty(universe: &Arc<VariableUniverse>, domain: Domain) -> Result<Self> {
        universe.check_domain(&domain)?;
        Ok(Relation { universe: universe.clone(), domain, tuples: BTreeSet::new() })
    }

    /// Relation built from assignments; each must have exactly `domain` as its domain.
    pub fn from_assignments<I>(universe: &Arc<VariableUniverse>, domain: Domain, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Assignment>,
    {
        let mut rel = Self::empty(universe, domain)?;
        for t in tuples {
            rel.insert(t)?;
        }
        Ok(rel)
    }

    /// Relation from label rows given in domain (name) order.
    pub fn from_rows<R, S>(universe: &Arc<VariableUniverse>, domain: Domain, rows: R) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut rel = Self::empty(universe, domain)?;
        for row in rows {
            let a = Assignment::from_ordered_labels(universe, &rel.domain, row.as_ref())?;
            rel.tuples.insert(a.indices().to_vec());
        }
        Ok(rel)
    }

    /// Relation from label rows whose columns follow `columns` rather than name order.
    pub fn from_named_rows<R, S, C>(
        universe: &Arc<VariableUniverse>,
        columns: &[C],
        rows: R,
    ) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: AsRef<[S]>,
        S: AsRef<str>,
        C: AsRef<str>,
    {
        let domain = universe.domain(columns.iter().map(AsRef::as_ref))?;
        if domain.len() != columns.len() {
            return Err(Error::Argument("duplicate column names".into()));
        }
        let mut rel = Self::empty(universe, domain)?;
        for row in rows {
            let row = row.as_ref();
            if row.len() != columns.len() {
                return Err(Error::Argument(format!("row has {} values, expected {}", row.len(), columns.len())));
            }
            let a = Assignment::from_labels(
                universe,
                columns.iter().map(AsRef::as_ref).zip(row.iter().map(AsRef::as_ref)),
            )?;
            rel.tuples.insert(a.indices().to_vec());
        }
        Ok(rel)
    }

    /// `Ω_S`, the neutral element.
    pub fn full(universe: &Arc<VariableUniverse>, domain: Domain) -> Result<Self> {
        let shape = universe.shape(&domain)?;
        Ok(Relation { universe: universe.clone(), domain, tuples: MixedRadix::new(&shape).collect() })
    }

    pub fn insert(&mut self, tuple: Assignment) -> Result<bool> {
        if *tuple.domain() != self.domain {
            return Err(Error::Domain(format!(
                "tuple over {} does not fit relation over {}",
                tuple.domain(),
                self.domain
            )));
        }
        // revalidate indices against this relation's universe
        let tuple = Assignment::from_indices(&self.universe, self.domain.clone(), tuple.indices().to_vec())?;
        Ok(self.tuples.insert(tuple.indices().to_vec()))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &Assignment) -> bool {
        *tuple.domain() == self.domain && self.tuples.contains(tuple.indices())
    }

    /// Tuples in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.tuples.iter().map(|row| Assignment::from_raw(self.domain.clone(), row.clone()))
    }

    /// Tuples rendered as label rows in domain order.
    pub fn label_rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|a| a.labels(&self.universe).into_iter().map(str::to_owned).collect())
            .collect()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.domain == other.domain && self.tuples.is_subset(&other.tuples)
    }

    /// Set intersection of two relations over the same domain.
    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        if self.domain != other.domain {
            return Err(Error::Domain("intersection needs equal domains".into()));
        }
        Ok(Relation {
            universe: self.universe.clone(),
            domain: self.domain.clone(),
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        })
    }

    /// Set union of two relations over the same domain.
    pub fn union(&self, other: &Relation) -> Result<Relation> {
        if self.domain != other.domain {
            return Err(Error::Domain("union needs equal domains".into()));
        }
        Ok(Relation {
            universe: self.universe.clone(),
            domain: self.domain.clone(),
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        })
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation{} ", self.domain)?;
        f.debug_set().entries(self.iter().map(|a| a.key(&self.universe))).finish()
    }
}

/// Natural join `R1 ⋈ R2`.
pub fn natural_join(r1: &Relation, r2: &Relation) -> Result<Relation> {
    check_same_universe(&r1.universe, &r2.universe)?;
    let domain = r1.domain.union(&r2.domain);
    let common = r1.domain.intersection(&r2.domain);
    let common_in_1 = r1.domain.positions_of(&common)?;
    let common_in_2 = r2.domain.positions_of(&common)?;

    // each output column is read from r1 when present there, otherwise from r2
    let sources: Vec<(bool, usize)> = domain
        .iter()
        .map(|v| match r1.domain.position(v) {
            Some(p) => (true, p),
            None => (false, r2.domain.position(v).expect("variable from union")),
        })
        .collect();

    let mut index: HashMap<Vec<u32>, Vec<&Vec<u32>>> = HashMap::new();
    for row in &r2.tuples {
        let key: Vec<u32> = common_in_2.iter().map(|&p| row[p]).collect();
        index.entry(key).or_default().push(row);
    }

    let mut tuples = BTreeSet::new();
    for left in &r1.tuples {
        let key: Vec<u32> = common_in_1.iter().map(|&p| left[p]).collect();
        if let Some(matches) = index.get(&key) {
            for right in matches {
                let row = sources
                    .iter()
                    .map(|&(from_left, p)| if from_left { left[p] } else { right[p] })
                    .collect();
                tuples.insert(row);
            }
        }
    }
    Ok(Relation { universe: r1.universe.clone(), domain, tuples })
}

/// `R↓T = { x↓T : x ∈ R }`.
pub fn project_relation(r: &Relation, target: &Domain) -> Result<Relation> {
    let positions = r.domain.positions_of(target)?;
    let tuples = r.tuples.iter().map(|row| positions.iter().map(|&p| row[p]).collect()).collect();
    Ok(Relation { universe: r.universe.clone(), domain: target.clone(), tuples })
}

/// Order comparison: `Some(true)` iff `R1 ⊆ R2`; `None` when the domains differ.
pub fn relation_order(r1: &Relation, r2: &Relation) -> Option<bool> {
    (r1.domain == r2.domain).then(|| r1.tuples.is_subset(&r2.tuples))
}

impl Valuation for Relation {
    fn label(&self) -> &Domain {
        &self.domain
    }

    fn universe(&self) -> &Arc<VariableUniverse> {
        &self.universe
    }

    fn project(&self, target: &Domain) -> Result<Self> {
        project_relation(self, target)
    }

    fn combine(&self, other: &Self) -> Result<Self> {
        natural_join(self, other)
    }

    fn combine_cost(&self, other: &Self) -> u128 {
        let pairs = (self.len() as u128).saturating_mul(other.len() as u128);
        let states = self.universe.state_count(&self.domain.union(&other.domain)).unwrap_or(u128::MAX);
        pairs.min(states)
    }

    fn capabilities() -> Capabilities {
        Capabilities { has_neutral: true, has_null: true, idempotent: true, ordered: true, adjoint: true }
    }
}

impl WithNeutral for Relation {
    fn neutral(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Self> {
        Relation::full(universe, domain.clone())
    }
}

impl WithNull for Relation {
    fn null(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Self> {
        Relation::empty(universe, domain.clone())
    }

    fn is_null(&self) -> bool {
        self.tuples.is_empty()
    }
}

impl Ordered for Relation {
    fn precedes(&self, other: &Self) -> bool {
        relation_order(self, other).unwrap_or(false)
    }

    fn infimum(universe: &Arc<VariableUniverse>, domain: &Domain, items: &[Self]) -> Result<Self> {
        let mut acc = Relation::full(universe, domain.clone())?;
        for r in items {
            acc = acc.intersection(r)?;
        }
        Ok(acc)
    }
}

impl Adjoint for Relation {}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe() -> Arc<VariableUniverse> {
        Arc::new(
            VariableUniverse::from_frames([
                ("a", vec!["54-", "54+"]),
                ("e", vec!["M", "CBE"]),
                ("f", vec!["Y", "2Y"]),
            ])
            .unwrap(),
        )
    }

    fn screening(u: &Arc<VariableUniverse>) -> (Relation, Relation, Relation) {
        let r1 = Relation::from_named_rows(u, &["e", "f"], [["M", "Y"], ["CBE", "Y"], ["CBE", "2Y"]]).unwrap();
        let r2 = Relation::from_named_rows(u, &["a", "e"], [["54-", "M"], ["54+", "CBE"]]).unwrap();
        let r3 = Relation::from_named_rows(u, &["a", "f"], [["54-", "Y"], ["54+", "2Y"]]).unwrap();
        (r1, r2, r3)
    }

    #[test]
    fn screening_join_and_projection() {
        let u = universe();
        let (r1, r2, r3) = screening(&u);
        let g = natural_join(&natural_join(&r1, &r2).unwrap(), &r3).unwrap();
        let expected = Relation::from_named_rows(&u, &["e", "f", "a"], [["M", "Y", "54-"], ["CBE", "2Y", "54+"]])
            .unwrap();
        assert_eq!(g, expected);

        let back = project_relation(&g, r1.domain()).unwrap();
        let expected_back = Relation::from_named_rows(&u, &["e", "f"], [["M", "Y"], ["CBE", "2Y"]]).unwrap();
        assert_eq!(back, expected_back);
        assert_ne!(back, r1);
        assert_eq!(relation_order(&back, &r1), Some(true));
        assert_eq!(relation_order(&r1, &back), Some(false));

        let e = u.domain(["e"]).unwrap();
        let r1e = project_relation(&r1, &e).unwrap();
        assert_eq!(r1e.label_rows(), vec![vec!["M"], vec!["CBE"]]);
        assert_eq!(r1e, project_relation(&r2, &e).unwrap());
    }

    #[test]
    fn neutral_and_null_elements() {
        let u = universe();
        let (r1, _, _) = screening(&u);
        let e_sub = Relation::full(&u, u.domain(["e"]).unwrap()).unwrap();
        assert_eq!(natural_join(&r1, &e_sub).unwrap(), r1);
        let z = Relation::empty(&u, u.domain(["a"]).unwrap()).unwrap();
        let joined = natural_join(&r1, &z).unwrap();
        assert!(joined.is_empty());
        assert_eq!(*joined.domain(), u.domain(["a", "e", "f"]).unwrap());
        let empty = Relation::empty(&u, r1.domain().clone()).unwrap();
        assert!(project_relation(&empty, &u.domain(["e"]).unwrap()).unwrap().is_empty());
        assert_eq!(relation_order(&empty, &r1), Some(true));
        assert_eq!(relation_order(&r1, &r1), Some(true));
        assert_eq!(relation_order(&r1, &z), None);
    }

    #[test]
    fn projection_outside_domain_fails() {
        let u = universe();
        let (r1, _, _) = screening(&u);
        assert!(matches!(project_relation(&r1, &u.domain(["a"]).unwrap()), Err(Error::Domain(_))));
    }

    #[test]
    fn incompatible_universes_are_rejected() {
        let u = universe();
        let other = Arc::new(VariableUniverse::from_frames([("e", vec!["x", "y", "z"])]).unwrap());
        let (r1, _, _) = screening(&u);
        let r = Relation::full(&other, other.full_domain()).unwrap();
        assert!(matches!(natural_join(&r1, &r), Err(Error::Domain(_))));
    }

    #[test]
    fn insert_validates_domain() {
        let u = universe();
        let (mut r1, _, _) = screening(&u);
        let wrong = Assignment::from_labels(&u, [("a", "54-")]).unwrap();
        assert!(r1.insert(wrong).is_err());
        let fresh = Assignment::from_labels(&u, [("e", "M"), ("f", "2Y")]).unwrap();
        assert!(r1.insert(fresh).unwrap());
        assert_eq!(r1.len(), 4);
    }
}
