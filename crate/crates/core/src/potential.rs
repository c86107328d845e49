//! Semiring potentials: total maps `Ω_S → R`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{check_same_universe, Capabilities, Valuation, WithNeutral, WithNull};
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::semiring::{Boolean, NonNegativeRational, Semiring};
use crate::universe::{strides, Assignment, Domain, MixedRadix, VariableUniverse};

/// A semiring valuation stored as a dense table in enumeration order.
#[derive(Clone)]
pub struct Potential<S: Semiring> {
    universe: Arc<VariableUniverse>,
    domain: Domain,
    shape: Vec<usize>,
    table: Vec<S::Value>,
}

pub type ProbabilityPotential = Potential<NonNegativeRational>;
pub type BooleanPotential = Potential<Boolean>;

impl<S: Semiring> PartialEq for Potential<S> {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.table == other.table
    }
}

impl<S: Semiring> Potential<S> {
    /// Constant potential over `domain`.
    pub fn constant(universe: &Arc<VariableUniverse>, domain: Domain, value: S::Value) -> Result<Self> {
        if !S::contains(&value) {
            return Err(Error::Invalid(format!("{value:?} is outside the semiring carrier")));
        }
        let shape = universe.shape(&domain)?;
        let cells = shape.iter().product();
        Ok(Potential { universe: universe.clone(), domain, shape, table: vec![value; cells] })
    }

    /// Potential from a full table given in enumeration order.
    pub fn from_table(universe: &Arc<VariableUniverse>, domain: Domain, table: Vec<S::Value>) -> Result<Self> {
        let shape = universe.shape(&domain)?;
        let cells: usize = shape.iter().product();
        if table.len() != cells {
            return Err(Error::Invalid(format!(
                "table over {domain} needs {cells} entries, got {}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|v| !S::contains(v)) {
            return Err(Error::Invalid(format!("{bad:?} is outside the semiring carrier")));
        }
        Ok(Potential { universe: universe.clone(), domain, shape, table })
    }

    /// Potential built by evaluating `f` on every assignment.
    pub fn from_fn(
        universe: &Arc<VariableUniverse>,
        domain: Domain,
        mut f: impl FnMut(&Assignment) -> S::Value,
    ) -> Result<Self> {
        let shape = universe.shape(&domain)?;
        let table = MixedRadix::new(&shape)
            .map(|idx| f(&Assignment::from_raw(domain.clone(), idx)))
            .collect();
        Self::from_table(universe, domain, table)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn table(&self) -> &[S::Value] {
        &self.table
    }

    pub fn descriptor(&self) -> crate::semiring::SemiringDescriptor {
        S::DESCRIPTOR
    }

    fn offset(&self, indices: &[u32]) -> usize {
        let st = strides(&self.shape);
        indices.iter().zip(&st).map(|(&i, &s)| i as usize * s).sum()
    }

    /// `φ(x)`; `x` must be over exactly `d(φ)`.
    pub fn value(&self, x: &Assignment) -> Result<&S::Value> {
        if *x.domain() != self.domain {
            return Err(Error::Domain(format!("assignment over {} evaluated on {}", x.domain(), self.domain)));
        }
        Ok(&self.table[self.offset(x.indices())])
    }

    /// Sets `φ(x)`.
    pub fn set(&mut self, x: &Assignment, value: S::Value) -> Result<()> {
        if !S::contains(&value) {
            return Err(Error::Invalid(format!("{value:?} is outside the semiring carrier")));
        }
        if *x.domain() != self.domain {
            return Err(Error::Domain(format!("assignment over {} set on {}", x.domain(), self.domain)));
        }
        let off = self.offset(x.indices());
        self.table[off] = value;
        Ok(())
    }

    /// `(assignment, value)` pairs in enumeration order.
    pub fn entries(&self) -> impl Iterator<Item = (Assignment, &S::Value)> + '_ {
        MixedRadix::new(&self.shape)
            .zip(self.table.iter())
            .map(|(idx, v)| (Assignment::from_raw(self.domain.clone(), idx), v))
    }

    /// Sum of every entry, i.e. the value of `φ↓∅`.
    pub fn total(&self) -> S::Value {
        self.table.iter().fold(S::zero(), |acc, v| S::add(&acc, v))
    }

    /// The set of assignments with nonzero value.
    pub fn support(&self) -> Relation {
        let rows = self
            .entries()
            .filter(|(_, v)| !S::is_zero(v))
            .map(|(a, _)| a)
            .collect::<Vec<_>>();
        Relation::from_assignments(&self.universe, self.domain.clone(), rows).expect("support tuples fit domain")
    }
}

impl<S: Semiring> fmt::Debug for Potential<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential{} ", self.domain)?;
        f.debug_map()
            .entries(self.entries().map(|(a, v)| (a.key(&self.universe), v.clone())))
            .finish()
    }
}

/// Offsets of each union-domain coordinate inside an operand, zero for absent variables.
fn embedded_strides(union: &Domain, operand: &Domain, operand_shape: &[usize]) -> Vec<usize> {
    let st = strides(operand_shape);
    union.iter().map(|v| operand.position(v).map_or(0, |p| st[p])).collect()
}

/// `(φ ⊗ ψ)(x) = φ(x↓d(φ)) · ψ(x↓d(ψ))`.
pub fn combine_potentials<S: Semiring>(phi: &Potential<S>, psi: &Potential<S>) -> Result<Potential<S>> {
    check_same_universe(&phi.universe, &psi.universe)?;
    let domain = phi.domain.union(&psi.domain);
    let shape = phi.universe.shape(&domain)?;
    let sp = embedded_strides(&domain, &phi.domain, &phi.shape);
    let sq = embedded_strides(&domain, &psi.domain, &psi.shape);

    let cells: usize = shape.iter().product();
    let mut table = Vec::with_capacity(cells);
    let mut counter = vec![0usize; shape.len()];
    let (mut op, mut oq) = (0usize, 0usize);
    for _ in 0..cells {
        table.push(S::mul(&phi.table[op], &psi.table[oq]));
        // odometer increment, last coordinate fastest
        for i in (0..shape.len()).rev() {
            counter[i] += 1;
            op += sp[i];
            oq += sq[i];
            if counter[i] < shape[i] {
                break;
            }
            op -= sp[i] * shape[i];
            oq -= sq[i] * shape[i];
            counter[i] = 0;
        }
    }
    Ok(Potential { universe: phi.universe.clone(), domain, shape, table })
}

/// `φ↓T(x) = Σ_{y↓T = x} φ(y)`.
pub fn project_potential<S: Semiring>(phi: &Potential<S>, target: &Domain) -> Result<Potential<S>> {
    phi.domain.positions_of(target)?;
    let shape = phi.universe.shape(target)?;
    let st = embedded_strides(&phi.domain, target, &shape);
    let cells: usize = shape.iter().product();
    let mut table = vec![S::zero(); cells];
    let mut counter = vec![0usize; phi.shape.len()];
    let mut ot = 0usize;
    for value in &phi.table {
        table[ot] = S::add(&table[ot], value);
        for i in (0..phi.shape.len()).rev() {
            counter[i] += 1;
            ot += st[i];
            if counter[i] < phi.shape[i] {
                break;
            }
            ot -= st[i] * phi.shape[i];
            counter[i] = 0;
        }
    }
    Ok(Potential { universe: phi.universe.clone(), domain: target.clone(), shape, table })
}

/// Characteristic function of the support of `φ`.
pub fn possibilistic_collapse<S: Semiring>(phi: &Potential<S>) -> BooleanPotential {
    Potential {
        universe: phi.universe.clone(),
        domain: phi.domain.clone(),
        shape: phi.shape.clone(),
        table: phi.table.iter().map(|v| !S::is_zero(v)).collect(),
    }
}

impl BooleanPotential {
    /// Boolean potential whose support is `r`.
    pub fn from_relation(r: &Relation) -> Self {
        Potential::from_fn(r.universe(), r.domain().clone(), |a| r.contains(a)).expect("relation domain is valid")
    }
}

impl<S: Semiring> Valuation for Potential<S> {
    fn label(&self) -> &Domain {
        &self.domain
    }

    fn universe(&self) -> &Arc<VariableUniverse> {
        &self.universe
    }

    fn project(&self, target: &Domain) -> Result<Self> {
        project_potential(self, target)
    }

    fn combine(&self, other: &Self) -> Result<Self> {
        combine_potentials(self, other)
    }

    fn combine_cost(&self, other: &Self) -> u128 {
        self.universe.state_count(&self.domain.union(&other.domain)).unwrap_or(u128::MAX)
    }

    fn capabilities() -> Capabilities {
        let idempotent = S::DESCRIPTOR.additively_idempotent;
        Capabilities { has_neutral: true, has_null: true, idempotent, ordered: false, adjoint: false }
    }
}

impl<S: Semiring> WithNeutral for Potential<S> {
    fn neutral(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Self> {
        Potential::constant(universe, domain.clone(), S::one())
    }
}

impl<S: Semiring> WithNull for Potential<S> {
    fn null(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Self> {
        Potential::constant(universe, domain.clone(), S::zero())
    }

    fn is_null(&self) -> bool {
        self.table.iter().all(S::is_zero)
    }
}
