//! Variables, frames, domains and assignments.
//!
//! A [`VariableUniverse`] fixes the frame of every variable. Domains are
//! kept sorted by variable name, and assignments store frame indices
//! aligned with that order, so the lexicographic order of assignments
//! coincides with the enumeration order of [`enumerate_assignments`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Name of a variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(Arc<str>);

impl VariableId {
    pub fn new(name: impl AsRef<str>) -> Result<Self> {
        let name = name.as_ref();
        if name.is_empty() {
            return Err(Error::Invalid("variable names must be nonempty".into()));
        }
        Ok(VariableId(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The ordered, finite set of values a variable can take.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    values: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::Invalid("frames must contain at least one value".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::Invalid(format!("duplicate frame value {v:?}")));
            }
        }
        Ok(Frame { values })
    }

    /// The frame `{0, 1}`.
    pub fn boolean() -> Self {
        Frame { values: vec!["0".into(), "1".into()] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn label(&self, index: u32) -> &str {
        &self.values[index as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.values.iter().position(|v| v == label).map(|i| i as u32)
    }
}

/// Frames of every variable that may appear in a valuation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VariableUniverse {
    frames: BTreeMap<VariableId, Frame>,
}

impl VariableUniverse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a universe from `(name, frame values)` pairs.
    pub fn from_frames<I, N, F, S>(frames: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, F)>,
        N: AsRef<str>,
        F: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut universe = Self::new();
        for (name, values) in frames {
            universe.insert(VariableId::new(name)?, Frame::new(values)?)?;
        }
        Ok(universe)
    }

    pub fn insert(&mut self, var: VariableId, frame: Frame) -> Result<()> {
        if self.frames.contains_key(&var) {
            return Err(Error::Invalid(format!("variable {var} declared twice")));
        }
        self.frames.insert(var, frame);
        Ok(())
    }

    pub fn frame(&self, var: &VariableId) -> Result<&Frame> {
        self.frames
            .get(var)
            .ok_or_else(|| Error::Domain(format!("unknown variable {var}")))
    }

    pub fn contains(&self, var: &VariableId) -> bool {
        self.frames.contains_key(var)
    }

    pub fn variables(&self) -> impl Iterator<Item = &VariableId> {
        self.frames.keys()
    }

    pub fn var(&self, name: &str) -> Result<VariableId> {
        let id = VariableId::new(name)?;
        self.frame(&id)?;
        Ok(id)
    }

    /// Domain made of the named variables, all of which must be declared.
    pub fn domain<I, S>(&self, names: I) -> Result<Domain>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let vars = names
            .into_iter()
            .map(|n| self.var(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Domain::new(vars))
    }

    /// Every declared variable.
    pub fn full_domain(&self) -> Domain {
        Domain::new(self.frames.keys().cloned())
    }

    pub fn check_domain(&self, domain: &Domain) -> Result<()> {
        let unknown: Vec<_> = domain.iter().filter(|v| !self.contains(v)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Domain(format!("unknown variables {unknown:?}")))
        }
    }

    /// Frame sizes of the variables of `domain`, in domain order.
    pub fn shape(&self, domain: &Domain) -> Result<Vec<usize>> {
        domain.iter().map(|v| self.frame(v).map(Frame::len)).collect()
    }

    /// `|Ω_S|`, saturating at `u128::MAX`.
    pub fn state_count(&self, domain: &Domain) -> Result<u128> {
        Ok(self
            .shape(domain)?
            .into_iter()
            .fold(1u128, |acc, n| acc.saturating_mul(n as u128)))
    }
}

/// A finite set of variables, kept sorted by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Domain {
    vars: Vec<VariableId>,
}

impl Domain {
    pub fn new(vars: impl IntoIterator<Item = VariableId>) -> Self {
        let mut vars: Vec<_> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        Domain { vars }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VariableId> {
        self.vars.iter()
    }

    pub fn vars(&self) -> &[VariableId] {
        &self.vars
    }

    pub fn contains(&self, var: &VariableId) -> bool {
        self.vars.binary_search(var).is_ok()
    }

    pub fn position(&self, var: &VariableId) -> Option<usize> {
        self.vars.binary_search(var).ok()
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.vars.iter().all(|v| other.contains(v))
    }

    pub fn union(&self, other: &Domain) -> Domain {
        Domain::new(self.vars.iter().chain(other.vars.iter()).cloned())
    }

    pub fn intersection(&self, other: &Domain) -> Domain {
        Domain { vars: self.vars.iter().filter(|v| other.contains(v)).cloned().collect() }
    }

    pub fn difference(&self, other: &Domain) -> Domain {
        Domain { vars: self.vars.iter().filter(|v| !other.contains(v)).cloned().collect() }
    }

    pub fn without(&self, var: &VariableId) -> Domain {
        Domain { vars: self.vars.iter().filter(|v| *v != var).cloned().collect() }
    }

    /// Positions of `sub`'s variables inside `self`; errors name what is missing.
    pub fn positions_of(&self, sub: &Domain) -> Result<Vec<usize>> {
        let mut missing = Vec::new();
        let mut positions = Vec::with_capacity(sub.len());
        for v in sub.iter() {
            match self.position(v) {
                Some(p) => positions.push(p),
                None => missing.push(v.clone()),
            }
        }
        if missing.is_empty() {
            Ok(positions)
        } else {
            Err(Error::Domain(format!("variables {missing:?} are not in domain {self:?}")))
        }
    }

    /// All subsets, smallest first.
    pub fn subsets(&self) -> Vec<Domain> {
        let n = self.vars.len();
        assert!(n < 32, "too many variables to enumerate subsets");
        let mut out: Vec<Domain> = (0u32..(1 << n))
            .map(|mask| Domain {
                vars: (0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.vars[i].clone()).collect(),
            })
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.vars.iter()).finish()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.vars.iter().map(VariableId::as_str).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl<'a> IntoIterator for &'a Domain {
    type Item = &'a VariableId;
    type IntoIter = std::slice::Iter<'a, VariableId>;

    fn into_iter(self) -> Self::IntoIter {
        self.vars.iter()
    }
}

/// A tuple over a domain: one frame index per variable, in domain order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    domain: Domain,
    values: Vec<u32>,
}

impl Assignment {
    /// The unique assignment over the empty domain.
    pub fn empty() -> Self {
        Assignment { domain: Domain::empty(), values: Vec::new() }
    }

    /// Builds an assignment from frame indices, validated against the universe.
    pub fn from_indices(universe: &VariableUniverse, domain: Domain, values: Vec<u32>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Argument(format!(
                "expected {} values for {domain}, got {}",
                domain.len(),
                values.len()
            )));
        }
        for (var, &value) in domain.iter().zip(&values) {
            if value as usize >= universe.frame(var)?.len() {
                return Err(Error::Argument(format!("value index {value} out of range for {var}")));
            }
        }
        Ok(Assignment { domain, values })
    }

    /// Builds an assignment from `(variable, label)` pairs.
    pub fn from_labels<I, N, L>(universe: &VariableUniverse, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, L)>,
        N: AsRef<str>,
        L: AsRef<str>,
    {
        let mut entries = Vec::new();
        for (name, label) in pairs {
            let var = universe.var(name.as_ref())?;
            let frame = universe.frame(&var)?;
            let idx = frame.index_of(label.as_ref()).ok_or_else(|| {
                Error::Argument(format!("{:?} is not a value of {var}", label.as_ref()))
            })?;
            entries.push((var, idx));
        }
        entries.sort();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Argument(format!("variable {} assigned twice", w[0].0)));
            }
        }
        let (vars, values): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        Ok(Assignment { domain: Domain { vars }, values })
    }

    /// Assignment over a domain with labels given in domain (name) order.
    pub fn from_ordered_labels<S: AsRef<str>>(
        universe: &VariableUniverse,
        domain: &Domain,
        labels: &[S],
    ) -> Result<Self> {
        if labels.len() != domain.len() {
            return Err(Error::Argument(format!(
                "expected {} labels for {domain}, got {}",
                domain.len(),
                labels.len()
            )));
        }
        Self::from_labels(universe, domain.iter().map(|v| v.as_str()).zip(labels.iter().map(AsRef::as_ref)))
    }

    pub(crate) fn from_raw(domain: Domain, values: Vec<u32>) -> Self {
        debug_assert_eq!(domain.len(), values.len());
        Assignment { domain, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn indices(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, var: &VariableId) -> Option<u32> {
        self.domain.position(var).map(|p| self.values[p])
    }

    pub fn labels<'u>(&self, universe: &'u VariableUniverse) -> Vec<&'u str> {
        self.domain
            .iter()
            .zip(&self.values)
            .map(|(v, &i)| universe.frame(v).expect("assignment variable in universe").label(i))
            .collect()
    }

    /// Labels joined by commas, in domain order.
    pub fn key(&self, universe: &VariableUniverse) -> String {
        self.labels(universe).join(",")
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, (v, x)) in self.domain.iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}={x}")?;
        }
        write!(f, "⟩")
    }
}

/// Cartesian projection `x↓T`.
pub fn project_assignment(x: &Assignment, target: &Domain) -> Result<Assignment> {
    let positions = x.domain.positions_of(target)?;
    Ok(Assignment {
        domain: target.clone(),
        values: positions.into_iter().map(|p| x.values[p]).collect(),
    })
}

/// Every assignment over `domain`, first variable most significant.
pub fn enumerate_assignments(domain: &Domain, universe: &VariableUniverse) -> Result<Vec<Assignment>> {
    let shape = universe.shape(domain)?;
    Ok(MixedRadix::new(&shape)
        .map(|values| Assignment { domain: domain.clone(), values })
        .collect())
}

/// Iterator over all index vectors of a mixed-radix shape in lexicographic order.
#[derive(Debug, Clone)]
pub struct MixedRadix {
    shape: Vec<usize>,
    next: Option<Vec<u32>>,
}

impl MixedRadix {
    pub fn new(shape: &[usize]) -> Self {
        let next = if shape.contains(&0) { None } else { Some(vec![0; shape.len()]) };
        MixedRadix { shape: shape.to_vec(), next }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if (succ[i] as usize) < self.shape[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// Row-major strides for `shape` (last variable fastest).
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}
