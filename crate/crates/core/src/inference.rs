//! Inference problems `(φ1 ⊗ … ⊗ φn)↓D`.
//!
//! [`solve_naive`] combines everything and projects once. [`solve_fusion`]
//! eliminates the non-query variables one at a time: the valuations that
//! mention the variable are combined and the variable is projected away,
//! which the combination axiom makes equal to the naive answer.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::Valuation;
use crate::error::{Error, Result};
use crate::universe::{Domain, VariableId};

/// Default bound on the cells of any intermediate valuation.
pub const DEFAULT_CELL_LIMIT: u128 = 10_000_000;

/// Algorithm used by [`solve`] and by the analyses built on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Naive,
    /// Variable elimination in min-fill order.
    #[default]
    Fusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceConfig {
    pub cell_limit: u128,
    pub method: Method,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig { cell_limit: DEFAULT_CELL_LIMIT, method: Method::Fusion }
    }
}

impl InferenceConfig {
    pub fn with_cell_limit(cell_limit: u128) -> Self {
        InferenceConfig { cell_limit, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceProblem<V> {
    knowledgebase: Vec<V>,
    query: Domain,
}

impl<V: Valuation> InferenceProblem<V> {
    pub fn new(knowledgebase: Vec<V>, query: Domain) -> Result<Self> {
        if knowledgebase.is_empty() {
            return Err(Error::Argument("an inference problem needs at least one valuation".into()));
        }
        let joint = joint_domain(&knowledgebase);
        if !query.is_subset(&joint) {
            return Err(Error::Domain(format!(
                "query variables {:?} are not in the joint domain {joint}",
                query.difference(&joint)
            )));
        }
        Ok(InferenceProblem { knowledgebase, query })
    }

    pub fn knowledgebase(&self) -> &[V] {
        &self.knowledgebase
    }

    pub fn query(&self) -> &Domain {
        &self.query
    }

    /// `∪ d(φi)`.
    pub fn joint_domain(&self) -> Domain {
        joint_domain(&self.knowledgebase)
    }
}

pub fn joint_domain<V: Valuation>(kb: &[V]) -> Domain {
    kb.iter().fold(Domain::empty(), |acc, v| acc.union(v.label()))
}

/// A sequence of variables to eliminate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder(Vec<VariableId>);

impl EliminationOrder {
    pub fn new(vars: Vec<VariableId>) -> Self {
        EliminationOrder(vars)
    }

    pub fn vars(&self) -> &[VariableId] {
        &self.0
    }

    /// Checks that this is a permutation of `joint \ query`.
    pub fn validate(&self, joint: &Domain, query: &Domain) -> Result<()> {
        let expected = joint.difference(query);
        let given: BTreeSet<&VariableId> = self.0.iter().collect();
        if given.len() != self.0.len() {
            return Err(Error::Argument("elimination order repeats a variable".into()));
        }
        if given.len() != expected.len() || !expected.iter().all(|v| given.contains(v)) {
            return Err(Error::Argument(format!(
                "elimination order {:?} is not a permutation of {expected}",
                self.0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    MinDegree,
    MinFill,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderChoice {
    Given(EliminationOrder),
    Heuristic(Heuristic),
}

impl From<Heuristic> for OrderChoice {
    fn from(h: Heuristic) -> Self {
        OrderChoice::Heuristic(h)
    }
}

impl From<EliminationOrder> for OrderChoice {
    fn from(o: EliminationOrder) -> Self {
        OrderChoice::Given(o)
    }
}

fn checked_combine<V: Valuation>(a: &V, b: &V, config: &InferenceConfig) -> Result<V> {
    let cost = a.combine_cost(b);
    if cost > config.cell_limit {
        return Err(Error::Resource(format!(
            "combining over {} would materialise {cost} cells (limit {})",
            a.label().union(b.label()),
            config.cell_limit
        )));
    }
    a.combine(b)
}

fn combine_all<V: Valuation>(items: &[V], config: &InferenceConfig) -> Result<V> {
    let (first, rest) = items
        .split_first()
        .ok_or_else(|| Error::Argument("nothing to combine".into()))?;
    rest.iter().try_fold(first.clone(), |acc, v| checked_combine(&acc, v, config))
}

/// Joint combination followed by one projection.
pub fn solve_naive<V: Valuation>(problem: &InferenceProblem<V>, config: &InferenceConfig) -> Result<V> {
    combine_all(&problem.knowledgebase, config)?.project(&problem.query)
}

/// Solves with the configured [`Method`].
pub fn solve<V: Valuation>(problem: &InferenceProblem<V>, config: &InferenceConfig) -> Result<V> {
    match config.method {
        Method::Naive => solve_naive(problem, config),
        Method::Fusion => solve_fusion(problem, &OrderChoice::Heuristic(Heuristic::MinFill), config),
    }
}

/// One elimination step, recorded for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionStep {
    pub variable: VariableId,
    /// Domains of the valuations combined in this step.
    pub inputs: Vec<Domain>,
    /// Domain of their combination, before the variable is removed.
    pub combined: Domain,
}

/// Variable elimination; equals [`solve_naive`] for every valid order.
pub fn solve_fusion<V: Valuation>(
    problem: &InferenceProblem<V>,
    order: &OrderChoice,
    config: &InferenceConfig,
) -> Result<V> {
    solve_fusion_traced(problem, order, config).map(|(v, _)| v)
}

/// [`solve_fusion`] that also returns the elimination steps.
pub fn solve_fusion_traced<V: Valuation>(
    problem: &InferenceProblem<V>,
    order: &OrderChoice,
    config: &InferenceConfig,
) -> Result<(V, Vec<FusionStep>)> {
    let order = match order {
        OrderChoice::Given(o) => {
            o.validate(&problem.joint_domain(), &problem.query)?;
            o.clone()
        }
        OrderChoice::Heuristic(h) => heuristic_order(&domains_of(&problem.knowledgebase), &problem.query, *h),
    };

    let mut pool: Vec<V> = problem.knowledgebase.clone();
    let mut steps = Vec::with_capacity(order.vars().len());
    for var in order.vars() {
        let (bucket, rest): (Vec<V>, Vec<V>) = pool.into_iter().partition(|v| v.label().contains(var));
        pool = rest;
        let combined = combine_all(&bucket, config)?;
        steps.push(FusionStep {
            variable: var.clone(),
            inputs: bucket.iter().map(|v| v.label().clone()).collect(),
            combined: combined.label().clone(),
        });
        pool.push(combined.marginalize(var)?);
    }
    let result = combine_all(&pool, config)?.project(&problem.query)?;
    Ok((result, steps))
}

pub fn domains_of<V: Valuation>(kb: &[V]) -> Vec<Domain> {
    kb.iter().map(|v| v.label().clone()).collect()
}

/// Interaction graph: variables adjacent when they share a domain.
fn interaction_graph(domains: &[Domain]) -> BTreeMap<VariableId, BTreeSet<VariableId>> {
    let mut graph: BTreeMap<VariableId, BTreeSet<VariableId>> = BTreeMap::new();
    for d in domains {
        for v in d.iter() {
            let entry = graph.entry(v.clone()).or_default();
            entry.extend(d.iter().filter(|w| *w != v).cloned());
        }
    }
    graph
}

fn fill_in(graph: &BTreeMap<VariableId, BTreeSet<VariableId>>, var: &VariableId) -> usize {
    let neighbours: Vec<&VariableId> = graph[var].iter().collect();
    let mut missing = 0;
    for (i, a) in neighbours.iter().enumerate() {
        for b in &neighbours[i + 1..] {
            if !graph[*a].contains(*b) {
                missing += 1;
            }
        }
    }
    missing
}

fn eliminate_vertex(graph: &mut BTreeMap<VariableId, BTreeSet<VariableId>>, var: &VariableId) {
    let neighbours = graph.remove(var).unwrap_or_default();
    for n in &neighbours {
        let adj = graph.get_mut(n).expect("neighbour present");
        adj.remove(var);
        adj.extend(neighbours.iter().filter(|m| *m != n).cloned());
    }
}

/// Greedy elimination order over `∪ domains \ query`; ties go to the
/// smallest variable name.
pub fn heuristic_order(domains: &[Domain], query: &Domain, kind: Heuristic) -> EliminationOrder {
    let mut graph = interaction_graph(domains);
    let mut remaining: BTreeSet<VariableId> = graph.keys().filter(|v| !query.contains(v)).cloned().collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let score = |v: &VariableId| match kind {
            Heuristic::MinDegree => graph[v].len(),
            Heuristic::MinFill => fill_in(&graph, v),
        };
        // BTreeSet iteration is name-ordered, so min_by_key keeps the first minimum
        let next = remaining.iter().min_by_key(|v| score(v)).cloned().expect("nonempty");
        remaining.remove(&next);
        eliminate_vertex(&mut graph, &next);
        order.push(next);
    }
    EliminationOrder(order)
}

/// Largest clique (variable plus its neighbours) created while eliminating
/// `order` from the interaction graph of `domains`.
pub fn induced_clique_size(domains: &[Domain], order: &EliminationOrder) -> usize {
    let mut graph = interaction_graph(domains);
    let mut widest = 0;
    for v in order.vars() {
        if let Some(adj) = graph.get(v) {
            widest = widest.max(adj.len() + 1);
            eliminate_vertex(&mut graph, v);
        }
    }
    widest
}
