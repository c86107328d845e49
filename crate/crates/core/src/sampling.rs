//! Seeded generators for property checks and the acceptance suite.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contextuality::{EmpiricalModel, MeasurementScenario};
use crate::error::Result;
use crate::potential::{Potential, ProbabilityPotential};
use crate::relation::Relation;
use crate::semiring::{NonNegativeRational, Rational};
use crate::universe::{enumerate_assignments, project_assignment, Domain, VariableUniverse};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Universe with variables `v0, v1, …` and frames of size `1..=max_frame`.
pub fn random_universe<R: Rng>(rng: &mut R, vars: usize, max_frame: usize) -> Arc<VariableUniverse> {
    let frames = (0..vars).map(|i| {
        let size = rng.gen_range(1..=max_frame.max(1));
        (format!("v{i}"), (0..size).map(|k| k.to_string()).collect::<Vec<_>>())
    });
    Arc::new(VariableUniverse::from_frames(frames).expect("generated frames are valid"))
}

/// Random subset of the universe's variables with `1..=max_len` members.
pub fn random_domain<R: Rng>(rng: &mut R, universe: &VariableUniverse, max_len: usize) -> Domain {
    let mut vars: Vec<_> = universe.variables().cloned().collect();
    vars.shuffle(rng);
    let len = rng.gen_range(1..=max_len.min(vars.len()).max(1));
    Domain::new(vars.into_iter().take(len))
}

/// Keeps each tuple of `Ω_S` with probability `density`.
pub fn random_relation<R: Rng>(
    rng: &mut R,
    universe: &Arc<VariableUniverse>,
    domain: &Domain,
    density: f64,
) -> Result<Relation> {
    let tuples: Vec<_> = enumerate_assignments(domain, universe)?
        .into_iter()
        .filter(|_| rng.gen_bool(density))
        .collect();
    Relation::from_assignments(universe, domain.clone(), tuples)
}

/// Every relation over `domain` (all `2^|Ω_S|` subsets).
pub fn all_relations(universe: &Arc<VariableUniverse>, domain: &Domain) -> Result<Vec<Relation>> {
    let all = enumerate_assignments(domain, universe)?;
    assert!(all.len() < 16, "too many relations to enumerate");
    (0u32..(1 << all.len()))
        .map(|mask| {
            Relation::from_assignments(
                universe,
                domain.clone(),
                all.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, a)| a.clone()),
            )
        })
        .collect()
}

/// Random potential with entries `p/q`, `p ∈ 0..=max_numer`, `q ∈ 1..=4`.
pub fn random_rational_potential<R: Rng>(
    rng: &mut R,
    universe: &Arc<VariableUniverse>,
    domain: &Domain,
    max_numer: i64,
) -> Result<ProbabilityPotential> {
    Potential::from_fn(universe, domain.clone(), |_| {
        crate::semiring::ratio(rng.gen_range(0..=max_numer), rng.gen_range(1..=4))
    })
}

/// Random probability distribution on `domain` with denominators dividing `grid`.
pub fn random_distribution<R: Rng>(
    rng: &mut R,
    universe: &Arc<VariableUniverse>,
    domain: &Domain,
    grid: i64,
) -> Result<ProbabilityPotential> {
    let cells = universe.state_count(domain)? as usize;
    // distribute `grid` units over the cells
    let mut counts = vec![0i64; cells];
    for _ in 0..grid {
        counts[rng.gen_range(0..cells)] += 1;
    }
    let table = counts.into_iter().map(|c| crate::semiring::ratio(c, grid)).collect();
    Potential::from_table(universe, domain.clone(), table)
}

/// Random normalised no-signalling model on two contexts over
/// `2..=max_vars` binary measurements.
///
/// A distribution on the overlap is drawn first; each context then gets a
/// conditional distribution on its private measurements, so both sections
/// share the overlap marginal by construction.
pub fn random_two_context_model<R: Rng>(rng: &mut R, max_vars: usize) -> Result<EmpiricalModel> {
    let n = rng.gen_range(2..=max_vars.max(2));
    let universe = Arc::new(VariableUniverse::from_frames(
        (0..n).map(|i| (format!("m{i}"), vec!["0", "1"])),
    )?);
    let vars: Vec<_> = universe.variables().cloned().collect();
    // each measurement goes to the first context, the second, or both;
    // both contexts must keep a private measurement so neither contains the other
    let (first, second) = loop {
        let mut first = Vec::new();
        let mut second = Vec::new();
        for v in &vars {
            match rng.gen_range(0..3) {
                0 => first.push(v.clone()),
                1 => second.push(v.clone()),
                _ => {
                    first.push(v.clone());
                    second.push(v.clone());
                }
            }
        }
        let (a, b) = (Domain::new(first), Domain::new(second));
        if !a.is_subset(&b) && !b.is_subset(&a) {
            break (a, b);
        }
    };
    let overlap = first.intersection(&second);
    let grid = 4;
    let base = random_distribution(rng, &universe, &overlap, grid)?;
    let mut sections = Vec::new();
    for ctx in [&first, &second] {
        let private = ctx.difference(&overlap);
        let conditionals: Vec<ProbabilityPotential> = enumerate_assignments(&overlap, &universe)?
            .iter()
            .map(|_| random_distribution(rng, &universe, &private, grid))
            .collect::<Result<_>>()?;
        let overlap_points = enumerate_assignments(&overlap, &universe)?;
        let section = Potential::<NonNegativeRational>::from_fn(&universe, ctx.clone(), |x| {
            let o = project_assignment(x, &overlap).expect("overlap within context");
            let p = project_assignment(x, &private).expect("private within context");
            let k = overlap_points.iter().position(|y| *y == o).expect("overlap point");
            base.value(&o).expect("base on overlap") * conditionals[k].value(&p).expect("conditional")
        })?;
        sections.push(section);
    }
    let scenario = MeasurementScenario::new(universe, vec![first, second])?;
    EmpiricalModel::probabilistic(scenario, sections)
}

/// Bell-scenario model `w·PR + (1−w)·uniform`, optionally mixed with a
/// deterministic local point; no-signalling for every weight.
pub fn bell_mixture(pr_weight: Rational, local_weight: Rational, local_point: [u8; 4]) -> Result<EmpiricalModel> {
    use num_traits::One;
    let universe = Arc::new(VariableUniverse::from_frames(
        ["a1", "a2", "b1", "b2"].map(|n| (n, vec!["0", "1"])),
    )?);
    let contexts: Vec<Domain> = [["a1", "b1"], ["a1", "b2"], ["a2", "b1"], ["a2", "b2"]]
        .iter()
        .map(|c| universe.domain(c))
        .collect::<Result<_>>()?;
    let noise = Rational::one() - &pr_weight - &local_weight;
    let quarter = crate::semiring::ratio(1, 4);
    let half = crate::semiring::ratio(1, 2);
    let [la1, la2, lb1, lb2] = local_point;
    let mut sections = Vec::new();
    for (k, ctx) in contexts.iter().enumerate() {
        let (i, j) = (k / 2, k % 2);
        let section = Potential::<NonNegativeRational>::from_fn(&universe, ctx.clone(), |x| {
            let a = x.indices()[0] as u8;
            let b = x.indices()[1] as u8;
            let pr = if (a ^ b) == (i & j) as u8 { half.clone() } else { Rational::default() };
            let la = if i == 0 { la1 } else { la2 };
            let lb = if j == 0 { lb1 } else { lb2 };
            let local = if a == la && b == lb { Rational::one() } else { Rational::default() };
            &pr_weight * pr + &noise * &quarter + &local_weight * local
        })?;
        sections.push(section);
    }
    EmpiricalModel::probabilistic(MeasurementScenario::new(universe, contexts)?, sections)
}
