//! Built-in models and knowledgebases.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::contextuality::{EmpiricalModel, MeasurementScenario};
use crate::csp::{csp_to_knowledgebase, liar_cycle, Constraint, CspInstance};
use crate::error::{Error, Result};
use crate::potential::{BooleanPotential, Potential, ProbabilityPotential};
use crate::relation::Relation;
use crate::semiring::{ratio, Rational};
use crate::universe::{Domain, VariableUniverse};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinName {
    Bell,
    Hardy,
    Ghz,
    PrBox,
    Liar(usize),
    LiarScenario(usize),
    Malawi,
    Screening,
}

/// Listing entry: the name pattern and a one-line provenance.
#[derive(Debug, Clone, Copy)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub description: &'static str,
}

pub const BUILTINS: [BuiltinInfo; 8] = [
    BuiltinInfo {
        name: "bell",
        description: "Bell's empirical model, 2 parties x 2 binary measurements, probabilities as tabulated",
    },
    BuiltinInfo {
        name: "hardy",
        description: "Hardy's model as a possibilistic support table (standard construction)",
    },
    BuiltinInfo {
        name: "ghz",
        description: "GHZ model, 3 parties measuring X or Y, parity-constrained uniform distributions (standard construction)",
    },
    BuiltinInfo {
        name: "pr-box",
        description: "Popescu-Rohrlich box, outcomes satisfy a xor b = (i=2 and j=2) (standard construction)",
    },
    BuiltinInfo {
        name: "liar(n)",
        description: "liar cycle of n statements as a knowledgebase of Boolean relations",
    },
    BuiltinInfo {
        name: "liar-scenario(n)",
        description: "liar cycle of n >= 3 statements read as a possibilistic measurement scenario",
    },
    BuiltinInfo {
        name: "malawi",
        description: "3-colouring the map around Malawi as a CSP knowledgebase (8 adjacency constraints)",
    },
    BuiltinInfo {
        name: "screening",
        description: "three breast cancer screening guidelines as a relational database",
    },
];

impl FromStr for BuiltinName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parameter = |prefix: &str| -> Option<Result<usize>> {
            let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(
                inner
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Argument(format!("invalid cycle length in {s:?}"))),
            )
        };
        match s {
            "bell" => return Ok(BuiltinName::Bell),
            "hardy" => return Ok(BuiltinName::Hardy),
            "ghz" => return Ok(BuiltinName::Ghz),
            "pr-box" => return Ok(BuiltinName::PrBox),
            "malawi" => return Ok(BuiltinName::Malawi),
            "screening" => return Ok(BuiltinName::Screening),
            _ => {}
        }
        if let Some(n) = parameter("liar-scenario") {
            return Ok(BuiltinName::LiarScenario(n?));
        }
        if let Some(n) = parameter("liar") {
            return Ok(BuiltinName::Liar(n?));
        }
        let known: Vec<_> = BUILTINS.iter().map(|b| b.name).collect();
        Err(Error::Argument(format!("unknown built-in {s:?}; known: {}", known.join(", "))))
    }
}

impl fmt::Display for BuiltinName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinName::Bell => f.write_str("bell"),
            BuiltinName::Hardy => f.write_str("hardy"),
            BuiltinName::Ghz => f.write_str("ghz"),
            BuiltinName::PrBox => f.write_str("pr-box"),
            BuiltinName::Liar(n) => write!(f, "liar({n})"),
            BuiltinName::LiarScenario(n) => write!(f, "liar-scenario({n})"),
            BuiltinName::Malawi => f.write_str("malawi"),
            BuiltinName::Screening => f.write_str("screening"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Builtin {
    Model(EmpiricalModel),
    Knowledgebase(Vec<Relation>),
}

/// Looks up a built-in by name, e.g. `"bell"` or `"liar(4)"`.
pub fn builtin(name: &str) -> Result<Builtin> {
    Ok(match name.parse::<BuiltinName>()? {
        BuiltinName::Bell => Builtin::Model(bell()),
        BuiltinName::Hardy => Builtin::Model(hardy()),
        BuiltinName::Ghz => Builtin::Model(ghz()),
        BuiltinName::PrBox => Builtin::Model(pr_box()),
        BuiltinName::Liar(n) => Builtin::Knowledgebase(liar(n)?),
        BuiltinName::LiarScenario(n) => Builtin::Model(liar_scenario(n)?),
        BuiltinName::Malawi => Builtin::Knowledgebase(malawi()),
        BuiltinName::Screening => Builtin::Knowledgebase(screening()),
    })
}

fn binary_universe(names: &[&str]) -> Arc<VariableUniverse> {
    Arc::new(
        VariableUniverse::from_frames(names.iter().map(|n| (*n, ["0", "1"])))
            .expect("built-in frames are valid"),
    )
}

fn contexts(universe: &VariableUniverse, lists: &[&[&str]]) -> Vec<Domain> {
    lists
        .iter()
        .map(|c| universe.domain(c.iter().copied()).expect("built-in contexts are declared"))
        .collect()
}

/// Bell-type scenario `{a_i, b_j}` with sections given as functions of
/// `(i, j, o_a, o_b)`, indices starting at 0.
fn bell_type<F>(section: F) -> Result<Vec<ProbabilityPotential>>
where
    F: Fn(usize, usize, u32, u32) -> Rational,
{
    let universe = bell_universe();
    let mut out = Vec::with_capacity(4);
    for (k, ctx) in bell_contexts(&universe).into_iter().enumerate() {
        let (i, j) = (k / 2, k % 2);
        // domains are name-ordered, so index 0 is Alice's outcome
        out.push(Potential::from_fn(&universe, ctx, |x| section(i, j, x.indices()[0], x.indices()[1]))?);
    }
    Ok(out)
}

fn bell_universe() -> Arc<VariableUniverse> {
    binary_universe(&["a1", "a2", "b1", "b2"])
}

fn bell_contexts(universe: &VariableUniverse) -> Vec<Domain> {
    contexts(universe, &[&["a1", "b1"], &["a1", "b2"], &["a2", "b1"], &["a2", "b2"]])
}

/// Bell's model; rows `(a_i, b_j)`, columns `(o_A, o_B) = (0,0), (1,0), (0,1), (1,1)`.
pub const BELL_TABLE: [[(i64, i64); 4]; 4] = [
    [(1, 2), (0, 1), (0, 1), (1, 2)],
    [(3, 8), (1, 8), (1, 8), (3, 8)],
    [(3, 8), (1, 8), (1, 8), (3, 8)],
    [(1, 8), (3, 8), (3, 8), (1, 8)],
];

pub fn bell() -> EmpiricalModel {
    let sections = bell_type(|i, j, a, b| {
        let column = (a + 2 * b) as usize;
        let (p, q) = BELL_TABLE[2 * i + j][column];
        ratio(p, q)
    })
    .expect("bell sections are well formed");
    let universe = bell_universe();
    let scenario = MeasurementScenario::new(universe.clone(), bell_contexts(&universe)).expect("bell scenario");
    EmpiricalModel::probabilistic(scenario, sections).expect("bell rows sum to 1")
}

/// PR box: each context supports the two outcomes with `a ⊕ b = i·j`, at 1/2 each.
pub fn pr_box() -> EmpiricalModel {
    let sections = bell_type(|i, j, a, b| {
        if (a ^ b) as usize == (i & j) {
            ratio(1, 2)
        } else {
            ratio(0, 1)
        }
    })
    .expect("pr-box sections are well formed");
    let universe = bell_universe();
    let scenario = MeasurementScenario::new(universe.clone(), bell_contexts(&universe)).expect("pr-box scenario");
    EmpiricalModel::probabilistic(scenario, sections).expect("pr-box rows sum to 1")
}

/// Hardy's support table: `(a1,b1)` full, `(0,0)` impossible at `(a1,b2)` and
/// `(a2,b1)`, `(1,1)` impossible at `(a2,b2)`.
pub fn hardy() -> EmpiricalModel {
    let universe = bell_universe();
    let ctxs = bell_contexts(&universe);
    let forbidden: [Option<(u32, u32)>; 4] = [None, Some((0, 0)), Some((0, 0)), Some((1, 1))];
    let sections: Vec<BooleanPotential> = ctxs
        .iter()
        .zip(forbidden)
        .map(|(ctx, f)| {
            Potential::from_fn(&universe, ctx.clone(), |x| Some((x.indices()[0], x.indices()[1])) != f)
                .expect("hardy sections are well formed")
        })
        .collect();
    let scenario = MeasurementScenario::new(universe, ctxs).expect("hardy scenario");
    EmpiricalModel::possibilistic(scenario, sections).expect("hardy supports are nonempty")
}

/// GHZ with measurements `a1,a2,b1,b2,c1,c2` (1 = X, 2 = Y).
///
/// XXX has even outcome parity and XYY, YXY, YYX odd parity, each supported
/// outcome at 1/4; the remaining four contexts are uniform.
pub fn ghz() -> EmpiricalModel {
    let universe = binary_universe(&["a1", "a2", "b1", "b2", "c1", "c2"]);
    let mut ctxs = Vec::with_capacity(8);
    let mut sections = Vec::with_capacity(8);
    for i in 1..=2 {
        for j in 1..=2 {
            for k in 1..=2 {
                let names = [format!("a{i}"), format!("b{j}"), format!("c{k}")];
                let ctx = universe.domain(names.iter()).expect("ghz context");
                let y_count = [i, j, k].iter().filter(|&&m| m == 2).count();
                let parity = match y_count {
                    0 => Some(0),
                    2 => Some(1),
                    _ => None,
                };
                let section = Potential::from_fn(&universe, ctx.clone(), |x| {
                    let sum: u32 = x.indices().iter().sum();
                    match parity {
                        Some(p) if sum % 2 == p => ratio(1, 4),
                        Some(_) => ratio(0, 1),
                        None => ratio(1, 8),
                    }
                })
                .expect("ghz sections are well formed");
                ctxs.push(ctx);
                sections.push(section);
            }
        }
    }
    let scenario = MeasurementScenario::new(universe, ctxs).expect("ghz scenario");
    EmpiricalModel::probabilistic(scenario, sections).expect("ghz rows sum to 1")
}

/// Knowledgebase `φ_1, …, φ_n` of the liar cycle of length `n ≥ 2`.
pub fn liar(n: usize) -> Result<Vec<Relation>> {
    Ok(liar_cycle(n)?.knowledgebase())
}

/// Liar cycle as a possibilistic scenario with contexts `{s_i, s_{i+1}}`.
///
/// Needs `n ≥ 3`: with two statements both contexts coincide.
pub fn liar_scenario(n: usize) -> Result<EmpiricalModel> {
    if n < 3 {
        return Err(Error::Argument(format!("liar-scenario needs at least 3 statements, got {n}")));
    }
    let system = liar_cycle(n)?;
    let supports = system.knowledgebase();
    let ctxs = supports.iter().map(|r| r.domain().clone()).collect();
    let scenario = MeasurementScenario::new(system.universe().clone(), ctxs)?;
    EmpiricalModel::from_supports(scenario, &supports)
}

pub const MALAWI_COUNTRIES: [&str; 5] = ["MOZ", "MWI", "TZA", "ZMB", "ZWE"];

/// Adjacencies `T_1, …, T_8`; `T_6` is `{MWI, ZMB}`, the real border.
pub const MALAWI_BORDERS: [[&str; 2]; 8] = [
    ["MOZ", "MWI"],
    ["MOZ", "TZA"],
    ["MOZ", "ZMB"],
    ["MOZ", "ZWE"],
    ["MWI", "TZA"],
    ["MWI", "ZMB"],
    ["TZA", "ZMB"],
    ["ZMB", "ZWE"],
];

pub const COLOURS: [&str; 3] = ["g", "r", "y"];

pub fn malawi_csp() -> CspInstance {
    let universe = Arc::new(
        VariableUniverse::from_frames(MALAWI_COUNTRIES.iter().map(|c| (*c, COLOURS)))
            .expect("country frames are valid"),
    );
    let different: Vec<[&str; 2]> = COLOURS
        .iter()
        .flat_map(|x| COLOURS.iter().filter(move |y| *y != x).map(move |y| [*x, *y]))
        .collect();
    let constraints = MALAWI_BORDERS
        .iter()
        .map(|t| {
            Constraint::new(Relation::from_named_rows(&universe, t, &different).expect("border relation"))
        })
        .collect();
    let all = universe.full_domain();
    CspInstance::new(universe, all, constraints).expect("malawi csp")
}

/// `φ_i = M_{T_i}(C)` for the eight borders.
pub fn malawi() -> Vec<Relation> {
    let csp = malawi_csp();
    let covers = csp.schemes();
    csp_to_knowledgebase(&csp, &covers).expect("malawi knowledgebase")
}

/// Frames of the screening example: age, exam type, exam frequency.
pub fn screening_universe() -> Arc<VariableUniverse> {
    Arc::new(
        VariableUniverse::from_frames([
            ("a", vec!["54-", "54+"]),
            ("e", vec!["M", "CBE"]),
            ("f", vec!["Y", "2Y"]),
        ])
        .expect("screening frames are valid"),
    )
}

/// `R_1` on `{e,f}`, `R_2` on `{a,e}`, `R_3` on `{a,f}`.
pub fn screening() -> Vec<Relation> {
    let u = screening_universe();
    vec![
        Relation::from_named_rows(&u, &["e", "f"], [["M", "Y"], ["CBE", "Y"], ["CBE", "2Y"]]).expect("R1"),
        Relation::from_named_rows(&u, &["a", "e"], [["54-", "M"], ["54+", "CBE"]]).expect("R2"),
        Relation::from_named_rows(&u, &["a", "f"], [["54-", "Y"], ["54+", "2Y"]]).expect("R3"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Assignment;

    #[test]
    fn names_round_trip() {
        for name in ["bell", "hardy", "ghz", "pr-box", "liar(4)", "liar-scenario(5)", "malawi", "screening"] {
            let parsed: BuiltinName = name.parse().unwrap();
            assert_eq!(parsed.to_string(), name);
        }
        assert!("bogus".parse::<BuiltinName>().is_err());
        assert!("liar(x)".parse::<BuiltinName>().is_err());
        assert!("liar".parse::<BuiltinName>().is_err());
    }

    #[test]
    fn bell_spot_values() {
        let m = bell();
        let crate::contextuality::Sections::Probabilistic(s) = m.sections() else { panic!() };
        let u = m.scenario().universe();
        let x = Assignment::from_labels(u, [("a2", "0"), ("b2", "0")]).unwrap();
        assert_eq!(*s[3].value(&x).unwrap(), ratio(1, 8));
        let x = Assignment::from_labels(u, [("a1", "1"), ("b1", "0")]).unwrap();
        assert_eq!(*s[0].value(&x).unwrap(), ratio(0, 1));
    }

    #[test]
    fn liar_sizes() {
        let kb = liar(4).unwrap();
        assert_eq!(kb.len(), 4);
        assert!(liar(1).is_err());
        assert!(liar_scenario(2).is_err());
        assert_eq!(liar_scenario(3).unwrap().scenario().contexts().len(), 3);
    }

    #[test]
    fn malawi_shape() {
        let kb = malawi();
        assert_eq!(kb.len(), 8);
        assert!(kb.iter().all(|r| r.len() == 6));
    }
}
