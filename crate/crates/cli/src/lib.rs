//! Command-line front end: `vk analyze`, `vk infer`, `vk list-builtins`, `vk verify`.

pub mod document;
pub mod error;
pub mod report;
pub mod verify;

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use vk_core::algebra::Valuation;
use vk_core::builtins::BUILTINS;
use vk_core::inference::{
    solve_fusion, solve_naive, EliminationOrder, Heuristic, InferenceConfig, InferenceProblem, Method, OrderChoice,
};
use vk_core::semiring::format_rational;

use crate::document::{canonical_text, load, potential_doc, relation_doc, to_document, Body};
use crate::error::{exit, CliError, Result};
use crate::report::{analyze, render_text, AnalyzeOptions, Report};

/// Environment variable overriding the intermediate-table cell limit.
pub const CELL_LIMIT_ENV: &str = "VK_CELL_LIMIT";

#[derive(Debug, Parser)]
#[command(name = "vk", version, about = "Disagreement and contextuality analysis with valuation algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fusion,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeuristicArg {
    MinFill,
    MinDegree,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify an empirical model or check a knowledgebase for disagreement
    Analyze {
        /// Input file or builtin:NAME
        input: String,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "fusion")]
        method: MethodArg,
        /// Largest intermediate table, in cells
        #[arg(long)]
        limit: Option<u128>,
        /// Include wall-clock time (makes output nondeterministic)
        #[arg(long)]
        timing: bool,
    },
    /// Compute the combination of all valuations projected onto a query
    Infer {
        input: String,
        /// Comma-separated query variables
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        query: Vec<String>,
        #[arg(long, value_enum, default_value = "fusion")]
        method: MethodArg,
        /// Comma-separated elimination order (fusion only)
        #[arg(long, value_delimiter = ',', conflicts_with = "heuristic")]
        order: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "min-fill")]
        heuristic: HeuristicArg,
        #[arg(long)]
        limit: Option<u128>,
        #[arg(long)]
        json: bool,
    },
    /// List the built-in models
    ListBuiltins {
        #[arg(long)]
        describe: bool,
    },
    /// Re-check every witness of a JSON report against its input
    Verify { report: String, input: String },
    /// Print the input as a JSON document
    Export { input: String },
}

/// Cell limit: `--limit`, else the environment variable, else the default.
pub fn cell_limit(flag: Option<u128>) -> Result<u128> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(CELL_LIMIT_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{CELL_LIMIT_ENV}={s:?} is not a nonnegative integer"))),
        Err(_) => Ok(vk_core::inference::DEFAULT_CELL_LIMIT),
    }
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Fusion => Method::Fusion,
        MethodArg::Naive => Method::Naive,
    }
}

/// Runs the tool; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "vk: {e}");
            e.exit_code()
        }
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Analyze { input, json, method: m, limit, timing } => {
            let options = AnalyzeOptions {
                inference: InferenceConfig { cell_limit: cell_limit(limit)?, method: method(m) },
                ..Default::default()
            };
            let start = Instant::now();
            let input = load(&input)?;
            let mut report = analyze(&input, &options)?;
            if timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            let text = if json { canonical_text(&report) } else { render_text(&report) };
            write_out(out, &text)?;
            Ok(exit::OK)
        }
        Command::Infer { input, query, method: m, order, heuristic, limit, json } => {
            let config = InferenceConfig { cell_limit: cell_limit(limit)?, method: method(m) };
            let input = load(&input)?;
            let text = infer(&input.body, &query, order, heuristic, &config, json)?;
            write_out(out, &text)?;
            Ok(exit::OK)
        }
        Command::ListBuiltins { describe } => {
            let mut text = String::new();
            for b in BUILTINS {
                if describe {
                    text.push_str(&format!("{:<18} {}\n", b.name, b.description));
                } else {
                    text.push_str(b.name);
                    text.push('\n');
                }
            }
            write_out(out, &text)?;
            Ok(exit::OK)
        }
        Command::Verify { report, input } => {
            let bytes = std::fs::read(&report).map_err(|e| CliError::Io { path: report.clone(), source: e })?;
            let parsed: Report = serde_json::from_slice(&bytes).map_err(|e| CliError::Parse {
                source_name: report.clone(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let input = load(&input)?;
            let outcome = verify::verify(&parsed, &input);
            let mut text = String::new();
            for c in &outcome.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                if c.detail.is_empty() {
                    text.push_str(&format!("{}={status}\n", c.name));
                } else {
                    text.push_str(&format!("{}={status} ({})\n", c.name, c.detail));
                }
            }
            write_out(out, &text)?;
            if outcome.passed() {
                Ok(exit::OK)
            } else {
                let failed: Vec<_> = outcome.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(CliError::Verification(failed.join(", ")))
            }
        }
        Command::Export { input } => {
            let input = load(&input)?;
            write_out(out, &canonical_text(&to_document(&input.body)))?;
            Ok(exit::OK)
        }
    }
}

fn solve_with<V: Valuation>(
    kb: Vec<V>,
    query: &[String],
    order: &Option<Vec<String>>,
    heuristic: HeuristicArg,
    config: &InferenceConfig,
) -> Result<V> {
    let universe = kb.first().ok_or_else(|| CliError::Usage("nothing to infer from".into()))?.universe().clone();
    let q = universe.domain(query.iter())?;
    let problem = InferenceProblem::new(kb, q)?;
    match (config.method, order) {
        (Method::Naive, Some(_)) => Err(CliError::Usage("--order applies to the fusion method only".into())),
        (Method::Naive, None) => Ok(solve_naive(&problem, config)?),
        (Method::Fusion, Some(vars)) => {
            let vars = vars.iter().map(|v| universe.var(v)).collect::<vk_core::Result<Vec<_>>>()?;
            Ok(solve_fusion(&problem, &OrderChoice::Given(EliminationOrder::new(vars)), config)?)
        }
        (Method::Fusion, None) => {
            let h = match heuristic {
                HeuristicArg::MinFill => Heuristic::MinFill,
                HeuristicArg::MinDegree => Heuristic::MinDegree,
            };
            Ok(solve_fusion(&problem, &OrderChoice::Heuristic(h), config)?)
        }
    }
}

fn infer(
    body: &Body,
    query: &[String],
    order: Option<Vec<String>>,
    heuristic: HeuristicArg,
    config: &InferenceConfig,
    json: bool,
) -> Result<String> {
    use vk_core::contextuality::Sections;
    let relations = |kb: Vec<vk_core::relation::Relation>| -> Result<String> {
        let r = solve_with(kb, query, &order, heuristic, config)?;
        if json {
            return Ok(canonical_text(&relation_doc(&r)));
        }
        let mut s = format!("{}\n", header(r.domain()));
        if r.is_empty() {
            s.push_str("(empty)\n");
        }
        for row in r.label_rows() {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        Ok(s)
    };
    let potentials = |kb: Vec<vk_core::potential::ProbabilityPotential>| -> Result<String> {
        let p = solve_with(kb, query, &order, heuristic, config)?;
        if json {
            return Ok(canonical_text(&potential_doc(&p)));
        }
        let mut s = format!("{}\n", header(p.domain()));
        for (x, v) in p.entries() {
            s.push_str(&format!("{} -> {}\n", x.key(p.universe()), format_rational(v)));
        }
        Ok(s)
    };
    match body {
        Body::Relations(kb) | Body::Csp { knowledgebase: kb, .. } => relations(kb.clone()),
        Body::Probabilities(kb) => potentials(kb.clone()),
        Body::Model(m) => match m.sections() {
            Sections::Probabilistic(s) => potentials(s.clone()),
            Sections::Possibilistic(_) => relations(m.supports()),
        },
    }
}

fn header(d: &vk_core::universe::Domain) -> String {
    if d.is_empty() {
        "()".into()
    } else {
        d.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(",")
    }
}
