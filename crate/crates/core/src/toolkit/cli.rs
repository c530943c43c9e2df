//! Command-line front end.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::generate::{generate_instance, random_weights};
use super::instance::{parse_instance_with, serialize_instance, InstanceDocument, ParseOptions};
use super::tau::{branching_factor, BranchingVector};
use crate::count::{
    count_by_weight_with, count_max_weight_with, count_with, default_qbound, SolverConfig,
};
use crate::error::{Error, Result};
use crate::model::SolveStats;
use crate::oracle::Oracle;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "x3sat",
    version,
    about = "Exact solution counting for exactly-one-in-three satisfiability"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Instance file, or `-` for standard input.
    #[arg(long, global = true, default_value = "-")]
    input: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = crate::oracle::DEFAULT_CAP)]
    oracle_cap: usize,
    /// Largest admissible literal weight; defaults to n^2.
    #[arg(long, global = true)]
    qbound: Option<u64>,
    /// Print solver statistics.
    #[arg(long, global = true)]
    stats: bool,
    /// Accept `p cnf` headers.
    #[arg(long, global = true)]
    dimacs_cnf: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of solutions.
    Count,
    /// Number of solutions per total weight.
    Weighted,
    /// Number of maximum-weight solutions and that weight.
    Maxweight,
    /// Compare the solver with brute force.
    Verify {
        /// Check this many seeded random instances instead of the input.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 16)]
        max_vars: usize,
    },
    /// Write a random instance.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        /// Allow a variable twice in one clause.
        #[arg(long)]
        repeats: bool,
        /// Attach uniform weights in 0..=MAX.
        #[arg(long, value_name = "MAX")]
        weights: Option<u64>,
    },
    /// Branching factor of a branching vector.
    Tau {
        #[arg(required = true, num_args = 1..)]
        t: Vec<u32>,
        /// Report tau^POWER.
        #[arg(long, default_value_t = 1.0)]
        power: f64,
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Solver statistics of an unweighted count.
    Stats,
}

/// Runs the tool; returns the exit code (0 success, 1 failure, 2 usage).
pub fn run<I, S>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(Outcome { text, code }) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn read_input(common: &Common, stdin: &mut dyn Read) -> Result<InstanceDocument> {
    let text = if common.input == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| Error::input(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&common.input)
            .map_err(|e| Error::input(format!("reading {}: {e}", common.input)))?
    };
    parse_instance_with(
        &text,
        ParseOptions {
            dimacs_cnf: common.dimacs_cnf,
        },
    )
}

fn config(common: &Common) -> SolverConfig {
    SolverConfig {
        seed: common.seed,
        ..SolverConfig::default()
    }
}

fn render(format: Format, value: Value, text: String) -> String {
    match format {
        Format::Json => format!("{value}\n"),
        Format::Text => text,
    }
}

fn stats_text(stats: &SolveStats) -> String {
    let mut out = String::new();
    out.push_str(&format!("leaves {}\n", stats.leaves));
    out.push_str(&format!("branch_nodes {}\n", stats.branch_nodes));
    out.push_str(&format!("split_nodes {}\n", stats.split_nodes));
    out.push_str(&format!("split_children {}\n", stats.split_children));
    out.push_str(&format!("max_depth {}\n", stats.max_depth));
    for (rule, n) in &stats.rule_firings {
        out.push_str(&format!("rule {rule} {n}\n"));
    }
    out.push_str(&format!("m3_history {:?}\n", stats.m3_history));
    out.push_str(&format!("cut_sizes {:?}\n", stats.cut_sizes));
    out.push_str(&format!(
        "lookahead_realized {:?}\n",
        stats.lookahead_realized
    ));
    out.push_str(&format!(
        "lookahead_mismatches {}\n",
        stats.lookahead_mismatches
    ));
    out.push_str(&format!(
        "self_loop_sub_branches {}\n",
        stats.self_loop_sub_branches
    ));
    out
}

fn with_stats(mut value: Value, text: &mut String, stats: &SolveStats, show: bool) -> Value {
    value["stats"] = serde_json::to_value(stats).expect("stats serialize");
    if show {
        text.push_str(&stats_text(stats));
    }
    value
}

fn qbound(common: &Common, doc: &InstanceDocument) -> u64 {
    common.qbound.unwrap_or_else(|| default_qbound(doc.n))
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome> {
    let common = &cli.common;
    match &cli.command {
        Command::Count | Command::Stats => {
            let doc = read_input(common, stdin)?;
            let (count, stats) = count_with(&doc.formula(), &doc.ones(), &config(common))?;
            let only_stats = matches!(cli.command, Command::Stats);
            let mut text = if only_stats {
                String::new()
            } else {
                format!("{count}\n")
            };
            let value =
                json!({ "mode": "count", "n": doc.n, "m": doc.m(), "count": count.to_string() });
            let value = with_stats(value, &mut text, &stats, common.stats || only_stats);
            Ok(Outcome::ok(render(common.format, value, text)))
        }
        Command::Weighted => {
            let doc = read_input(common, stdin)?;
            let d = doc.weight_assignment();
            let (poly, stats) =
                count_by_weight_with(&doc.formula(), &d, qbound(common, &doc), &config(common))?;
            let shift = doc.weight_shift as i128;
            let mut text = String::new();
            let mut coeffs = Vec::new();
            for (k, a) in poly.coeffs().iter().enumerate() {
                if a == &BigUint::from(0u32) {
                    continue;
                }
                let w = k as i128 - shift;
                text.push_str(&format!("{w} {a}\n"));
                coeffs.push(json!({ "weight": w as i64, "count": a.to_string() }));
            }
            let value = json!({
                "mode": "weighted",
                "n": doc.n,
                "m": doc.m(),
                "count": poly.total().to_string(),
                "weight_shift": doc.weight_shift,
                "coefficients": coeffs,
            });
            let value = with_stats(value, &mut text, &stats, common.stats);
            Ok(Outcome::ok(render(common.format, value, text)))
        }
        Command::Maxweight => {
            let doc = read_input(common, stdin)?;
            let d = doc.weight_assignment();
            if d.max_weight() > qbound(common, &doc) {
                return Err(Error::input(format!(
                    "weight {} exceeds the bound",
                    d.max_weight()
                )));
            }
            let (pair, stats) = count_max_weight_with(&doc.formula(), &d, &config(common))?;
            let weight =
                (pair.c != BigUint::from(0u32)).then(|| pair.d as i64 - doc.weight_shift as i64);
            let mut text = match weight {
                Some(w) => format!("{} {w}\n", pair.c),
                None => "0 -\n".to_string(),
            };
            let value = json!({
                "mode": "maxweight",
                "n": doc.n,
                "m": doc.m(),
                "count": pair.c.to_string(),
                "weight": weight,
            });
            let value = with_stats(value, &mut text, &stats, common.stats);
            Ok(Outcome::ok(render(common.format, value, text)))
        }
        Command::Verify { random, max_vars } => verify(common, stdin, *random, *max_vars),
        Command::Gen {
            vars,
            clauses,
            repeats,
            weights,
        } => {
            let mut doc = generate_instance(*vars, *clauses, common.seed, !repeats)?;
            if let Some(max) = weights {
                random_weights(&mut doc, *max, common.seed.wrapping_add(1));
            }
            let text = serialize_instance(&doc);
            let value = json!({ "n": doc.n, "m": doc.m(), "instance": text });
            Ok(Outcome::ok(render(common.format, value, text)))
        }
        Command::Tau { t, power, bound } => {
            let v = BranchingVector::new(t.clone())?;
            let root = branching_factor(&v);
            let value_f = root.powf(*power);
            let holds = bound.map(|b| value_f <= b);
            let label = t
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let mut text = if *power == 1.0 {
                format!("tau({label}) = {root:.10}\n")
            } else {
                format!("tau({label}) = {root:.10}\ntau({label})^{power} = {value_f:.10}\n")
            };
            if let (Some(b), Some(h)) = (bound, holds) {
                text.push_str(&format!(
                    "bound {b}: {}\n",
                    if h { "holds" } else { "violated" }
                ));
            }
            let value = json!({ "vector": t, "tau": root, "power": power, "value": value_f, "bound": bound, "holds": holds });
            let code = if holds == Some(false) { 1 } else { 0 };
            Ok(Outcome {
                text: render(common.format, value, text),
                code,
            })
        }
    }
}

/// Mismatching modes of one instance.
fn check_instance(doc: &InstanceDocument, common: &Common) -> Result<Vec<&'static str>> {
    let oracle = Oracle::new(common.oracle_cap);
    let f = doc.formula();
    let d = doc.weight_assignment();
    let cfg = config(common);
    let mut bad = Vec::new();
    if count_with(&f, &doc.ones(), &cfg)?.0 != oracle.brute_count(&f, &doc.ones())? {
        bad.push("count");
    }
    let q = qbound(common, doc).max(d.max_weight());
    if count_by_weight_with(&f, &d, q, &cfg)?.0 != oracle.brute_count_by_weight(&f, &d)? {
        bad.push("weighted");
    }
    if count_max_weight_with(&f, &d, &cfg)?.0 != oracle.brute_max_weight(&f, &d)? {
        bad.push("maxweight");
    }
    Ok(bad)
}

fn verify(
    common: &Common,
    stdin: &mut dyn Read,
    random: Option<usize>,
    max_vars: usize,
) -> Result<Outcome> {
    let docs: Vec<InstanceDocument> = match random {
        None => vec![read_input(common, stdin)?],
        Some(k) => {
            if max_vars < 3 {
                return Err(Error::input("--max-vars must be at least 3"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            (0..k)
                .map(|_| {
                    let n = rng.gen_range(3..=max_vars);
                    let m = rng.gen_range(1..=2 * n);
                    let mut doc = generate_instance(n, m, rng.gen(), true)?;
                    random_weights(&mut doc, 5, rng.gen());
                    Ok(doc)
                })
                .collect::<Result<_>>()?
        }
    };
    let mut text = String::new();
    let mut failures = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        let bad = check_instance(doc, common)?;
        if !bad.is_empty() {
            text.push_str(&format!("instance {i}: mismatch in {}\n", bad.join(", ")));
            failures.push(json!({ "instance": i, "modes": bad }));
        }
    }
    let ok = failures.is_empty();
    text.push_str(&format!(
        "{} of {} instances agree with brute force\n",
        docs.len() - failures.len(),
        docs.len()
    ));
    let value =
        json!({ "mode": "verify", "instances": docs.len(), "ok": ok, "failures": failures });
    Ok(Outcome {
        text: render(common.format, value, text),
        code: if ok { 0 } else { 1 },
    })
}
