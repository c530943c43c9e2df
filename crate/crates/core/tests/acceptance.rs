//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::Rng;
use x3sat_count::branch::{
    compute_bisection, compute_bisection_with, lookahead_qualifies, BisectionStrategy,
};
use x3sat_count::count::{
    count_by_weight, count_max_weight, count_with, default_qbound, SolverConfig,
};
use x3sat_count::model::{CardinalityVector, Formula, Literal, Rule, Var};
use x3sat_count::oracle::{brute_count, brute_count_by_weight, brute_max_weight};
use x3sat_count::simplify::{Reducer, SimplifyConfig};
use x3sat_count::toolkit::{generate_instance, random_weights, tau, InstanceDocument};

use common::{ones, random_subcubic_graph, regular_formula, rng};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_doc(r: &mut rand_chacha::ChaCha8Rng, n_max: usize) -> InstanceDocument {
    let n = r.gen_range(3..=n_max);
    let m = r.gen_range(1..=2 * n);
    let distinct = r.gen_bool(0.5);
    generate_instance(n, m, r.gen(), distinct).unwrap()
}

fn c1_unweighted() -> Verdict {
    let start = Instant::now();
    let mut r = rng(1);
    let mut bad = 0;
    let mut sat = 0;
    for _ in 0..1000 {
        let doc = random_doc(&mut r, 16);
        let f = doc.formula();
        let (count, _) = count_with(&f, &doc.ones(), &SolverConfig::default()).unwrap();
        let truth = brute_count(&f, &doc.ones()).unwrap();
        if count != truth {
            bad += 1;
        }
        if truth > BigUint::from(0u32) {
            sat += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        bad == 0 && t < Duration::from_secs(120),
        format!(
            "1000 instances, {bad} mismatches, {sat} satisfiable, {:.1}s (limit 120s)",
            t.as_secs_f64()
        ),
    )
}

fn c2_weighted() -> Verdict {
    let mut r = rng(2);
    let mut bad = 0;
    for _ in 0..300 {
        let mut doc = random_doc(&mut r, 14);
        random_weights(&mut doc, 5, r.gen());
        let f = doc.formula();
        let d = doc.weight_assignment();
        let poly = count_by_weight(&f, &d, default_qbound(doc.n)).unwrap();
        let truth = brute_count_by_weight(&f, &d).unwrap();
        let plain = brute_count(&f, &doc.ones()).unwrap();
        if poly != truth || poly.total() != plain {
            bad += 1;
        }
    }
    verdict(
        bad == 0,
        format!("300 instances, {bad} mismatches (coefficients and total)"),
    )
}

fn c3_max_weight() -> Verdict {
    let mut r = rng(3);
    let mut bad = 0;
    let mut unsat = 0;
    for _ in 0..300 {
        let mut doc = random_doc(&mut r, 14);
        random_weights(&mut doc, 5, r.gen());
        let f = doc.formula();
        let d = doc.weight_assignment();
        let got = count_max_weight(&f, &d).unwrap();
        let truth = brute_max_weight(&f, &d).unwrap();
        if got != truth {
            bad += 1;
        }
        if truth.c == BigUint::from(0u32) {
            unsat += 1;
        }
    }
    verdict(
        bad == 0 && unsat > 0,
        format!("300 instances, {bad} mismatches, {unsat} unsatisfiable returned (0, 0)"),
    )
}

/// Independent root of `sum x^-t = 1`: Newton's method in `y = ln x`
/// from `y = 0`, monotone since the function is convex and decreasing.
fn newton_root(t: &[u32]) -> f64 {
    let mut y = 0.0f64;
    for _ in 0..200 {
        let g: f64 = t.iter().map(|&k| (-(k as f64) * y).exp()).sum::<f64>() - 1.0;
        let dg: f64 = t
            .iter()
            .map(|&k| -(k as f64) * (-(k as f64) * y).exp())
            .sum();
        y -= g / dg;
    }
    y.exp()
}

fn c4_constants() -> Verdict {
    let cases: [(&[u32], f64, f64); 3] = [
        (&[10, 4], 1.0, 1.1120),
        (&[9, 5], 1.0, 1.1074),
        (&[8, 8, 10, 10], 2.0 / 3.0, 1.1092),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (t, power, bound) in cases {
        let root = tau(t).unwrap();
        let reference = newton_root(t);
        let value = root.powf(power);
        let ok = (root - reference).abs() <= 1e-6 && value <= bound;
        pass &= ok;
        parts.push(format!(
            "{t:?}^{power:.3} = {value:.6} (bound {bound}, |diff| {:.1e})",
            (root - reference).abs()
        ));
    }
    verdict(pass, parts.join("; "))
}

#[derive(Debug, Clone)]
struct RuleCase {
    formula: Formula,
    entries: Vec<(u32, u32)>,
}

fn rule_case() -> impl Strategy<Value = RuleCase> {
    let lit = (1i64..=12, any::<bool>()).prop_map(|(v, n)| if n { -v } else { v });
    let random = prop::collection::vec(prop::collection::vec(lit.clone(), 1..=3), 1..=9);
    // x1..x7 form a block reachable only through x2
    let gadget = (
        prop::collection::vec(any::<bool>(), 15),
        prop::collection::vec(prop::collection::vec((8i64..=12, any::<bool>()), 3), 1..=3),
    )
        .prop_map(|(signs, extra)| {
            let block = [[1, 2, 3], [1, 4, 5], [1, 6, 7], [3, 5, 7], [4, 6, 3]];
            let mut cs: Vec<Vec<i64>> = block
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    c.iter()
                        .enumerate()
                        .map(|(j, &v)| if signs[3 * i + j] { -v } else { v })
                        .collect()
                })
                .collect();
            cs.push(vec![2, 8, 9]);
            for e in extra {
                cs.push(e.into_iter().map(|(v, n)| if n { -v } else { v }).collect());
            }
            cs
        });
    let clauses = prop_oneof![3 => random, 1 => gadget];
    (
        clauses,
        prop::collection::vec((0u32..8, 0u32..8), 12),
        prop::collection::vec((1u32..=12, any::<bool>()), 0..=2),
    )
        .prop_map(|(cs, entries, fixed)| {
            let refs: Vec<&[i64]> = cs.iter().map(|c| c.as_slice()).collect();
            let mut formula = Formula::from_signed(&refs);
            for (v, value) in fixed {
                formula.assign(v, value);
            }
            RuleCase { formula, entries }
        })
}

fn c5_rule_local() -> Verdict {
    let watched = [
        Rule::ConstantOne,
        Rule::ConstantZero,
        Rule::Unit,
        Rule::TwoLiteral,
        Rule::Complementary,
        Rule::RepeatedLiteral,
        Rule::ComplementaryTriple,
        Rule::Singletons,
        Rule::SharedPair,
        Rule::SharedPairOneFlip,
        Rule::SharedPairTwoFlips,
        Rule::Contraction,
    ];
    let fired = std::cell::RefCell::new(std::collections::BTreeMap::<Rule, u64>::new());
    let config = Config {
        cases: 4000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let result = runner.run(&rule_case(), |case| {
        let vars: Vec<Var> = case.formula.vars().collect();
        let cv = CardinalityVector::from_fn(vars, |l: Literal| {
            let (p, n) = case.entries[(l.var() - 1) as usize];
            BigUint::from(if l.is_negated() { n } else { p })
        });
        let mut r = Reducer::new(case.formula.clone(), cv, SimplifyConfig::default());
        for _ in 0..200 {
            let before = brute_count(&r.formula, &r.cv).unwrap();
            r.multiplier = BigUint::from(1u32);
            r.fired.clear();
            if !r.step() {
                break;
            }
            let after = if r.unsat {
                BigUint::from(0u32)
            } else {
                &r.multiplier * brute_count(&r.formula, &r.cv).unwrap()
            };
            let rule = *r.fired.last().unwrap();
            if after != before {
                return Err(TestCaseError::fail(format!(
                    "{} changed {before} into {after}",
                    rule.name()
                )));
            }
            for &rule in &r.fired {
                *fired.borrow_mut().entry(rule).or_default() += 1;
            }
            if r.unsat {
                break;
            }
        }
        Ok(())
    });
    let fired = fired.into_inner();
    let missing: Vec<&str> = watched
        .iter()
        .filter(|r| !fired.contains_key(r))
        .map(|r| r.name())
        .collect();
    let summary: Vec<String> = watched
        .iter()
        .map(|r| format!("{}={}", r.name(), fired.get(r).unwrap_or(&0)))
        .collect();
    match result {
        Ok(()) => verdict(
            missing.is_empty(),
            format!(
                "4000 cases, every step preserved; firings {}; unexercised {missing:?}",
                summary.join(" ")
            ),
        ),
        Err(e) => verdict(false, format!("{e}")),
    }
}

fn c6_lookahead() -> Verdict {
    let mut realized = Vec::new();
    let mut mismatches = 0;
    let mut r = rng(6);
    for i in 0..120 {
        let n = r.gen_range(20..=50);
        let ratio = r.gen_range(0.4..0.7);
        let m = ((n as f64) * ratio).round() as usize;
        let mut doc = generate_instance(n, m, r.gen(), true).unwrap();
        if i % 2 == 0 {
            for c in doc.clauses.iter_mut() {
                for l in c.iter_mut() {
                    *l = l.abs();
                }
            }
        }
        let (_, stats) = count_with(&doc.formula(), &doc.ones(), &SolverConfig::default()).unwrap();
        realized.extend(stats.lookahead_realized);
        mismatches += stats.lookahead_mismatches;
    }
    let violations = realized
        .iter()
        .filter(|&&(a, b)| !lookahead_qualifies(a, b))
        .count();
    let worst = realized.iter().map(|&(a, b)| (a.min(b), a.max(b))).min();
    verdict(
        !realized.is_empty() && violations == 0 && mismatches == 0,
        format!(
            "{} lookahead branches, {violations} below threshold, {mismatches} differ from simulation, weakest {worst:?}",
            realized.len()
        ),
    )
}

fn c7_bisection() -> Verdict {
    let mut r = rng(7);
    let mut unbalanced = 0;
    for _ in 0..200 {
        let n = r.gen_range(2..=200);
        let g = random_subcubic_graph(n, &mut r);
        assert!(g.max_degree() <= 3);
        let seed = r.gen();
        for strategy in [BisectionStrategy::default(), BisectionStrategy::Random] {
            if !compute_bisection_with(&g, strategy, seed)
                .unwrap()
                .is_balanced()
            {
                unbalanced += 1;
            }
        }
        let _ = compute_bisection(&g, seed);
    }
    let mut differ = 0;
    let mut bisections = 0;
    for i in 0..50u64 {
        let n = 18 + 3 * (i as usize % 5);
        let f = regular_formula(n, 2, 700 + i, i % 3 == 0);
        let cv = ones(n);
        let (a, sa) = count_with(&f, &cv, &SolverConfig::default()).unwrap();
        let random = SolverConfig {
            bisection: BisectionStrategy::Random,
            seed: i,
            ..SolverConfig::default()
        };
        let (b, sb) = count_with(&f, &cv, &random).unwrap();
        bisections += sa.firings(Rule::Bisection) + sb.firings(Rule::Bisection);
        if a != b || (n <= 21 && a != brute_count(&f, &cv).unwrap()) {
            differ += 1;
        }
    }
    verdict(
        unbalanced == 0 && differ == 0 && bisections > 0,
        format!(
            "200 graphs x 2 strategies, {unbalanced} unbalanced; 50 instances, {differ} count changes under random partitions ({bisections} bisections)"
        ),
    )
}

fn c8_scaling() -> Verdict {
    let start = Instant::now();
    let limit = 1.1120f64.ln() + 0.05;
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for n in [30usize, 40, 50] {
        let mut family_max = 0.0f64;
        for seed in 0..10u64 {
            let families = [
                regular_formula(n, 2, seed, false),
                regular_formula(n, 2, seed, true),
                {
                    let mut doc =
                        generate_instance(n, (n as f64 * 0.6).round() as usize, seed, true)
                            .unwrap();
                    for c in doc.clauses.iter_mut() {
                        for l in c.iter_mut() {
                            *l = l.abs();
                        }
                    }
                    doc.formula()
                },
            ];
            for f in families {
                let (_, stats) = count_with(&f, &ones(n), &SolverConfig::default()).unwrap();
                family_max = family_max.max((stats.leaves as f64).ln() / n as f64);
            }
        }
        worst = worst.max(family_max);
        lines.push(format!("n={n}: max ln(L)/n = {family_max:.4}"));
    }
    let t = start.elapsed();
    verdict(
        worst <= limit && t < Duration::from_secs(600),
        format!(
            "{}; limit {limit:.4}, margin {:.4}, {:.1}s",
            lines.join(", "),
            limit - worst,
            t.as_secs_f64()
        ),
    )
}

fn run_cli(args: &[&str], input: &str) -> (Vec<u8>, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_x3sat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn x3sat");
    // commands that ignore stdin may exit before the write completes
    let _ = child.stdin.take().unwrap().write_all(input.as_bytes());
    let out = child.wait_with_output().unwrap();
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn c9_determinism() -> Verdict {
    let f = regular_formula(30, 2, 9, false);
    let mut text = format!("c meta family=regular\np x3sat 30 {}\n", f.num_clauses());
    for c in f.clauses() {
        for l in c.literals() {
            text.push_str(&format!("{} ", l.to_signed()));
        }
        text.push_str("0\n");
    }
    for v in 1..=30 {
        text.push_str(&format!("w {v} {}\nw -{v} {}\n", v % 4, (v * 7) % 3));
    }
    let commands: [&[&str]; 9] = [
        &["count", "--stats", "--seed", "11"],
        &["count", "--format", "json", "--seed", "11"],
        &["weighted", "--format", "json"],
        &["maxweight", "--format", "json", "--stats"],
        &["stats", "--format", "json", "--seed", "3"],
        &[
            "verify", "--random", "25", "--seed", "4", "--format", "json",
        ],
        &[
            "gen",
            "--vars",
            "40",
            "--clauses",
            "30",
            "--seed",
            "8",
            "--weights",
            "5",
        ],
        &[
            "tau",
            "8",
            "8",
            "10",
            "10",
            "--power",
            "0.6666666666666666",
            "--bound",
            "1.1092",
            "--format",
            "json",
        ],
        &["verify", "--oracle-cap", "30"],
    ];
    let mut differ = Vec::new();
    let mut failed = Vec::new();
    for args in commands {
        let (a, ca) = run_cli(args, &text);
        let (b, cb) = run_cli(args, &text);
        if a != b || ca != cb {
            differ.push(args[0]);
        }
        if ca != 0 || a.is_empty() {
            failed.push(args[0]);
        }
    }
    verdict(
        differ.is_empty() && failed.is_empty(),
        format!(
            "{} commands run twice; differing {differ:?}; failing {failed:?}",
            commands.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence, unweighted", c1_unweighted),
        ("oracle equivalence, weighted", c2_weighted),
        ("oracle equivalence, max-weight", c3_max_weight),
        ("branching-factor constants", c4_constants),
        ("rule-local count preservation", c5_rule_local),
        ("lookahead self-consistency", c6_lookahead),
        ("bisection invariants", c7_bisection),
        ("scaling sanity", c8_scaling),
        ("determinism", c9_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
