//! Text instance format.
//!
//! ```text
//! c free comment
//! c meta seed=7
//! p x3sat 5 2
//! 1 2 3 0
//! -1 4 5 0
//! w 1 3
//! w -4 2
//! ```
//!
//! Weight lines give a literal and its weight; literals without a line weigh
//! 0. Negative weights are shifted per variable so that every weight is
//! nonnegative. The shift is the same for every solution and is recorded as
//! `c meta weight_shift=S`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::{CardinalityVector, Formula, Literal, Var, WeightAssignment};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceDocument {
    pub n: usize,
    pub clauses: Vec<Vec<i64>>,
    /// Nonnegative weights after shifting, keyed by signed literal.
    pub weights: BTreeMap<i64, u64>,
    /// Added to every solution's weight by the shift.
    pub weight_shift: u64,
    pub meta: BTreeMap<String, String>,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept a `p cnf` header as well.
    pub dimacs_cnf: bool,
}

const SHIFT_KEY: &str = "weight_shift";

impl InstanceDocument {
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn formula(&self) -> Formula {
        let refs: Vec<&[i64]> = self.clauses.iter().map(|c| c.as_slice()).collect();
        Formula::from_signed(&refs)
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> {
        1..=self.n as Var
    }

    pub fn ones(&self) -> CardinalityVector<BigUint> {
        CardinalityVector::ones(self.variables())
    }

    pub fn weight_assignment(&self) -> WeightAssignment {
        let mut d = WeightAssignment::zeros(self.variables());
        for (&lit, &w) in &self.weights {
            d.set(Literal::from_signed(lit).expect("nonzero literal"), w);
        }
        d
    }

    pub fn has_weights(&self) -> bool {
        !self.weights.is_empty()
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument> {
    parse_instance_with(text, ParseOptions::default())
}

pub fn parse_instance_with(text: &str, options: ParseOptions) -> Result<InstanceDocument> {
    let mut doc = InstanceDocument::default();
    let mut header: Option<(usize, usize)> = None;
    let mut raw: BTreeMap<i64, i64> = BTreeMap::new();
    let mut recorded_shift = 0u64;

    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().unwrap();
        match first {
            "c" => {
                let rest: Vec<&str> = tokens.collect();
                if rest.first() == Some(&"meta") {
                    for kv in &rest[1..] {
                        let (k, v) = kv.split_once('=').ok_or_else(|| {
                            parse_error(no, format!("metadata `{kv}` is not key=value"))
                        })?;
                        if k == SHIFT_KEY {
                            recorded_shift =
                                v.parse().map_err(|_| parse_error(no, "bad weight shift"))?;
                        } else {
                            doc.meta.insert(k.to_string(), v.to_string());
                        }
                    }
                }
            }
            "p" => {
                if header.is_some() {
                    return Err(parse_error(no, "second header"));
                }
                let kind = tokens
                    .next()
                    .ok_or_else(|| parse_error(no, "header lacks a format"))?;
                if kind != "x3sat" && !(options.dimacs_cnf && kind == "cnf") {
                    return Err(parse_error(no, format!("unsupported format `{kind}`")));
                }
                let mut number = |what: &str| -> Result<usize> {
                    tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_error(no, format!("header lacks {what}")))
                };
                let n = number("a variable count")?;
                let m = number("a clause count")?;
                if tokens.next().is_some() {
                    return Err(parse_error(no, "trailing tokens in header"));
                }
                header = Some((n, m));
                doc.n = n;
            }
            "w" => {
                let (n, _) = header.ok_or_else(|| parse_error(no, "weight before header"))?;
                let lit: i64 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_error(no, "weight line lacks a literal"))?;
                let w: i64 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_error(no, "weight line lacks a weight"))?;
                if tokens.next().is_some() {
                    return Err(parse_error(no, "trailing tokens in weight line"));
                }
                check_literal(lit, n, no)?;
                if raw.insert(lit, w).is_some() {
                    return Err(parse_error(no, format!("duplicate weight for {lit}")));
                }
            }
            _ => {
                let (n, _) = header.ok_or_else(|| parse_error(no, "clause before header"))?;
                let mut clause = Vec::new();
                let mut closed = false;
                for t in std::iter::once(first).chain(tokens) {
                    if closed {
                        return Err(parse_error(no, "tokens after the terminating 0"));
                    }
                    let lit: i64 = t
                        .parse()
                        .map_err(|_| parse_error(no, format!("bad literal `{t}`")))?;
                    if lit == 0 {
                        closed = true;
                        continue;
                    }
                    check_literal(lit, n, no)?;
                    clause.push(lit);
                }
                if !closed {
                    return Err(parse_error(no, "clause is not terminated by 0"));
                }
                if clause.is_empty() || clause.len() > 3 {
                    return Err(parse_error(
                        no,
                        format!("clause has {} literals, expected 1 to 3", clause.len()),
                    ));
                }
                doc.clauses.push(clause);
            }
        }
    }
    let (_, m) =
        header.ok_or_else(|| parse_error(text.lines().count().max(1), "missing header"))?;
    if doc.clauses.len() != m {
        return Err(parse_error(
            text.lines().count().max(1),
            format!("header announces {m} clauses, found {}", doc.clauses.len()),
        ));
    }

    // shift each variable by the magnitude of its most negative literal weight
    let mut shift = recorded_shift;
    for v in 1..=doc.n as i64 {
        let pos = raw.get(&v).copied();
        let neg = raw.get(&-v).copied();
        let low = pos.unwrap_or(0).min(neg.unwrap_or(0));
        let s = if low < 0 { low.unsigned_abs() } else { 0 };
        shift += s;
        for (lit, w) in [(v, pos), (-v, neg)] {
            let shifted = w.unwrap_or(0) + s as i64;
            if w.is_some() || shifted != 0 {
                doc.weights.insert(lit, shifted as u64);
            }
        }
    }
    doc.weight_shift = shift;
    Ok(doc)
}

fn check_literal(lit: i64, n: usize, line: usize) -> Result<()> {
    if lit == 0 || lit.unsigned_abs() > n as u64 {
        return Err(parse_error(
            line,
            format!("variable {} out of range 1..={n}", lit.unsigned_abs()),
        ));
    }
    Ok(())
}

pub fn serialize_instance(doc: &InstanceDocument) -> String {
    let mut out = String::new();
    for (k, v) in &doc.meta {
        writeln!(out, "c meta {k}={v}").unwrap();
    }
    if doc.weight_shift > 0 {
        writeln!(out, "c meta {SHIFT_KEY}={}", doc.weight_shift).unwrap();
    }
    writeln!(out, "p x3sat {} {}", doc.n, doc.clauses.len()).unwrap();
    for c in &doc.clauses {
        for lit in c {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    for (lit, w) in &doc.weights {
        writeln!(out, "w {lit} {w}").unwrap();
    }
    out
}
