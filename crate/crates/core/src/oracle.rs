//! Brute-force ground truth: enumerate every assignment and evaluate the
//! exactly-one condition directly. Nothing here touches the reduction code.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::{CardinalityVector, Entry, Formula, Literal, Var, WeightAssignment};
use crate::semiring::{MaxWeightPair, Semiring, WeightPolynomial};

pub const DEFAULT_CAP: usize = 24;

#[derive(Copy, Clone, Debug)]
pub struct Oracle {
    pub cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { cap: DEFAULT_CAP }
    }
}

/// Clause entries compiled against a dense variable order.
enum Item {
    Const(bool),
    Lit { bit: usize, negated: bool },
}

struct Compiled {
    vars: Vec<Var>,
    clauses: Vec<Vec<Item>>,
}

impl Compiled {
    fn new(formula: &Formula, extra: impl IntoIterator<Item = Var>, cap: usize) -> Result<Self> {
        let universe: BTreeSet<Var> = formula.vars().chain(extra).collect();
        if universe.len() > cap {
            return Err(Error::OracleCap {
                vars: universe.len(),
                cap,
            });
        }
        let vars: Vec<Var> = universe.into_iter().collect();
        let clauses = formula
            .clauses()
            .map(|c| {
                c.items
                    .iter()
                    .map(|e| match *e {
                        Entry::Const(b) => Item::Const(b),
                        Entry::Lit(l) => Item::Lit {
                            bit: vars
                                .binary_search(&l.var())
                                .expect("universe covers formula"),
                            negated: l.is_negated(),
                        },
                    })
                    .collect()
            })
            .collect();
        Ok(Compiled { vars, clauses })
    }

    fn satisfied(&self, mask: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .filter(|it| match **it {
                    Item::Const(b) => b,
                    Item::Lit { bit, negated } => ((mask >> bit) & 1 == 1) != negated,
                })
                .count()
                == 1
        })
    }

    /// Satisfying assignments in binary-counting order, bit `i` holding `vars[i]`.
    fn solutions(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.vars.len()).filter(move |&m| self.satisfied(m))
    }

    fn true_literals(&self, mask: u64) -> impl Iterator<Item = Literal> + '_ {
        self.vars
            .iter()
            .enumerate()
            .map(move |(i, &v)| Literal::new(v, (mask >> i) & 1 == 0))
    }
}

impl Oracle {
    pub fn new(cap: usize) -> Self {
        Oracle { cap }
    }

    /// `sum over solutions h of prod over literals true in h of c(l)`, taken
    /// over every variable of `cv` (variables of `cv` absent from the formula
    /// are unconstrained).
    pub fn brute_count<W: Semiring>(
        &self,
        formula: &Formula,
        cv: &CardinalityVector<W>,
    ) -> Result<W> {
        if let Some(v) = formula.vars().find(|&v| !cv.contains(v)) {
            return Err(Error::contract(format!("cardinality vector lacks x{v}")));
        }
        let compiled = Compiled::new(formula, cv.vars(), self.cap)?;
        let mut total = W::zero();
        for mask in compiled.solutions() {
            let term = compiled
                .true_literals(mask)
                .fold(W::one(), |acc, l| acc.mul(cv.get(l)));
            total = total.add(&term);
        }
        Ok(total)
    }

    /// Number of solutions per total true-literal weight.
    pub fn brute_count_by_weight(
        &self,
        formula: &Formula,
        weights: &WeightAssignment,
    ) -> Result<WeightPolynomial> {
        let compiled = Compiled::new(formula, weights.vars(), self.cap)?;
        let mut hist: Vec<BigUint> = Vec::new();
        for mask in compiled.solutions() {
            let w: u64 = compiled.true_literals(mask).map(|l| weights.get(l)).sum();
            let w = usize::try_from(w).map_err(|_| Error::input("weight overflow"))?;
            if hist.len() <= w {
                hist.resize(w + 1, BigUint::zero());
            }
            hist[w] += 1u32;
        }
        Ok(WeightPolynomial::from_coeffs(hist))
    }

    /// `(count, weight)` of the maximum-weight solutions; `(0, 0)` when unsatisfiable.
    pub fn brute_max_weight(
        &self,
        formula: &Formula,
        weights: &WeightAssignment,
    ) -> Result<MaxWeightPair> {
        let compiled = Compiled::new(formula, weights.vars(), self.cap)?;
        let mut best: Option<(u64, BigUint)> = None;
        for mask in compiled.solutions() {
            let w: u64 = compiled.true_literals(mask).map(|l| weights.get(l)).sum();
            match &mut best {
                Some((bw, count)) if *bw == w => *count += 1u32,
                Some((bw, _)) if *bw > w => {}
                _ => best = Some((w, BigUint::one())),
            }
        }
        Ok(match best {
            Some((d, c)) => MaxWeightPair::new(c, d),
            None => MaxWeightPair::new(BigUint::zero(), 0),
        })
    }
}

pub fn brute_count<W: Semiring>(formula: &Formula, cv: &CardinalityVector<W>) -> Result<W> {
    Oracle::default().brute_count(formula, cv)
}

pub fn brute_count_by_weight(
    formula: &Formula,
    weights: &WeightAssignment,
) -> Result<WeightPolynomial> {
    Oracle::default().brute_count_by_weight(formula, weights)
}

pub fn brute_max_weight(formula: &Formula, weights: &WeightAssignment) -> Result<MaxWeightPair> {
    Oracle::default().brute_max_weight(formula, weights)
}
