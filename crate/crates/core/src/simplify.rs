//! Count-preserving reductions applied before any branching.
//!
//! Every rule rewrites `(formula, c)` and a running multiplier so that
//! `multiplier * count(formula', c') == count(formula, c)`, where `count` is
//! the weighted sum over exactly-one solutions. Rules are tried in a fixed
//! priority order and the first applicable one fires.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{CardinalityVector, ClauseId, Entry, Formula, Literal, Rule, Var};
use crate::semiring::Semiring;

pub const DEFAULT_CONTRACTION_CAP: usize = 20;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SimplifyConfig {
    /// Largest semi-isolated set that is contracted by enumeration.
    pub contraction_cap: usize,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            contraction_cap: DEFAULT_CONTRACTION_CAP,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Reduced,
    Unsat,
    /// No clause and no variable left; the multiplier is the full count.
    Solved,
}

#[derive(Clone, Debug)]
pub struct SimplifyOutcome<W> {
    pub status: Status,
    pub multiplier: W,
    pub formula: Formula,
    pub cv: CardinalityVector<W>,
}

/// Diagnostic record of how a variable left the formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Substitution {
    Assign { var: Var, value: bool },
    Link { var: Var, by: Literal },
    Merge { kept: Var, dropped: Var },
    Contract { into: Var, dropped: Vec<Var> },
    Free { var: Var },
}

/// Working state of a reduction: formula, cardinality vector and the
/// multiplier accumulated from variables fixed so far.
#[derive(Clone, Debug)]
pub struct Reducer<W> {
    pub formula: Formula,
    pub cv: CardinalityVector<W>,
    pub multiplier: W,
    pub unsat: bool,
    pub config: SimplifyConfig,
    pub log: Vec<Substitution>,
    pub fired: Vec<Rule>,
}

/// Exactly-one satisfiability of a single clause on its own.
fn locally_satisfiable(items: &[Entry]) -> bool {
    let vars: Vec<Var> = items
        .iter()
        .filter_map(|e| e.var())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    (0..1u32 << vars.len()).any(|mask| {
        let value = |v: Var| mask >> vars.iter().position(|&u| u == v).unwrap() & 1 == 1;
        items
            .iter()
            .filter(|e| match **e {
                Entry::Const(b) => b,
                Entry::Lit(l) => l.eval(value(l.var())),
            })
            .count()
            == 1
    })
}

impl<W: Semiring> Reducer<W> {
    pub fn new(formula: Formula, cv: CardinalityVector<W>, config: SimplifyConfig) -> Self {
        Reducer {
            formula,
            cv,
            multiplier: W::one(),
            unsat: false,
            config,
            log: Vec::new(),
            fired: Vec::new(),
        }
    }

    pub fn into_outcome(self) -> SimplifyOutcome<W> {
        let status = if self.unsat {
            Status::Unsat
        } else if self.formula.is_empty() && self.cv.is_empty() {
            Status::Solved
        } else {
            Status::Reduced
        };
        let multiplier = if self.unsat {
            W::zero()
        } else {
            self.multiplier
        };
        SimplifyOutcome {
            status,
            multiplier,
            formula: self.formula,
            cv: self.cv,
        }
    }

    /// Number of unassigned variables.
    pub fn live_vars(&self) -> usize {
        self.cv.len()
    }

    fn mark_unsat(&mut self) {
        self.unsat = true;
        self.multiplier = W::zero();
    }

    /// Sets literal `l` true: multiplies by `c(l)` and drops the variable.
    pub fn make_true(&mut self, l: Literal) {
        let (pos, neg) = self.cv.remove(l.var()).expect("live variable");
        let w = if l.is_negated() { neg } else { pos };
        self.multiplier = self.multiplier.mul(&w);
        self.formula.assign(l.var(), l.satisfying_value());
        self.log.push(Substitution::Assign {
            var: l.var(),
            value: l.satisfying_value(),
        });
    }

    pub fn make_false(&mut self, l: Literal) {
        self.make_true(!l);
    }

    /// Records that literal `drop` equals literal `keep` and eliminates the
    /// variable of `drop`: `c(keep) *= c(drop)`, `c(-keep) *= c(-drop)`.
    pub fn link(&mut self, keep: Literal, drop: Literal) {
        link_entries(&mut self.cv, keep, drop);
        let by = if drop.is_negated() { !keep } else { keep };
        self.formula.substitute(drop.var(), by);
        self.log.push(Substitution::Link {
            var: drop.var(),
            by,
        });
    }

    /// Runs every rule to the fixpoint.
    pub fn run_fixpoint(&mut self) {
        while !self.unsat && self.step() {}
    }

    /// Fires the highest-priority applicable rule; false when none applies.
    pub fn step(&mut self) -> bool {
        self.constants_step()
            || self.two_literal()
            || self.complementary()
            || self.repeated_literal()
            || self.complementary_triple()
            || self.singletons()
            || self.overlaps_step()
            || self.contraction()
    }

    fn constants_step(&mut self) -> bool {
        !self.unsat
            && (self.unsat_or_free() || self.constant_one() || self.constant_zero() || self.unit())
    }

    fn overlaps_step(&mut self) -> bool {
        self.shared_pair_rule(Rule::SharedPair)
            || self.shared_pair_rule(Rule::SharedPairOneFlip)
            || self.shared_pair_rule(Rule::SharedPairTwoFlips)
    }

    fn first_clause(&self, pred: impl Fn(&[Entry]) -> bool) -> Option<ClauseId> {
        self.formula
            .clauses()
            .find(|c| pred(&c.items))
            .map(|c| c.id)
    }

    /// Local unsatisfiability ends the reduction; variables no longer
    /// occurring anywhere are summed out.
    fn unsat_or_free(&mut self) -> bool {
        if self
            .formula
            .clauses()
            .any(|c| !locally_satisfiable(&c.items))
        {
            self.fired.push(Rule::Unsat);
            self.mark_unsat();
            return true;
        }
        let free: Vec<Var> = self
            .cv
            .vars()
            .filter(|&v| !self.formula.contains_var(v))
            .collect();
        if free.is_empty() {
            return false;
        }
        for v in free {
            let (pos, neg) = self.cv.remove(v).expect("live variable");
            self.multiplier = self.multiplier.mul(&pos.add(&neg));
            self.log.push(Substitution::Free { var: v });
            self.fired.push(Rule::FreeVariable);
        }
        true
    }

    /// `(1 v delta)`: every literal of delta is false.
    fn constant_one(&mut self) -> bool {
        let Some(id) = self.first_clause(|items| items.contains(&Entry::Const(true))) else {
            return false;
        };
        let lits: Vec<Literal> = self.formula.clause(id).unwrap().literals().collect();
        for l in lits {
            if self.cv.contains(l.var()) {
                self.make_false(l);
            }
        }
        self.formula.remove_clause(id);
        self.fired.push(Rule::ConstantOne);
        true
    }

    /// `(0 v delta)` becomes `delta`.
    fn constant_zero(&mut self) -> bool {
        let Some(id) = self.first_clause(|items| items.contains(&Entry::Const(false))) else {
            return false;
        };
        let items: Vec<Entry> = self
            .formula
            .clause(id)
            .unwrap()
            .items
            .iter()
            .copied()
            .filter(|e| *e != Entry::Const(false))
            .collect();
        debug_assert!(!items.is_empty(), "all-zero clause passed the local check");
        self.formula.set_items(id, items);
        self.fired.push(Rule::ConstantZero);
        true
    }

    fn unit(&mut self) -> bool {
        let Some(id) = self.first_clause(|items| items.len() == 1) else {
            return false;
        };
        let l = self.formula.clause(id).unwrap().items[0]
            .literal()
            .expect("constants handled");
        self.make_true(l);
        self.fired.push(Rule::Unit);
        true
    }

    /// `(x v y)` over two variables: `y = -x`.
    fn two_literal(&mut self) -> bool {
        let Some(id) = self.first_clause(|items| {
            items.len() == 2 && items[0].var().is_some() && items[0].var() != items[1].var()
        }) else {
            return false;
        };
        let lits: Vec<Literal> = self.formula.clause(id).unwrap().literals().collect();
        let (x, y) = (lits[0], lits[1]);
        self.link(!x, y);
        self.fired.push(Rule::TwoLiteral);
        true
    }

    /// `(x v -x)` is always exactly satisfied.
    fn complementary(&mut self) -> bool {
        let Some(id) = self.first_clause(|items| {
            items.len() == 2
                && matches!((items[0], items[1]), (Entry::Lit(a), Entry::Lit(b)) if a == !b)
        }) else {
            return false;
        };
        let x = self.formula.clause(id).unwrap().items[0].literal().unwrap();
        self.formula.remove_clause(id);
        if !self.formula.contains_var(x.var()) {
            let (pos, neg) = self.cv.remove(x.var()).expect("live variable");
            self.multiplier = self.multiplier.mul(&pos.add(&neg));
            self.log.push(Substitution::Free { var: x.var() });
        }
        self.fired.push(Rule::Complementary);
        true
    }

    /// `(x v x v y)`: the repeated literal is false.
    fn repeated_literal(&mut self) -> bool {
        let found = self.formula.clauses().find_map(|c| {
            let lits: Vec<Literal> = c.literals().collect();
            if lits.len() != 3 {
                return None;
            }
            (0..3).find_map(|i| ((i + 1)..3).find(|&j| lits[i] == lits[j]).map(|_| lits[i]))
        });
        let Some(x) = found else {
            return false;
        };
        self.make_false(x);
        self.fired.push(Rule::RepeatedLiteral);
        true
    }

    /// `(x v -x v y)`: `y` is false.
    fn complementary_triple(&mut self) -> bool {
        let found = self.formula.clauses().find_map(|c| {
            let lits: Vec<Literal> = c.literals().collect();
            if lits.len() != 3 {
                return None;
            }
            (0..3).find_map(|k| {
                let (a, b) = match k {
                    0 => (lits[1], lits[2]),
                    1 => (lits[0], lits[2]),
                    _ => (lits[0], lits[1]),
                };
                (a == !b && lits[k].var() != a.var()).then_some(lits[k])
            })
        });
        let Some(y) = found else {
            return false;
        };
        self.make_false(y);
        self.fired.push(Rule::ComplementaryTriple);
        true
    }

    /// Two singletons `x, y` of one clause merge into `x`.
    fn singletons(&mut self) -> bool {
        let found = self.formula.clauses().find_map(|c| {
            let mut singles: Vec<Literal> = c
                .literals()
                .filter(|l| self.formula.occurrence_count(l.var()) == 1)
                .collect();
            singles.sort_by_key(|l| l.var());
            singles.dedup_by_key(|l| l.var());
            (singles.len() >= 2).then(|| (c.id, singles[0], singles[1]))
        });
        let Some((id, x, y)) = found else {
            return false;
        };
        merge_entries(&mut self.cv, x, y);
        let items: Vec<Entry> = self
            .formula
            .clause(id)
            .unwrap()
            .items
            .iter()
            .copied()
            .filter(|e| e.var() != Some(y.var()))
            .collect();
        self.formula.set_items(id, items);
        self.log.push(Substitution::Merge {
            kept: x.var(),
            dropped: y.var(),
        });
        self.fired.push(Rule::Singletons);
        true
    }

    /// Two 3-clauses sharing two variables. `rule` selects
    /// which polarity pattern is searched for.
    fn shared_pair_rule(&mut self, rule: Rule) -> bool {
        let Some((a, b, sa, sb)) = self.find_shared_pair(rule) else {
            return false;
        };
        let ca = self.formula.clause(a).unwrap().clone();
        let cb = self.formula.clause(b).unwrap().clone();
        let lit_in =
            |c: &crate::model::Clause, v: Var| c.literals().find(|l| l.var() == v).unwrap();
        match rule {
            Rule::SharedPair => {
                let z = ca
                    .literals()
                    .find(|l| l.var() != sa && l.var() != sb)
                    .unwrap();
                let w = cb
                    .literals()
                    .find(|l| l.var() != sa && l.var() != sb)
                    .unwrap();
                if z == w {
                    self.formula.remove_clause(b);
                } else if z == !w {
                    self.fired.push(rule);
                    self.mark_unsat();
                    return true;
                } else {
                    self.link(z, w);
                    self.formula.remove_clause(b);
                }
            }
            Rule::SharedPairOneFlip => {
                // the variable with equal literals in both clauses is false
                let x = if lit_in(&ca, sa) == lit_in(&cb, sa) {
                    lit_in(&ca, sa)
                } else {
                    lit_in(&ca, sb)
                };
                self.make_false(x);
            }
            Rule::SharedPairTwoFlips => {
                let x = lit_in(&ca, sa);
                let y = lit_in(&ca, sb);
                self.link(!x, y);
            }
            _ => unreachable!("not an overlap rule"),
        }
        self.fired.push(rule);
        true
    }

    /// First clause pair (ascending ids) and variable pair matching the
    /// polarity pattern of `rule`.
    fn find_shared_pair(&self, rule: Rule) -> Option<(ClauseId, ClauseId, Var, Var)> {
        for ca in self.formula.clauses() {
            if ca.len() != 3 {
                continue;
            }
            let va = ca.vars();
            if va.len() != 3 {
                continue;
            }
            let mut partners: BTreeSet<ClauseId> = BTreeSet::new();
            for &v in &va {
                partners.extend(self.formula.clauses_of(v).filter(|&id| id > ca.id));
            }
            for id in partners {
                let cb = self.formula.clause(id).unwrap();
                if cb.len() != 3 || cb.vars().len() != 3 {
                    continue;
                }
                let shared: Vec<Var> = va.intersection(&cb.vars()).copied().collect();
                for i in 0..shared.len() {
                    for j in (i + 1)..shared.len() {
                        let (s, t) = (shared[i], shared[j]);
                        let same = |v: Var| {
                            ca.literals().find(|l| l.var() == v)
                                == cb.literals().find(|l| l.var() == v)
                        };
                        let flips = usize::from(!same(s)) + usize::from(!same(t));
                        let wanted = match rule {
                            Rule::SharedPair => 0,
                            Rule::SharedPairOneFlip => 1,
                            _ => 2,
                        };
                        if flips == wanted {
                            return Some((ca.id, id, s, t));
                        }
                    }
                }
            }
        }
        None
    }

    fn contraction(&mut self) -> bool {
        let Some((set, boundary)) = self.find_semi_isolated() else {
            return false;
        };
        contract_into(&mut self.formula, &mut self.cv, &set, boundary);
        let dropped: Vec<Var> = set.iter().copied().filter(|&v| v != boundary).collect();
        self.log.push(Substitution::Contract {
            into: boundary,
            dropped,
        });
        self.fired.push(Rule::Contraction);
        true
    }

    /// Candidate sets are the closed neighbourhood of a variable occurring
    /// at least three times, optionally extended by one outside variable.
    fn find_semi_isolated(&self) -> Option<(BTreeSet<Var>, Var)> {
        let cap = self.config.contraction_cap;
        let heavy: Vec<Var> = self
            .formula
            .vars()
            .filter(|&v| self.formula.occurrence_count(v) >= 3)
            .collect();
        for x0 in heavy {
            let mut base: BTreeSet<Var> = BTreeSet::new();
            for id in self.formula.clauses_of(x0) {
                base.extend(self.formula.clause(id).unwrap().vars());
            }
            if let Some(b) = semi_isolated_boundary(&self.formula, &base, cap) {
                return Some((base, b));
            }
            let mut outside: BTreeSet<Var> = BTreeSet::new();
            for &v in &base {
                for id in self.formula.clauses_of(v) {
                    outside.extend(self.formula.clause(id).unwrap().vars().difference(&base));
                }
            }
            for u in outside {
                let mut set = base.clone();
                set.insert(u);
                if let Some(b) = semi_isolated_boundary(&self.formula, &set, cap) {
                    return Some((set, b));
                }
            }
        }
        None
    }
}

/// `c(keep) *= c(drop)`, `c(-keep) *= c(-drop)`, then drops `drop`'s entries.
fn link_entries<W: Semiring>(cv: &mut CardinalityVector<W>, keep: Literal, drop: Literal) {
    let t = cv.get(keep).mul(cv.get(drop));
    let f = cv.get(!keep).mul(cv.get(!drop));
    cv.set(keep, t);
    cv.set(!keep, f);
    cv.remove(drop.var());
}

/// Singleton merge of `y` into `x` for a clause containing both.
fn merge_entries<W: Semiring>(cv: &mut CardinalityVector<W>, x: Literal, y: Literal) {
    let t = cv.get(x).mul(cv.get(!y)).add(&cv.get(!x).mul(cv.get(y)));
    let f = cv.get(!x).mul(cv.get(!y));
    cv.set(x, t);
    cv.set(!x, f);
    cv.remove(y.var());
}

/// Boundary variable of `set` when it is semi-isolated and `3 <= |set| <= cap`.
/// A set touching nothing outside uses its lowest variable.
pub fn semi_isolated_boundary(formula: &Formula, set: &BTreeSet<Var>, cap: usize) -> Option<Var> {
    if set.len() < 3 || set.len() > cap {
        return None;
    }
    let mut boundary: Option<Var> = None;
    for &v in set {
        if !formula.contains_var(v) {
            return None;
        }
        for id in formula.clauses_of(v) {
            let vars = formula.clause(id).unwrap().vars();
            if vars.is_subset(set) {
                continue;
            }
            match boundary {
                None => boundary = Some(v),
                Some(b) if b == v => {}
                Some(_) => return None,
            }
        }
    }
    boundary.or_else(|| set.iter().next().copied())
}

/// Sum over assignments `delta` of `inner` satisfying `clauses` (with the
/// boundary fixed by `fixed`) of `prod c(l)` over literals true in `delta`.
fn enumerate_inner<W: Semiring>(
    clauses: &[Vec<Entry>],
    inner: &[Var],
    fixed: (Var, bool),
    cv: &CardinalityVector<W>,
) -> W {
    // clause items resolved to either a constant or an index into `inner`
    let compiled: Vec<Vec<(Option<usize>, bool)>> = clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|e| match *e {
                    Entry::Const(b) => (None, b),
                    Entry::Lit(l) if l.var() == fixed.0 => (None, l.eval(fixed.1)),
                    Entry::Lit(l) => (Some(inner.binary_search(&l.var()).unwrap()), l.is_negated()),
                })
                .collect()
        })
        .collect();
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); inner.len()];
    for (ci, c) in compiled.iter().enumerate() {
        // a clause is checked once its last inner variable is assigned
        let last = c.iter().filter_map(|(i, _)| *i).max();
        match last {
            Some(i) => watch[i].push(ci),
            None => {
                let ones = c.iter().filter(|(_, b)| *b).count();
                if ones != 1 {
                    return W::zero();
                }
            }
        }
    }
    let mut values = vec![false; inner.len()];
    dfs(0, &compiled, &watch, inner, cv, &mut values)
}

fn dfs<W: Semiring>(
    depth: usize,
    compiled: &[Vec<(Option<usize>, bool)>],
    watch: &[Vec<usize>],
    inner: &[Var],
    cv: &CardinalityVector<W>,
    values: &mut Vec<bool>,
) -> W {
    if depth == inner.len() {
        return W::one();
    }
    let mut total = W::zero();
    for value in [true, false] {
        values[depth] = value;
        let ok = watch[depth].iter().all(|&ci| {
            compiled[ci]
                .iter()
                .filter(|(idx, b)| match idx {
                    None => *b,
                    Some(i) => values[*i] != *b,
                })
                .count()
                == 1
        });
        if !ok {
            continue;
        }
        let rest = dfs(depth + 1, compiled, watch, inner, cv, values);
        if rest.is_zero() {
            continue;
        }
        let lit = Literal::new(inner[depth], !value);
        total = total.add(&cv.get(lit).mul(&rest));
    }
    total
}

/// Contracts the semi-isolated `set` into `boundary` (no validation).
fn contract_into<W: Semiring>(
    formula: &mut Formula,
    cv: &mut CardinalityVector<W>,
    set: &BTreeSet<Var>,
    boundary: Var,
) {
    let internal: BTreeSet<ClauseId> = set
        .iter()
        .flat_map(|&v| formula.clauses_of(v).collect::<Vec<_>>())
        .filter(|&id| formula.clause(id).unwrap().vars().is_subset(set))
        .collect();
    let clauses: Vec<Vec<Entry>> = internal
        .iter()
        .map(|&id| formula.clause(id).unwrap().items.clone())
        .collect();
    let inner: Vec<Var> = set.iter().copied().filter(|&v| v != boundary).collect();
    let z1 = enumerate_inner(&clauses, &inner, (boundary, true), cv);
    let z0 = enumerate_inner(&clauses, &inner, (boundary, false), cv);
    let x = Literal::pos(boundary);
    let t = cv.get(x).mul(&z1);
    let f = cv.get(!x).mul(&z0);
    cv.set(x, t);
    cv.set(!x, f);
    for id in internal {
        formula.remove_clause(id);
    }
    for v in inner {
        cv.remove(v);
    }
}

/// `Link(c, x, y)`: literal `y` is identified with literal `x` and its
/// variable is dropped from the vector.
pub fn link<W: Semiring>(
    cv: &CardinalityVector<W>,
    x: Literal,
    y: Literal,
) -> Result<CardinalityVector<W>> {
    if x.var() == y.var() {
        return Err(Error::contract(format!("cannot link {x} with {y}")));
    }
    for v in [x.var(), y.var()] {
        if !cv.contains(v) {
            return Err(Error::UnknownVariable(v));
        }
    }
    let mut out = cv.clone();
    link_entries(&mut out, x, y);
    Ok(out)
}

fn run_group<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    rules: impl Fn(&mut Reducer<W>) -> bool,
) -> SimplifyOutcome<W> {
    let mut r = Reducer::new(formula.clone(), cv.clone(), SimplifyConfig::default());
    while !r.unsat && (r.constants_step() || rules(&mut r)) {}
    r.into_outcome()
}

/// Constant propagation: local unsatisfiability, `(1 v delta)`, `(0 v delta)`
/// and unit clauses, repeated until none applies.
pub fn reduce_constants<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> SimplifyOutcome<W> {
    run_group(formula, cv, |_| false)
}

/// Two-literal clauses, followed by constant propagation.
pub fn reduce_two_literal<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> SimplifyOutcome<W> {
    run_group(formula, cv, |r| r.two_literal() || r.complementary())
}

/// Clauses with a repeated variable, followed by constant propagation.
pub fn reduce_intra_clause<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> SimplifyOutcome<W> {
    run_group(formula, cv, |r| {
        r.repeated_literal() || r.complementary_triple()
    })
}

/// Two singletons of a clause merge into one, followed by constant propagation.
pub fn merge_singletons<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> SimplifyOutcome<W> {
    run_group(formula, cv, |r| r.singletons())
}

/// Clause pairs sharing two variables, followed by constant propagation.
pub fn resolve_overlaps<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> SimplifyOutcome<W> {
    run_group(formula, cv, |r| r.overlaps_step())
}

/// Replaces the semi-isolated set `set` by its boundary variable `x`, folding
/// the internal solutions for `x = 1` and `x = 0` into `c(x)` and `c(-x)`.
pub fn contract_semi_isolated<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    set: &BTreeSet<Var>,
    x: Var,
) -> Result<SimplifyOutcome<W>> {
    if !set.contains(&x) {
        return Err(Error::contract(format!("boundary x{x} is not in the set")));
    }
    if set.len() > DEFAULT_CONTRACTION_CAP {
        return Err(Error::contract(format!(
            "set of {} variables exceeds the cap",
            set.len()
        )));
    }
    for &v in set {
        if !formula.contains_var(v) || !cv.contains(v) {
            return Err(Error::UnknownVariable(v));
        }
        if v == x {
            continue;
        }
        for id in formula.clauses_of(v) {
            if !formula.clause(id).unwrap().vars().is_subset(set) {
                return Err(Error::contract(format!(
                    "x{v} occurs outside the set in {id}"
                )));
            }
        }
    }
    let mut formula = formula.clone();
    let mut cv = cv.clone();
    contract_into(&mut formula, &mut cv, set, x);
    Ok(SimplifyOutcome {
        status: Status::Reduced,
        multiplier: W::one(),
        formula,
        cv,
    })
}

/// Applies all reductions in priority order until none applies.
pub fn simplify_fixpoint<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> SimplifyOutcome<W> {
    simplify_with(formula, cv, SimplifyConfig::default())
}

pub fn simplify_with<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    config: SimplifyConfig,
) -> SimplifyOutcome<W> {
    let mut r = Reducer::new(formula.clone(), cv.clone(), config);
    r.run_fixpoint();
    r.into_outcome()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_count;
    use num_bigint::BigUint;

    fn big(v: u32) -> BigUint {
        BigUint::from(v)
    }

    fn ones(f: &Formula) -> CardinalityVector<BigUint> {
        CardinalityVector::ones_for(f)
    }

    /// multiplier * count(after) == count(before)
    fn preserved(
        before: &Formula,
        cv: &CardinalityVector<BigUint>,
        out: &SimplifyOutcome<BigUint>,
    ) -> bool {
        let lhs = brute_count(before, cv).unwrap();
        let rhs = match out.status {
            Status::Unsat => big(0),
            _ => &out.multiplier * brute_count(&out.formula, &out.cv).unwrap(),
        };
        lhs == rhs
    }

    #[test]
    fn link_updates_surviving_entries() {
        let mut c = CardinalityVector::<BigUint>::ones([1, 2]);
        c.set(Literal::pos(2), big(2));
        c.set(Literal::neg(2), big(3));
        let l = link(&c, Literal::pos(1), Literal::pos(2)).unwrap();
        assert_eq!(
            (l.get(Literal::pos(1)), l.get(Literal::neg(1))),
            (&big(2), &big(3))
        );
        assert!(!l.contains(2));
        let l = link(&c, Literal::pos(1), Literal::neg(2)).unwrap();
        assert_eq!(
            (l.get(Literal::pos(1)), l.get(Literal::neg(1))),
            (&big(3), &big(2))
        );
        let o = link(
            &CardinalityVector::<BigUint>::ones([1, 2, 3]),
            Literal::pos(1),
            Literal::neg(3),
        )
        .unwrap();
        assert!(o
            .vars()
            .all(|v| o.get(Literal::pos(v)) == &big(1) && o.get(Literal::neg(v)) == &big(1)));
        assert!(link(&c, Literal::pos(1), Literal::neg(1)).is_err());
    }

    #[test]
    fn constant_one_clause() {
        let mut f = Formula::from_signed(&[&[1, 2, 3]]);
        let cv = ones(&f);
        f.assign(1, true);
        let out = reduce_constants(&f, &cv.restrict([2, 3]));
        assert_eq!(out.status, Status::Solved);
        assert_eq!(out.multiplier, big(1));
        assert!(out.cv.is_empty());
    }

    #[test]
    fn all_zero_clause_is_unsat() {
        let mut f = Formula::from_signed(&[&[1, 2]]);
        f.assign(1, false);
        f.assign(2, false);
        let out = reduce_constants(&f, &CardinalityVector::<BigUint>::new());
        assert_eq!(out.status, Status::Unsat);
        let out = reduce_constants(&Formula::new(), &CardinalityVector::<BigUint>::new());
        assert_eq!((out.status, out.multiplier), (Status::Solved, big(1)));
    }

    #[test]
    fn two_literal_link() {
        // (x v y) & (y v a v b)
        let f = Formula::from_signed(&[&[1, 2], &[2, 3, 4]]);
        let out = reduce_two_literal(&f, &ones(&f));
        assert_eq!(out.formula.num_clauses(), 1);
        assert_eq!(
            out.formula.clause(ClauseId(1)).unwrap().to_string(),
            "(-x1 v x3 v x4)"
        );
        assert!(preserved(&f, &ones(&f), &out));
    }

    #[test]
    fn complementary_pair() {
        let lone = Formula::from_signed(&[&[1, -1]]);
        let out = reduce_two_literal(&lone, &ones(&lone));
        assert_eq!((out.status, out.multiplier), (Status::Solved, big(2)));
        let f = Formula::from_signed(&[&[1, -1], &[1, 2, 3]]);
        let out = reduce_two_literal(&f, &ones(&f));
        assert_eq!(
            out.formula.clause_ids().collect::<Vec<_>>(),
            vec![ClauseId(1)]
        );
        assert_eq!(out.multiplier, big(1));
    }

    #[test]
    fn intra_clause_rules() {
        let f = Formula::from_signed(&[&[1, 1, 2]]);
        let out = reduce_intra_clause(&f, &ones(&f));
        assert_eq!((out.status, out.multiplier), (Status::Solved, big(1)));

        let f = Formula::from_signed(&[&[1, -1, 2]]);
        let mut cv = ones(&f);
        cv.set(Literal::neg(2), big(5));
        let out = reduce_intra_clause(&f, &cv);
        // y = 0 contributes c(-y) = 5, the remaining (x v -x) sums to 2
        assert_eq!(out.multiplier, big(5));
        assert!(preserved(&f, &cv, &out));

        let f = Formula::from_signed(&[&[1, 1, 1]]);
        assert_eq!(reduce_intra_clause(&f, &ones(&f)).status, Status::Unsat);
    }

    #[test]
    fn singleton_merge() {
        // x1, x2 singletons; x3 shared with a second clause
        let f = Formula::from_signed(&[&[1, 2, 3], &[3, 4, 5], &[3, 6, 7]]);
        let mut r = Reducer::new(f.clone(), ones(&f), SimplifyConfig::default());
        assert!(r.singletons());
        assert_eq!(r.cv.get(Literal::pos(1)), &big(2));
        assert_eq!(r.cv.get(Literal::neg(1)), &big(1));
        assert_eq!(
            r.formula.clause(ClauseId(0)).unwrap().to_string(),
            "(x1 v x3)"
        );

        let f = Formula::from_signed(&[&[1, 2, 3], &[3, 4, 5], &[3, 6, 7]]);
        let mut cv = ones(&f);
        cv.set(Literal::pos(2), big(2));
        cv.set(Literal::neg(2), big(3));
        let mut r = Reducer::new(f, cv, SimplifyConfig::default());
        r.singletons();
        assert_eq!(r.cv.get(Literal::pos(1)), &big(5));
        assert_eq!(r.cv.get(Literal::neg(1)), &big(3));

        let f = Formula::from_signed(&[&[1, 2, 3]]);
        let out = simplify_fixpoint(&f, &ones(&f));
        assert_eq!((out.status, out.multiplier), (Status::Solved, big(3)));
    }

    #[test]
    fn overlap_rules() {
        let f = Formula::from_signed(&[&[1, 2, 3], &[1, 2, 4]]);
        let out = resolve_overlaps(&f, &ones(&f));
        assert_eq!(out.formula.num_clauses(), 1);
        assert!(!out.cv.contains(4));
        assert!(preserved(&f, &ones(&f), &out));

        let f = Formula::from_signed(&[&[1, 2, 3], &[1, -2, 4]]);
        let out = resolve_overlaps(&f, &ones(&f));
        assert!(!out.cv.contains(1));
        assert!(preserved(&f, &ones(&f), &out));

        let f = Formula::from_signed(&[&[1, 2, 3], &[-1, -2, 4]]);
        let out = resolve_overlaps(&f, &ones(&f));
        assert!(!out.cv.contains(2));
        assert!(preserved(&f, &ones(&f), &out));

        let dup = Formula::from_signed(&[&[1, 2, 3], &[1, 2, 3]]);
        let out = resolve_overlaps(&dup, &ones(&dup));
        assert_eq!(out.formula.num_clauses(), 1);

        let clash = Formula::from_signed(&[&[1, 2, 3], &[1, 2, -3]]);
        assert_eq!(
            resolve_overlaps(&clash, &ones(&clash)).status,
            Status::Unsat
        );
    }

    #[test]
    fn contraction_examples() {
        let f = Formula::from_signed(&[&[1, 2, 3]]);
        let set: BTreeSet<Var> = [1, 2, 3].into();
        let out = contract_semi_isolated(&f, &ones(&f), &set, 1).unwrap();
        assert_eq!(out.cv.get(Literal::pos(1)), &big(1));
        assert_eq!(out.cv.get(Literal::neg(1)), &big(2));
        assert!(out.formula.is_empty());

        // x = 1 leaves (x v -y v -z) with three true entries
        let f = Formula::from_signed(&[&[1, 2, 3], &[1, -2, -3], &[1, 4, 5]]);
        let set: BTreeSet<Var> = [1, 2, 3].into();
        let out = contract_semi_isolated(&f, &ones(&f), &set, 1).unwrap();
        assert_eq!(out.cv.get(Literal::pos(1)), &big(0));
        assert_eq!(out.cv.get(Literal::neg(1)), &big(2));

        // I = {x,y,z,a,b}: 16 assignments of {y,z,a,b} enumerated by hand in the test below
        let f = Formula::from_signed(&[&[1, 2, 3], &[1, 4, 5]]);
        let set: BTreeSet<Var> = [1, 2, 3, 4, 5].into();
        let out = contract_semi_isolated(&f, &ones(&f), &set, 1).unwrap();
        assert_eq!(out.cv.get(Literal::pos(1)), &big(1));
        assert_eq!(out.cv.get(Literal::neg(1)), &big(4));

        let f = Formula::from_signed(&[&[1, 2, 3], &[2, 4, 5]]);
        let set: BTreeSet<Var> = [1, 2, 3].into();
        assert!(contract_semi_isolated(&f, &ones(&f), &set, 1).is_err());
    }

    #[test]
    fn contraction_oracle_by_enumeration() {
        // independent count of Z_1 / Z_0 for (x v y v z) & (x v a v b)
        let (mut z1, mut z0) = (0, 0);
        for m in 0u32..16 {
            let (y, z, a, b) = (m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1);
            for x in 0..2 {
                if x + y + z == 1 && x + a + b == 1 {
                    if x == 1 {
                        z1 += 1;
                    } else {
                        z0 += 1;
                    }
                }
            }
        }
        assert_eq!((z1, z0), (1, 4));
    }

    #[test]
    fn fixpoint_cascades() {
        // (1 v y v z) & (y v a v b)
        let mut f = Formula::from_signed(&[&[1, 2, 3], &[2, 4, 5]]);
        f.assign(1, true);
        let cv = CardinalityVector::<BigUint>::ones([2, 3, 4, 5]);
        let out = simplify_fixpoint(&f, &cv);
        assert_eq!(out.status, Status::Solved);
        assert_eq!(out.multiplier, big(2));

        let reduced = Formula::from_signed(&[&[1, 2, 3], &[1, 4, 5], &[1, 6, 7], &[2, 4, 6]]);
        let mut r = Reducer::new(
            reduced.clone(),
            ones(&reduced),
            SimplifyConfig { contraction_cap: 0 },
        );
        r.run_fixpoint();
        assert_eq!(r.formula, reduced);
        assert_eq!(r.multiplier, big(1));

        // (x v y v z) & (x v y v w) & (z v w v v)
        let f = Formula::from_signed(&[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]]);
        let mut r = Reducer::new(f.clone(), ones(&f), SimplifyConfig::default());
        r.run_fixpoint();
        assert_eq!(r.fired[0], Rule::SharedPair);
        assert!(r.fired.contains(&Rule::RepeatedLiteral));
        let out = r.into_outcome();
        assert!(preserved(&f, &ones(&f), &out));
        assert_eq!(
            out.multiplier * brute_count(&out.formula, &out.cv).unwrap(),
            big(2)
        );
    }
}
