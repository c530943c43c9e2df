//! The counting recursion and its weighted variants.
//!
//! One recursion serves all three modes; only the value type changes.
//! Plain counts use [`BigUint`], per-weight counts use [`WeightPolynomial`]
//! and maximum-weight counts use [`MaxWeightPair`].

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::branch::bisect::{compute_bisection_with, BisectionStrategy};
use crate::branch::chain::{resolve_self_loop_in, self_loop_from_graph};
use crate::branch::graph::{build_clause_graph, ClauseGraph};
use crate::branch::select::{
    lookahead_on, select_cut_edge_variable, select_cycle_variable, CutChoice,
};
use crate::error::{Error, Result};
use crate::model::{
    CardinalityVector, EndTurn, Formula, Literal, PartitionState, Rule, SolveStats, Var,
    WeightAssignment,
};
use crate::semiring::{MaxWeightPair, Semiring, WeightPolynomial};
use crate::simplify::{Reducer, SimplifyConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Seeds every bisection; each bisection event derives its own stream.
    pub seed: u64,
    pub simplify: SimplifyConfig,
    pub bisection: BisectionStrategy,
    /// Two-sided lookahead before heavy-variable branching.
    pub lookahead: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            simplify: SimplifyConfig::default(),
            bisection: BisectionStrategy::default(),
            lookahead: true,
        }
    }
}

/// Default weight bound `q(n) = n^2`.
pub fn default_qbound(n: usize) -> u64 {
    (n as u64).saturating_mul(n as u64)
}

pub struct Counter<W> {
    config: SolverConfig,
    stats: SolveStats,
    bisections: u64,
    _value: std::marker::PhantomData<W>,
}

impl<W: Semiring> Counter<W> {
    pub fn new(config: SolverConfig) -> Self {
        Counter {
            config,
            stats: SolveStats::default(),
            bisections: 0,
            _value: std::marker::PhantomData,
        }
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn into_stats(self) -> SolveStats {
        self.stats
    }

    /// `sum over solutions h of prod over literals true in h of c(l)`.
    /// Panics if `cv` lacks a variable of `formula`; see [`check_domain`].
    pub fn count(
        &mut self,
        formula: &Formula,
        cv: &CardinalityVector<W>,
        state: PartitionState,
    ) -> W {
        let r = Reducer::new(formula.clone(), cv.clone(), self.config.simplify);
        self.solve(r, state, 0)
    }

    fn drain(&mut self, r: &mut Reducer<W>) {
        for rule in r.fired.drain(..) {
            self.stats.fire(rule);
        }
    }

    fn leaf(&mut self, value: W) -> W {
        self.stats.leaves += 1;
        value
    }

    fn solve(&mut self, mut r: Reducer<W>, mut state: PartitionState, depth: usize) -> W {
        self.stats.max_depth = self.stats.max_depth.max(depth);
        loop {
            r.run_fixpoint();
            self.drain(&mut r);
            if r.unsat {
                return self.leaf(W::zero());
            }
            if r.formula.is_empty() {
                debug_assert!(r.cv.is_empty());
                return self.leaf(r.multiplier);
            }
            state.retain_live(&r.formula);

            let heavy = r.formula.vars().any(|v| r.formula.occurrence_count(v) >= 3);
            if heavy && state.is_active() {
                state.clear();
            }
            let graph = if heavy {
                None
            } else {
                build_clause_graph(&r.formula).ok()
            };
            if let Some(g) = &graph {
                refresh(&mut state, g);
            }

            // independent components
            let crossing = graph
                .as_ref()
                .map_or(0, |g| g.crossing_edges(&state.left, &state.right).len());
            if crossing == 0 {
                let components = r.formula.connected_components();
                if components.len() >= 2 {
                    return self.split(r, components, depth);
                }
            }

            if heavy {
                // lookahead
                if self.config.lookahead {
                    if let Some((v, projected)) = lookahead_on(&r) {
                        self.stats.fire(Rule::Lookahead);
                        return self.branch_checked(r, v, projected, state, depth);
                    }
                }
                // heavy variable
                let v = r
                    .formula
                    .vars()
                    .find(|&v| r.formula.occurrence_count(v) >= 3)
                    .unwrap();
                self.stats.fire(Rule::Heavy);
                return self.branch(r, v, state, depth);
            }

            let g = graph.expect("every variable occurs at most twice");
            if let Some(l) = g.self_loops.first() {
                let (clause, chain) = self_loop_from_graph(l);
                let mut sub = SolveStats::default();
                let config = self.config.clone();
                if resolve_self_loop_in(&mut r, clause, &chain, &config, &mut sub).is_ok() {
                    self.stats.self_loop_sub_branches += sub.self_loop_sub_branches;
                    self.stats.fire(Rule::SelfLoop);
                    continue;
                }
            }

            // cycle
            if g.vertices.is_empty() {
                let v = select_cycle_variable(&r.formula).expect("no degree-3 clause");
                self.stats.fire(Rule::Cycle);
                return self.branch(r, v, PartitionState::default(), depth);
            }

            // cut edge
            if g.vertices.len() >= 2 && g.crossing_edges(&state.left, &state.right).is_empty() {
                let seed = self.config.seed ^ self.bisections.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                self.bisections += 1;
                let b =
                    compute_bisection_with(&g, self.config.bisection, seed).expect("two vertices");
                self.stats.fire(Rule::Bisection);
                self.stats.m3_history.push(g.vertices.len());
                self.stats.cut_sizes.push(b.cut.len());
                state = PartitionState {
                    left: b.left,
                    right: b.right,
                    turn: EndTurn::Left,
                };
            }
            match select_cut_edge_variable(&state, &g) {
                CutChoice::Branch { var, state: next } => {
                    self.stats.fire(Rule::CutEdge);
                    return self.branch(r, var, next, depth);
                }
                CutChoice::Refresh => {
                    // single vertex, or a graph the bisection leaves uncut
                    let v = fallback_variable(&r.formula, &g);
                    self.stats.fire(Rule::Fallback);
                    return self.branch(r, v, PartitionState::default(), depth);
                }
            }
        }
    }

    fn split(&mut self, r: Reducer<W>, components: Vec<Formula>, depth: usize) -> W {
        self.stats.fire(Rule::Components);
        self.stats.split_nodes += 1;
        self.stats.split_children += components.len() as u64;
        let mut total = r.multiplier.clone();
        let mut zero = false;
        for comp in components {
            if zero {
                // keep the tree shape honest: an abandoned child is one leaf
                self.stats.leaves += 1;
                continue;
            }
            let cv = r.cv.restrict(comp.vars());
            let child = Reducer::new(comp, cv, self.config.simplify);
            let value = self.solve(child, PartitionState::default(), depth + 1);
            total = total.mul(&value);
            zero = total.is_zero();
        }
        total
    }

    fn child(r: &Reducer<W>, v: Var, value: bool) -> Reducer<W> {
        let mut c = r.clone();
        c.fired.clear();
        c.make_true(Literal::new(v, !value));
        c
    }

    fn branch(&mut self, r: Reducer<W>, v: Var, state: PartitionState, depth: usize) -> W {
        self.stats.branch_nodes += 1;
        let one = Self::child(&r, v, true);
        let zero = Self::child(&r, v, false);
        let a = self.solve(one, state.clone(), depth + 1);
        let b = self.solve(zero, state, depth + 1);
        a.add(&b)
    }

    /// Lookahead branch that records the realized eliminations of both
    /// children next to the simulated ones.
    fn branch_checked(
        &mut self,
        r: Reducer<W>,
        v: Var,
        projected: (usize, usize),
        state: PartitionState,
        depth: usize,
    ) -> W {
        self.stats.branch_nodes += 1;
        let before = r.live_vars();
        let mut realized = [0usize; 2];
        let mut children = Vec::with_capacity(2);
        for (i, value) in [true, false].into_iter().enumerate() {
            let mut c = Self::child(&r, v, value);
            c.run_fixpoint();
            realized[i] = if c.unsat {
                before
            } else {
                before - c.live_vars()
            };
            children.push(c);
        }
        let realized = (realized[0], realized[1]);
        self.stats.lookahead_realized.push(realized);
        if realized != projected {
            self.stats.lookahead_mismatches += 1;
        }
        let zero = children.pop().unwrap();
        let one = children.pop().unwrap();
        let a = self.solve(one, state.clone(), depth + 1);
        let b = self.solve(zero, state, depth + 1);
        a.add(&b)
    }
}

/// Drops partition members that are no longer degree-3 clauses.
fn refresh(state: &mut PartitionState, g: &ClauseGraph) {
    let live: BTreeSet<_> = g.vertices.iter().copied().collect();
    state.left.retain(|c| live.contains(c));
    state.right.retain(|c| live.contains(c));
}

fn fallback_variable(formula: &Formula, g: &ClauseGraph) -> Var {
    g.vertices
        .first()
        .and_then(|&c| formula.clause(c))
        .and_then(|c| c.vars().into_iter().next())
        .or_else(|| formula.vars().next())
        .expect("non-empty formula")
}

/// Fails when `cv` lacks a variable of `formula`.
pub fn check_domain<W: Semiring>(formula: &Formula, cv: &CardinalityVector<W>) -> Result<()> {
    match formula.vars().find(|&v| !cv.contains(v)) {
        Some(v) => Err(Error::contract(format!("cardinality vector lacks x{v}"))),
        None => Ok(()),
    }
}

/// Weighted model count of `formula` under `cv`.
pub fn count_models(
    formula: &Formula,
    cv: &CardinalityVector<BigUint>,
    state: PartitionState,
) -> Result<BigUint> {
    check_domain(formula, cv)?;
    Ok(Counter::new(SolverConfig::default()).count(formula, cv, state))
}

/// Generic count with explicit configuration, returning the statistics.
pub fn count_with<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    config: &SolverConfig,
) -> Result<(W, SolveStats)> {
    check_domain(formula, cv)?;
    let mut counter = Counter::new(config.clone());
    let value = counter.count(formula, cv, PartitionState::default());
    Ok((value, counter.into_stats()))
}

/// Product of the counts of `components`, each with a fresh partition.
pub fn split_components<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    state: &PartitionState,
) -> Result<W> {
    check_domain(formula, cv)?;
    if state.is_active() {
        if let Ok(g) = build_clause_graph(formula) {
            if !g.crossing_edges(&state.left, &state.right).is_empty() {
                return Err(Error::contract("edges still cross the partition"));
            }
        }
    }
    let mut counter = Counter::new(SolverConfig::default());
    let mut total = W::one();
    for comp in formula.connected_components() {
        let sub = cv.restrict(comp.vars());
        total = total.mul(&counter.count(&comp, &sub, PartitionState::default()));
    }
    let free: Vec<Var> = cv.vars().filter(|&v| !formula.contains_var(v)).collect();
    for v in free {
        total = total.mul(&cv.get(Literal::pos(v)).add(cv.get(Literal::neg(v))));
    }
    Ok(total)
}

fn weight_domain(formula: &Formula, weights: &WeightAssignment) -> BTreeSet<Var> {
    formula.vars().chain(weights.vars()).collect()
}

/// Polynomial cardinality vector: literal `l` starts as `u^{d(l)}`.
pub fn polynomial_vector(
    formula: &Formula,
    weights: &WeightAssignment,
) -> CardinalityVector<WeightPolynomial> {
    CardinalityVector::from_fn(weight_domain(formula, weights), |l| {
        WeightPolynomial::monomial(weights.get(l) as usize)
    })
}

/// Pair cardinality vector: literal `l` starts as `(1, d(l))`.
pub fn pair_vector(
    formula: &Formula,
    weights: &WeightAssignment,
) -> CardinalityVector<MaxWeightPair> {
    CardinalityVector::from_fn(weight_domain(formula, weights), |l| {
        MaxWeightPair::unit(weights.get(l))
    })
}

/// Number of solutions per total weight; coefficient `k` counts solutions
/// whose true literals weigh `k` in total.
pub fn count_by_weight(
    formula: &Formula,
    weights: &WeightAssignment,
    q_bound: u64,
) -> Result<WeightPolynomial> {
    count_by_weight_with(formula, weights, q_bound, &SolverConfig::default()).map(|(p, _)| p)
}

pub fn count_by_weight_with(
    formula: &Formula,
    weights: &WeightAssignment,
    q_bound: u64,
    config: &SolverConfig,
) -> Result<(WeightPolynomial, SolveStats)> {
    if weights.max_weight() > q_bound {
        return Err(Error::input(format!(
            "weight {} exceeds the bound {q_bound}",
            weights.max_weight()
        )));
    }
    count_with(formula, &polynomial_vector(formula, weights), config)
}

/// Number of maximum-weight solutions and that weight; `(0, 0)` when
/// unsatisfiable.
pub fn count_max_weight(formula: &Formula, weights: &WeightAssignment) -> Result<MaxWeightPair> {
    count_max_weight_with(formula, weights, &SolverConfig::default()).map(|(p, _)| p)
}

pub fn count_max_weight_with(
    formula: &Formula,
    weights: &WeightAssignment,
    config: &SolverConfig,
) -> Result<(MaxWeightPair, SolveStats)> {
    count_with(formula, &pair_vector(formula, weights), config)
}

/// Joins the two results of branching on `x`: `side0` is the `x = 0` result
/// and `neg` the entry of `-x`, `side1` and `pos` likewise for `x = 1`.
pub fn combine_branch_maxweight(
    side0: &MaxWeightPair,
    neg: &MaxWeightPair,
    side1: &MaxWeightPair,
    pos: &MaxWeightPair,
) -> MaxWeightPair {
    let c0 = &side0.c * &neg.c;
    let c1 = &side1.c * &pos.c;
    let w0 = side0.d + neg.d;
    let w1 = side1.d + pos.d;
    if (&c0 + &c1).is_zero() {
        MaxWeightPair::new(BigUint::zero(), 0)
    } else if c0.is_zero() {
        MaxWeightPair { c: c1, d: w1 }
    } else if c1.is_zero() {
        MaxWeightPair { c: c0, d: w0 }
    } else if w0 == w1 {
        MaxWeightPair { c: c0 + c1, d: w0 }
    } else if w0 > w1 {
        MaxWeightPair { c: c0, d: w0 }
    } else {
        MaxWeightPair { c: c1, d: w1 }
    }
}
