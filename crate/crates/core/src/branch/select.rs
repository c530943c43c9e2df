//! Choice of the branching variable.

use std::collections::BTreeSet;

use super::graph::ClauseGraph;
use crate::error::{Error, Result};
use crate::model::{CardinalityVector, ClauseId, EndTurn, Formula, Literal, PartitionState, Var};
use crate::semiring::Semiring;
use crate::simplify::{Reducer, SimplifyConfig};

/// Eliminated-variable counts `(x = 1, x = 0)` that justify a lookahead branch:
/// at least 7 on both sides, or 8 and 6, or 9 and 5.
pub fn lookahead_qualifies(t1: usize, t0: usize) -> bool {
    let (lo, hi) = (t1.min(t0), t1.max(t0));
    lo >= 7 || (lo >= 6 && hi >= 8) || (lo >= 5 && hi >= 9)
}

/// Variables eliminated by setting `var := value` and simplifying. A branch
/// that becomes unsatisfiable eliminates everything.
pub fn simulate_branch<W: Semiring>(
    reducer: &Reducer<W>,
    var: Var,
    value: bool,
) -> (usize, Reducer<W>) {
    let before = reducer.live_vars();
    let mut child = reducer.clone();
    child.fired.clear();
    child.make_true(Literal::new(var, !value));
    child.run_fixpoint();
    let removed = if child.unsat {
        before
    } else {
        before - child.live_vars()
    };
    (removed, child)
}

/// Variables of clauses within distance 2 of a clause holding a variable
/// that occurs at least three times.
fn lookahead_candidates(formula: &Formula) -> BTreeSet<Var> {
    let mut frontier: BTreeSet<ClauseId> = formula
        .vars()
        .filter(|&v| formula.occurrence_count(v) >= 3)
        .flat_map(|v| formula.clauses_of(v).collect::<Vec<_>>())
        .collect();
    let mut reached = frontier.clone();
    for _ in 0..2 {
        let mut next = BTreeSet::new();
        for &c in &frontier {
            for n in formula.neighbours(c).unwrap_or_default() {
                if reached.insert(n) {
                    next.insert(n);
                }
            }
        }
        frontier = next;
    }
    reached
        .iter()
        .flat_map(|&c| formula.clause(c).unwrap().vars())
        .collect()
}

/// First variable (ascending id) whose two simulated branches meet the
/// lookahead thresholds, with its `(t1, t0)` counts.
pub fn lookahead_branch_candidate<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
) -> Option<(Var, (usize, usize))> {
    let reducer = Reducer::new(formula.clone(), cv.clone(), SimplifyConfig::default());
    lookahead_on(&reducer)
}

pub(crate) fn lookahead_on<W: Semiring>(reducer: &Reducer<W>) -> Option<(Var, (usize, usize))> {
    if !reducer
        .formula
        .vars()
        .any(|v| reducer.formula.occurrence_count(v) >= 3)
    {
        return None;
    }
    for v in lookahead_candidates(&reducer.formula) {
        let (t1, _) = simulate_branch(reducer, v, true);
        if t1 < 5 {
            continue;
        }
        let (t0, _) = simulate_branch(reducer, v, false);
        if lookahead_qualifies(t1, t0) {
            return Some((v, (t1, t0)));
        }
    }
    None
}

/// Lowest-id variable occurring in at least three clauses.
pub fn select_heavy_variable(formula: &Formula) -> Result<Var> {
    formula
        .vars()
        .find(|&v| formula.occurrence_count(v) >= 3)
        .ok_or_else(|| Error::contract("no variable occurs three or more times"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutChoice {
    Branch {
        var: Var,
        state: PartitionState,
    },
    /// No edge crosses the partition; a fresh bisection is needed.
    Refresh,
}

/// Branching variable of the first crossing edge. Shared-variable edges
/// branch on that variable; chain edges alternate between the chain end in
/// the left clause and the one in the right clause.
pub fn select_cut_edge_variable(state: &PartitionState, graph: &ClauseGraph) -> CutChoice {
    let crossing = graph.crossing_edges(&state.left, &state.right);
    let Some(edge) = crossing.first() else {
        return CutChoice::Refresh;
    };
    let mut next = state.clone();
    let var = match edge.label {
        super::graph::EdgeLabel::Shared(v) => v,
        super::graph::EdgeLabel::Chain { .. } => {
            let (l, r) = if state.left.contains(&edge.a) {
                (edge.a, edge.b)
            } else {
                (edge.b, edge.a)
            };
            next.turn = state.turn.flip();
            match state.turn {
                EndTurn::Left => edge.end_var(l),
                EndTurn::Right => edge.end_var(r),
            }
        }
    };
    CutChoice::Branch { var, state: next }
}

/// Lowest-id variable of a formula made only of degree-2 clauses.
pub fn select_cycle_variable(formula: &Formula) -> Result<Var> {
    for id in formula.clause_ids() {
        let d = formula.clause_degree(id)?;
        if d >= 3 {
            return Err(Error::contract(format!("{id} has degree {d}")));
        }
    }
    formula
        .vars()
        .next()
        .ok_or_else(|| Error::contract("empty formula"))
}
