//! Chains of degree-2 clauses: compression after fixing an end, and the
//! self-loop reduction.

use std::collections::BTreeSet;

use super::graph::SelfLoop;
use crate::count::{Counter, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{
    CardinalityVector, ClauseId, Formula, Literal, PartitionState, SolveStats, Var,
};
use crate::semiring::Semiring;
use crate::simplify::{Reducer, SimplifyOutcome};

fn check_chain(formula: &Formula, chain: &[ClauseId]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::contract("empty chain"));
    }
    for &id in chain {
        let d = formula.clause_degree(id)?;
        if d != 2 {
            return Err(Error::contract(format!("{id} has degree {d}, not 2")));
        }
    }
    for w in chain.windows(2) {
        if !formula.neighbours(w[0])?.contains(&w[1]) {
            return Err(Error::contract(format!(
                "{} and {} are not neighbours",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Sets `fixed_end := value` at one end of `chain` and lets linking, clause
/// dropping and singleton merging run along the chain.
pub fn compress_chain<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    chain: &[ClauseId],
    fixed_end: Var,
    value: bool,
) -> Result<SimplifyOutcome<W>> {
    check_chain(formula, chain)?;
    let at_end = [chain[0], chain[chain.len() - 1]]
        .iter()
        .any(|&id| formula.clause(id).unwrap().vars().contains(&fixed_end));
    if !at_end {
        return Err(Error::contract(format!(
            "x{fixed_end} is not an end of the chain"
        )));
    }
    let mut r = Reducer::new(formula.clone(), cv.clone(), Default::default());
    r.make_true(Literal::new(fixed_end, !value));
    r.run_fixpoint();
    Ok(r.into_outcome())
}

/// Folds a degree-3 clause `(x v y v z)` whose `y` and `z` are joined by
/// `chain` into `x`: for `y = 1` and `y = 0` the dead-ended chain is solved
/// with `x` fixed, and `c(x)`, `c(-x)` absorb the results.
pub fn resolve_self_loop<W: Semiring>(
    formula: &Formula,
    cv: &CardinalityVector<W>,
    clause: ClauseId,
    chain: &[ClauseId],
) -> Result<SimplifyOutcome<W>> {
    let mut r = Reducer::new(formula.clone(), cv.clone(), Default::default());
    let mut stats = SolveStats::default();
    resolve_self_loop_in(&mut r, clause, chain, &SolverConfig::default(), &mut stats)?;
    Ok(r.into_outcome())
}

pub(crate) fn self_loop_from_graph(l: &SelfLoop) -> (ClauseId, Vec<ClauseId>) {
    (l.clause, l.chain.clone())
}

pub(crate) fn resolve_self_loop_in<W: Semiring>(
    r: &mut Reducer<W>,
    clause: ClauseId,
    chain: &[ClauseId],
    config: &SolverConfig,
    stats: &mut SolveStats,
) -> Result<()> {
    let formula = &r.formula;
    check_chain(formula, chain)?;
    let c = formula.clause(clause).ok_or(Error::UnknownClause(clause))?;
    let cvars = c.vars();
    let first = formula.clause(chain[0]).unwrap().vars();
    let last = formula.clause(chain[chain.len() - 1]).unwrap().vars();
    let y = *cvars
        .intersection(&first)
        .next()
        .ok_or_else(|| Error::contract(format!("chain does not start at {clause}")))?;
    let z = *cvars
        .intersection(&last)
        .find(|&&v| v != y)
        .ok_or_else(|| Error::contract(format!("chain does not end at {clause}")))?;
    let x = *cvars
        .iter()
        .find(|&&v| v != y && v != z)
        .ok_or_else(|| Error::contract(format!("{clause} lacks a third variable")))?;

    let members: BTreeSet<ClauseId> = chain.iter().copied().chain([clause]).collect();
    let inner: BTreeSet<Var> = members
        .iter()
        .flat_map(|&id| formula.clause(id).unwrap().vars())
        .filter(|&v| v != x)
        .collect();
    for &v in &inner {
        if formula.clauses_of(v).any(|id| !members.contains(&id)) {
            return Err(Error::contract(format!("x{v} leaves the self-loop")));
        }
    }

    let sub = formula.restrict(&members);
    let mut fold = |x_value: bool| -> W {
        let mut total = W::zero();
        for y_value in [true, false] {
            let mut f = sub.clone();
            f.assign(x, x_value);
            f.assign(y, y_value);
            let rest_vars = inner.iter().copied().filter(|&v| v != y);
            let rest_cv = r.cv.restrict(rest_vars);
            let mut counter = Counter::<W>::new(config.clone());
            let value = counter.count(&f, &rest_cv, PartitionState::default());
            stats.self_loop_sub_branches += counter.stats().branch_nodes;
            let cy = r.cv.get(Literal::new(y, !y_value));
            total = total.add(&cy.mul(&value));
        }
        total
    };
    let q1 = fold(true);
    let q0 = fold(false);
    let xl = Literal::pos(x);
    let t = r.cv.get(xl).mul(&q1);
    let f = r.cv.get(!xl).mul(&q0);
    r.cv.set(xl, t);
    r.cv.set(!xl, f);
    for id in members {
        r.formula.remove_clause(id);
    }
    for v in inner {
        r.cv.remove(v);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_count;
    use crate::simplify::{contract_semi_isolated, Status};
    use num_bigint::BigUint;

    fn ones(f: &Formula) -> CardinalityVector<BigUint> {
        CardinalityVector::ones_for(f)
    }

    fn total(out: &SimplifyOutcome<BigUint>) -> BigUint {
        match out.status {
            Status::Unsat => BigUint::from(0u32),
            _ => &out.multiplier * brute_count(&out.formula, &out.cv).unwrap(),
        }
    }

    /// C' = (a b c), chain (c d e), (e f g), C'' = (g h i), with every
    /// other variable of C' and C'' leading into a triangle of extra clauses.
    fn chained() -> Formula {
        Formula::from_signed(&[
            &[1, 2, 3],
            &[3, 4, 5],
            &[5, 6, 7],
            &[7, 8, 9],
            &[1, 10, 11],
            &[2, 12, 13],
            &[8, 10, 14],
            &[9, 12, 15],
        ])
    }

    #[test]
    fn compression_eliminates_the_chain() {
        let f = chained();
        let cv = ones(&f);
        for value in [true, false] {
            let out = compress_chain(&f, &cv, &[ClauseId(1), ClauseId(2)], 7, value).unwrap();
            for v in [4, 5, 6] {
                assert!(!out.cv.contains(v), "x{v} survives compression");
            }
            assert!(!out.formula.contains_clause(ClauseId(1)));
            assert!(!out.formula.contains_clause(ClauseId(2)));
        }
    }

    #[test]
    fn compression_preserves_the_count() {
        let f = chained();
        let cv = ones(&f);
        let expected = brute_count(&f, &cv).unwrap();
        let one = compress_chain(&f, &cv, &[ClauseId(1), ClauseId(2)], 7, true).unwrap();
        let zero = compress_chain(&f, &cv, &[ClauseId(1), ClauseId(2)], 7, false).unwrap();
        assert_eq!(total(&one) + total(&zero), expected);
    }

    #[test]
    fn single_clause_chain() {
        let f = chained();
        let out = compress_chain(&f, &ones(&f), &[ClauseId(1)], 3, false).unwrap();
        assert!(!out.formula.contains_clause(ClauseId(1)));
        assert!(compress_chain(&f, &ones(&f), &[ClauseId(0)], 3, false).is_err());
        assert!(compress_chain(&f, &ones(&f), &[ClauseId(1)], 9, false).is_err());
    }

    #[test]
    fn self_loop_matches_oracle() {
        // (x y z) & (y a b) & (b c z) & (x p q)
        let f = Formula::from_signed(&[&[1, 2, 3], &[2, 4, 5], &[5, 6, 3], &[1, 7, 8]]);
        let cv = ones(&f);
        let out = resolve_self_loop(&f, &cv, ClauseId(0), &[ClauseId(1), ClauseId(2)]).unwrap();
        let left: BTreeSet<Var> = out.cv.vars().collect();
        assert_eq!(left, [1, 7, 8].into());
        assert_eq!(total(&out), brute_count(&f, &cv).unwrap());
    }

    #[test]
    fn self_loop_agrees_with_contraction() {
        let f = Formula::from_signed(&[&[1, 2, 3], &[2, 4, 5], &[5, 6, 3], &[1, 7, 8]]);
        let cv = ones(&f);
        let looped = resolve_self_loop(&f, &cv, ClauseId(0), &[ClauseId(1), ClauseId(2)]).unwrap();
        let set: BTreeSet<Var> = (1..=6).collect();
        let contracted = contract_semi_isolated(&f, &cv, &set, 1).unwrap();
        assert_eq!(
            looped.cv.get(Literal::pos(1)),
            contracted.cv.get(Literal::pos(1))
        );
        assert_eq!(
            looped.cv.get(Literal::neg(1)),
            contracted.cv.get(Literal::neg(1))
        );
    }

    #[test]
    fn unsatisfiable_side_contributes_nothing() {
        // with y = 1 the chain forces b = 0 and then z = 1, clashing with C
        let f = Formula::from_signed(&[&[1, 2, 3], &[-2, 4, 5], &[5, -3, 6], &[1, 7, 8]]);
        let cv = ones(&f);
        let out = resolve_self_loop(&f, &cv, ClauseId(0), &[ClauseId(1), ClauseId(2)]).unwrap();
        assert_eq!(total(&out), brute_count(&f, &cv).unwrap());
    }

    #[test]
    fn chain_must_close_on_the_clause() {
        let f =
            Formula::from_signed(&[&[1, 2, 3], &[2, 4, 5], &[5, 6, 9], &[1, 7, 8], &[9, 3, 10]]);
        assert!(
            resolve_self_loop(&f, &ones(&f), ClauseId(0), &[ClauseId(1), ClauseId(2)]).is_err()
        );
    }
}
