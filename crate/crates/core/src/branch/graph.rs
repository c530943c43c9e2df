use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{ClauseId, Formula, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeLabel {
    /// A variable occurring in both endpoint clauses.
    Shared(Var),
    /// A chain of degree-2 clauses. `ends.0` is the variable shared by the
    /// first chain clause and the edge's `a` endpoint, `ends.1` likewise for
    /// the last chain clause and `b`.
    Chain {
        clauses: Vec<ClauseId>,
        ends: (Var, Var),
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: ClauseId,
    pub b: ClauseId,
    pub label: EdgeLabel,
}

impl Edge {
    /// Variable of the edge that lies in endpoint `at`.
    pub fn end_var(&self, at: ClauseId) -> Var {
        match &self.label {
            EdgeLabel::Shared(v) => *v,
            EdgeLabel::Chain { ends, .. } => {
                if at == self.a {
                    ends.0
                } else {
                    ends.1
                }
            }
        }
    }

    fn sort_key(&self) -> (ClauseId, ClauseId, u32) {
        let tie = match &self.label {
            EdgeLabel::Shared(v) => *v,
            EdgeLabel::Chain { clauses, .. } => clauses[0].0,
        };
        (self.a.min(self.b), self.a.max(self.b), tie)
    }
}

/// A degree-3 clause whose two variables `ends` are joined by a chain of
/// degree-2 clauses that returns to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfLoop {
    pub clause: ClauseId,
    pub chain: Vec<ClauseId>,
    pub ends: (Var, Var),
}

/// Degree-3 clauses joined by shared variables or by chains of degree-2
/// clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseGraph {
    pub vertices: Vec<ClauseId>,
    pub edges: Vec<Edge>,
    pub self_loops: Vec<SelfLoop>,
}

impl ClauseGraph {
    /// Abstract graph on vertices `C0..C{n-1}`; edge `i` is labelled with
    /// the fictitious variable `i + 1`.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Self {
        ClauseGraph {
            vertices: (0..n).map(ClauseId).collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| Edge {
                    a: ClauseId(a),
                    b: ClauseId(b),
                    label: EdgeLabel::Shared(i as Var + 1),
                })
                .collect(),
            self_loops: Vec::new(),
        }
    }

    pub fn degree(&self, v: ClauseId) -> usize {
        self.edges.iter().filter(|e| e.a == v || e.b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|&v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Edges with one endpoint in `left` and the other in `right`, ordered
    /// by the smaller endpoint pair.
    pub fn crossing_edges<'a>(
        &'a self,
        left: &BTreeSet<ClauseId>,
        right: &BTreeSet<ClauseId>,
    ) -> Vec<&'a Edge> {
        let mut out: Vec<&Edge> = self
            .edges
            .iter()
            .filter(|e| {
                (left.contains(&e.a) && right.contains(&e.b))
                    || (left.contains(&e.b) && right.contains(&e.a))
            })
            .collect();
        out.sort_by_key(|e| e.sort_key());
        out
    }
}

/// The clause on the other side of `v` from `from`, if `v` occurs twice.
fn other_clause(formula: &Formula, v: Var, from: ClauseId) -> Option<ClauseId> {
    formula.clauses_of(v).find(|&c| c != from)
}

/// Builds the degree-3 clause graph. Requires every variable to occur at
/// most twice.
pub fn build_clause_graph(formula: &Formula) -> Result<ClauseGraph> {
    if let Some(v) = formula.vars().find(|&v| formula.occurrence_count(v) > 2) {
        return Err(Error::contract(format!(
            "x{v} occurs {} times; clause graph needs at most 2",
            formula.occurrence_count(v)
        )));
    }
    let degree = |id: ClauseId| formula.clause_degree(id).unwrap_or(0);
    let vertices: Vec<ClauseId> = formula.clause_ids().filter(|&id| degree(id) == 3).collect();
    let is_vertex: BTreeSet<ClauseId> = vertices.iter().copied().collect();
    let mut graph = ClauseGraph {
        vertices: vertices.clone(),
        ..ClauseGraph::default()
    };

    for &c in &vertices {
        for v in formula.clause(c).unwrap().vars() {
            let Some(first) = other_clause(formula, v, c) else {
                continue;
            };
            if is_vertex.contains(&first) {
                if c < first {
                    graph.edges.push(Edge {
                        a: c,
                        b: first,
                        label: EdgeLabel::Shared(v),
                    });
                }
                continue;
            }
            if let Some((chain, end, last_var)) = walk_chain(formula, c, first, &is_vertex) {
                if end == c {
                    if v < last_var {
                        graph.self_loops.push(SelfLoop {
                            clause: c,
                            chain,
                            ends: (v, last_var),
                        });
                    }
                } else if c < end {
                    graph.edges.push(Edge {
                        a: c,
                        b: end,
                        label: EdgeLabel::Chain {
                            clauses: chain,
                            ends: (v, last_var),
                        },
                    });
                }
            }
        }
    }
    Ok(graph)
}

/// Follows degree-2 clauses from `first` (entered from `start`) until a
/// degree-3 clause is reached. Returns the chain, the clause reached and
/// the variable through which it was entered.
fn walk_chain(
    formula: &Formula,
    start: ClauseId,
    first: ClauseId,
    is_vertex: &BTreeSet<ClauseId>,
) -> Option<(Vec<ClauseId>, ClauseId, Var)> {
    let mut chain = vec![first];
    let mut prev = start;
    let mut cur = first;
    for _ in 0..=formula.num_clauses() {
        let neighbours = formula.neighbours(cur).ok()?;
        if neighbours.len() != 2 {
            return None;
        }
        let next = *neighbours.iter().find(|&&n| n != prev)?;
        let via = formula
            .clause(cur)
            .unwrap()
            .vars()
            .into_iter()
            .find(|&v| formula.clauses_of(v).any(|c| c == next))?;
        if is_vertex.contains(&next) {
            return Some((chain, next, via));
        }
        chain.push(next);
        prev = cur;
        cur = next;
    }
    None
}
