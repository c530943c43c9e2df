//! Branching: variable selection, the degree-3 clause graph, balanced
//! bisection and chain handling.

pub mod bisect;
pub mod chain;
pub mod graph;
pub mod select;

pub use bisect::{compute_bisection, compute_bisection_with, Bisection, BisectionStrategy};
pub use chain::{compress_chain, resolve_self_loop};
pub use graph::{build_clause_graph, ClauseGraph, Edge, EdgeLabel, SelfLoop};
pub use select::{
    lookahead_branch_candidate, lookahead_qualifies, select_cut_edge_variable,
    select_cycle_variable, select_heavy_variable, simulate_branch, CutChoice,
};
