//! Balanced bisection of the clause graph by Fiduccia-Mattheyses style
//! local search with random restarts.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::ClauseGraph;
use crate::error::{Error, Result};
use crate::model::ClauseId;

pub const DEFAULT_RESTARTS: usize = 16;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BisectionStrategy {
    LocalSearch {
        restarts: usize,
    },
    /// One uniformly random balanced split, no refinement.
    Random,
}

impl Default for BisectionStrategy {
    fn default() -> Self {
        BisectionStrategy::LocalSearch {
            restarts: DEFAULT_RESTARTS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisection {
    pub left: BTreeSet<ClauseId>,
    pub right: BTreeSet<ClauseId>,
    /// Indices into the graph's edge list.
    pub cut: Vec<usize>,
}

impl Bisection {
    pub fn is_balanced(&self) -> bool {
        self.left.len().abs_diff(self.right.len()) <= 1
    }
}

/// Adjacency over dense vertex indices; self-loops are ignored.
struct Dense {
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Dense {
    fn new(g: &ClauseGraph) -> Self {
        let index = |c: ClauseId| {
            g.vertices
                .binary_search(&c)
                .expect("edge endpoint is a vertex")
        };
        let mut adj = vec![Vec::new(); g.vertices.len()];
        let mut edges = Vec::with_capacity(g.edges.len());
        for e in &g.edges {
            let (a, b) = (index(e.a), index(e.b));
            edges.push((a, b));
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Dense { adj, edges }
    }

    fn cut(&self, side: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| side[a] != side[b])
            .count()
    }

    fn gain(&self, side: &[bool], v: usize) -> i64 {
        self.adj[v]
            .iter()
            .map(|&u| if side[u] != side[v] { 1 } else { -1 })
            .sum()
    }

    /// One refinement pass; returns true if the cut improved.
    fn pass(&self, side: &mut [bool]) -> bool {
        let n = side.len();
        let mut locked = vec![false; n];
        let mut gains: Vec<i64> = (0..n).map(|v| self.gain(side, v)).collect();
        let mut ones = side.iter().filter(|&&s| s).count();
        let start = self.cut(side) as i64;
        let mut cur = start;
        let mut best = start;
        let mut best_len = 0;
        let mut moves = Vec::with_capacity(n);

        for _ in 0..n {
            let zeros = n - ones;
            let pick = (0..n)
                .filter(|&v| !locked[v])
                .filter(|&v| match zeros.cmp(&ones) {
                    std::cmp::Ordering::Greater => !side[v],
                    std::cmp::Ordering::Less => side[v],
                    std::cmp::Ordering::Equal => true,
                })
                .max_by(|&a, &b| gains[a].cmp(&gains[b]).then(b.cmp(&a)));
            let Some(v) = pick else { break };
            cur -= gains[v];
            side[v] = !side[v];
            if side[v] {
                ones += 1;
            } else {
                ones -= 1;
            }
            locked[v] = true;
            moves.push(v);
            gains[v] = self.gain(side, v);
            for &u in &self.adj[v] {
                gains[u] = self.gain(side, u);
            }
            if (n - ones).abs_diff(ones) <= 1 && cur < best {
                best = cur;
                best_len = moves.len();
            }
        }
        for &v in moves[best_len..].iter().rev() {
            side[v] = !side[v];
        }
        best < start
    }
}

fn random_split(n: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut side = vec![false; n];
    for &v in &order[n / 2..] {
        side[v] = true;
    }
    side
}

/// Balanced bisection of `g` using the default local search.
pub fn compute_bisection(g: &ClauseGraph, seed: u64) -> Result<Bisection> {
    compute_bisection_with(g, BisectionStrategy::default(), seed)
}

pub fn compute_bisection_with(
    g: &ClauseGraph,
    strategy: BisectionStrategy,
    seed: u64,
) -> Result<Bisection> {
    let n = g.vertices.len();
    if n < 2 {
        return Err(Error::contract(format!(
            "bisection needs at least 2 vertices, got {n}"
        )));
    }
    let dense = Dense::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = match strategy {
        BisectionStrategy::Random => random_split(n, &mut rng),
        BisectionStrategy::LocalSearch { restarts } => {
            let mut best: Option<(usize, Vec<bool>)> = None;
            for _ in 0..restarts.max(1) {
                let mut side = random_split(n, &mut rng);
                while dense.pass(&mut side) {}
                let cut = dense.cut(&side);
                if best.as_ref().is_none_or(|(c, _)| cut < *c) {
                    best = Some((cut, side));
                }
                if cut == 0 {
                    break;
                }
            }
            best.expect("at least one restart").1
        }
    };
    let mut left = BTreeSet::new();
    let mut right = BTreeSet::new();
    for (i, &v) in g.vertices.iter().enumerate() {
        if side[i] {
            right.insert(v);
        } else {
            left.insert(v);
        }
    }
    let cut = (0..g.edges.len())
        .filter(|&i| {
            let (a, b) = dense.edges[i];
            side[a] != side[b]
        })
        .collect();
    Ok(Bisection { left, right, cut })
}
