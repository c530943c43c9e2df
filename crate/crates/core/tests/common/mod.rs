#![allow(dead_code)]

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use x3sat_count::branch::ClauseGraph;
use x3sat_count::model::{CardinalityVector, Formula};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ones(n: usize) -> CardinalityVector<BigUint> {
    CardinalityVector::ones(1..=n as u32)
}

/// Three-literal clauses in which every variable of `1..=n` fills `occ`
/// slots, shuffled; leftover slots are dropped. No clause repeats a variable.
pub fn regular_formula(n: usize, occ: usize, seed: u64, signed: bool) -> Formula {
    let mut rng = rng(seed);
    loop {
        let mut slots: Vec<i64> = (1..=n as i64)
            .flat_map(|v| std::iter::repeat_n(v, occ))
            .collect();
        slots.shuffle(&mut rng);
        let clauses: Vec<Vec<i64>> = slots
            .chunks_exact(3)
            .map(|c| {
                c.iter()
                    .map(|&v| if signed && rng.gen_bool(0.5) { -v } else { v })
                    .collect()
            })
            .collect();
        let distinct = clauses.iter().all(|c| {
            c[0].abs() != c[1].abs() && c[0].abs() != c[2].abs() && c[1].abs() != c[2].abs()
        });
        if distinct {
            let refs: Vec<&[i64]> = clauses.iter().map(|c| c.as_slice()).collect();
            return Formula::from_signed(&refs);
        }
    }
}

/// Random graph on `n` vertices with every degree at most 3.
pub fn random_subcubic_graph(n: u32, rng: &mut ChaCha8Rng) -> ClauseGraph {
    let mut degree = vec![0u32; n as usize];
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let attempts = 3 * n as usize;
    for _ in 0..attempts {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b || degree[a as usize] >= 3 || degree[b as usize] >= 3 {
            continue;
        }
        if edges.contains(&(a.min(b), a.max(b))) {
            continue;
        }
        degree[a as usize] += 1;
        degree[b as usize] += 1;
        edges.push((a.min(b), a.max(b)));
    }
    ClauseGraph::from_edges(n, &edges)
}
