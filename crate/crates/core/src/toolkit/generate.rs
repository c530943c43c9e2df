//! Seeded random instances.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::instance::InstanceDocument;
use crate::error::{Error, Result};

/// `m` clauses of three literals over `n` variables. With `distinct_vars`
/// the three variables of a clause differ.
pub fn generate_instance(
    n: usize,
    m: usize,
    seed: u64,
    distinct_vars: bool,
) -> Result<InstanceDocument> {
    if n < 3 {
        return Err(Error::input(format!("need at least 3 variables, got {n}")));
    }
    if m < 1 {
        return Err(Error::input("need at least one clause"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let vars: Vec<usize> = if distinct_vars {
            sample(&mut rng, n, 3).into_iter().collect()
        } else {
            (0..3).map(|_| rng.gen_range(0..n)).collect()
        };
        let clause = vars
            .into_iter()
            .map(|v| {
                let lit = v as i64 + 1;
                if rng.gen_bool(0.5) {
                    -lit
                } else {
                    lit
                }
            })
            .collect();
        clauses.push(clause);
    }
    let mut doc = InstanceDocument {
        n,
        clauses,
        ..Default::default()
    };
    doc.meta.insert(
        "generator".into(),
        if distinct_vars { "distinct" } else { "uniform" }.into(),
    );
    doc.meta.insert("seed".into(), seed.to_string());
    Ok(doc)
}

/// Uniform weights in `0..=max` on both literals of every variable.
pub fn random_weights(doc: &mut InstanceDocument, max: u64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    doc.weights.clear();
    for v in 1..=doc.n as i64 {
        for lit in [v, -v] {
            doc.weights.insert(lit, rng.gen_range(0..=max));
        }
    }
}
