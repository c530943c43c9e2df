//! Branching factors of branching vectors.

use crate::error::{Error, Result};

/// Variables removed in each branch of a branching rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingVector(Vec<u32>);

impl BranchingVector {
    pub fn new(t: Vec<u32>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::input(format!(
                "a branching vector needs at least 2 entries, got {}",
                t.len()
            )));
        }
        if t.contains(&0) {
            return Err(Error::input("branching vector entries must be positive"));
        }
        Ok(BranchingVector(t))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }
}

const TOLERANCE: f64 = 1e-12;

/// The root `x >= 1` of `sum x^-t_i = 1`.
pub fn branching_factor(v: &BranchingVector) -> f64 {
    let f = |x: f64| v.0.iter().map(|&t| x.powi(-(t as i32))).sum::<f64>() - 1.0;
    // f(1) = r - 1 > 0 and f(r) <= 0
    let mut lo = 1.0;
    let mut hi = (v.0.len() as f64).max(2.0);
    while hi - lo > TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Convenience wrapper over [`branching_factor`].
pub fn tau(t: &[u32]) -> Result<f64> {
    Ok(branching_factor(&BranchingVector::new(t.to_vec())?))
}
