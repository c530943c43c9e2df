//! Value domains carried by cardinality vectors.
//!
//! The counting recursion only ever adds and multiplies cardinality entries,
//! so the same control flow serves plain model counting ([`BigUint`]),
//! counting per total weight ([`WeightPolynomial`]) and counting the
//! maximum-weight solutions ([`MaxWeightPair`]).

use std::fmt;

use num_bigint::BigUint;

pub trait Semiring: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;

    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        Self: 'a,
    {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(x))
    }
}

impl Semiring for BigUint {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }

    fn one() -> Self {
        num_traits::One::one()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

/// Polynomial `a_0 + a_1 u + ... + a_D u^D` with natural coefficients.
///
/// Coefficients are stored densely; trailing zeros are trimmed so equality
/// is structural.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct WeightPolynomial {
    coeffs: Vec<BigUint>,
}

impl WeightPolynomial {
    pub fn from_coeffs(coeffs: Vec<BigUint>) -> Self {
        let mut p = WeightPolynomial { coeffs };
        p.trim();
        p
    }

    /// `u^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigUint::zero(); k + 1];
        coeffs[k] = BigUint::one();
        WeightPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigUint {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Degree of the highest nonzero term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Sum of all coefficients, i.e. the value at `u = 1`.
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(num_traits::Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl Semiring for WeightPolynomial {
    fn zero() -> Self {
        WeightPolynomial { coeffs: Vec::new() }
    }

    fn one() -> Self {
        WeightPolynomial::monomial(0)
    }

    fn add(&self, other: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        WeightPolynomial::from_coeffs(coeffs)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = vec![BigUint::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        WeightPolynomial::from_coeffs(coeffs)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for WeightPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}u")?,
                _ => write!(f, "{a}u^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Number of solutions `c` attaining the maximum weight `d`.
///
/// `(0, 0)` stands for "no solution"; a zero count always carries weight 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaxWeightPair {
    pub c: BigUint,
    pub d: u64,
}

impl MaxWeightPair {
    pub fn new(c: BigUint, d: u64) -> Self {
        if c.is_zero() {
            MaxWeightPair { c, d: 0 }
        } else {
            MaxWeightPair { c, d }
        }
    }

    /// Single partial solution of weight `d`.
    pub fn unit(d: u64) -> Self {
        MaxWeightPair {
            c: BigUint::one(),
            d,
        }
    }
}

impl Semiring for MaxWeightPair {
    fn zero() -> Self {
        MaxWeightPair {
            c: BigUint::zero(),
            d: 0,
        }
    }

    fn one() -> Self {
        MaxWeightPair::unit(0)
    }

    /// Alternatives: keep the heavier side, add the counts on a tie. The
    /// cases are tested in the order (a)..(f) of the branching rule.
    fn add(&self, other: &Self) -> Self {
        let zero_self = self.c.is_zero();
        let zero_other = other.c.is_zero();
        if zero_self && zero_other {
            Self::zero()
        } else if zero_self {
            other.clone()
        } else if zero_other {
            self.clone()
        } else if self.d == other.d {
            MaxWeightPair {
                c: &self.c + &other.c,
                d: self.d,
            }
        } else if self.d > other.d {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Conjunction of independent parts: counts multiply, weights add.
    fn mul(&self, other: &Self) -> Self {
        let c = &self.c * &other.c;
        if c.is_zero() {
            Self::zero()
        } else {
            MaxWeightPair {
                c,
                d: self.d + other.d,
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.c.is_zero()
    }
}

impl fmt::Display for MaxWeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c, self.d)
    }
}
