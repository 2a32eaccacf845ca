//! Constraint generators: two analytic families and a seeded random one.

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pb::{PbConstraint, Term, Var};

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("n must be even and positive, got {0}")]
    OddOrZero(u32),
    #[error("b^1 + ... + b^n must be below a")]
    PowersTooLarge,
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("fraction {0} is outside [0, 1]")]
    BadFraction(f64),
}

/// `ω₁x₁ + ⋯ + ω_nx_n ≤ a·n/2` with `ωᵢ = a + bⁱ`. Equivalent to the
/// cardinality constraint `x₁ + ⋯ + x_n ≤ n/2 − 1`.
pub fn bailleux_family(a: u64, b: u64, n: u32) -> Result<PbConstraint, FamilyError> {
    if n == 0 || n % 2 == 1 {
        return Err(FamilyError::OddOrZero(n));
    }
    if a == 0 {
        return Err(FamilyError::NotPositive("a"));
    }
    if b == 0 {
        return Err(FamilyError::NotPositive("b"));
    }
    let a = BigInt::from(a);
    let b = BigInt::from(b);
    let powers: Vec<BigInt> = (1..=n).map(|i| num_traits::pow(b.clone(), i as usize)).collect();
    if powers.iter().sum::<BigInt>() >= a {
        return Err(FamilyError::PowersTooLarge);
    }
    let coeffs: Vec<BigInt> = powers.into_iter().map(|p| &a + p).collect();
    Ok(PbConstraint::from_coefficients(&coeffs, &a * (n / 2)))
}

/// `x₁ + ⋯ + x_n ≤ k`.
pub fn cardinality(n: u32, k: i64) -> PbConstraint {
    PbConstraint::from_coefficients(&vec![1; n as usize], k)
}

/// Variable of row `i`, column `j` (both 1-based) in [`hosaka_family`].
pub fn hosaka_var(n: u32, i: u32, j: u32) -> Var {
    Var::new((i - 1) * 2 * n + j).expect("positive id")
}

/// `Σ a_{i,j} x_{i,j} ≤ (2^{4n} − 1)·n` over a `2n × 2n` grid with
/// `a_{i,j} = 2^{j−1} + 2^{2n+i−1}`, terms in row-major order.
/// Every variable order gives a diagram with at least `2ⁿ` nodes.
pub fn hosaka_family(n: u32) -> Result<PbConstraint, FamilyError> {
    if n == 0 {
        return Err(FamilyError::NotPositive("n"));
    }
    let one = BigInt::one();
    let mut terms = Vec::with_capacity((4 * n * n) as usize);
    for i in 1..=2 * n {
        for j in 1..=2 * n {
            let a = (&one << (j - 1)) + (&one << (2 * n + i - 1));
            terms.push(Term::new(a, hosaka_var(n, i, j).pos()).expect("positive"));
        }
    }
    let k = ((&one << (4 * n)) - 1u32) * n;
    Ok(PbConstraint::new(terms, k).expect("distinct variables"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundPolicy {
    /// Uniform in `[0, Σaᵢ]`.
    Uniform,
    /// `⌊f·Σaᵢ⌋`.
    Fraction(f64),
    /// `Σaᵢ`, a tautology.
    Full,
}

/// `a₁x₁ + ⋯ + a_nx_n ≤ K` with `aᵢ` uniform in `[1, max_coeff]`, drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn random_constraint(
    seed: u64,
    n: u32,
    max_coeff: u64,
    policy: BoundPolicy,
) -> Result<PbConstraint, FamilyError> {
    if n == 0 {
        return Err(FamilyError::NotPositive("n"));
    }
    if max_coeff == 0 {
        return Err(FamilyError::NotPositive("max_coeff"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_coeff)).collect();
    let sum: u128 = coeffs.iter().map(|&a| a as u128).sum();
    let bound = match policy {
        BoundPolicy::Uniform => rng.gen_range(0..=sum),
        BoundPolicy::Fraction(f) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(FamilyError::BadFraction(f));
            }
            (f * sum as f64).floor() as u128
        }
        BoundPolicy::Full => sum,
    };
    Ok(PbConstraint::from_coefficients(&coeffs, bound))
}

/// A uniformly random permutation of `c`'s variables.
pub fn random_order(c: &PbConstraint, seed: u64) -> Vec<Var> {
    let mut vars: Vec<Var> = c.variables().collect();
    vars.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    vars
}

/// Whether some subset of `coefficients` sums to exactly `k`, by dynamic
/// programming over reachable sums. Needs small `k`.
pub fn subset_sum_dp(coefficients: &[u64], k: i64) -> bool {
    if k < 0 {
        return false;
    }
    let k = k as usize;
    let mut reach = vec![false; k + 1];
    reach[0] = true;
    for &a in coefficients {
        let a = a as usize;
        if a > k {
            continue;
        }
        for s in (a..=k).rev() {
            if reach[s - a] {
                reach[s] = true;
            }
        }
    }
    reach[k]
}
