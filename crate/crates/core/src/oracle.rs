//! Brute-force ground truth.
//!
//! For every `lambda`, `n` and `y` with `lambda y^n <= value_max` the oracle
//! subtracts each product of basis primes below `lambda y^n` and tests the
//! difference for a square. It runs on `u128` with its own integer square
//! root and shares no arithmetic with the descent code it checks.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ntcore::Exponents;
use crate::par::{self, Execution};
use crate::solution::{canonicalize, Aliased, SolutionRecord};

const LAMBDAS: [u128; 3] = [1, 2, 4];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleBounds {
    /// Bound on `lambda * y^n`.
    pub value_max: u128,
    pub n_max: u32,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { value_max: 10_000_000_000, n_max: 30 }
    }
}

impl OracleBounds {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 3 {
            return Err(Error::InvalidConfig(format!("n_max must be at least 3, got {}", self.n_max)));
        }
        if self.value_max == 0 || self.value_max > 10u128.pow(30) {
            return Err(Error::InvalidConfig(format!("value_max must lie in [1, 10^30], got {}", self.value_max)));
        }
        Ok(())
    }

    /// Largest exponent of `p` with `p^e <= value_max`.
    pub fn exponent_max(&self, p: u64) -> u32 {
        let mut e = 0;
        let mut v = p as u128;
        while v <= self.value_max {
            e += 1;
            v *= p as u128;
        }
        e
    }
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `(value, exponents)` with `value = prod primes[i]^e_i <= max`, sorted by value.
fn products(primes: &[u64], max: u128) -> Vec<(u128, Vec<u32>)> {
    let mut out = vec![(1u128, vec![0u32; primes.len()])];
    for (i, &p) in primes.iter().enumerate() {
        let mut next = Vec::new();
        for (v, e) in &out {
            let (mut v, mut e) = (*v, e.clone());
            loop {
                next.push((v, e.clone()));
                match v.checked_mul(p as u128) {
                    Some(w) if w <= max => {
                        v = w;
                        e[i] += 1;
                    }
                    _ => break,
                }
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Every solution over `primes` within `bounds`, before deduplication.
pub fn brute_force_raw(bounds: &OracleBounds, primes: &[u64], exec: Execution) -> Result<Vec<SolutionRecord>> {
    bounds.validate()?;
    let units = products(primes, bounds.value_max);
    let slices: Vec<(u128, u32)> = LAMBDAS.iter().flat_map(|&l| (3..=bounds.n_max).map(move |n| (l, n))).collect();
    let found = par::map(&slices, exec, |&(lambda, n)| {
        let mut out = Vec::new();
        let mut y: u128 = 2;
        while let Some(rhs) = y.checked_pow(n).and_then(|v| v.checked_mul(lambda)).filter(|&v| v <= bounds.value_max) {
            for (s, exps) in units.iter().take_while(|(s, _)| *s < rhs) {
                let diff = rhs - s;
                let x = isqrt(diff);
                if x >= 1 && x * x == diff && gcd(x, y) == 1 {
                    out.push(SolutionRecord {
                        x: BigUint::from(x),
                        y: BigUint::from(y),
                        lambda: lambda as u32,
                        exponents: Exponents(exps.clone()),
                        n,
                    });
                }
            }
            y += 1;
        }
        out
    });
    Ok(found.into_iter().flatten().collect())
}

/// Deduplicated solutions with the `(y, n)` aliases each one absorbed.
pub fn brute_force_with_aliases(bounds: &OracleBounds, primes: &[u64], exec: Execution) -> Result<Vec<Aliased>> {
    Ok(canonicalize(brute_force_raw(bounds, primes, exec)?))
}

/// Deduplicated solutions sorted by `(n, lambda, y, x)`.
pub fn brute_force_solve(bounds: &OracleBounds, primes: &[u64]) -> Result<Vec<SolutionRecord>> {
    Ok(brute_force_with_aliases(bounds, primes, Execution::Parallel)?.into_iter().map(|(r, _)| r).collect())
}

/// Exact check of a record over `primes`, including `lambda = 2^delta` with
/// `delta <= 2`.
pub fn verify_solution(s: &SolutionRecord, primes: &[u64]) -> bool {
    if s.exponents.len() != primes.len() || ![1, 2, 4].contains(&s.lambda) || s.n < 3 {
        return false;
    }
    let one = BigUint::from(1u32);
    if s.x < one || s.y <= one || num_integer::Integer::gcd(&s.x, &s.y) != one {
        return false;
    }
    let unit = primes.iter().zip(s.exponents.as_slice()).fold(BigUint::from(1u32), |acc, (&p, &e)| acc * BigUint::from(p).pow(e));
    &s.x * &s.x + unit == BigUint::from(s.lambda) * s.y.pow(s.n)
}
