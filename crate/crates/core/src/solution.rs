use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::ntcore::{Exponents, PrimeBasis};

/// One solution `x^2 + prod p_i^{e_i} = lambda * y^n`.
///
/// `lambda = 2^delta` with `delta` in `{0, 1, 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolutionRecord {
    pub x: BigUint,
    pub y: BigUint,
    pub lambda: u32,
    pub exponents: Exponents,
    pub n: u32,
}

impl SolutionRecord {
    pub fn new(x: impl Into<BigUint>, y: impl Into<BigUint>, lambda: u32, exponents: Vec<u32>, n: u32) -> Self {
        SolutionRecord { x: x.into(), y: y.into(), lambda, exponents: Exponents(exponents), n }
    }

    /// `delta` with `lambda = 2^delta`, if `lambda` is a power of two.
    pub fn delta(&self) -> Option<u32> {
        self.lambda.is_power_of_two().then(|| self.lambda.trailing_zeros())
    }

    /// `lambda * y^n`.
    pub fn rhs(&self) -> BigUint {
        BigUint::from(self.lambda) * self.y.pow(self.n)
    }

    /// `x^2 + prod p_i^{e_i}`.
    pub fn lhs(&self, basis: &PrimeBasis) -> BigUint {
        &self.x * &self.x + basis.value(&self.exponents)
    }

    /// Exact check of the equation and every side condition.
    pub fn is_valid(&self, basis: &PrimeBasis) -> bool {
        self.exponents.len() == basis.len()
            && self.x >= BigUint::one()
            && self.y > BigUint::one()
            && self.n >= 3
            && matches!(self.delta(), Some(0..=2))
            && self.x.gcd(&self.y).is_one()
            && self.lhs(basis) == self.rhs()
    }

    /// Sort key `(n, lambda, y, x)` used for every output table.
    pub fn table_cmp(&self, other: &Self) -> Ordering {
        (self.n, self.lambda, &self.y, &self.x, &self.exponents).cmp(&(other.n, other.lambda, &other.y, &other.x, &other.exponents))
    }
}

impl fmt::Display for SolutionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={}, y={}, lambda={}, exps={}, n={})", self.x, self.y, self.lambda, self.exponents, self.n)
    }
}

/// A canonical record and the `(y, n)` aliases it absorbed.
pub type Aliased = (SolutionRecord, Vec<(BigUint, u32)>);

/// Canonicalizes a set of records: records describing the same equation
/// instance (same `x`, `lambda`, exponents and `y^n`) collapse to the one with
/// the largest `n`. Returns the survivors sorted by [`SolutionRecord::table_cmp`]
/// together with the `(y, n)` aliases each survivor absorbed.
pub fn canonicalize(records: Vec<SolutionRecord>) -> Vec<Aliased> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(BigUint, u32, Exponents, BigUint), Vec<SolutionRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.x.clone(), r.lambda, r.exponents.clone(), r.y.pow(r.n));
        groups.entry(key).or_default().push(r);
    }
    let mut out: Vec<Aliased> = groups
        .into_values()
        .map(|mut group| {
            group.sort_by_key(|r| std::cmp::Reverse(r.n));
            group.dedup();
            let keep = group.remove(0);
            let aliases = group.into_iter().map(|r| (r.y, r.n)).collect();
            (keep, aliases)
        })
        .collect();
    out.sort_by(|a, b| a.0.table_cmp(&b.0));
    out
}
