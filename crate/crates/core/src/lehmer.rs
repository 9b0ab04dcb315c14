//! Lehmer pairs and sequences, primitive divisors, the exception table for
//! prime indices, and the congruence conditions that restrict which basis
//! primes can be primitive divisors of `L_p`.
//!
//! A pair is carried by its parameters `(A, B) = ((a+b)^2, (a-b)^2)` of the
//! underlying algebraic integers; `Q = ab = (A - B) / 4`. The terms follow
//! from `u_n = (a^n - b^n)/(a - b)` and `u_n = s u_{n-1} - Q u_{n-2}` with
//! `s^2 = A`:
//!
//! ```text
//! L_1 = L_2 = 1
//! L_m = A L_{m-1} - Q L_{m-2}   (m odd)
//! L_m =   L_{m-1} - Q L_{m-2}   (m even)
//! ```

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ntcore::{is_prime, jacobi_i64, s_factor, PrimeBasis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LehmerPair {
    a: BigInt,
    b: BigInt,
    q: BigInt,
}

impl LehmerPair {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        let invalid = |reason| Error::InvalidLehmerPair { a: a.to_string(), b: b.to_string(), reason };
        if a < BigInt::one() {
            return Err(invalid("A must be at least 1"));
        }
        let diff = &a - &b;
        if !diff.is_multiple_of(&BigInt::from(4)) {
            return Err(invalid("A and B must agree mod 4"));
        }
        let q: BigInt = &diff / 4;
        if q.is_zero() {
            return Err(invalid("Q = (A - B)/4 vanishes"));
        }
        if !a.gcd(&q).is_one() {
            return Err(invalid("A and Q are not coprime"));
        }
        // a/b is a root of unity iff a/b + b/a = 2(A+B)/(A-B) lies in {0, +-1, +-2}.
        let trace_num = (&a + &b) * 2;
        for k in -2i32..=2 {
            if trace_num == &diff * k {
                return Err(invalid("ratio of the roots is a root of unity"));
            }
        }
        Ok(LehmerPair { a, b, q })
    }

    /// Pair `((a + b sqrt(-d))/sqrt(lambda), (a - b sqrt(-d))/sqrt(lambda))`,
    /// whose parameters are `(4a^2/lambda, -4b^2 d/lambda)`.
    pub fn from_descent(a: &BigUint, b: &BigUint, d: u64, lambda: u32) -> Result<Self> {
        let a_param = BigInt::from(a * a * 4u32);
        let b_param = -BigInt::from(b * b * 4u32 * d);
        let lam = BigInt::from(lambda);
        if !a_param.is_multiple_of(&lam) || !b_param.is_multiple_of(&lam) {
            return Err(Error::Precondition(format!("lambda = {lambda} does not divide the parameters")));
        }
        LehmerPair::new(a_param / &lam, b_param / lam)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// `(a^2 - b^2)^2 = A * B`.
    pub fn discriminant_square(&self) -> BigInt {
        &self.a * &self.b
    }
}

/// `L_1, ..., L_n`.
pub fn lehmer_sequence(pair: &LehmerPair, n: u32) -> Vec<BigInt> {
    let mut terms = Vec::with_capacity(n as usize);
    for m in 1..=n {
        let next = if m <= 2 {
            BigInt::one()
        } else {
            let prev = &terms[m as usize - 2];
            let prev2 = &terms[m as usize - 3];
            if m % 2 == 1 {
                pair.a() * prev - pair.q() * prev2
            } else {
                prev - pair.q() * prev2
            }
        };
        terms.push(next);
    }
    terms
}

/// `L_n` for `n >= 1`.
pub fn lehmer_number(pair: &LehmerPair, n: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Precondition("Lehmer index starts at 1".into()));
    }
    Ok(lehmer_sequence(pair, n).pop().expect("n >= 1 terms"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockingFactor {
    /// The prime divides `(a^2 - b^2)^2 = A B`.
    ParameterProduct,
    /// The prime divides an earlier term `L_k`.
    Term(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveDivisorReport {
    pub n: u32,
    pub divisor: u64,
    pub divides_term: bool,
    pub is_primitive: bool,
    pub blocking_factor: Option<BlockingFactor>,
}

/// Whether the prime `p` is a primitive divisor of `L_n`.
pub fn is_primitive_divisor(pair: &LehmerPair, n: u32, p: u64) -> Result<PrimitiveDivisorReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n < 3 {
        return Err(Error::Precondition(format!("primitive divisors are tested for n >= 3, got {n}")));
    }
    let prime = BigInt::from(p);
    let terms = lehmer_sequence(pair, n);
    let divides_term = terms[n as usize - 1].is_multiple_of(&prime);
    let blocking_factor = if pair.discriminant_square().is_multiple_of(&prime) {
        Some(BlockingFactor::ParameterProduct)
    } else {
        terms[..n as usize - 1].iter().position(|t| t.is_multiple_of(&prime)).map(|i| BlockingFactor::Term(i as u32 + 1))
    };
    Ok(PrimitiveDivisorReport { n, divisor: p, divides_term, is_primitive: divides_term && blocking_factor.is_none(), blocking_factor })
}

/// Result of looking up the exceptional parameters for `L_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExceptionLookup {
    /// The table does not classify this index (p = 5).
    NotCovered,
    /// Parameters `(A, B)`, up to equivalence, for which `L_p` has no primitive divisor.
    Pairs(Vec<(i64, i64)>),
}

const EXCEPTIONS_7: [(i64, i64); 6] = [(1, -7), (1, -19), (3, -5), (5, -7), (13, -3), (14, -22)];
const EXCEPTIONS_13: [(i64, i64); 1] = [(1, -7)];

/// Exceptional Lehmer parameters for a prime index `p >= 5`.
pub fn bhv_exceptions(p: u64) -> Result<ExceptionLookup> {
    if p < 5 || !is_prime(p) {
        return Err(Error::Precondition(format!("exception table is indexed by primes >= 5, got {p}")));
    }
    Ok(match p {
        5 => ExceptionLookup::NotCovered,
        7 => ExceptionLookup::Pairs(EXCEPTIONS_7.to_vec()),
        13 => ExceptionLookup::Pairs(EXCEPTIONS_13.to_vec()),
        _ => ExceptionLookup::Pairs(Vec::new()),
    })
}

/// Descent data `(a, b^2 d, lambda)` realizing parameters `(A, B)` as
/// `(4a^2/lambda, -4b^2 d/lambda)`, up to the sign equivalence `(A, B) ~ (-A, -B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentRealization {
    pub lambda: u32,
    pub a: u64,
    /// `b^2 d` as read off the parameter `B`.
    pub b_squared_d: u64,
    /// Squarefree part of `b^2 d`.
    pub d: u64,
    /// Whether `d` is composed of basis primes only.
    pub d_in_basis: bool,
}

pub fn descent_realizations(pair: (i64, i64), basis: &PrimeBasis) -> Vec<DescentRealization> {
    let mut out = Vec::new();
    for (pa, pb) in [pair, (-pair.0, -pair.1)] {
        for lambda in [1u32, 2, 4] {
            let lam = lambda as i64;
            let (a4, b4) = (pa * lam, -pb * lam);
            if a4 <= 0 || b4 <= 0 || a4 % 4 != 0 || b4 % 4 != 0 {
                continue;
            }
            let a_sq = (a4 / 4) as u64;
            let a = a_sq.sqrt();
            if a * a != a_sq {
                continue;
            }
            let b_squared_d = (b4 / 4) as u64;
            let mut d = b_squared_d;
            let mut f = 2u64;
            while f * f <= d {
                while d.is_multiple_of(f * f) {
                    d /= f * f;
                }
                f += 1;
            }
            let d_in_basis = s_factor(&BigUint::from(d), basis).is_s_unit();
            out.push(DescentRealization { lambda, a, b_squared_d, d, d_in_basis });
        }
    }
    out
}

/// Necessary condition for the basis prime `q` to be a primitive divisor of
/// `L_p`: `q = (D/q) (mod p)` where `D` is `(a^2 - b^2)^2` up to squares,
/// represented by `neg_d = -d`.
pub fn congruence_filter(q: u64, p: u64, neg_d: i64) -> Result<bool> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::Precondition(format!("p must be an odd prime, got {p}")));
    }
    let symbol = jacobi_i64(neg_d, q)?;
    if symbol == 0 {
        return Err(Error::SymbolVanishes { q, d: neg_d.unsigned_abs() });
    }
    Ok((q as i64 - symbol as i64).rem_euclid(p as i64) == 0)
}

/// Primes `5 <= p <= p_max` with `q = +-1 (mod p)`.
pub fn candidate_exponents(q: u64, p_max: u64) -> Vec<u64> {
    (5..=p_max).filter(|&p| is_prime(p) && ((q - 1).is_multiple_of(p) || (q + 1).is_multiple_of(p))).collect()
}

/// Absolute value helper for reports.
pub fn abs_term(t: &BigInt) -> BigUint {
    t.abs().to_biguint().expect("nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> LehmerPair {
        LehmerPair::new(1, 5).unwrap()
    }

    #[test]
    fn terms() {
        let pair = fib();
        assert_eq!(pair.q(), &BigInt::from(-1));
        assert_eq!(lehmer_number(&pair, 7).unwrap(), BigInt::from(13));
        assert_eq!(lehmer_number(&pair, 2).unwrap(), BigInt::from(1));
        assert_eq!(lehmer_number(&pair, 6).unwrap(), BigInt::from(8));
        assert!(lehmer_number(&pair, 0).is_err());
    }

    #[test]
    fn pair_validation() {
        assert!(LehmerPair::new(1, 2).is_err()); // A != B mod 4
        assert!(LehmerPair::new(0, -4).is_err()); // A < 1
        assert!(LehmerPair::new(3, 3).is_err()); // Q = 0
        assert!(LehmerPair::new(2, -6).is_err()); // gcd(A, Q) = 2
        assert!(LehmerPair::new(1, -3).is_err()); // trace 2(A+B)/(A-B) = -1
        assert!(LehmerPair::new(1, -7).is_ok());
        let from_descent = LehmerPair::from_descent(&2u32.into(), &1u32.into(), 1, 1).unwrap();
        assert_eq!((from_descent.a(), from_descent.b()), (&BigInt::from(16), &BigInt::from(-4)));
    }

    #[test]
    fn primitive_divisors() {
        let pair = fib();
        let r = is_primitive_divisor(&pair, 7, 13).unwrap();
        assert!(r.is_primitive && r.divides_term);
        let r = is_primitive_divisor(&pair, 5, 5).unwrap();
        assert!(!r.is_primitive);
        assert_eq!(r.blocking_factor, Some(BlockingFactor::ParameterProduct));
        let r = is_primitive_divisor(&pair, 6, 2).unwrap();
        assert!(!r.is_primitive && r.divides_term);
        assert_eq!(r.blocking_factor, Some(BlockingFactor::Term(3)));
        assert!(matches!(is_primitive_divisor(&pair, 7, 15), Err(Error::NotPrime(15))));
    }

    #[test]
    fn exception_table() {
        assert_eq!(bhv_exceptions(7).unwrap(), ExceptionLookup::Pairs(EXCEPTIONS_7.to_vec()));
        assert_eq!(bhv_exceptions(13).unwrap(), ExceptionLookup::Pairs(vec![(1, -7)]));
        assert_eq!(bhv_exceptions(17).unwrap(), ExceptionLookup::Pairs(vec![]));
        assert_eq!(bhv_exceptions(11).unwrap(), ExceptionLookup::Pairs(vec![]));
        assert_eq!(bhv_exceptions(5).unwrap(), ExceptionLookup::NotCovered);
        assert!(bhv_exceptions(9).is_err());
    }

    #[test]
    fn thirteen_exception_needs_d_seven() {
        let r = descent_realizations((1, -7), &PrimeBasis::default());
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].lambda, r[0].a, r[0].d, r[0].d_in_basis), (4, 1, 7, false));
    }

    #[test]
    fn congruences() {
        assert!(congruence_filter(59, 5, -1).unwrap());
        assert!(congruence_filter(41, 7, -17).unwrap());
        assert!(!congruence_filter(17, 5, -1).unwrap());
        assert!(matches!(congruence_filter(41, 5, -41), Err(Error::SymbolVanishes { .. })));
    }

    #[test]
    fn candidate_prime_exponents() {
        assert_eq!(candidate_exponents(41, 100), vec![5, 7]);
        assert_eq!(candidate_exponents(59, 100), vec![5, 29]);
        assert_eq!(candidate_exponents(17, 100), Vec::<u64>::new());
    }
}
