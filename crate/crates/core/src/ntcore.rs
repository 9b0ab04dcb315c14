//! Exact number-theoretic primitives shared by every other module.
//!
//! Everything here works on arbitrary-precision integers (or on machine
//! integers where the range is provably small, as in the class-number
//! enumeration) and never touches floating point.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent vector over a [`PrimeBasis`], one entry per basis prime.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn zeros(len: usize) -> Self {
        Exponents(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Ordered list of distinct odd primes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeBasis {
    primes: Vec<u64>,
}

impl Default for PrimeBasis {
    fn default() -> Self {
        PrimeBasis { primes: vec![17, 41, 59] }
    }
}

impl PrimeBasis {
    pub fn new(primes: Vec<u64>) -> Result<Self> {
        if primes.is_empty() {
            return Err(Error::InvalidBasis("basis is empty".into()));
        }
        for &p in &primes {
            if p == 2 || !is_prime(p) {
                return Err(Error::InvalidBasis(format!("{p} is not an odd prime")));
            }
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBasis("primes must be strictly increasing".into()));
        }
        Ok(PrimeBasis { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.iter().position(|&q| q == p)
    }

    /// `prod p_i^{e_i}`.
    pub fn value(&self, exps: &Exponents) -> BigUint {
        debug_assert_eq!(exps.len(), self.len());
        let mut v = BigUint::one();
        for (&p, &e) in self.primes.iter().zip(exps.as_slice()) {
            v *= BigUint::from(p).pow(e);
        }
        v
    }

    /// Products of the primes in every subset, in subset-mask order.
    pub fn squarefree_products(&self) -> Vec<u64> {
        (0u32..1 << self.len())
            .map(|mask| self.primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).product())
            .collect()
    }
}

impl fmt::Display for PrimeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Factorization `value = prod p_i^{e_i} * cofactor` with the cofactor coprime to the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFactorization {
    pub exponents: Exponents,
    pub cofactor: BigUint,
}

impl SFactorization {
    pub fn is_s_unit(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn value(&self, basis: &PrimeBasis) -> BigUint {
        basis.value(&self.exponents) * &self.cofactor
    }
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigInt) -> Result<i8> {
    if n.sign() != Sign::Plus || n.is_even() {
        return Err(Error::InvalidModulus(n.to_string()));
    }
    let mut n = n.magnitude().clone();
    let mut a =
        a.mod_floor(&BigInt::from_biguint(Sign::Plus, n.clone())).to_biguint().expect("mod_floor by a positive modulus is nonnegative");
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n8 = low_u64(&n) & 7;
            if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if low_u64(&a) & 3 == 3 && low_u64(&n) & 3 == 3 {
            result = -result;
        }
        a %= &n;
    }
    Ok(if n.is_one() { result } else { 0 })
}

/// Jacobi symbol on machine integers.
pub fn jacobi_i64(a: i64, n: u64) -> Result<i8> {
    jacobi(&BigInt::from(a), &BigInt::from(n))
}

fn low_u64(v: &BigUint) -> u64 {
    v.iter_u64_digits().next().unwrap_or(0)
}

// Bit i of QR_k is set iff i is a square mod k.
const QR64: u64 = 0x0202_0212_0203_0213;
const QR63: u64 = 0x0402_4830_1245_0293;
const QR65: u64 = 0x218a_0198_6601_4613;
const QR11: u64 = 0x23b;

fn passes_square_residues(n: &BigUint) -> bool {
    let low = low_u64(n);
    if QR64 >> (low & 63) & 1 == 0 {
        return false;
    }
    let r = (n % 45_045u32).to_u64().expect("residue below modulus");
    QR63 >> (r % 63) & 1 == 1 && QR65 >> ((r % 65) & 63) & 1 == 1 && QR11 >> (r % 11) & 1 == 1
}

/// Square root of `n` if `n` is a perfect square.
pub fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    match n.sign() {
        Sign::Minus => None,
        Sign::NoSign => Some(BigInt::zero()),
        Sign::Plus => isqrt_exact_unsigned(n.magnitude()).map(BigInt::from),
    }
}

pub fn isqrt_exact_unsigned(n: &BigUint) -> Option<BigUint> {
    if !passes_square_residues(n) {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// `t` with `t^r = n`, if it exists.
pub fn nth_root_exact(n: &BigUint, r: u32) -> Option<BigUint> {
    assert!(r >= 2, "root degree must be at least 2");
    if n.is_zero() {
        return Some(BigUint::zero());
    }
    if r == 2 {
        return isqrt_exact_unsigned(n);
    }
    let t = n.nth_root(r);
    (t.pow(r) == *n).then_some(t)
}

/// Writes `v = base^exp` with `exp` maximal.
///
/// Exponents are tried from `floor(log2 v)` down to 2; the first hit is the
/// largest one.
pub fn perfect_power_split(v: &BigUint) -> Result<(BigUint, u32)> {
    if v <= &BigUint::one() {
        return Err(Error::Precondition(format!("perfect_power_split needs v > 1, got {v}")));
    }
    let max_exp = (v.bits() - 1) as u32;
    for e in (2..=max_exp).rev() {
        if let Some(b) = nth_root_exact(v, e) {
            return Ok((b, e));
        }
    }
    Ok((v.clone(), 1))
}

/// Splits `v >= 1` into its basis part and a coprime cofactor.
pub fn s_factor(v: &BigUint, basis: &PrimeBasis) -> SFactorization {
    assert!(!v.is_zero(), "s_factor needs v >= 1");
    let mut rest = v.clone();
    let mut exps = Vec::with_capacity(basis.len());
    for &p in basis.primes() {
        let p = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        exps.push(e);
    }
    SFactorization { exponents: Exponents(exps), cofactor: rest }
}

/// `v = d * z^2` with `d` squarefree, for `v` composed of basis primes only.
pub fn squarefree_split(v: &BigUint, basis: &PrimeBasis) -> Result<(BigUint, BigUint)> {
    let f = s_factor(v, basis);
    if !f.is_s_unit() {
        return Err(Error::CofactorNotOne { value: v.to_string(), cofactor: f.cofactor.to_string() });
    }
    let d = Exponents(f.exponents.as_slice().iter().map(|e| e % 2).collect());
    let z = Exponents(f.exponents.as_slice().iter().map(|e| e / 2).collect());
    Ok((basis.value(&d), basis.value(&z)))
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Class number of `Q(sqrt(-d))` for squarefree `d >= 1`.
///
/// Counts reduced primitive forms `(a, b, c)` of discriminant `-d` when
/// `d = 3 mod 4` and `-4d` otherwise: `|b| <= a <= c`, `b >= 0` whenever
/// `|b| = a` or `a = c`, and `gcd(a, b, c) = 1`.
pub fn class_number(d: u64) -> Result<u64> {
    if !is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    let disc: i128 = if d % 4 == 3 { -(d as i128) } else { -4 * d as i128 };
    let abs_disc = -disc;
    let mut count = 0u64;
    let mut a: i128 = 1;
    while 3 * a * a <= abs_disc {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if (b < 0) && (a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Smallest prime factor of `n >= 2`.
pub fn smallest_prime_factor(n: u64) -> u64 {
    assert!(n >= 2);
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 2;
    }
    n
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// `|v|` as an unsigned big integer.
pub fn magnitude(v: &BigInt) -> BigUint {
    v.abs().to_biguint().expect("absolute value is nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_i64(-1, 59).unwrap(), -1);
        assert_eq!(jacobi_i64(-17, 59).unwrap(), -1);
        assert_eq!(jacobi_i64(-41, 59).unwrap(), -1);
        assert_eq!(jacobi_i64(2, 17).unwrap(), 1);
        assert_eq!(jacobi_i64(17, 17).unwrap(), 0);
        assert_eq!(jacobi_i64(5, 1).unwrap(), 1);
    }

    #[test]
    fn jacobi_rejects_even_or_nonpositive_modulus() {
        assert!(matches!(jacobi_i64(3, 8), Err(Error::InvalidModulus(_))));
        assert!(jacobi(&big(3), &big(0)).is_err());
        assert!(jacobi(&big(3), &big(-7)).is_err());
    }

    #[test]
    fn jacobi_matches_euler_criterion_for_small_primes() {
        for p in primes_between(3, 200) {
            for a in -50i64..50 {
                let euler = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let expected = match euler {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(jacobi_i64(a, p).unwrap(), expected, "({a}/{p})");
            }
        }
    }

    #[test]
    fn exact_roots() {
        assert_eq!(isqrt_exact(&big(707_281)), Some(big(841)));
        assert_eq!(isqrt_exact(&big(0)), Some(big(0)));
        assert_eq!(isqrt_exact(&big(2)), None);
        assert_eq!(isqrt_exact(&big(-4)), None);
        assert_eq!(nth_root_exact(&u(28_934_443), 3), Some(u(307)));
        assert_eq!(nth_root_exact(&u(3125), 5), Some(u(5)));
        assert_eq!(nth_root_exact(&u(10), 2), None);
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(perfect_power_split(&u(307)).unwrap(), (u(307), 1));
        assert_eq!(perfect_power_split(&u(16)).unwrap(), (u(2), 4));
        assert_eq!(perfect_power_split(&u(29)).unwrap(), (u(29), 1));
        assert_eq!(perfect_power_split(&u(2)).unwrap(), (u(2), 1));
        assert_eq!(perfect_power_split(&u(36)).unwrap(), (u(6), 2));
        assert!(perfect_power_split(&u(1)).is_err());
    }

    #[test]
    fn basis_factorization() {
        let basis = PrimeBasis::default();
        let f = s_factor(&u(1_686_043), &basis);
        assert_eq!(f.exponents, Exponents(vec![1, 2, 1]));
        assert!(f.is_s_unit());
        let f = s_factor(&u(1), &basis);
        assert_eq!(f.exponents, Exponents(vec![0, 0, 0]));
        let f = s_factor(&u(2419), &basis);
        assert_eq!(f.exponents, Exponents(vec![0, 1, 1]));
        let f = s_factor(&u(2 * 17 * 17 * 11), &basis);
        assert_eq!(f.exponents, Exponents(vec![2, 0, 0]));
        assert_eq!(f.cofactor, u(22));
    }

    #[test]
    fn squarefree_parts() {
        let basis = PrimeBasis::default();
        assert_eq!(squarefree_split(&u(41 * 41), &basis).unwrap(), (u(1), u(41)));
        assert_eq!(squarefree_split(&u(17 * 59), &basis).unwrap(), (u(1003), u(1)));
        assert_eq!(squarefree_split(&u(1), &basis).unwrap(), (u(1), u(1)));
        assert!(matches!(squarefree_split(&u(34), &basis), Err(Error::CofactorNotOne { .. })));
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(1).unwrap(), 1);
        assert_eq!(class_number(59).unwrap(), 3);
        assert_eq!(class_number(17).unwrap(), 4);
        assert_eq!(class_number(3).unwrap(), 1);
        assert_eq!(class_number(5).unwrap(), 2);
        assert_eq!(class_number(163).unwrap(), 1);
        assert!(matches!(class_number(12), Err(Error::NotSquarefree(12))));
    }

    #[test]
    fn basis_validation() {
        assert!(PrimeBasis::new(vec![17, 41, 59]).is_ok());
        assert!(PrimeBasis::new(vec![]).is_err());
        assert!(PrimeBasis::new(vec![2, 3]).is_err());
        assert!(PrimeBasis::new(vec![15]).is_err());
        assert!(PrimeBasis::new(vec![41, 17]).is_err());
        assert_eq!(PrimeBasis::default().squarefree_products(), vec![1, 17, 41, 697, 59, 1003, 2419, 41123]);
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(smallest_prime_factor(10), 2);
        assert_eq!(smallest_prime_factor(35), 5);
    }
}
