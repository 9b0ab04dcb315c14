use lrn_core::lehmer::*;
use lrn_core::ntcore::{is_prime, primes_between, PrimeBasis};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// `L_n` from the binomial expansion of `(sqrt A + sqrt B)^n`, independent of
/// the recurrence: only odd powers of `sqrt B` survive in `alpha^n - beta^n`.
fn expanded(a: i64, b: i64, n: u32) -> BigInt {
    let (a, b) = (BigInt::from(a), BigInt::from(b));
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=n {
        if j > 0 {
            binom = binom * (n - j + 1) / j;
        }
        if j % 2 == 1 {
            let a_exp = if n % 2 == 1 { (n - j) / 2 } else { (n - j - 1) / 2 };
            sum += &binom * a.pow(a_exp) * b.pow((j - 1) / 2);
        }
    }
    let scale = BigInt::one() << (n - 1);
    assert!(sum.is_multiple_of(&scale), "expansion is not integral");
    sum / scale
}

fn pair_strategy() -> impl Strategy<Value = (i64, i64)> {
    (1i64..300, -300i64..300)
        .prop_filter("nonzero Q", |(_, q)| *q != 0)
        .prop_map(|(a, q)| (a, a - 4 * q))
        .prop_filter("valid pair", |(a, b)| LehmerPair::new(*a, *b).is_ok())
}

fn small_prime_factors(v: &BigInt) -> Vec<u64> {
    let mut m = v.abs();
    let mut out = Vec::new();
    let mut f = 2u64;
    while BigInt::from(f * f) <= m {
        if m.is_multiple_of(&BigInt::from(f)) {
            out.push(f);
            while m.is_multiple_of(&BigInt::from(f)) {
                m /= f;
            }
        }
        f += 1;
    }
    if m > BigInt::one() {
        out.push(u64::try_from(m).expect("cofactor fits"));
    }
    out
}

#[test]
fn first_terms() {
    let pair = LehmerPair::new(5, -7).unwrap();
    assert_eq!(pair.q(), &BigInt::from(3));
    let seq = lehmer_sequence(&pair, 5);
    assert_eq!(seq, [1, 1, 2, -1, -11].map(BigInt::from).to_vec());
    assert!(lehmer_number(&pair, 0).is_err());
}

#[test]
fn fibonacci_pair() {
    let pair = LehmerPair::new(1, 5).unwrap();
    assert_eq!(lehmer_number(&pair, 7).unwrap(), BigInt::from(13));
    assert_eq!(lehmer_number(&pair, 2).unwrap(), BigInt::from(1));
    assert_eq!(lehmer_number(&pair, 6).unwrap(), BigInt::from(8));
    assert!(is_primitive_divisor(&pair, 7, 13).unwrap().is_primitive);
    let r = is_primitive_divisor(&pair, 5, 5).unwrap();
    assert_eq!((r.is_primitive, r.blocking_factor), (false, Some(BlockingFactor::ParameterProduct)));
    let r = is_primitive_divisor(&pair, 6, 2).unwrap();
    assert_eq!((r.is_primitive, r.blocking_factor), (false, Some(BlockingFactor::Term(3))));
    assert!(matches!(is_primitive_divisor(&pair, 7, 91), Err(lrn_core::Error::NotPrime(91))));
}

#[test]
fn filter_examples() {
    assert!(congruence_filter(59, 5, -1).unwrap());
    assert!(congruence_filter(41, 7, -17).unwrap());
    assert!(!congruence_filter(17, 5, -1).unwrap());
    assert_eq!(candidate_exponents(41, 100), vec![5, 7]);
    assert_eq!(candidate_exponents(59, 100), vec![5, 29]);
    assert!(candidate_exponents(17, 100).is_empty());
    assert_eq!(bhv_exceptions(17).unwrap(), ExceptionLookup::Pairs(vec![]));
}

/// The pair from `(a, b, d, lambda) = (2, 1, 1, 1)` has 41 as a primitive
/// divisor of `L_5`, and the congruence filter admits it.
#[test]
fn filter_is_implied_by_a_primitive_divisor() {
    let pair = LehmerPair::from_descent(&BigUint::from(2u32), &BigUint::from(1u32), 1, 1).unwrap();
    let l5 = lehmer_number(&pair, 5).unwrap();
    assert!(l5.is_multiple_of(&BigInt::from(41)));
    assert!(is_primitive_divisor(&pair, 5, 41).unwrap().is_primitive);
    assert!(congruence_filter(41, 5, -1).unwrap());
}

#[test]
fn invalid_pairs() {
    assert!(LehmerPair::new(0, -4).is_err());
    assert!(LehmerPair::new(3, 1).is_err());
    assert!(LehmerPair::new(4, -4).is_err());
    assert!(LehmerPair::new(5, 5).is_err());
    // a/b = i: A = -B.
    assert!(LehmerPair::new(1, -1).is_err());
    // a/b a primitive cube root of unity: 2(A+B) = -(A-B).
    assert!(LehmerPair::new(1, -3).is_err());
}

#[test]
fn recurrence_matches_expansion_on_500_pairs() {
    let mut checked = 0;
    'outer: for a in 1i64..60 {
        for q in -30i64..30 {
            let b = a - 4 * q;
            if q == 0 || LehmerPair::new(a, b).is_err() {
                continue;
            }
            let pair = LehmerPair::new(a, b).unwrap();
            let seq = lehmer_sequence(&pair, 25);
            for n in 1..=25 {
                assert_eq!(seq[n as usize - 1], expanded(a, b, n), "L_{n}({a}, {b})");
            }
            checked += 1;
            if checked == 500 {
                break 'outer;
            }
        }
    }
    assert_eq!(checked, 500);
}

#[test]
fn candidate_exponents_for_the_basis() {
    assert_eq!(candidate_exponents(17, 30), Vec::<u64>::new());
    assert_eq!(candidate_exponents(41, 30), vec![5, 7]);
    assert_eq!(candidate_exponents(59, 30), vec![5, 29]);
}

#[test]
fn congruence_filter_examples() {
    assert!(congruence_filter(41, 5, -1).unwrap());
    assert!(!congruence_filter(41, 5, -17).unwrap());
    assert!(matches!(congruence_filter(17, 5, -17), Err(lrn_core::Error::SymbolVanishes { .. })));
    assert!(congruence_filter(15, 5, -1).is_err());
    assert!(congruence_filter(41, 4, -1).is_err());
    // q = 59 passes q = +-1 mod 29 but fails the symbol test for every d.
    let basis = PrimeBasis::default();
    for d in basis.squarefree_products().into_iter().filter(|d| d % 59 != 0) {
        assert!(!congruence_filter(59, 29, -(d as i64)).unwrap(), "d = {d}");
    }
}

#[test]
fn exception_table_shape() {
    assert_eq!(bhv_exceptions(5).unwrap(), ExceptionLookup::NotCovered);
    let ExceptionLookup::Pairs(p7) = bhv_exceptions(7).unwrap() else { panic!() };
    assert_eq!(p7.len(), 6);
    assert_eq!(bhv_exceptions(13).unwrap(), ExceptionLookup::Pairs(vec![(1, -7)]));
    for p in primes_between(11, 31).into_iter().filter(|&p| p != 13) {
        assert_eq!(bhv_exceptions(p).unwrap(), ExceptionLookup::Pairs(vec![]));
    }
    assert!(bhv_exceptions(3).is_err());
    assert!(bhv_exceptions(9).is_err());
}

#[test]
fn exceptional_terms_lack_primitive_divisors() {
    for p in [7u32, 13] {
        let ExceptionLookup::Pairs(pairs) = bhv_exceptions(p as u64).unwrap() else { panic!() };
        for (a, b) in pairs {
            let pair = LehmerPair::new(a, b).unwrap();
            let term = lehmer_number(&pair, p).unwrap();
            for q in small_prime_factors(&term) {
                let report = is_primitive_divisor(&pair, p, q).unwrap();
                assert!(report.divides_term);
                assert!(!report.is_primitive, "{q} is primitive for L_{p}({a}, {b})");
            }
        }
    }
}

#[test]
fn ordinary_pair_has_primitive_divisor() {
    let pair = LehmerPair::new(5, -7).unwrap();
    let report = is_primitive_divisor(&pair, 13, 911).unwrap();
    assert!(report.is_primitive);
    assert_eq!(report.blocking_factor, None);
    let blocked = is_primitive_divisor(&pair, 4, 5).unwrap();
    assert_eq!(blocked.blocking_factor, Some(BlockingFactor::ParameterProduct));
    assert!(is_primitive_divisor(&pair, 13, 15).is_err());
    assert!(is_primitive_divisor(&pair, 2, 3).is_err());
}

#[test]
fn earlier_term_blocks() {
    // L_3 = 2 for (5, -7) and 2 | L_6.
    let pair = LehmerPair::new(5, -7).unwrap();
    let report = is_primitive_divisor(&pair, 6, 2).unwrap();
    assert!(report.divides_term);
    assert_eq!(report.blocking_factor, Some(BlockingFactor::Term(3)));
}

#[test]
fn descent_realizations_of_exceptions() {
    let basis = PrimeBasis::default();
    let real = descent_realizations((1, -7), &basis);
    assert!(!real.is_empty());
    assert!(real.iter().all(|r| r.d == 7 && !r.d_in_basis));
    for (a, b) in [(1i64, -19i64), (3, -5), (5, -7), (13, -3), (14, -22)] {
        assert!(descent_realizations((a, b), &basis).iter().all(|r| !r.d_in_basis), "({a}, {b})");
    }
}

#[test]
fn from_descent_parameters() {
    let pair = LehmerPair::from_descent(&BigUint::from(2u32), &BigUint::from(1u32), 41, 1).unwrap();
    assert_eq!((pair.a(), pair.b()), (&BigInt::from(16), &BigInt::from(-164)));
    assert!(LehmerPair::from_descent(&BigUint::from(1u32), &BigUint::from(1u32), 1, 8).is_err());
}

proptest! {
    #[test]
    fn expansion_agrees((a, b) in pair_strategy(), n in 1u32..40) {
        let pair = LehmerPair::new(a, b).unwrap();
        prop_assert_eq!(lehmer_number(&pair, n).unwrap(), expanded(a, b, n));
    }

    #[test]
    fn divisibility_along_multiples((a, b) in pair_strategy(), m in 1u32..8, k in 1u32..6) {
        let pair = LehmerPair::new(a, b).unwrap();
        let seq = lehmer_sequence(&pair, m * k);
        let (lm, lmk) = (&seq[m as usize - 1], &seq[(m * k) as usize - 1]);
        prop_assert!(lmk.is_multiple_of(lm), "L_{} = {} does not divide L_{} = {}", m, lm, m * k, lmk);
    }

    #[test]
    fn primitive_divisors_are_one_mod_index((a, b) in pair_strategy(), idx in 0usize..4) {
        let n = [5u32, 7, 11, 13][idx];
        let pair = LehmerPair::new(a, b).unwrap();
        for q in primes_between(3, 3000) {
            let report = is_primitive_divisor(&pair, n, q).unwrap();
            if report.is_primitive {
                let r = q % n as u64;
                prop_assert!(r == 1 || r == n as u64 - 1, "q = {} for L_{}", q, n);
            }
        }
    }
}

#[test]
fn primes_helper_sanity() {
    assert!(primes_between(3, 3000).iter().all(|&p| is_prime(p)));
}
