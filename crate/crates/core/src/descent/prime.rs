use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;

use super::families::{residue_vectors, LAMBDAS};
use super::{CaseTag, CurveEquation, CurveModel, Provenance, ShapeOrigin};
use crate::error::{Error, Result};
use crate::lehmer::{candidate_exponents, congruence_filter};
use crate::ntcore::{class_number, is_prime, Exponents, PrimeBasis};

/// One admissible descent setting for a prime exponent `p`: the basis prime
/// `q` that must be a primitive divisor of `L_p`, the squarefree `d` and the
/// power of two `lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeCaseContext {
    pub p: u64,
    pub q: u64,
    pub d: u64,
    pub lambda: u32,
    /// Basis primes other than `q`; `b` is composed of these.
    pub b_shape: Vec<u64>,
    pub class_number: u64,
    /// `gcd(p, h(-d)) = 1`.
    pub applicable: bool,
}

/// Contexts for the prime exponent `p`, ordered by `(d, q, lambda)`.
///
/// Fails with [`Error::ClassNumberNotCoprime`] as soon as some squarefree `d`
/// over the basis has `p | h(-d)`.
pub fn prime_case_contexts(p: u64, basis: &PrimeBasis) -> Result<Vec<PrimeCaseContext>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::Precondition(format!("prime case needs a prime p >= 5, got {p}")));
    }
    let mut ds = basis.squarefree_products();
    ds.sort_unstable();
    let mut out = Vec::new();
    for d in ds {
        let h = class_number(d)?;
        if h.gcd(&p) != 1 {
            return Err(Error::ClassNumberNotCoprime { p, d, h });
        }
        for &q in basis.primes() {
            if d % q == 0 || !candidate_exponents(q, p).contains(&p) {
                continue;
            }
            if !congruence_filter(q, p, -(d as i64))? {
                continue;
            }
            let b_shape: Vec<u64> = basis.primes().iter().copied().filter(|&r| r != q).collect();
            for lambda in LAMBDAS {
                out.push(PrimeCaseContext { p, q, d, lambda, b_shape: b_shape.clone(), class_number: h, applicable: true });
            }
        }
    }
    Ok(out)
}

/// Subsets of `primes`, ordered by size then lexicographically.
fn subsets(primes: &[u64]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = (0u32..1 << primes.len())
        .map(|mask| primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
        .collect();
    out.sort_by(|a: &Vec<u64>, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// `(shape, d, lambda)` triples reachable from the contexts: `b` may use any
/// subset of the primes other than `q`.
fn systematic(contexts: &[PrimeCaseContext]) -> BTreeSet<(usize, Vec<u64>, u64, u32)> {
    let mut set = BTreeSet::new();
    for c in contexts {
        for shape in subsets(&c.b_shape) {
            set.insert((shape.len(), shape, c.d, c.lambda));
        }
    }
    set
}

/// Residue vectors over the basis with zeros on `shape`, each entry in `{0, 1}`.
fn free_residues(basis: &PrimeBasis, shape: &[u64]) -> Vec<Exponents> {
    let free: Vec<usize> = (0..basis.len()).filter(|&i| !shape.contains(&basis.primes()[i])).collect();
    residue_vectors(free.len(), 2)
        .into_iter()
        .map(|r| {
            let mut e = Exponents::zeros(basis.len());
            for (slot, &i) in free.iter().enumerate() {
                e.0[i] = r.get(slot);
            }
            e
        })
        .collect()
}

/// Cubic models `Y^2 = X^3 - 35s X^2 + 147s^2 X - 49s^3`, `s = dD`, for `p = 7`.
///
/// `D = sign * lambda * prod p^r` over the primes outside the `b`-shape, and
/// a solution sits at `X = 7D a^2 / b^2`, `Y = 7D^2 lambda P / b^3` where `P`
/// is an S-unit.
pub fn build_p7_curves(contexts: &[PrimeCaseContext], basis: &PrimeBasis) -> Result<Vec<CurveModel>> {
    if contexts.iter().any(|c| c.p != 7) {
        return Err(Error::Precondition("build_p7_curves needs contexts for p = 7".into()));
    }
    let mut out = Vec::new();
    for (_, shape, d, lambda) in systematic(contexts) {
        for sign in [1i8, -1] {
            for residues in free_residues(basis, &shape) {
                let dv = BigInt::from(sign) * BigInt::from(lambda) * BigInt::from(basis.value(&residues));
                let s = BigInt::from(d) * &dv;
                let equation =
                    CurveEquation::Cubic { c2: BigInt::from(-35) * &s, c1: BigInt::from(147) * &s * &s, c0: BigInt::from(-49) * s.pow(3) };
                let provenance = Provenance {
                    case: CaseTag::P7,
                    lambda: Some(lambda),
                    d: Some(d),
                    d_value: dv,
                    sign,
                    residues,
                    b_shape: shape.clone(),
                    origin: ShapeOrigin::Listed,
                };
                out.push(CurveModel::new(equation, provenance, shape.clone()));
            }
        }
    }
    Ok(out)
}

/// Which `d` a listed shape uses.
enum ListedDs {
    All,
    Only(&'static [u64]),
    Systematic,
}

/// The explicitly listed `(shape, d)` table for the default basis.
const LISTED_P5: [(&[u64], ListedDs); 5] = [
    (&[], ListedDs::All),
    (&[17], ListedDs::All),
    (&[41], ListedDs::Only(&[1, 59])),
    (&[59], ListedDs::Systematic),
    (&[41, 59], ListedDs::All),
];

/// Quartic models for `p = 5`.
///
/// With `b = 1`: `Y^2 = 5D X^4 - 10Dd X^2 + Dd^2`, solutions at `X = a`,
/// `Y = D lambda P`. Otherwise `D Y^2 = 5X^4 - 10d X^2 + d^2`, solutions at
/// `X = a/b`, `Y = lambda P / b^2`. Here `D = sign * prod p^r` over the primes
/// outside the shape and `P` is an S-unit.
///
/// On the default basis the listed shape table is emitted first, followed by
/// the `(shape, d)` pairs that only the systematic rule produces, tagged
/// [`ShapeOrigin::Supplementary`]. On other bases every pair is systematic.
pub fn build_p5_curves(contexts: &[PrimeCaseContext], basis: &PrimeBasis) -> Result<Vec<CurveModel>> {
    if contexts.iter().any(|c| c.p != 5) {
        return Err(Error::Precondition("build_p5_curves needs contexts for p = 5".into()));
    }
    let all_ds: BTreeSet<u64> = contexts.iter().map(|c| c.d).collect();
    let sys: BTreeSet<(usize, Vec<u64>, u64)> = systematic(contexts).into_iter().map(|(n, s, d, _)| (n, s, d)).collect();
    let mut pairs: Vec<(Vec<u64>, u64, ShapeOrigin)> = Vec::new();
    if *basis == PrimeBasis::default() {
        for (shape, ds) in &LISTED_P5 {
            let chosen: Vec<u64> = match ds {
                ListedDs::All => all_ds.iter().copied().collect(),
                ListedDs::Only(list) => list.iter().copied().filter(|d| all_ds.contains(d)).collect(),
                ListedDs::Systematic => sys.iter().filter(|(_, s, _)| s.as_slice() == *shape).map(|(_, _, d)| *d).collect(),
            };
            for d in chosen {
                pairs.push((shape.to_vec(), d, ShapeOrigin::Listed));
            }
        }
    }
    for (_, shape, d) in sys {
        if !pairs.iter().any(|(s, e, _)| *s == shape && *e == d) {
            pairs.push((shape, d, ShapeOrigin::Supplementary));
        }
    }
    let mut out = Vec::new();
    for (shape, d, origin) in pairs {
        let dd = BigInt::from(d);
        for sign in [1i8, -1] {
            for residues in free_residues(basis, &shape) {
                let dv = BigInt::from(sign) * BigInt::from(basis.value(&residues));
                let equation = if shape.is_empty() {
                    CurveEquation::QuarticEven {
                        lead: BigInt::from(1),
                        q4: BigInt::from(5) * &dv,
                        q2: BigInt::from(-10) * &dv * &dd,
                        q0: &dv * &dd * &dd,
                    }
                } else {
                    CurveEquation::QuarticEven { lead: dv.clone(), q4: BigInt::from(5), q2: BigInt::from(-10) * &dd, q0: &dd * &dd }
                };
                let provenance =
                    Provenance { case: CaseTag::P5, lambda: None, d: Some(d), d_value: dv, sign, residues, b_shape: shape.clone(), origin };
                out.push(CurveModel::new(equation, provenance, shape.clone()));
            }
        }
    }
    Ok(out)
}
