use num_bigint::BigInt;
use num_traits::Zero;

use super::{CaseTag, CurveEquation, CurveModel, Provenance, ShapeOrigin};
use crate::ntcore::{Exponents, PrimeBasis};

pub(crate) const LAMBDAS: [u32; 3] = [1, 2, 4];

/// All vectors in `{0..period}^len`, lexicographic.
pub(crate) fn residue_vectors(len: usize, period: u32) -> Vec<Exponents> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                (0..period).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(Exponents).collect()
}

/// Cubic models `Y^2 = X^3 - D` with `D = lambda^2 prod p^r`, `r < 6`.
///
/// A solution with `n = 3N` and exponents `6e + r` sits at
/// `(X, Y) = (lambda y^N / z^2, lambda x / z^3)` with `z = prod p^e`.
pub fn build_mod3_family(basis: &PrimeBasis) -> Vec<CurveModel> {
    let mut out = Vec::new();
    for lambda in LAMBDAS {
        for residues in residue_vectors(basis.len(), 6) {
            let d = BigInt::from(lambda * lambda) * BigInt::from(basis.value(&residues));
            let equation = CurveEquation::Cubic { c2: BigInt::zero(), c1: BigInt::zero(), c0: -&d };
            let provenance = Provenance {
                case: CaseTag::Mod3,
                lambda: Some(lambda),
                d: None,
                d_value: d,
                sign: 1,
                residues,
                b_shape: basis.primes().to_vec(),
                origin: ShapeOrigin::Listed,
            };
            out.push(CurveModel::new(equation, provenance, basis.primes().to_vec()));
        }
    }
    out
}

/// Quartic models `X^2 = lambda Y^4 - c` with `c = prod p^r`, `r < 4`.
///
/// A solution with `n = 4t` and exponents `4e + r` sits at
/// `(X, Y) = (x / z^2, y^t / z)`.
pub fn build_mod4_family(basis: &PrimeBasis) -> Vec<CurveModel> {
    let mut out = Vec::new();
    for lambda in LAMBDAS {
        for residues in residue_vectors(basis.len(), 4) {
            let c = BigInt::from(basis.value(&residues));
            let equation = CurveEquation::Ljunggren { lambda: BigInt::from(lambda), c: c.clone() };
            let provenance = Provenance {
                case: CaseTag::Mod4,
                lambda: Some(lambda),
                d: None,
                d_value: c,
                sign: 1,
                residues,
                b_shape: basis.primes().to_vec(),
                origin: ShapeOrigin::Listed,
            };
            out.push(CurveModel::new(equation, provenance, basis.primes().to_vec()));
        }
    }
    out
}
