use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{CandidateSolution, CaseTag, CurveModel, Rejection};
use crate::error::{Error, Result};
use crate::ntcore::{isqrt_exact, perfect_power_split, s_factor, Exponents, PrimeBasis};
use crate::points::{verify_point, SPoint};
use crate::solution::SolutionRecord;

/// Result of one back-substitution: the checks that passed, in order, and
/// either the solutions or the first failed check.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub trace: Vec<&'static str>,
    pub result: std::result::Result<Vec<CandidateSolution>, Rejection>,
}

impl Outcome {
    pub fn solutions(&self) -> &[CandidateSolution] {
        self.result.as_deref().unwrap_or(&[])
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        self.result.as_ref().err()
    }
}

#[derive(Default)]
struct Trace(Vec<&'static str>);

impl Trace {
    fn check(&mut self, ok: bool, reject: Rejection) -> std::result::Result<(), Rejection> {
        if ok {
            self.0.push(reject.code());
            Ok(())
        } else {
            Err(reject)
        }
    }

    fn finish(self, result: std::result::Result<Vec<CandidateSolution>, Rejection>) -> Outcome {
        Outcome { trace: self.0, result }
    }
}

/// Dispatches on the model's case.
pub fn back_substitute(point: &SPoint, model: &CurveModel, basis: &PrimeBasis) -> Outcome {
    match model.case() {
        CaseTag::Mod3 => back_substitute_mod3(point, model, basis),
        CaseTag::Mod4 => back_substitute_mod4(point, model, basis),
        CaseTag::P5 | CaseTag::P7 => back_substitute_prime(point, model, basis),
    }
}

fn on_model(point: &SPoint, model: &CurveModel, basis: &PrimeBasis, t: &mut Trace) -> std::result::Result<(), Rejection> {
    t.check(verify_point(model, point, basis), Rejection::OffCurve)?;
    let inside = basis.primes().iter().zip(point.denom_exponents.as_slice()).all(|(p, &e)| e == 0 || model.denominator_primes.contains(p));
    t.check(inside, Rejection::DenominatorOutsideShape)
}

fn source(model: &CurveModel, point: &SPoint) -> String {
    format!("{} point=({}, {}) denom={}", model.provenance.label(), point.x_num, point.y_num, point.denom_exponents)
}

/// `residues + scale * denominator exponents`.
fn lift(residues: &Exponents, denom: &Exponents, scale: u32) -> Exponents {
    Exponents(residues.as_slice().iter().zip(denom.as_slice()).map(|(r, e)| r + scale * e).collect())
}

/// Splits `big_y = y^N` over every `N` dividing its maximal exponent and
/// emits `(x, y, lambda, exps, base_n * N)` for each.
fn expand(
    x: &BigUint,
    big_y: &BigUint,
    lambda: u32,
    exps: &Exponents,
    base_n: u32,
    basis: &PrimeBasis,
    source: &str,
) -> std::result::Result<Vec<CandidateSolution>, Rejection> {
    let (base, e) = perfect_power_split(big_y).map_err(|_| Rejection::YEqualsOne)?;
    let mut out = Vec::new();
    for big_n in (1..=e).filter(|k| e % k == 0) {
        let y = base.pow(e / big_n);
        let record = SolutionRecord { x: x.clone(), y, lambda, exponents: exps.clone(), n: base_n * big_n };
        if let Some(c) = CandidateSolution::new(record, basis, source) {
            out.push(c);
        }
    }
    if out.is_empty() {
        Err(Rejection::Unverified)
    } else {
        Ok(out)
    }
}

fn to_unsigned(v: &BigInt) -> BigUint {
    v.magnitude().clone()
}

/// Cubic model `Y^2 = X^3 - D`: the point `(u/w^2, v/w^3)` is
/// `(lambda y^N / z^2, lambda x / z^3)` with `z = w`.
pub fn back_substitute_mod3(point: &SPoint, model: &CurveModel, basis: &PrimeBasis) -> Outcome {
    let mut t = Trace::default();
    let result = (|| {
        on_model(point, model, basis, &mut t)?;
        let lambda = model.provenance.lambda.unwrap_or(1);
        let lam = BigInt::from(lambda);
        let (u, v) = (&point.x_num, &point.y_num);
        t.check(!u.is_zero() && !v.is_zero(), Rejection::XyZero)?;
        t.check((u * v).is_multiple_of(&lam), Rejection::LambdaDoesNotDivide)?;
        let w = BigInt::from(point.denominator(basis));
        let reduced = |num: &BigInt, den: BigInt| num.abs() / num.gcd(&den);
        let nx = reduced(v, &lam * w.pow(3));
        let ny = reduced(u, &lam * w.pow(2));
        t.check(nx.gcd(&ny).is_one(), Rejection::NumeratorGcd)?;
        t.check(u.is_positive() && u.is_multiple_of(&lam) && v.is_multiple_of(&lam), Rejection::NonIntegral)?;
        let x = to_unsigned(&(v / &lam));
        let big_y = to_unsigned(&(u / &lam));
        t.check(big_y > BigUint::one(), Rejection::YEqualsOne)?;
        let exps = lift(&model.provenance.residues, &point.denom_exponents, 6);
        expand(&x, &big_y, lambda, &exps, 3, basis, &source(model, point))
    })();
    t.finish(result)
}

/// Quartic model `X^2 = lambda Y^4 - c`: the point `(v/w^2, u/w)` is
/// `(x / z^2, y^t / z)`.
pub fn back_substitute_mod4(point: &SPoint, model: &CurveModel, basis: &PrimeBasis) -> Outcome {
    let mut t = Trace::default();
    let result = (|| {
        on_model(point, model, basis, &mut t)?;
        let lambda = model.provenance.lambda.unwrap_or(1);
        t.check(!point.x_num.is_zero() && !point.y_num.is_zero(), Rejection::XyZero)?;
        let x = to_unsigned(&point.x_num);
        let big_y = to_unsigned(&point.y_num);
        t.check(big_y > BigUint::one(), Rejection::YEqualsOne)?;
        let exps = lift(&model.provenance.residues, &point.denom_exponents, 4);
        expand(&x, &big_y, lambda, &exps, 4, basis, &source(model, point))
    })();
    t.finish(result)
}

/// `(x, z, y)` with `x + z sqrt(-d) = eps1 (a + eps2 b sqrt(-d))^p / lambda^((p-1)/2)`
/// in absolute value and `y = (a^2 + b^2 d) / lambda`, so that
/// `x^2 + d z^2 = lambda y^p`.
pub fn recover_xy_from_ab(
    a: &BigUint,
    b: &BigUint,
    d: u64,
    lambda: u32,
    p: u32,
    eps1: i8,
    eps2: i8,
) -> Result<(BigUint, BigUint, BigUint)> {
    let pre = |msg: &str| Err(Error::Precondition(msg.to_string()));
    if a.is_zero() || b.is_zero() {
        return pre("a and b must be positive");
    }
    if ![1, 2, 4].contains(&lambda) {
        return pre("lambda must be 1, 2 or 4");
    }
    if eps1.abs() != 1 || eps2.abs() != 1 {
        return pre("signs must be +1 or -1");
    }
    if p < 3 || p.is_multiple_of(2) {
        return pre("p must be odd and at least 3");
    }
    if !a.gcd(&(b * d)).is_one() {
        return pre("gcd(a, bd) must be 1");
    }
    if b.is_even() || a.is_even() != (lambda == 1) {
        return pre("parity: b odd, and a even exactly when lambda = 1");
    }
    let norm = a * a + b * b * d;
    if !norm.is_multiple_of(&BigUint::from(lambda)) {
        return Err(Error::NonIntegralDivision(format!("lambda = {lambda} does not divide a^2 + b^2 d = {norm}")));
    }
    let d = BigInt::from(d);
    let mul = |(r1, i1): &(BigInt, BigInt), (r2, i2): &(BigInt, BigInt)| (r1 * r2 - &d * i1 * i2, r1 * i2 + i1 * r2);
    let mut acc = (BigInt::one(), BigInt::zero());
    let mut base = (BigInt::from(a.clone()), BigInt::from_biguint(if eps2 > 0 { Sign::Plus } else { Sign::Minus }, b.clone()));
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    let scale = BigInt::from(lambda).pow((p - 1) / 2);
    let (re, im) = (acc.0 * eps1, acc.1 * eps1);
    if !re.is_multiple_of(&scale) || !im.is_multiple_of(&scale) {
        return Err(Error::NonIntegralDivision(format!("lambda^{} does not divide ({re}, {im})", (p - 1) / 2)));
    }
    Ok((to_unsigned(&(re / &scale)), to_unsigned(&(im / &scale)), norm / lambda))
}

/// Prime-exponent models; see [`super::build_p7_curves`] and
/// [`super::build_p5_curves`] for where solutions sit.
pub fn back_substitute_prime(point: &SPoint, model: &CurveModel, basis: &PrimeBasis) -> Outcome {
    let mut t = Trace::default();
    let result = (|| {
        on_model(point, model, basis, &mut t)?;
        let prov = &model.provenance;
        let d = prov.d.expect("prime-case model carries d");
        let dv = &prov.d_value;
        let (u, v) = (&point.x_num, &point.y_num);
        t.check(!u.is_zero() && !v.is_zero(), Rejection::XyZero)?;
        let (p, a, lambda) = match prov.case {
            CaseTag::P7 => {
                let lambda = prov.lambda.expect("p7 model carries lambda");
                t.check(u.is_multiple_of(&BigInt::from(7)), Rejection::SevenDoesNotDivideX)?;
                let seven_d = dv * 7;
                let a = if u.is_multiple_of(&seven_d) { isqrt_exact(&(u / &seven_d)) } else { None };
                let a = a.filter(|a| a.is_positive());
                t.check(a.is_some(), Rejection::NonIntegralA)?;
                let den = &seven_d * dv;
                t.check(v.is_multiple_of(&den), Rejection::NonIntegral)?;
                let q = to_unsigned(&(v / &den));
                unit_part(&q, Some(lambda), basis, &mut t)?;
                (7, to_unsigned(&a.unwrap()), lambda)
            }
            CaseTag::P5 => {
                let q = if prov.b_shape.is_empty() {
                    t.check(v.is_multiple_of(dv), Rejection::NonIntegral)?;
                    to_unsigned(&(v / dv))
                } else {
                    to_unsigned(v)
                };
                let lambda = unit_part(&q, None, basis, &mut t)?;
                (5, to_unsigned(u), lambda)
            }
            other => panic!("back_substitute_prime called on a {other} model"),
        };
        let b = point.denominator(basis);
        t.check(a.gcd(&(&b * d)).is_one(), Rejection::NotCoprime)?;
        t.check(b.is_odd() && a.is_even() == (lambda == 1), Rejection::Parity)?;
        let mut triples = Vec::new();
        for eps1 in [1i8, -1] {
            for eps2 in [1i8, -1] {
                let r = recover_xy_from_ab(&a, &b, d, lambda, p, eps1, eps2);
                t.check(r.is_ok(), Rejection::LambdaDivision)?;
                let r = r.unwrap();
                if !triples.contains(&r) {
                    triples.push(r);
                }
            }
        }
        let mut out = Vec::new();
        for (x, z, y) in triples {
            t.check(y > BigUint::one(), Rejection::YEqualsOne)?;
            t.check(!x.is_zero(), Rejection::XyZero)?;
            let z_ok = !z.is_zero() && z.is_multiple_of(&b) && s_factor(&z, basis).is_s_unit();
            t.check(z_ok, Rejection::InconsistentZ)?;
            let exps = s_factor(&(&z * &z * d), basis).exponents;
            out.extend(expand(&x, &y, lambda, &exps, p, basis, &source(model, point))?);
        }
        Ok(out)
    })();
    t.finish(result)
}

/// Checks `q = lambda * P` with `P` an S-unit and returns `lambda`; when
/// `lambda` is not given it is the power of two in `q`.
fn unit_part(q: &BigUint, lambda: Option<u32>, basis: &PrimeBasis, t: &mut Trace) -> std::result::Result<u32, Rejection> {
    let twos = q.trailing_zeros().unwrap_or(0);
    let lambda = lambda.unwrap_or(if twos <= 2 { 1 << twos } else { 1 });
    let lam = BigUint::from(lambda);
    let (rest, r) = q.div_rem(&lam);
    let f = s_factor(if rest.is_zero() { q } else { &rest }, basis);
    let stray = !r.is_zero() || rest.is_zero() || !f.is_s_unit();
    t.check(!stray, Rejection::StrayPrimeInY(BigInt::from(if r.is_zero() { f.cofactor } else { q.clone() })))?;
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn gaussian_fifth_powers() {
        assert_eq!(recover_xy_from_ab(&u(2), &u(1), 1, 1, 5, -1, 1).unwrap(), (u(38), u(41), u(5)));
        assert_eq!(recover_xy_from_ab(&u(1), &u(1), 1, 2, 5, -1, 1).unwrap(), (u(1), u(1), u(1)));
        assert!(matches!(recover_xy_from_ab(&u(2), &u(0), 1, 1, 5, 1, 1), Err(Error::Precondition(_))));
        assert!(matches!(recover_xy_from_ab(&u(1), &u(1), 1, 1, 5, 1, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn lambda_division_is_checked() {
        // a^2 + b^2 d = 3 is odd.
        assert!(matches!(recover_xy_from_ab(&u(1), &u(1), 2, 2, 5, 1, 1), Err(Error::NonIntegralDivision(_))));
    }

    #[test]
    fn stray_primes() {
        let basis = PrimeBasis::default();
        let mut t = Trace::default();
        assert_eq!(unit_part(&u(4 * 17), None, &basis, &mut t), Ok(4));
        assert_eq!(unit_part(&u(41), Some(1), &basis, &mut t), Ok(1));
        assert_eq!(unit_part(&u(11), None, &basis, &mut t), Err(Rejection::StrayPrimeInY(BigInt::from(11))));
        assert!(unit_part(&u(8), None, &basis, &mut t).is_err());
        assert!(unit_part(&u(17), Some(2), &basis, &mut t).is_err());
    }
}
