//! Bounded search for S-integral points on the curve models.
//!
//! A point is stored as integer numerators over a common S-unit `w` whose
//! exponents are bounded by [`SearchBounds::s_exponent_max`]:
//!
//! | kind              | equation                       | X       | Y       |
//! |-------------------|--------------------------------|---------|---------|
//! | cubic             | `Y^2 = X^3 + c2 X^2 + c1 X + c0` | `u/w^2` | `v/w^3` |
//! | quartic Ljunggren | `X^2 = l Y^4 - c`                | `v/w^2` | `u/w`   |
//! | quartic even      | `a Y^2 = q4 X^4 + q2 X^2 + q0`   | `u/w`   | `v/w^2` |
//!
//! `u` is the iterated numerator. Clearing denominators turns the curve into
//! `lead * v^2 = P_w(u)` for an integer polynomial `P_w`, and each candidate
//! `u` costs a few table lookups: `lead * P_w(u)` must be a square modulo
//! several small moduli before it is evaluated exactly.
//!
//! "No points" here always means "no points within the bounds".

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::descent::{CurveEquation, CurveKind, CurveModel};
use crate::error::{Error, Result};
use crate::ntcore::{isqrt_exact, nth_root_exact, Exponents, PrimeBasis};
use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Largest `|u|` for the X-iterated kinds (cubic, quartic even).
    pub numerator_height: u64,
    /// Largest exponent of each denominator prime.
    pub s_exponent_max: u32,
    /// Largest `|u|` for the Y-iterated Ljunggren quartics.
    pub y_range: u64,
    /// Upper limit on [`cost_estimate`] per curve.
    pub budget: u128,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { numerator_height: 1_000_000, s_exponent_max: 6, y_range: 1_000_000, budget: 10_000_000_000 }
    }
}

impl SearchBounds {
    pub fn validate(&self) -> Result<()> {
        if self.numerator_height == 0 || self.y_range == 0 {
            return Err(Error::InvalidConfig("search heights must be at least 1".into()));
        }
        if self.numerator_height > 1 << 40 || self.y_range > 1 << 40 {
            return Err(Error::InvalidConfig("search heights above 2^40 are not supported".into()));
        }
        Ok(())
    }
}

/// A rational point with S-unit denominators, see the module table for the
/// meaning of the numerators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SPoint {
    pub x_num: BigInt,
    pub y_num: BigInt,
    pub denom_exponents: Exponents,
}

impl SPoint {
    pub fn integral(x: impl Into<BigInt>, y: impl Into<BigInt>, basis_len: usize) -> Self {
        SPoint { x_num: x.into(), y_num: y.into(), denom_exponents: Exponents::zeros(basis_len) }
    }

    /// The common denominator unit `w`.
    pub fn denominator(&self, basis: &PrimeBasis) -> BigUint {
        basis.value(&self.denom_exponents)
    }

    pub fn is_integral(&self) -> bool {
        self.denom_exponents.is_zero()
    }
}

/// Iteration cost of one curve: the iterated range times the number of
/// denominators.
pub fn cost_estimate(model: &CurveModel, bounds: &SearchBounds) -> u128 {
    let height = match model.kind() {
        CurveKind::QuarticLjunggren => bounds.y_range,
        _ => bounds.numerator_height,
    } as u128;
    let per_prime = bounds.s_exponent_max as u128 + 1;
    height * per_prime.pow(model.denominator_primes.len() as u32)
}

/// Exact substitution check of `point` into `model`.
pub fn verify_point(model: &CurveModel, point: &SPoint, basis: &PrimeBasis) -> bool {
    if point.denom_exponents.len() != basis.len() {
        return false;
    }
    let w = BigInt::from(point.denominator(basis));
    let (u, v) = (&point.x_num, &point.y_num);
    match &model.equation {
        CurveEquation::Cubic { c2, c1, c0 } => {
            let w2 = &w * &w;
            let w4 = &w2 * &w2;
            let w6 = &w4 * &w2;
            v * v == u * u * u + c2 * u * u * &w2 + c1 * u * &w4 + c0 * &w6
        }
        CurveEquation::Ljunggren { lambda, c } => {
            // x_num is the square coordinate, y_num the quartic one.
            let w4 = w.pow(4);
            u * u == lambda * v.pow(4) - c * &w4
        }
        CurveEquation::QuarticEven { lead, q4, q2, q0 } => {
            let w2 = &w * &w;
            let w4 = &w2 * &w2;
            lead * v * v == q4 * u.pow(4) + q2 * u * u * &w2 + q0 * &w4
        }
    }
}

/// Searches a cubic model.
pub fn search_cubic(model: &CurveModel, bounds: &SearchBounds, basis: &PrimeBasis) -> Result<Vec<SPoint>> {
    if model.kind() != CurveKind::Cubic {
        return Err(Error::Precondition("search_cubic needs a cubic model".into()));
    }
    search(model, bounds, basis, Execution::Sequential)
}

/// Searches a quartic model.
pub fn search_quartic(model: &CurveModel, bounds: &SearchBounds, basis: &PrimeBasis) -> Result<Vec<SPoint>> {
    if model.kind() == CurveKind::Cubic {
        return Err(Error::Precondition("search_quartic needs a quartic model".into()));
    }
    search(model, bounds, basis, Execution::Sequential)
}

/// Searches one model of any kind, fanning out over denominators and
/// chunks of the iterated range when `exec` is parallel.
pub fn search(model: &CurveModel, bounds: &SearchBounds, basis: &PrimeBasis, exec: Execution) -> Result<Vec<SPoint>> {
    let mut found = search_many(std::slice::from_ref(model), bounds, basis, exec)?;
    Ok(found.pop().expect("one result per model"))
}

/// Searches a whole family; one sorted point list per model, in input order.
pub fn search_many(models: &[CurveModel], bounds: &SearchBounds, basis: &PrimeBasis, exec: Execution) -> Result<Vec<Vec<SPoint>>> {
    bounds.validate()?;
    for model in models {
        let cost = cost_estimate(model, bounds);
        if cost > bounds.budget {
            return Err(Error::BudgetExceeded { cost, budget: bounds.budget });
        }
    }
    let mut tasks = Vec::new();
    for (idx, model) in models.iter().enumerate() {
        for slice in plan_model(model, bounds, basis) {
            tasks.push((idx, slice));
        }
    }
    let hits = par::map(&tasks, exec, |(idx, slice)| scan(&models[*idx], slice));
    let mut per_model: Vec<Vec<SPoint>> = vec![Vec::new(); models.len()];
    for ((idx, slice), found) in tasks.iter().zip(hits) {
        for (u, s) in found {
            expand_signs(models[*idx].kind(), &u, &s, &slice.exponents, &mut per_model[*idx]);
        }
    }
    for (model, points) in models.iter().zip(per_model.iter_mut()) {
        points.sort_by(|a, b| point_order(a, b, basis));
        points.dedup();
        for p in points.iter() {
            assert!(verify_point(model, p, basis), "search produced an off-curve point {p:?}");
        }
    }
    Ok(per_model)
}

fn point_order(a: &SPoint, b: &SPoint, basis: &PrimeBasis) -> std::cmp::Ordering {
    (a.denominator(basis), &a.denom_exponents, &a.x_num, &a.y_num).cmp(&(b.denominator(basis), &b.denom_exponents, &b.x_num, &b.y_num))
}

fn expand_signs(kind: CurveKind, u: &BigInt, s: &BigInt, exps: &Exponents, out: &mut Vec<SPoint>) {
    let signs = |v: &BigInt| if v.is_zero() { vec![v.clone()] } else { vec![-v, v.clone()] };
    let mk = |x: BigInt, y: BigInt| SPoint { x_num: x, y_num: y, denom_exponents: exps.clone() };
    match kind {
        CurveKind::Cubic => out.extend(signs(s).into_iter().map(|y| mk(u.clone(), y))),
        CurveKind::QuarticLjunggren => {
            for x in signs(s) {
                for y in signs(u) {
                    out.push(mk(x.clone(), y));
                }
            }
        }
        CurveKind::QuarticEven => {
            for x in signs(u) {
                for y in signs(s) {
                    out.push(mk(x.clone(), y));
                }
            }
        }
    }
}

const CHUNK: i64 = 1 << 20;
const FIRST_MODULI: [u64; 3] = [64, 63, 65];
const LATER_MODULI: [u64; 11] = [11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// One contiguous range of `u` for one denominator.
#[derive(Clone, Debug)]
struct Slice {
    exponents: Exponents,
    w_primes: Vec<u64>,
    poly: ClearedPoly,
    lo: i64,
    hi: i64,
}

/// `lead * v^2 = sum coeffs[i] u^i`.
#[derive(Clone, Debug)]
struct ClearedPoly {
    lead: BigInt,
    coeffs: Vec<BigInt>,
    small: Option<Vec<i128>>,
    lead_small: Option<i128>,
}

impl ClearedPoly {
    fn new(lead: BigInt, coeffs: Vec<BigInt>, height: i64) -> Self {
        // i128 evaluation is safe when sum |c_i| h^i stays below 2^125.
        let limit = BigInt::one() << 125u32;
        let h = BigInt::from(height.max(1));
        let mut total = BigInt::zero();
        let mut hp = BigInt::one();
        for c in &coeffs {
            total += c.abs() * &hp;
            hp *= &h;
        }
        let small = (total < limit).then(|| coeffs.iter().map(|c| c.to_i128().expect("bounded")).collect());
        let lead_small = lead.to_i128();
        ClearedPoly { lead, coeffs, small, lead_small }
    }

    fn eval_mod(&self, u: u64, m: u64) -> u64 {
        let m_big = BigInt::from(m);
        let mut acc = 0u64;
        for c in self.coeffs.iter().rev() {
            let c = c.mod_floor(&m_big).to_u64().expect("residue");
            acc = (acc * u + c) % m;
        }
        let l = self.lead.mod_floor(&m_big).to_u64().expect("residue");
        acc * l % m
    }

    /// `v >= 0` with `lead * v^2 = P(u)`, if any.
    fn solve(&self, u: i64) -> Option<BigInt> {
        if let (Some(cs), Some(lead)) = (&self.small, self.lead_small) {
            let mut acc: i128 = 0;
            for &c in cs.iter().rev() {
                acc = acc * u as i128 + c;
            }
            if acc % lead != 0 {
                return None;
            }
            let q = acc / lead;
            if q < 0 {
                return None;
            }
            let q = q as u128;
            let r = q.sqrt();
            return (r * r == q).then(|| BigInt::from(r));
        }
        let ub = BigInt::from(u);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &ub + c;
        }
        let (q, r) = acc.div_rem(&self.lead);
        if !r.is_zero() {
            return None;
        }
        isqrt_exact(&q)
    }
}

fn squares_mod(m: u64) -> Vec<bool> {
    let mut t = vec![false; m as usize];
    for x in 0..m {
        t[(x * x % m) as usize] = true;
    }
    t
}

/// Table `T[r] = lead * P(r) is a square mod m`.
fn residue_table(poly: &ClearedPoly, m: u64) -> Vec<bool> {
    let sq = squares_mod(m);
    (0..m).map(|r| sq[poly.eval_mod(r, m) as usize]).collect()
}

/// Denominator exponent vectors over the model's primes, each exponent `<= e_max`.
fn denominators(model: &CurveModel, basis: &PrimeBasis, e_max: u32) -> Vec<Exponents> {
    let idx: Vec<usize> =
        model.denominator_primes.iter().map(|p| basis.index_of(*p).expect("denominator prime lies in the basis")).collect();
    let mut out = vec![Exponents::zeros(basis.len())];
    for i in idx {
        let mut next = Vec::new();
        for base in &out {
            for e in 0..=e_max {
                let mut v = base.clone();
                v.0[i] = e;
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn ceil_root(n: &BigUint, r: u32) -> BigUint {
    let t = n.nth_root(r);
    if t.pow(r) == *n {
        t
    } else {
        t + 1u32
    }
}

fn plan_model(model: &CurveModel, bounds: &SearchBounds, basis: &PrimeBasis) -> Vec<Slice> {
    let mut slices = Vec::new();
    for exps in denominators(model, basis, bounds.s_exponent_max) {
        let w = BigInt::from(basis.value(&exps));
        let w2 = &w * &w;
        let (lead, coeffs, mut lo, hi) = match &model.equation {
            CurveEquation::Cubic { c2, c1, c0 } => {
                let h = bounds.numerator_height as i64;
                let coeffs = vec![c0 * w2.pow(3), c1 * w2.pow(2), c2 * &w2, BigInt::one()];
                let mut lo = -h;
                if c2.is_zero() && c1.is_zero() {
                    // u^3 + c0 w^6 >= 0  <=>  u >= cbrt(-c0 w^6)
                    let target = -&coeffs[0];
                    lo = if target.is_positive() {
                        clamp_i64(&BigInt::from(ceil_root(target.magnitude(), 3)), h + 1)
                    } else {
                        -clamp_i64(&BigInt::from(target.magnitude().nth_root(3)), h)
                    };
                }
                (BigInt::one(), coeffs, lo, h)
            }
            CurveEquation::Ljunggren { lambda, c } => {
                let h = bounds.y_range as i64;
                let cw4 = c * w2.pow(2);
                let coeffs = vec![-&cw4, BigInt::zero(), BigInt::zero(), BigInt::zero(), lambda.clone()];
                let mut lo = 0;
                if cw4.is_positive() && lambda.is_positive() {
                    let q = cw4.magnitude() / lambda.magnitude();
                    lo = clamp_i64(&BigInt::from(q.nth_root(4)), h + 1);
                }
                (BigInt::one(), coeffs, lo, h)
            }
            CurveEquation::QuarticEven { lead, q4, q2, q0 } => {
                let h = bounds.numerator_height as i64;
                let coeffs = vec![q0 * w2.pow(2), BigInt::zero(), q2 * &w2, BigInt::zero(), q4.clone()];
                (lead.clone(), coeffs, 0, h)
            }
        };
        if lo < -(bounds.numerator_height.max(bounds.y_range) as i64) {
            lo = -(bounds.numerator_height.max(bounds.y_range) as i64);
        }
        if lo > hi {
            continue;
        }
        let height = hi.max(-lo);
        let poly = ClearedPoly::new(lead, coeffs, height);
        let w_primes: Vec<u64> = basis.primes().iter().zip(exps.as_slice()).filter(|(_, &e)| e > 0).map(|(&p, _)| p).collect();
        let mut start = lo;
        while start <= hi {
            let end = (start + CHUNK - 1).min(hi);
            slices.push(Slice { exponents: exps.clone(), w_primes: w_primes.clone(), poly: poly.clone(), lo: start, hi: end });
            start = end + 1;
        }
    }
    slices
}

fn clamp_i64(v: &BigInt, cap: i64) -> i64 {
    v.to_i64().map_or(cap, |x| x.min(cap))
}

/// Returns `(u, v)` with `v >= 0` for every hit in the slice.
fn scan(_model: &CurveModel, slice: &Slice) -> Vec<(BigInt, BigInt)> {
    let poly = &slice.poly;
    let first: Vec<Vec<bool>> = FIRST_MODULI.iter().map(|&m| residue_table(poly, m)).collect();
    let later: Vec<(u64, Vec<bool>)> = LATER_MODULI.iter().map(|&m| (m, residue_table(poly, m))).collect();
    let (t64, t63, t65) = (&first[0], &first[1], &first[2]);
    let mut r63 = slice.lo.rem_euclid(63) as usize;
    let mut r65 = slice.lo.rem_euclid(65) as usize;
    let mut hits = Vec::new();
    for u in slice.lo..=slice.hi {
        let r64 = (u as u64 & 63) as usize;
        let pass = t64[r64] && t63[r63] && t65[r65];
        r63 += 1;
        if r63 == 63 {
            r63 = 0;
        }
        r65 += 1;
        if r65 == 65 {
            r65 = 0;
        }
        if !pass {
            continue;
        }
        if !later.iter().all(|(m, t)| t[u.rem_euclid(*m as i64) as usize]) {
            continue;
        }
        if u != 0 && slice.w_primes.iter().any(|&p| u % p as i64 == 0) {
            continue;
        }
        if u == 0 && !slice.w_primes.is_empty() {
            continue;
        }
        if let Some(v) = poly.solve(u) {
            hits.push((BigInt::from(u), v));
        }
    }
    hits
}

/// Smallest `t` with `t^r >= n`; exposed for the descent bounds.
pub fn root_ceil(n: &BigUint, r: u32) -> BigUint {
    match nth_root_exact(n, r) {
        Some(t) => t,
        None => n.nth_root(r) + 1u32,
    }
}
