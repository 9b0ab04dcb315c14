//! Curve families for each exponent case and the maps from curve points back
//! to solutions.
//!
//! Every model records where it came from ([`Provenance`]) and which basis
//! primes may occur in point denominators. Back-substitution never trusts a
//! point: each filter either passes or yields a [`Rejection`], and anything
//! that survives is re-verified against the original equation when the
//! [`CandidateSolution`] is built.

mod backsub;
mod families;
mod prime;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::ntcore::{Exponents, PrimeBasis};
use crate::solution::SolutionRecord;

pub use backsub::{back_substitute, back_substitute_mod3, back_substitute_mod4, back_substitute_prime, recover_xy_from_ab, Outcome};
pub use families::{build_mod3_family, build_mod4_family};
pub use prime::{build_p5_curves, build_p7_curves, prime_case_contexts, PrimeCaseContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    Mod3,
    Mod4,
    P7,
    P5,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Mod3 => "mod3",
            CaseTag::Mod4 => "mod4",
            CaseTag::P7 => "p7",
            CaseTag::P5 => "p5",
        }
    }

    /// Largest allowed residue exponent plus one.
    pub fn residue_period(self) -> u32 {
        match self {
            CaseTag::Mod3 => 6,
            CaseTag::Mod4 => 4,
            CaseTag::P7 | CaseTag::P5 => 2,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mod3" => Ok(CaseTag::Mod3),
            "mod4" => Ok(CaseTag::Mod4),
            "p7" => Ok(CaseTag::P7),
            "p5" => Ok(CaseTag::P5),
            other => Err(format!("unknown case {other:?}, expected mod3, mod4, p5 or p7")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveKind {
    Cubic,
    QuarticLjunggren,
    QuarticEven,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Cubic => "cubic",
            CurveKind::QuarticLjunggren => "quartic_ljunggren",
            CurveKind::QuarticEven => "quartic_even",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurveEquation {
    /// `Y^2 = X^3 + c2 X^2 + c1 X + c0`
    Cubic { c2: BigInt, c1: BigInt, c0: BigInt },
    /// `X^2 = lambda Y^4 - c`
    Ljunggren { lambda: BigInt, c: BigInt },
    /// `lead Y^2 = q4 X^4 + q2 X^2 + q0`
    QuarticEven { lead: BigInt, q4: BigInt, q2: BigInt, q0: BigInt },
}

impl CurveEquation {
    pub fn kind(&self) -> CurveKind {
        match self {
            CurveEquation::Cubic { .. } => CurveKind::Cubic,
            CurveEquation::Ljunggren { .. } => CurveKind::QuarticLjunggren,
            CurveEquation::QuarticEven { .. } => CurveKind::QuarticEven,
        }
    }

    /// Named coefficients in a fixed order.
    pub fn coefficients(&self) -> Vec<(&'static str, &BigInt)> {
        match self {
            CurveEquation::Cubic { c2, c1, c0 } => vec![("c2", c2), ("c1", c1), ("c0", c0)],
            CurveEquation::Ljunggren { lambda, c } => vec![("lambda", lambda), ("c", c)],
            CurveEquation::QuarticEven { lead, q4, q2, q0 } => {
                vec![("lead", lead), ("q4", q4), ("q2", q2), ("q0", q0)]
            }
        }
    }

    /// Discriminant of the monic cubic; `None` for quartics.
    pub fn cubic_discriminant(&self) -> Option<BigInt> {
        let CurveEquation::Cubic { c2, c1, c0 } = self else { return None };
        let disc = BigInt::from(18) * c2 * c1 * c0 - BigInt::from(4) * c2.pow(3) * c0 + c2 * c2 * c1 * c1
            - BigInt::from(4) * c1.pow(3)
            - BigInt::from(27) * c0 * c0;
        Some(disc)
    }
}

/// Whether a prime-case model comes from the explicitly listed shape table or
/// from the systematic completion of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeOrigin {
    Listed,
    Supplementary,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub case: CaseTag,
    /// Fixed for mod3, mod4 and p7; for p5 it is read off the point.
    pub lambda: Option<u32>,
    /// Squarefree part of `z^2 d` in the prime cases.
    pub d: Option<u64>,
    /// The signed constant `D` of the family (`c` for mod4).
    pub d_value: BigInt,
    pub sign: i8,
    /// Residue exponents over the basis, each below [`CaseTag::residue_period`].
    pub residues: Exponents,
    /// Basis primes allowed to divide `b` (prime cases) or `z` (mod3, mod4).
    pub b_shape: Vec<u64>,
    pub origin: ShapeOrigin,
}

impl Provenance {
    /// Provenance with all optional data cleared, for ad hoc models.
    pub fn bare(case: CaseTag, basis_len: usize) -> Self {
        Provenance {
            case,
            lambda: None,
            d: None,
            d_value: BigInt::zero(),
            sign: 1,
            residues: Exponents::zeros(basis_len),
            b_shape: Vec::new(),
            origin: ShapeOrigin::Listed,
        }
    }

    pub fn label(&self) -> String {
        let mut s = format!("{} D={} residues={}", self.case, self.d_value, self.residues);
        if let Some(l) = self.lambda {
            s.push_str(&format!(" lambda={l}"));
        }
        if let Some(d) = self.d {
            s.push_str(&format!(" d={d}"));
        }
        if !self.b_shape.is_empty() && matches!(self.case, CaseTag::P5 | CaseTag::P7) {
            let shape: Vec<String> = self.b_shape.iter().map(u64::to_string).collect();
            s.push_str(&format!(" b={{{}}}", shape.join(",")));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveModel {
    pub equation: CurveEquation,
    pub provenance: Provenance,
    /// Basis primes allowed in point denominators.
    pub denominator_primes: Vec<u64>,
}

impl CurveModel {
    /// Panics on a singular cubic or out-of-range residues; both are
    /// programming errors in the family builders.
    pub fn new(equation: CurveEquation, provenance: Provenance, denominator_primes: Vec<u64>) -> Self {
        if let Some(disc) = equation.cubic_discriminant() {
            assert!(!disc.is_zero(), "singular cubic {equation:?}");
        }
        let period = provenance.case.residue_period();
        assert!(
            provenance.residues.as_slice().iter().all(|&e| e < period),
            "residues {} out of range for {}",
            provenance.residues,
            provenance.case
        );
        CurveModel { equation, provenance, denominator_primes }
    }

    pub fn kind(&self) -> CurveKind {
        self.equation.kind()
    }

    pub fn case(&self) -> CaseTag {
        self.provenance.case
    }
}

/// A solution produced by back-substitution. Construction verifies the
/// equation and every side condition, so holders may rely on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSolution {
    record: SolutionRecord,
    source: String,
}

impl CandidateSolution {
    pub fn new(record: SolutionRecord, basis: &PrimeBasis, source: impl Into<String>) -> Option<Self> {
        record.is_valid(basis).then(|| CandidateSolution { record, source: source.into() })
    }

    pub fn record(&self) -> &SolutionRecord {
        &self.record
    }

    pub fn into_record(self) -> SolutionRecord {
        self.record
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Why a point did not yield a solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    OffCurve,
    DenominatorOutsideShape,
    XyZero,
    LambdaDoesNotDivide,
    NumeratorGcd,
    NonIntegral,
    SevenDoesNotDivideX,
    NonIntegralA,
    StrayPrimeInY(BigInt),
    NotCoprime,
    Parity,
    LambdaDivision,
    YEqualsOne,
    InconsistentZ,
    /// Passed every filter but fails the final exact check.
    Unverified,
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::OffCurve => "off_curve",
            Rejection::DenominatorOutsideShape => "denominator_outside_shape",
            Rejection::XyZero => "xy_zero",
            Rejection::LambdaDoesNotDivide => "lambda_does_not_divide_xy",
            Rejection::NumeratorGcd => "numerator_gcd",
            Rejection::NonIntegral => "non_integral",
            Rejection::SevenDoesNotDivideX => "seven_does_not_divide_x",
            Rejection::NonIntegralA => "non_integral_a",
            Rejection::StrayPrimeInY(_) => "stray_prime_in_y",
            Rejection::NotCoprime => "a_bd_not_coprime",
            Rejection::Parity => "parity",
            Rejection::LambdaDivision => "lambda_division",
            Rejection::YEqualsOne => "y_equals_one",
            Rejection::InconsistentZ => "inconsistent_z",
            Rejection::Unverified => "unverified",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::StrayPrimeInY(c) => write!(f, "{} (cofactor {})", self.code(), c.abs()),
            _ => f.write_str(self.code()),
        }
    }
}
