//! Case orchestration.
//!
//! Every exponent `n >= 3` falls in exactly one case: `3 | n` (cubic family),
//! `3 ∤ n` and `4 | n` (quartic family), or otherwise `n` has a prime factor
//! `p >= 5` and `n = pN`. A solution with exponent `n` is also a solution
//! with exponent `3`, `4` or `p` for `y^(n/3)`, `y^(n/4)` or `y^(n/p)`, so the
//! three families cover everything once `y` is allowed to be a perfect power.

mod delta;
mod report;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::descent::{
    back_substitute, build_mod3_family, build_mod4_family, build_p5_curves, build_p7_curves, prime_case_contexts, CurveModel,
    PrimeCaseContext, Provenance, ShapeOrigin,
};
use crate::error::{Error, Result};
use crate::lehmer::{bhv_exceptions, descent_realizations, DescentRealization, ExceptionLookup};
use crate::ntcore::{is_prime, smallest_prime_factor, Exponents, PrimeBasis};
use crate::oracle::{brute_force_raw, OracleBounds};
use crate::par::Execution;
use crate::points::{search_many, SPoint, SearchBounds};
use crate::solution::{canonicalize, SolutionRecord};

pub use delta::{check_delta_reduction, mod8_witness, DeltaReduction, ResidueWitness};
pub use report::{emit_curves, emit_report, exponent_names, int, record_json, records_json, solutions_csv, OutputFormat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Mod3,
    Mod4,
    Prime(u64),
}

impl Case {
    /// The case responsible for exponent `n >= 3`.
    pub fn for_exponent(n: u32) -> Case {
        assert!(n >= 3, "exponents start at 3");
        if n.is_multiple_of(3) {
            Case::Mod3
        } else if n.is_multiple_of(4) {
            Case::Mod4
        } else {
            let mut m = n as u64;
            while m.is_multiple_of(2) {
                m /= 2;
            }
            Case::Prime(smallest_prime_factor(m))
        }
    }

    /// Cases run for exponents up to `n_max`: both families and every prime
    /// in `[5, n_max]`.
    pub fn all(n_max: u32) -> Vec<Case> {
        let mut out = vec![Case::Mod3, Case::Mod4];
        out.extend((5..=n_max as u64).filter(|&p| is_prime(p)).map(Case::Prime));
        out
    }

    /// Base exponent of the case: records it produces have `n` divisible by it.
    pub fn base_exponent(self) -> u32 {
        match self {
            Case::Mod3 => 3,
            Case::Mod4 => 4,
            Case::Prime(p) => p as u32,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Mod3 => f.write_str("mod3"),
            Case::Mod4 => f.write_str("mod4"),
            Case::Prime(p) => write!(f, "p{p}"),
        }
    }
}

impl std::str::FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mod3" => Ok(Case::Mod3),
            "mod4" => Ok(Case::Mod4),
            _ => s
                .strip_prefix('p')
                .and_then(|p| p.parse::<u64>().ok())
                .filter(|&p| p >= 5 && is_prime(p))
                .map(Case::Prime)
                .ok_or_else(|| format!("unknown case {s:?}, expected mod3, mod4 or p<prime >= 5>")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompletenessStatus {
    /// Curves were searched within explicit bounds.
    BoundedSearch,
    /// No admissible descent data exists at all.
    StructurallyEmpty,
    /// Admissible data exists only through exceptional Lehmer pairs, all of
    /// which are ruled out.
    ExceptionTableClosed,
    /// Nothing in the descent covers this case; only the oracle speaks to it.
    OracleOnly,
}

impl CompletenessStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CompletenessStatus::BoundedSearch => "bounded-search",
            CompletenessStatus::StructurallyEmpty => "structurally-empty",
            CompletenessStatus::ExceptionTableClosed => "exception-table-closed",
            CompletenessStatus::OracleOnly => "oracle-only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub basis: PrimeBasis,
    /// Basis primes whose exponent is fixed to zero.
    pub fixed: Vec<u64>,
    pub search: SearchBounds,
    pub oracle: OracleBounds,
    pub n_max: u32,
    pub execution: Execution,
    /// Skip the brute-force cross-check.
    pub skip_oracle: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            basis: PrimeBasis::default(),
            fixed: Vec::new(),
            search: SearchBounds::default(),
            oracle: OracleBounds::default(),
            n_max: 30,
            execution: Execution::Parallel,
            skip_oracle: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 3 {
            return Err(Error::InvalidConfig(format!("n_max must be at least 3, got {}", self.n_max)));
        }
        if self.n_max > 1000 {
            return Err(Error::InvalidConfig(format!("n_max above 1000 is not supported, got {}", self.n_max)));
        }
        for p in &self.fixed {
            if self.basis.index_of(*p).is_none() {
                return Err(Error::InvalidConfig(format!("fixed prime {p} is not in the basis {}", self.basis)));
            }
        }
        self.effective_basis()?;
        self.search.validate()?;
        self.oracle.validate()?;
        if let DeltaReduction::Unresolved(w) = check_delta_reduction(3, &self.basis) {
            return Err(Error::InvalidConfig(format!(
                "x^2 + S can vanish mod 8 for this basis (sums {:?}), so 2^delta with delta >= 3 is not excluded",
                w.sums
            )));
        }
        Ok(())
    }

    /// The basis with fixed primes removed.
    pub fn effective_basis(&self) -> Result<PrimeBasis> {
        let primes: Vec<u64> = self.basis.primes().iter().copied().filter(|p| !self.fixed.contains(p)).collect();
        PrimeBasis::new(primes).map_err(|_| Error::InvalidConfig("every basis prime is fixed".into()))
    }
}

/// One point found by the search and what became of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOutcome {
    pub model: Provenance,
    pub point: SPoint,
    /// Accepted records, or the rejection code.
    pub outcome: std::result::Result<Vec<SolutionRecord>, String>,
}

/// An exceptional Lehmer pair and its realizations by descent data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionCheck {
    pub pair: (i64, i64),
    pub realizations: Vec<DescentRealization>,
    /// No realization has `d` over the basis.
    pub ruled_out: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseReport {
    pub case: Case,
    pub status: CompletenessStatus,
    pub curves: usize,
    /// Curve counts per `b`-shape (prime cases), listed shapes only.
    pub shape_counts: BTreeMap<String, usize>,
    /// Curve counts per `b`-shape produced only by the systematic rule.
    pub supplementary_counts: BTreeMap<String, usize>,
    pub contexts: Vec<PrimeCaseContext>,
    pub exceptions: Vec<ExceptionCheck>,
    pub bounds: Option<SearchBounds>,
    pub points: Vec<PointOutcome>,
    /// Canonical records over the full basis.
    pub accepted: Vec<SolutionRecord>,
    pub notes: Vec<String>,
}

impl CaseReport {
    fn new(case: Case) -> Self {
        CaseReport {
            case,
            status: CompletenessStatus::BoundedSearch,
            curves: 0,
            shape_counts: BTreeMap::new(),
            supplementary_counts: BTreeMap::new(),
            contexts: Vec::new(),
            exceptions: Vec::new(),
            bounds: None,
            points: Vec::new(),
            accepted: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Rejection code counts.
    pub fn rejections(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for p in &self.points {
            if let Err(code) = &p.outcome {
                *out.entry(code.clone()).or_insert(0) += 1;
            }
        }
        out
    }
}

/// Result of comparing the pipeline with the oracle on shared bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub bounds: OracleBounds,
    pub oracle_count: usize,
    /// Oracle solutions the pipeline missed.
    pub missing: Vec<SolutionRecord>,
    /// Pipeline solutions within the bounds that the oracle lacks.
    pub extra: Vec<SolutionRecord>,
}

impl OracleCheck {
    pub fn agrees(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullReport {
    pub config: RunConfig,
    pub delta: ResidueWitness,
    pub cases: Vec<CaseReport>,
    /// Canonical table sorted by `(n, lambda, y, x)`.
    pub solutions: Vec<SolutionRecord>,
    pub oracle: Option<OracleCheck>,
}

fn lift_record(r: SolutionRecord, effective: &PrimeBasis, full: &PrimeBasis) -> SolutionRecord {
    let mut e = Exponents::zeros(full.len());
    for (i, &p) in effective.primes().iter().enumerate() {
        e.0[full.index_of(p).expect("sub-basis")] = r.exponents.get(i);
    }
    SolutionRecord { exponents: e, ..r }
}

fn shape_label(shape: &[u64]) -> String {
    if shape.is_empty() {
        "b=1".into()
    } else {
        format!("b={}", shape.iter().map(u64::to_string).collect::<Vec<_>>().join("*"))
    }
}

fn search_and_substitute(
    report: &mut CaseReport,
    models: &[CurveModel],
    config: &RunConfig,
    basis: &PrimeBasis,
) -> Result<Vec<SolutionRecord>> {
    report.curves = models.len();
    report.bounds = Some(config.search.clone());
    let found = search_many(models, &config.search, basis, config.execution)?;
    let mut records = Vec::new();
    for (model, points) in models.iter().zip(found) {
        for point in points {
            let outcome = back_substitute(&point, model, basis);
            let result = match outcome.result {
                Ok(cands) => {
                    let recs: Vec<SolutionRecord> = cands.into_iter().map(|c| c.into_record()).collect();
                    records.extend(recs.iter().cloned());
                    Ok(recs)
                }
                Err(r) => Err(r.code().to_string()),
            };
            report.points.push(PointOutcome { model: model.provenance.clone(), point, outcome: result });
        }
    }
    Ok(records)
}

fn check_exceptions(p: u64, basis: &PrimeBasis, report: &mut CaseReport) -> Option<bool> {
    match bhv_exceptions(p) {
        Ok(ExceptionLookup::Pairs(pairs)) => {
            let mut all_out = true;
            for pair in pairs {
                let realizations = descent_realizations(pair, basis);
                let ruled_out = realizations.iter().all(|r| !r.d_in_basis);
                all_out &= ruled_out;
                report.exceptions.push(ExceptionCheck { pair, realizations, ruled_out });
            }
            Some(all_out)
        }
        _ => None,
    }
}

/// Runs one case over the effective basis of `config`.
pub fn run_case(case: Case, config: &RunConfig) -> Result<CaseReport> {
    config.validate()?;
    let basis = config.effective_basis()?;
    let mut report = CaseReport::new(case);
    let records = match case {
        Case::Mod3 => search_and_substitute(&mut report, &build_mod3_family(&basis), config, &basis)?,
        Case::Mod4 => search_and_substitute(&mut report, &build_mod4_family(&basis), config, &basis)?,
        Case::Prime(p) => run_prime(p, &basis, config, &mut report)?,
    };
    let records: Vec<SolutionRecord> = records.into_iter().map(|r| lift_record(r, &basis, &config.basis)).collect();
    report.accepted = canonicalize(records).into_iter().map(|(r, _)| r).collect();
    Ok(report)
}

fn run_prime(p: u64, basis: &PrimeBasis, config: &RunConfig, report: &mut CaseReport) -> Result<Vec<SolutionRecord>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidConfig(format!("prime case needs a prime p >= 5, got {p}")));
    }
    let contexts = match prime_case_contexts(p, basis) {
        Ok(c) => c,
        Err(e @ Error::ClassNumberNotCoprime { .. }) => {
            report.status = CompletenessStatus::OracleOnly;
            report.notes.push(e.to_string());
            return Ok(Vec::new());
        }
        Err(e) => return Err(e),
    };
    report.contexts = contexts.clone();
    let exceptions_closed = check_exceptions(p, basis, report);
    match exceptions_closed {
        None => report.notes.push(format!("no exception table for p = {p}; pairs without a primitive divisor are left to the oracle")),
        Some(false) => report.notes.push("an exceptional pair is realizable over the basis; it is left to the oracle".into()),
        Some(true) => {}
    }
    let models = match p {
        5 => build_p5_curves(&contexts, basis)?,
        7 => build_p7_curves(&contexts, basis)?,
        _ if contexts.is_empty() => {
            report.status = match exceptions_closed {
                Some(true) if report.exceptions.is_empty() => CompletenessStatus::StructurallyEmpty,
                Some(true) => CompletenessStatus::ExceptionTableClosed,
                _ => CompletenessStatus::OracleOnly,
            };
            return Ok(Vec::new());
        }
        _ => {
            report.status = CompletenessStatus::OracleOnly;
            report.notes.push(format!("basis primes admit a primitive divisor of L_{p} but no curve models exist for p = {p}"));
            return Ok(Vec::new());
        }
    };
    for m in &models {
        let key = shape_label(&m.provenance.b_shape);
        let map = match m.provenance.origin {
            ShapeOrigin::Listed => &mut report.shape_counts,
            ShapeOrigin::Supplementary => &mut report.supplementary_counts,
        };
        *map.entry(key).or_insert(0) += 1;
    }
    search_and_substitute(report, &models, config, basis)
}

/// Runs every case, merges the tables and cross-checks against the oracle.
pub fn run_full(config: &RunConfig) -> Result<FullReport> {
    config.validate()?;
    let basis = config.effective_basis()?;
    let mut cases = Vec::new();
    for case in Case::all(config.n_max) {
        cases.push(run_case(case, config)?);
    }
    let within: Vec<SolutionRecord> = cases.iter().flat_map(|c| c.accepted.iter().cloned()).filter(|r| r.n <= config.n_max).collect();
    let solutions: Vec<SolutionRecord> = canonicalize(within).into_iter().map(|(r, _)| r).collect();
    let oracle = if config.skip_oracle {
        None
    } else {
        let bounds = OracleBounds { n_max: config.n_max, ..config.oracle.clone() };
        let raw = brute_force_raw(&bounds, basis.primes(), config.execution)?;
        let lifted = raw.into_iter().map(|r| lift_record(r, &basis, &config.basis)).collect();
        let truth: Vec<SolutionRecord> = canonicalize(lifted).into_iter().map(|(r, _)| r).collect();
        let value_max = BigUint::from(bounds.value_max);
        let ours: Vec<&SolutionRecord> = solutions.iter().filter(|r| r.rhs() <= value_max).collect();
        let missing = truth.iter().filter(|t| !ours.contains(t)).cloned().collect();
        let extra = ours.iter().filter(|r| !truth.contains(r)).map(|r| (*r).clone()).collect();
        Some(OracleCheck { bounds, oracle_count: truth.len(), missing, extra })
    };
    Ok(FullReport { config: config.clone(), delta: mod8_witness(&config.basis), cases, solutions, oracle })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_split() {
        assert_eq!(Case::for_exponent(3), Case::Mod3);
        assert_eq!(Case::for_exponent(12), Case::Mod3);
        assert_eq!(Case::for_exponent(8), Case::Mod4);
        assert_eq!(Case::for_exponent(10), Case::Prime(5));
        assert_eq!(Case::for_exponent(14), Case::Prime(7));
        assert_eq!(Case::for_exponent(35), Case::Prime(5));
        assert_eq!(Case::all(13), vec![Case::Mod3, Case::Mod4, Case::Prime(5), Case::Prime(7), Case::Prime(11), Case::Prime(13)]);
    }

    #[test]
    fn case_names_round_trip() {
        for c in Case::all(30) {
            assert_eq!(c.to_string().parse::<Case>().unwrap(), c);
        }
        assert!("p9".parse::<Case>().is_err());
    }

    #[test]
    fn invalid_configs() {
        let mut c = RunConfig { n_max: 2, ..RunConfig::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.n_max = 30;
        c.fixed = vec![17, 41, 59];
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c.fixed = vec![13];
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        let c = RunConfig { basis: PrimeBasis::new(vec![7, 17]).unwrap(), ..RunConfig::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }
}
