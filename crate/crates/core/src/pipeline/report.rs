use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use super::{CaseReport, FullReport, OracleCheck, PointOutcome};
use crate::descent::{CurveModel, ShapeOrigin};
use crate::ntcore::PrimeBasis;
use crate::points::SearchBounds;
use crate::solution::SolutionRecord;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }
}

const SAFE_INTEGER: u64 = 1 << 53;

/// Integers up to `2^53` in magnitude as JSON numbers, larger ones as strings.
pub fn int(v: impl Into<BigInt>) -> Value {
    let v = v.into();
    match v.to_i64() {
        Some(i) if i.unsigned_abs() <= SAFE_INTEGER => Value::from(i),
        _ => Value::from(v.to_string()),
    }
}

/// Column names for the exponents: `k, l, m` on three primes, `e<p>` otherwise.
pub fn exponent_names(basis: &PrimeBasis) -> Vec<String> {
    if basis.len() == 3 {
        vec!["k".into(), "l".into(), "m".into()]
    } else {
        basis.primes().iter().map(|p| format!("e{p}")).collect()
    }
}

pub fn record_json(r: &SolutionRecord, basis: &PrimeBasis) -> Value {
    let mut m = Map::new();
    m.insert("x".into(), int(r.x.clone()));
    m.insert("y".into(), int(r.y.clone()));
    m.insert("lambda".into(), int(r.lambda));
    m.insert("delta".into(), r.delta().map_or(Value::Null, int));
    m.insert("n".into(), int(r.n));
    for (name, e) in exponent_names(basis).into_iter().zip(r.exponents.as_slice()) {
        m.insert(name, int(*e));
    }
    Value::Object(m)
}

pub fn records_json(records: &[SolutionRecord], basis: &PrimeBasis) -> Value {
    Value::Array(records.iter().map(|r| record_json(r, basis)).collect())
}

/// CSV table with header `x,y,delta,lambda,<exponents>,n`.
pub fn solutions_csv(records: &[SolutionRecord], basis: &PrimeBasis) -> String {
    let mut out = format!("x,y,delta,lambda,{},n\n", exponent_names(basis).join(","));
    for r in records {
        let exps: Vec<String> = r.exponents.as_slice().iter().map(u32::to_string).collect();
        let delta = r.delta().map_or(String::new(), |d| d.to_string());
        out.push_str(&format!("{},{},{},{},{},{}\n", r.x, r.y, delta, r.lambda, exps.join(","), r.n));
    }
    out
}

fn bounds_json(b: &SearchBounds) -> Value {
    json!({
        "numerator_height": int(b.numerator_height),
        "s_exponent_max": int(b.s_exponent_max),
        "y_range": int(b.y_range),
        "budget": int(BigInt::from(b.budget)),
    })
}

fn point_json(p: &PointOutcome, basis: &PrimeBasis) -> Value {
    let (outcome, records) = match &p.outcome {
        Ok(recs) => ("accepted".to_string(), records_json(recs, basis)),
        Err(code) => (code.clone(), Value::Array(Vec::new())),
    };
    json!({
        "model": p.model.label(),
        "x_num": int(p.point.x_num.clone()),
        "y_num": int(p.point.y_num.clone()),
        "denom_exponents": p.point.denom_exponents.as_slice(),
        "outcome": outcome,
        "records": records,
    })
}

fn case_json(c: &CaseReport, basis: &PrimeBasis, effective: &PrimeBasis) -> Value {
    let contexts: Vec<Value> = c
        .contexts
        .iter()
        .map(|x| {
            json!({
                "p": x.p, "q": x.q, "d": x.d, "lambda": x.lambda,
                "b_shape": x.b_shape, "class_number": x.class_number, "applicable": x.applicable,
            })
        })
        .collect();
    let exceptions: Vec<Value> = c
        .exceptions
        .iter()
        .map(|e| {
            let real: Vec<Value> = e
                .realizations
                .iter()
                .map(|r| json!({"lambda": r.lambda, "a": r.a, "b_squared_d": r.b_squared_d, "d": r.d, "d_in_basis": r.d_in_basis}))
                .collect();
            json!({"pair": [e.pair.0, e.pair.1], "ruled_out": e.ruled_out, "realizations": real})
        })
        .collect();
    json!({
        "case": c.case.to_string(),
        "status": c.status.as_str(),
        "curves": c.curves,
        "shape_counts": c.shape_counts,
        "supplementary_counts": c.supplementary_counts,
        "contexts": contexts,
        "exceptions": exceptions,
        "bounds": c.bounds.as_ref().map_or(Value::Null, bounds_json),
        "points": c.points.len(),
        "point_outcomes": c.points.iter().map(|p| point_json(p, effective)).collect::<Vec<_>>(),
        "rejections": c.rejections(),
        "accepted": records_json(&c.accepted, basis),
        "notes": c.notes,
    })
}

fn oracle_json(o: &OracleCheck, basis: &PrimeBasis) -> Value {
    json!({
        "value_max": int(BigInt::from(o.bounds.value_max)),
        "n_max": o.bounds.n_max,
        "solutions": o.oracle_count,
        "agrees": o.agrees(),
        "missing": records_json(&o.missing, basis),
        "extra": records_json(&o.extra, basis),
    })
}

/// Canonical JSON (sorted keys, one line) or the CSV solution table.
pub fn emit_report(report: &FullReport, format: OutputFormat) -> String {
    let basis = &report.config.basis;
    match format {
        OutputFormat::Csv => solutions_csv(&report.solutions, basis),
        OutputFormat::Json => {
            let effective = report.config.effective_basis().unwrap_or_else(|_| basis.clone());
            let v = json!({
                "basis": basis.primes(),
                "fixed": report.config.fixed,
                "n_max": report.config.n_max,
                "search": bounds_json(&report.config.search),
                "delta_reduction": {
                    "modulus": 8,
                    "square_residues": report.delta.square_residues,
                    "unit_residues": report.delta.unit_residues,
                    "sums": report.delta.sums,
                    "excludes_zero": report.delta.excludes_zero(),
                },
                "cases": report.cases.iter().map(|c| case_json(c, basis, &effective)).collect::<Vec<_>>(),
                "solutions": records_json(&report.solutions, basis),
                "oracle": report.oracle.as_ref().map_or(Value::Null, |o| oracle_json(o, basis)),
            });
            format!("{v}\n")
        }
    }
}

fn curve_json(m: &CurveModel) -> Value {
    let p = &m.provenance;
    let coeffs: Map<String, Value> = m.equation.coefficients().into_iter().map(|(k, v)| (k.to_string(), int(v.clone()))).collect();
    json!({
        "kind": m.kind().as_str(),
        "case": p.case.as_str(),
        "coefficients": coeffs,
        "lambda": p.lambda,
        "d": p.d,
        "D": int(p.d_value.clone()),
        "sign": p.sign,
        "residues": p.residues.as_slice(),
        "b_shape": p.b_shape,
        "origin": match p.origin { ShapeOrigin::Listed => "listed", ShapeOrigin::Supplementary => "supplementary" },
        "denominator_primes": m.denominator_primes,
    })
}

/// A curve family with provenance.
pub fn emit_curves(models: &[CurveModel], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let v = json!({"count": models.len(), "curves": models.iter().map(curve_json).collect::<Vec<_>>()});
            format!("{v}\n")
        }
        OutputFormat::Csv => {
            let mut out = String::from("kind,case,coefficients,lambda,d,D,sign,residues,b_shape,origin\n");
            let join = |v: Vec<String>| v.join(";");
            for m in models {
                let p = &m.provenance;
                let coeffs = join(m.equation.coefficients().iter().map(|(_, c)| c.to_string()).collect());
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    m.kind().as_str(),
                    p.case,
                    coeffs,
                    p.lambda.map_or(String::new(), |l| l.to_string()),
                    p.d.map_or(String::new(), |d| d.to_string()),
                    p.d_value,
                    p.sign,
                    join(p.residues.as_slice().iter().map(u32::to_string).collect()),
                    join(p.b_shape.iter().map(u64::to_string).collect()),
                    match p.origin {
                        ShapeOrigin::Listed => "listed",
                        ShapeOrigin::Supplementary => "supplementary",
                    },
                ));
            }
            out
        }
    }
}
