use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use lrn_core::descent::{
    build_mod3_family, build_mod4_family, build_p5_curves, build_p7_curves, prime_case_contexts, CaseTag, CurveEquation, CurveModel,
    Provenance,
};
use lrn_core::lehmer::{is_primitive_divisor, lehmer_sequence, BlockingFactor, LehmerPair};
use lrn_core::ntcore::{class_number, is_prime};
use lrn_core::oracle::{brute_force_with_aliases, verify_solution, OracleBounds};
use lrn_core::par::{self, Execution};
use lrn_core::pipeline::{emit_curves, emit_report, record_json, run_full, OutputFormat, RunConfig};
use lrn_core::points::{search, SearchBounds};
use lrn_core::{Error, PrimeBasis, SolutionRecord};

#[derive(Parser)]
#[command(name = "lrn", version, about = "Solve x^2 + 17^k 41^l 59^m = 2^delta y^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every case, cross-check against brute force and print the table.
    Solve {
        #[arg(long, default_value_t = 30)]
        nmax: u32,
        /// Largest numerator for X-iterated searches.
        #[arg(long, default_value_t = 1_000_000)]
        height: u64,
        /// Largest exponent of a denominator prime.
        #[arg(long, default_value_t = 6)]
        sexp: u32,
        /// Largest numerator for Y-iterated searches.
        #[arg(long, default_value_t = 1_000_000)]
        yrange: u64,
        /// Per-curve search budget.
        #[arg(long, default_value_t = 10_000_000_000)]
        budget: u128,
        /// Fix an exponent to zero, e.g. `k=0` or `41=0`; repeatable.
        #[arg(long = "fix")]
        fix: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "17,41,59")]
        basis: Vec<u64>,
        /// Bound on lambda y^n for the brute-force cross-check.
        #[arg(long = "value-max", default_value_t = 10_000_000_000)]
        value_max: u128,
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        sequential: bool,
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
    /// Brute-force solutions with lambda y^n <= max.
    Oracle {
        #[arg(long, default_value_t = 10_000_000_000)]
        max: u128,
        #[arg(long, default_value_t = 30)]
        nmax: u32,
        #[arg(long, value_delimiter = ',', default_value = "17,41,59")]
        basis: Vec<u64>,
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
    /// Dump a curve family with provenance.
    Curves {
        #[arg(long)]
        case: CaseTag,
        #[arg(long, value_delimiter = ',', default_value = "17,41,59")]
        basis: Vec<u64>,
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
    /// Search one curve given as JSON (as printed by `curves`).
    Points {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 1_000_000)]
        height: u64,
        #[arg(long, default_value_t = 6)]
        sexp: u32,
        #[arg(long, default_value_t = 1_000_000)]
        yrange: u64,
        #[arg(long, default_value_t = 10_000_000_000)]
        budget: u128,
        #[arg(long, value_delimiter = ',', default_value = "17,41,59")]
        basis: Vec<u64>,
    },
    /// Lehmer sequences and primitive divisors.
    Lehmer {
        #[command(subcommand)]
        command: LehmerCommand,
    },
    /// Class number of Q(sqrt(-d)).
    Classnum { d: u64 },
    /// Check one solution exactly.
    Verify { x: BigUint, y: BigUint, delta: u32, k: u32, l: u32, m: u32, n: u32 },
}

#[derive(Subcommand)]
enum LehmerCommand {
    /// Terms L_1..L_n, one JSON line each.
    Seq {
        #[arg(allow_hyphen_values = true)]
        a: BigInt,
        #[arg(allow_hyphen_values = true)]
        b: BigInt,
        n: u32,
    },
    /// Prime factors of L_n below 10^6 and whether each is primitive.
    Primdiv {
        #[arg(allow_hyphen_values = true)]
        a: BigInt,
        #[arg(allow_hyphen_values = true)]
        b: BigInt,
        n: u32,
    },
}

fn basis_from(primes: Vec<u64>) -> Result<PrimeBasis, Error> {
    PrimeBasis::new(primes).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn parse_fix(spec: &str, basis: &PrimeBasis) -> Result<u64, Error> {
    let bad = || Error::InvalidConfig(format!("--fix expects NAME=0 with NAME in k, l, m or a basis prime, got {spec:?}"));
    let (name, value) = spec.split_once('=').ok_or_else(bad)?;
    if value.trim() != "0" {
        return Err(bad());
    }
    let idx = match name.trim() {
        "k" => 0,
        "l" => 1,
        "m" => 2,
        other => other.parse::<u64>().ok().and_then(|p| basis.index_of(p)).ok_or_else(bad)?,
    };
    basis.primes().get(idx).copied().ok_or_else(bad)
}

fn curve_from_json(text: &str, basis: &PrimeBasis) -> Result<CurveModel, Error> {
    let bad = |msg: &str| Error::InvalidConfig(format!("--curve: {msg}"));
    let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let coeff = |name: &str| -> Result<BigInt, Error> {
        let c = v.get("coefficients").and_then(|c| c.get(name)).ok_or_else(|| bad(&format!("missing coefficient {name}")))?;
        match c {
            Value::Number(n) => n.to_string().parse().map_err(|_| bad("coefficients must be integers")),
            Value::String(s) => s.parse().map_err(|_| bad("coefficients must be integers")),
            _ => Err(bad("coefficients must be integers")),
        }
    };
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
    let (equation, case) = match kind {
        "cubic" => (CurveEquation::Cubic { c2: coeff("c2")?, c1: coeff("c1")?, c0: coeff("c0")? }, CaseTag::Mod3),
        "quartic_ljunggren" => (CurveEquation::Ljunggren { lambda: coeff("lambda")?, c: coeff("c")? }, CaseTag::Mod4),
        "quartic_even" => {
            (CurveEquation::QuarticEven { lead: coeff("lead")?, q4: coeff("q4")?, q2: coeff("q2")?, q0: coeff("q0")? }, CaseTag::P5)
        }
        other => return Err(bad(&format!("unknown kind {other:?}"))),
    };
    if let Some(disc) = equation.cubic_discriminant() {
        if disc == BigInt::from(0) {
            return Err(bad("singular cubic"));
        }
    }
    if let CurveEquation::QuarticEven { lead, .. } = &equation {
        if *lead == BigInt::from(0) {
            return Err(bad("lead must be nonzero"));
        }
    }
    let primes: Vec<u64> = match v.get("denominator_primes") {
        None => Vec::new(),
        Some(Value::Array(a)) => {
            a.iter().map(|p| p.as_u64().ok_or_else(|| bad("denominator primes must be integers"))).collect::<Result<_, _>>()?
        }
        Some(_) => return Err(bad("denominator_primes must be an array")),
    };
    if let Some(p) = primes.iter().find(|p| basis.index_of(**p).is_none()) {
        return Err(bad(&format!("denominator prime {p} is not in the basis")));
    }
    Ok(CurveModel::new(equation, Provenance::bare(case, basis.len()), primes))
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Solve { nmax, height, sexp, yrange, budget, fix, basis, value_max, no_oracle, sequential, format } => {
            let basis = basis_from(basis)?;
            let fixed = fix.iter().map(|f| parse_fix(f, &basis)).collect::<Result<Vec<_>, _>>()?;
            let config = RunConfig {
                basis,
                fixed,
                search: SearchBounds { numerator_height: height, s_exponent_max: sexp, y_range: yrange, budget },
                oracle: OracleBounds { value_max, n_max: nmax },
                n_max: nmax,
                execution: if sequential { Execution::Sequential } else { Execution::Parallel },
                skip_oracle: no_oracle,
            };
            let report = run_full(&config)?;
            Ok(emit_report(&report, format))
        }
        Command::Oracle { max, nmax, basis, format } => {
            let basis = basis_from(basis)?;
            let bounds = OracleBounds { value_max: max, n_max: nmax };
            let found = brute_force_with_aliases(&bounds, basis.primes(), Execution::Parallel)?;
            let records: Vec<SolutionRecord> = found.iter().map(|(r, _)| r.clone()).collect();
            Ok(match format {
                OutputFormat::Csv => lrn_core::pipeline::solutions_csv(&records, &basis),
                OutputFormat::Json => {
                    let rows: Vec<Value> = found
                        .iter()
                        .map(|(r, aliases)| {
                            let mut v = record_json(r, &basis);
                            let al: Vec<Value> =
                                aliases.iter().map(|(y, n)| json!({"y": lrn_core::pipeline::int(y.clone()), "n": n})).collect();
                            v["aliases"] = Value::Array(al);
                            v
                        })
                        .collect();
                    let v = json!({"value_max": lrn_core::pipeline::int(BigInt::from(max)), "n_max": nmax, "solutions": rows});
                    format!("{v}\n")
                }
            })
        }
        Command::Curves { case, basis, format } => {
            let basis = basis_from(basis)?;
            let models = match case {
                CaseTag::Mod3 => build_mod3_family(&basis),
                CaseTag::Mod4 => build_mod4_family(&basis),
                CaseTag::P5 => build_p5_curves(&prime_case_contexts(5, &basis)?, &basis)?,
                CaseTag::P7 => build_p7_curves(&prime_case_contexts(7, &basis)?, &basis)?,
            };
            Ok(emit_curves(&models, format))
        }
        Command::Points { curve, height, sexp, yrange, budget, basis } => {
            let basis = basis_from(basis)?;
            let model = curve_from_json(&curve, &basis)?;
            let bounds = SearchBounds { numerator_height: height, s_exponent_max: sexp, y_range: yrange, budget };
            let points = search(&model, &bounds, &basis, Execution::Parallel)?;
            let mut out = String::new();
            for p in points {
                let v = json!({
                    "x_num": lrn_core::pipeline::int(p.x_num),
                    "y_num": lrn_core::pipeline::int(p.y_num),
                    "denom_exponents": p.denom_exponents.as_slice(),
                });
                out.push_str(&format!("{v}\n"));
            }
            Ok(out)
        }
        Command::Lehmer { command } => {
            let (a, b, n, primdiv) = match command {
                LehmerCommand::Seq { a, b, n } => (a, b, n, false),
                LehmerCommand::Primdiv { a, b, n } => (a, b, n, true),
            };
            let pair = LehmerPair::new(a, b).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            if n == 0 {
                return Err(Error::InvalidConfig("n must be at least 1".into()));
            }
            let terms = lehmer_sequence(&pair, n);
            let int = lrn_core::pipeline::int;
            let mut out = String::new();
            if !primdiv {
                for (i, t) in terms.iter().enumerate() {
                    out.push_str(&format!("{}\n", json!({"index": i + 1, "value": int(t.clone())})));
                }
                return Ok(out);
            }
            if n < 3 {
                return Err(Error::InvalidConfig("primitive divisors need n >= 3".into()));
            }
            let mut rest = terms[n as usize - 1].magnitude().clone();
            for p in (2..1_000_000u64).filter(|&p| is_prime(p)) {
                if rest < BigUint::from(p) {
                    break;
                }
                let bp = BigUint::from(p);
                if (&rest % &bp) != BigUint::from(0u32) {
                    continue;
                }
                while (&rest % &bp) == BigUint::from(0u32) {
                    rest /= &bp;
                }
                let r = is_primitive_divisor(&pair, n, p)?;
                let blocking = match r.blocking_factor {
                    None => Value::Null,
                    Some(BlockingFactor::ParameterProduct) => json!("parameter_product"),
                    Some(BlockingFactor::Term(k)) => json!(format!("L_{k}")),
                };
                out.push_str(&format!("{}\n", json!({"n": n, "prime": p, "is_primitive": r.is_primitive, "blocking_factor": blocking})));
            }
            out.push_str(&format!(
                "{}\n",
                json!({"n": n, "value": int(terms[n as usize - 1].clone()), "unfactored": int(BigInt::from(rest))})
            ));
            Ok(out)
        }
        Command::Classnum { d } => {
            let h = class_number(d).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Ok(format!("{}\n", json!({"d": d, "h": h})))
        }
        Command::Verify { x, y, delta, k, l, m, n } => {
            let lambda = if delta <= 2 { 1u32 << delta } else { 0 };
            let record = SolutionRecord { x, y, lambda, exponents: lrn_core::Exponents(vec![k, l, m]), n };
            let valid = delta <= 2 && verify_solution(&record, PrimeBasis::default().primes());
            let mut v = record_json(&record, &PrimeBasis::default());
            v["delta"] = json!(delta);
            v["valid"] = json!(valid);
            Ok(format!("{v}\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match par::with_workers(|| run(cli)) {
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => 1,
                _ => 2,
            })
        }
    }
}
