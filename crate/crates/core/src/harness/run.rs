//! Command dispatch.

use super::config::{Command, RunConfig};
use super::report::{round15, RunResult, RunStatus};
use crate::counting::{c1_estimate, koecher_identity_check, lhs_count, primitive_zeta_check, rank_factorize};
use crate::error::{Error, Result};
use crate::grassmann::{lambda_of, schmidt_count, FieldMatrix};
use crate::hecke::{convergence_row, moment_rhs_limit, window_check, RhsLimit};
use crate::matrix::{parse_rat, rat_to_string, Rat};
use crate::numfield::{NumberField, PrimeIdealData};
use serde_json::{json, Value};
use std::sync::Arc;
use std::time::Instant;

/// Process exit code for an error: 2 invalid input, 3 cap abort, 4 I/O,
/// 1 anything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Io(_) => 4,
        Error::Json(_) | Error::Overflow(_) => 1,
        _ => 2,
    }
}

/// Runs one command. Validation failures are returned as errors; a cap
/// abort part-way through keeps the finished records and sets the status.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    let start = Instant::now();
    let field = config.load_field()?;
    let mut result = match config.command {
        Command::CountRank => count_rank(config, &field)?,
        Command::C1Sum => c1_sum(config, &field)?,
        Command::SchmidtTable => schmidt_table(config, &field)?,
        Command::HeckeMoment => hecke_moment(config, &field)?,
        Command::IdentityCheck => identity_check(config)?,
        Command::Factorize => factorize(config, &field)?,
        Command::FieldInfo => field_info(config, &field)?,
    };
    result.field_fingerprint = Some(field.fingerprint());
    result.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(result)
}

/// Records a cap abort on `result`, or passes any other error through.
fn absorb(result: &mut RunResult, e: Error) -> Result<()> {
    match e {
        Error::CapExceeded { .. } => {
            result.status = RunStatus::CapAbort;
            result.error = Some(e.to_string());
            Ok(())
        }
        e => Err(e),
    }
}

fn require_t(config: &RunConfig) -> Result<Vec<f64>> {
    if config.t.is_empty() || config.t.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Validation(format!(
            "`{}` needs --t with positive values",
            config.command.name()
        )));
    }
    Ok(config.t.clone())
}

fn count_rank(config: &RunConfig, field: &Arc<NumberField>) -> Result<RunResult> {
    let (n, m, k) = config.counting_dims()?;
    let f = config.test_function()?;
    let ts = require_t(config)?;
    let mut r = RunResult::new(
        "count-rank",
        config.echo(),
        vec!["t", "raw_sum", "exact_count", "normalized", "matrices_seen"],
    );
    for t in ts {
        match lhs_count(field, n, m, k, t, &f) {
            Ok(rep) => r.records.push(json!({
                "t": t,
                "n": n,
                "m": m,
                "k": k,
                "function": f.name(),
                "raw_sum": round15(rep.raw_sum),
                "exact_count": rep.exact_count,
                "normalized": round15(rep.normalized),
                "matrices_seen": rep.matrices_seen,
            })),
            Err(e) => {
                absorb(&mut r, e)?;
                break;
            }
        }
    }
    Ok(r)
}

fn c1_sum(config: &RunConfig, field: &Arc<NumberField>) -> Result<RunResult> {
    let (n, m, k) = config.counting_dims()?;
    let f = config.test_function()?;
    let cutoff = config.require_cutoff()?;
    let mut r = RunResult::new(
        "c1-sum",
        config.echo(),
        vec!["key", "height", "denominator", "value", "std_error", "method"],
    );
    match c1_estimate(field, n, m, k, &f, cutoff, config.mc_samples, config.seed) {
        Ok(est) => {
            r.summary = json!({
                "n": n,
                "m": m,
                "k": k,
                "cutoff": cutoff,
                "function": f.name(),
                "partial_sum": round15(est.partial_sum),
                "std_error": round15(est.std_error),
                "term_count": est.term_count,
                "tail_estimate": round15(est.tail_estimate),
            });
            for t in est.terms {
                r.records.push(json!({
                    "key": t.key,
                    "height": round15(t.height),
                    "denominator": t.denominator.to_string(),
                    "value": round15(t.value),
                    "std_error": round15(t.std_error),
                    "method": t.method,
                }));
            }
        }
        Err(e) => absorb(&mut r, e)?,
    }
    Ok(r)
}

fn schmidt_table(config: &RunConfig, field: &Arc<NumberField>) -> Result<RunResult> {
    let k = config.require("k", config.k)?;
    let m = config.require("m", config.m)?;
    if !(m >= k && k >= 1) {
        return Err(Error::Validation(format!("need m >= k >= 1, got m={m}, k={k}")));
    }
    let ts = require_t(config)?;
    let mut r = RunResult::new("schmidt-table", config.echo(), vec!["t", "count", "ratio_to_previous"]);
    let mut prev: Option<usize> = None;
    for t in ts {
        match schmidt_count(field, k, m, t) {
            Ok(c) => {
                let ratio = prev.filter(|&p| p > 0).map(|p| round15(c as f64 / p as f64));
                r.records.push(json!({ "t": t, "k": k, "m": m, "count": c, "ratio_to_previous": ratio }));
                prev = Some(c);
            }
            Err(e) => {
                absorb(&mut r, e)?;
                break;
            }
        }
    }
    Ok(r)
}

fn rhs_json(l: &RhsLimit) -> Value {
    json!({
        "value": round15(l.value),
        "std_error": round15(l.std_error),
        "tail_estimate": round15(l.tail_estimate),
        "per_k": l.per_k.iter().map(|(k, v, t, c)| json!({
            "k": k, "partial_sum": round15(*v), "tail_estimate": round15(*t), "terms": c,
        })).collect::<Vec<_>>(),
    })
}

fn hecke_moment(config: &RunConfig, field: &Arc<NumberField>) -> Result<RunResult> {
    let n = config.require("n", config.n)?;
    let m = config.require("m", config.m)?;
    let s = config.require("s", config.s)?;
    window_check(n, m, s)?;
    if config.primes.is_empty() || config.primes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("`hecke-moment` needs --primes, strictly increasing".into()));
    }
    let g = config.test_function()?;
    let mode = config.moment_mode()?;
    let cutoff = config.require_cutoff()?;
    for &p in &config.primes {
        PrimeIdealData::first_above(field, p)?;
    }
    let mut r = RunResult::new(
        "hecke-moment",
        config.echo(),
        vec!["p", "lhs", "stratified", "rhs_limit", "abs_error"],
    );
    let limits = moment_rhs_limit(field, n, m, &g, cutoff, config.mc_samples, config.seed, true).and_then(|a| {
        moment_rhs_limit(field, n, m, &g, cutoff, config.mc_samples, config.seed, false).map(|b| (a, b))
    });
    let (rhs, rhs0) = match limits {
        Ok(v) => v,
        Err(e) => {
            absorb(&mut r, e)?;
            return Ok(r);
        }
    };
    r.summary = json!({ "rhs_limit": rhs_json(&rhs), "rhs_limit_nonzero": rhs_json(&rhs0) });
    for &p in &config.primes {
        match convergence_row(field, n, m, s, &g, p, mode, config.seed, &rhs, &rhs0) {
            Ok(row) => r.records.push(row.to_json()),
            Err(e) => {
                absorb(&mut r, e)?;
                break;
            }
        }
    }
    Ok(r)
}

fn identity_check(config: &RunConfig) -> Result<RunResult> {
    let n = config.require("n", config.n)?;
    let m = config.require("m", config.m)?;
    let cutoff = config.require_cutoff()?;
    let mut r = RunResult::new(
        "identity-check",
        config.echo(),
        vec!["kind", "lhs", "rhs", "relative_error", "tail_corrected_relative_error"],
    );
    let out = match config.kind.as_str() {
        "primitive-zeta" => primitive_zeta_check(n, m, cutoff),
        "koecher" => koecher_identity_check(n, m, cutoff),
        other => {
            return Err(Error::Validation(format!(
                "unknown identity `{other}` (expected primitive-zeta or koecher)"
            )))
        }
    };
    match out {
        Ok(c) => r.records.push(json!({
            "kind": config.kind,
            "n": n,
            "m": m,
            "cutoff": cutoff,
            "lhs": round15(c.lhs),
            "rhs": round15(c.rhs),
            "relative_error": round15(c.relative_error),
            "tail_corrected_relative_error": round15(c.tail_corrected_relative_error),
            "note": c.note,
        })),
        Err(e) => absorb(&mut r, e)?,
    }
    Ok(r)
}

/// Rows split by `;`, entries by `,`, power-basis coordinates by `|`.
pub fn parse_matrix(field: &Arc<NumberField>, text: &str) -> Result<FieldMatrix> {
    let d = field.degree();
    let rows: Vec<Vec<Vec<Rat>>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    let mut c = e
                        .split('|')
                        .map(|t| parse_rat(t.trim()).ok_or_else(|| Error::Parse(format!("bad entry `{}`", e.trim()))))
                        .collect::<Result<Vec<_>>>()?;
                    if c.len() > d {
                        return Err(Error::Parse(format!("entry `{}` has more than {d} coordinates", e.trim())));
                    }
                    c.resize(d, Rat::from_integer(0.into()));
                    Ok(c)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, |r| r.len());
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix rows must be nonempty and of equal length".into()));
    }
    let nrows = rows.len();
    FieldMatrix::from_entries(field, nrows, cols, rows.into_iter().flatten().collect())
}

fn factorize(config: &RunConfig, field: &Arc<NumberField>) -> Result<RunResult> {
    let text = config
        .matrix
        .as_deref()
        .ok_or_else(|| Error::Validation("`factorize` needs --matrix".into()))?;
    let a = parse_matrix(field, text)?;
    let (c, d) = rank_factorize(&a)?;
    let lam = lambda_of(&d)?;
    let mut r = RunResult::new("factorize", config.echo(), vec!["rank", "key", "height", "denominator"]);
    r.records.push(json!({
        "rank": d.k(),
        "key": d.key(),
        "C": c.to_json(),
        "D": d.entries.to_json(),
        "pivots": d.pivot_cols,
        "lambda_basis": lam.lattice.basis().rows_iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "height": round15(lam.height),
        "denominator": lam.denominator.to_string(),
    }));
    Ok(r)
}

fn field_info(config: &RunConfig, field: &Arc<NumberField>) -> Result<RunResult> {
    let mut r = RunResult::new(
        "field-info",
        config.echo(),
        vec!["degree", "discriminant", "index", "fingerprint"],
    );
    let ints = |m: &crate::matrix::Matrix<crate::matrix::Int>| {
        m.rows_iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    let primes: Vec<Value> = config
        .primes
        .iter()
        .map(|&p| {
            json!({
                "p": p,
                "degree_one_roots": PrimeIdealData::above(field, p).iter().map(|q| q.root()).collect::<Vec<_>>(),
            })
        })
        .collect();
    r.records.push(json!({
        "min_poly": field.min_poly().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "degree": field.degree(),
        "signature": [field.signature().0, field.signature().1],
        "discriminant": field.discriminant().to_string(),
        "index": field.index().to_string(),
        "integral_basis": field.integral_basis().rows_iter().map(|row| row.iter().map(rat_to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "trace_form": ints(field.trace_form()),
        "conjugation": field.conjugation().iter().map(rat_to_string).collect::<Vec<_>>(),
        "scale_sq": round15(field.scale_sq()),
        "precision_digits": field.precision_digits(),
        "effective_precision_digits": field.effective_precision_digits(),
        "fingerprint": field.fingerprint(),
        "primes": primes,
    }));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::RunConfig;

    #[test]
    fn count_rank_example() {
        let c = RunConfig {
            command: Command::CountRank,
            n: Some(2),
            m: Some(1),
            k: Some(1),
            t: vec![2.0],
            ..RunConfig::default()
        };
        let r = run(&c).unwrap();
        assert_eq!(r.records[0]["raw_sum"], json!(12.0));
        assert_eq!(r.records[0]["exact_count"], json!(12));
    }

    #[test]
    fn hecke_window_rejected() {
        let c = RunConfig {
            command: Command::HeckeMoment,
            n: Some(4),
            m: Some(3),
            s: Some(1),
            primes: vec![2],
            cutoff: Some(10.0),
            ..RunConfig::default()
        };
        let e = run(&c).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        assert!(e.to_string().contains("1-s/n < 1/m"));
    }

    #[test]
    fn cap_abort_keeps_partial_records() {
        let c = RunConfig {
            command: Command::CountRank,
            n: Some(3),
            m: Some(2),
            k: Some(1),
            t: vec![1.0, 1e6],
            ..RunConfig::default()
        };
        let r = run(&c).unwrap();
        assert_eq!(r.status, RunStatus::CapAbort);
        assert_eq!(r.records.len(), 1);
    }

    #[test]
    fn factorize_example() {
        let c = RunConfig {
            command: Command::Factorize,
            matrix: Some("2,1;4,2;6,3".into()),
            ..RunConfig::default()
        };
        let r = run(&c).unwrap();
        assert_eq!(r.records[0]["rank"], json!(1));
        assert_eq!(r.records[0]["denominator"], json!("2"));
    }
}
