//! Command-line front end: JSON payloads in, JSON reports out.
//!
//! Four commands share one report shape and one exit contract:
//! `verify` runs the invariant suites, `eval` materializes a polynomial of an
//! operator family and applies it, `spectrum` diagonalizes a normal matrix,
//! and `norm` brackets the injective norm of a multilinear map.

pub mod payload;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use multilin::{
    calculus_map, eig_normal, norm_bounds, spectrum, Error, FamilyKind, MultiMap, NormParams,
    Result, SuiteReport, Vector, VerifyConfig,
};
use serde_json::{json, Value};

use payload::{
    decode_matrix, decode_vector, encode_matrix, encode_vector, parse_json, EvalPayload,
    NormPayload, SpectrumPayload,
};
use report::{exit_code, Report};

#[derive(Parser)]
#[command(name = "multilin", version, about = "Multilinear operator calculus toolkit")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized draw; equal seeds replay equal runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run invariant suites and report the worst residual per check.
    Verify {
        /// Suite to run: axioms, duality, spectral, calculus, covariance, grid, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Operator family the calculus checks exercise: mult or add.
        #[arg(long, default_value = "mult")]
        family: String,
        /// Tolerance override, repeatable: --tol <check>=<value>.
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
    /// Apply a polynomial of an operator to input vectors.
    Eval {
        /// Payload path; read standard input when omitted.
        path: Option<PathBuf>,
        /// Family used when the payload does not name one: mult or add.
        #[arg(long, default_value = "mult")]
        family: String,
    },
    /// Eigenvalues, and on request the eigenbasis, of a normal matrix.
    Spectrum {
        /// Payload path; read standard input when omitted.
        path: Option<PathBuf>,
    },
    /// Norm bracket of a multilinear map given in coefficient form.
    Norm {
        /// Payload path; read standard input when omitted.
        path: Option<PathBuf>,
    },
}

/// Parse arguments, run the job, write the report. Returns the process exit
/// code; the caller passes it to `std::process::exit`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let seed = cli.seed;
    let (report, code) = match dispatch(&cli.command, seed) {
        Ok(done) => done,
        Err(e) => (Report::error(seed, e.to_string()), exit_code(&e)),
    };
    match write_report(cli.out.as_deref(), &report.render()) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("cannot write report: {e}");
            2
        }
    }
}

fn write_report(out: Option<&Path>, body: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn dispatch(command: &Command, seed: u64) -> Result<(Report, i32)> {
    match command {
        Command::Verify { suite, family, tol } => run_verify(suite, family, tol, seed),
        Command::Eval { path, family } => run_eval(&read_payload(path.as_deref())?, family, seed),
        Command::Spectrum { path } => run_spectrum(&read_payload(path.as_deref())?, seed),
        Command::Norm { path } => run_norm(&read_payload(path.as_deref())?, seed),
    }
}

fn read_payload(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Usage(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Error::Usage(format!("cannot read standard input: {e}")))?;
            Ok(text)
        }
    }
}

fn parse_tolerances(entries: &[String]) -> Result<BTreeMap<String, f64>> {
    let known = multilin::verify::check_names();
    let mut overrides = BTreeMap::new();
    for entry in entries {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("tolerance override '{entry}' is not <check>=<value>")))?;
        if !known.contains(&name) {
            return Err(Error::Usage(format!("unknown check '{name}' in tolerance override")));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Usage(format!("tolerance value '{value}' is not a number")))?;
        overrides.insert(name.to_string(), value);
    }
    Ok(overrides)
}

fn run_verify(suite: &str, family: &str, tol: &[String], seed: u64) -> Result<(Report, i32)> {
    let family = FamilyKind::parse(family)?;
    let overrides = parse_tolerances(tol)?;
    let cfg = VerifyConfig { seed, family, tolerances: overrides.clone() };
    let reports: Vec<SuiteReport> = if suite == "all" {
        multilin::run_all(&cfg)?
    } else {
        vec![multilin::run_suite(suite, &cfg)?]
    };

    let mut residuals = BTreeMap::new();
    let mut suites = serde_json::Map::new();
    let mut checks = Vec::new();
    let mut failed = Vec::new();
    for sr in &reports {
        suites.insert(sr.suite.clone(), json!(if sr.passed { "pass" } else { "fail" }));
        for c in &sr.checks {
            residuals.insert(c.name.clone(), c.residual);
            let mut entry = json!({
                "name": c.name,
                "suite": sr.suite,
                "passed": c.passed,
                "tol": c.tol,
            });
            if let Some(detail) = &c.detail {
                entry["detail"] = json!(detail);
            }
            checks.push(entry);
            if !c.passed {
                failed.push(json!(c.name));
            }
        }
    }
    let passed = reports.iter().all(|sr| sr.passed);
    let report = Report {
        status: if passed { "pass" } else { "fail" },
        seed,
        residuals,
        artifacts: json!({
            "family": family.name(),
            "suite": suite,
            "tolerance_overrides": overrides,
            "suites": Value::Object(suites),
            "checks": checks,
            "failed": failed,
        }),
        message: None,
    };
    Ok((report, i32::from(!passed)))
}

fn run_eval(text: &str, flag_family: &str, seed: u64) -> Result<(Report, i32)> {
    let payload: EvalPayload = parse_json(text)?;
    let family = FamilyKind::parse(payload.family.as_deref().unwrap_or(flag_family))?;
    let a: MultiMap = match (&payload.operator, &payload.grid) {
        (Some(rows), None) => {
            let a = decode_matrix(rows)?;
            if a.domain()[0] != *a.codomain() {
                return Err(Error::Shape(format!(
                    "operator must be square, got {} rows and {} columns",
                    a.codomain().dim(),
                    a.domain()[0].dim()
                )));
            }
            a
        }
        (None, Some(grid)) => {
            let g = multilin::make_grid(grid.interval[0], grid.interval[1], grid.npoints)?;
            if grid.multiplier.len() != grid.npoints {
                return Err(Error::Shape(format!(
                    "multiplier has {} samples on a grid of {} points",
                    grid.multiplier.len(),
                    grid.npoints
                )));
            }
            let entries: Vec<_> = grid.multiplier.iter().map(|&c| payload::decode_c(c)).collect();
            MultiMap::diagonal(&g.space(), &entries)?
        }
        _ => {
            return Err(Error::Usage(
                "payload needs exactly one of 'operator' or 'grid'".into(),
            ))
        }
    };
    let p = payload.poly.decode()?;
    if payload.inputs.len() != p.nvars() {
        return Err(Error::Shape(format!(
            "polynomial in {} variables applied to {} input vectors",
            p.nvars(),
            payload.inputs.len()
        )));
    }
    let ctx = family.context(&a)?;
    let f = calculus_map(&ctx, &p)?;
    let xs: Vec<Vector> = payload
        .inputs
        .iter()
        .map(|coords| decode_vector(&a.domain()[0], coords))
        .collect::<Result<_>>()?;
    let y = f.apply(&xs)?;
    let bracket = norm_bounds(&f, &NormParams { seed, ..NormParams::default() })?;
    let report = Report {
        status: "pass",
        seed,
        residuals: BTreeMap::new(),
        artifacts: json!({
            "payload": serde_json::to_value(&payload).expect("payload is plain data"),
            "family": family.name(),
            "output": encode_vector(&y),
            "norm_bracket": {"lower": bracket.lower, "upper": bracket.upper},
        }),
        message: None,
    };
    Ok((report, 0))
}

fn run_spectrum(text: &str, seed: u64) -> Result<(Report, i32)> {
    let payload: SpectrumPayload = parse_json(text)?;
    let a = decode_matrix(&payload.matrix)?;
    if a.domain()[0] != *a.codomain() {
        return Err(Error::Shape(format!(
            "matrix must be square, got {} rows and {} columns",
            a.codomain().dim(),
            a.domain()[0].dim()
        )));
    }
    let mut artifacts = json!({
        "payload": serde_json::to_value(&payload).expect("payload is plain data"),
    });
    if payload.basis {
        let dec = eig_normal(&a)?;
        let values: Vec<_> = dec.eigenvalues().iter().map(|&z| payload::encode_c(z)).collect();
        artifacts["eigenvalues"] = json!(values);
        artifacts["basis"] = json!(encode_matrix(dec.basis()));
    } else {
        let values: Vec<_> = spectrum(&a)?.iter().map(|&z| payload::encode_c(z)).collect();
        artifacts["eigenvalues"] = json!(values);
    }
    let report = Report {
        status: "pass",
        seed,
        residuals: BTreeMap::new(),
        artifacts,
        message: None,
    };
    Ok((report, 0))
}

fn run_norm(text: &str, seed: u64) -> Result<(Report, i32)> {
    let payload: NormPayload = parse_json(text)?;
    let t = payload.decode()?;
    let bracket = norm_bounds(&t, &NormParams { seed, ..NormParams::default() })?;
    let mut residuals = BTreeMap::new();
    residuals.insert("bracket_gap".to_string(), bracket.upper - bracket.lower);
    let report = Report {
        status: "pass",
        seed,
        residuals,
        artifacts: json!({
            "payload": serde_json::to_value(&payload).expect("payload is plain data"),
            "lower": bracket.lower,
            "upper": bracket.upper,
        }),
        message: None,
    };
    Ok((report, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides_parse_and_validate() {
        let parsed = parse_tolerances(&["multilinearity=1e-6".to_string()]).unwrap();
        assert_eq!(parsed["multilinearity"], 1e-6);
        assert!(parse_tolerances(&["nope=1e-6".to_string()]).is_err());
        assert!(parse_tolerances(&["multilinearity".to_string()]).is_err());
        assert!(parse_tolerances(&["multilinearity=abc".to_string()]).is_err());
    }

    #[test]
    fn verify_report_collects_residuals_per_check() {
        let (report, code) = run_verify("axioms", "mult", &[], 42).unwrap();
        assert_eq!(code, 0);
        assert_eq!(report.status, "pass");
        assert!(report.residuals.contains_key("multilinearity"));
        assert_eq!(report.artifacts["suites"]["axioms"], "pass");
    }

    #[test]
    fn eval_rejects_double_operator_sources() {
        let text = r#"{
            "operator": [[[1.0,0.0]]],
            "grid": {"interval": [0.0,1.0], "npoints": 2, "multiplier": [[0.0,0.0],[1.0,0.0]]},
            "poly": {"nvars":1,"terms":[{"c":[1.0,0.0],"k":[1]}]},
            "inputs": [[[1.0,0.0]]]
        }"#;
        let err = run_eval(text, "mult", 0).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn eval_checks_the_input_count_against_the_polynomial() {
        let text = r#"{
            "operator": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[2.0,0.0]]],
            "poly": {"nvars":2,"terms":[{"c":[1.0,0.0],"k":[1,1]}]},
            "inputs": [[[1.0,0.0],[1.0,0.0]]]
        }"#;
        let err = run_eval(text, "mult", 0).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn spectrum_rejects_rectangular_matrices() {
        let text = r#"{"matrix": [[[1.0,0.0],[0.0,0.0]]]}"#;
        let err = run_spectrum(text, 0).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }
}
