//! Reproduction corpus: one data file per worked example, with expected
//! outputs embedded as strings.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{format_operator, format_ratfn, parse_operator, parse_ratfn, Mode};
use crate::pipeline::{run_job, Job, Outcome, Report};

pub const CASES: &[(&str, &str)] = &[
    ("rr1", include_str!("../corpus/rr1.toml")),
    ("rr2", include_str!("../corpus/rr2.toml")),
    ("rr_even_1", include_str!("../corpus/rr_even_1.toml")),
    ("rr_even_2", include_str!("../corpus/rr_even_2.toml")),
    ("sills_full", include_str!("../corpus/sills_full.toml")),
    ("sills_even", include_str!("../corpus/sills_even.toml")),
    ("sills_control_even", include_str!("../corpus/sills_control_even.toml")),
    ("sills_control_odd", include_str!("../corpus/sills_control_odd.toml")),
    ("aag", include_str!("../corpus/aag.toml")),
    ("aag_b_minus_q", include_str!("../corpus/aag_b_minus_q.toml")),
    ("aveh", include_str!("../corpus/aveh.toml")),
];

pub fn names() -> Vec<&'static str> {
    CASES.iter().map(|(n, _)| *n).collect()
}

pub fn parse_job(src: &str) -> Result<Job> {
    toml::from_str(src).map_err(|e| Error::Parse { pos: 0, msg: e.to_string() })
}

pub fn load(name: &str) -> Result<Job> {
    let (_, src) = CASES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Usage(format!("unknown corpus case `{name}`; known: {}", names().join(", "))))?;
    parse_job(src)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CaseError {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    /// Expected versus actual, one entry per differing field.
    pub mismatches: Vec<String>,
    pub error: Option<CaseError>,
    pub report: Option<Report>,
}

fn compare_operator(field: &str, expected: &str, actual: Option<&crate::ore::OreOp>, out: &mut Vec<String>) {
    let Some(actual) = actual else {
        out.push(format!("{field}: expected `{expected}`, got nothing"));
        return;
    };
    match parse_operator(expected, actual.table(), Mode::K) {
        Ok(e) if e == *actual => {}
        Ok(_) => out.push(format!("{field}: expected `{expected}`, got `{}`", format_operator(actual, Mode::K))),
        Err(err) => out.push(format!("{field}: cannot parse expected `{expected}`: {err}")),
    }
}

fn compare(job: &Job, o: &Outcome) -> Vec<String> {
    let e = &job.expect;
    let mut out = Vec::new();
    if let Some(code) = &e.error {
        out.push(format!("error: expected `{code}`, the job succeeded"));
    }
    if let Some(t) = &e.transformed {
        compare_operator("transformed", t, Some(&o.transformed), &mut out);
    }
    if let Some(g) = &e.guessed {
        compare_operator("guessed", g, o.guessed.as_ref(), &mut out);
    }
    if let Some(c) = &e.closed_form {
        let got = o.report.closed_form.clone().unwrap_or_default();
        if *c != got {
            out.push(format!("closed_form: expected `{c}`, got `{got}`"));
        }
    }
    if let Some(init) = &e.initial_coefficients {
        for (i, s) in init.iter().enumerate() {
            let table = o.basis.table();
            let got = o.coefficients.get(i);
            match parse_ratfn(s, table) {
                Ok(v) if got == Some(&v) => {}
                Ok(_) => out.push(format!(
                    "initial_coefficients[{i}]: expected `{s}`, got `{}`",
                    got.map(format_ratfn).unwrap_or_default()
                )),
                Err(err) => out.push(format!("initial_coefficients[{i}]: cannot parse `{s}`: {err}")),
            }
        }
    }
    out
}

pub fn run_case(job: &Job) -> CaseResult {
    match run_job(job) {
        Ok(o) => {
            let mismatches = compare(job, &o);
            CaseResult {
                name: job.name.clone(),
                passed: mismatches.is_empty() && o.report.passed(),
                mismatches,
                error: None,
                report: Some(o.report),
            }
        }
        Err(err) => {
            let mut mismatches = Vec::new();
            match &job.expect.error {
                Some(code) if code == err.code() => {}
                Some(code) => mismatches.push(format!("error: expected `{code}`, got `{}`", err.code())),
                None => mismatches.push(format!("error: {err}")),
            }
            CaseResult {
                name: job.name.clone(),
                passed: mismatches.is_empty(),
                mismatches,
                error: Some(CaseError { code: err.code().into(), message: err.to_string() }),
                report: None,
            }
        }
    }
}

/// Runs the named cases (all when `names` is empty) concurrently, in corpus order.
pub fn run_corpus(names: &[&str]) -> Result<Vec<CaseResult>> {
    let jobs: Vec<Job> = if names.is_empty() {
        CASES.iter().map(|(_, src)| parse_job(src)).collect::<Result<_>>()?
    } else {
        names.iter().map(|n| load(n)).collect::<Result<_>>()?
    };
    Ok(jobs.par_iter().map(run_case).collect())
}
