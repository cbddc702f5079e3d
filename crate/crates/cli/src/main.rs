use std::io::{BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qfactorial::compat::{beta_operator, compat_mul_beta, compat_shift, compat_verify, shift_operator};
use qfactorial::corpus::{self, CaseResult};
use qfactorial::expr::{format_operator, parse_operator, Mode};
use qfactorial::pipeline::{job_context, parse_basis, run_job, CompatReport, Job, ModeSpec, Report};
use qfactorial::solver::{certify, transform_matrix, transformed_annihilator};
use qfactorial::{Error, Result};

const VERIFY_K: usize = 25;

#[derive(Parser)]
#[command(name = "qfactorial", version, about = "Exact q-series factorial basis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compatibility of a basis with the shift and with beta(n), checked to k = 25.
    Compat(BasisArgs),
    /// Image of an operator in E and qn under the change of basis.
    Transform(TransformArgs),
    /// Full pipeline: transform, expand, guess, certify, closed form.
    Solve(SolveArgs),
    /// Certifies a candidate annihilator for the coefficient sequence.
    Verify(VerifyArgs),
    /// Runs the reproduction corpus.
    Corpus(CorpusArgs),
    /// Reads one JSON job per line from stdin and writes one JSON report per line.
    Batch,
}

#[derive(Args, Clone)]
struct BasisArgs {
    /// `C(a,c;t;e)`, `P(e)`, `F`, `Binom` or `Product(X, Y, ...)`.
    #[arg(long)]
    basis: String,
    #[arg(long, default_value_t = 1)]
    sections: usize,
    /// Comma-separated parameter names.
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct TransformArgs {
    #[command(flatten)]
    basis: BasisArgs,
    #[arg(long)]
    operator: String,
    /// Print the annihilator of this section instead of the full matrix.
    #[arg(long)]
    section: Option<usize>,
    #[arg(long, value_enum, default_value_t = SectionArg::Coupled)]
    mode: SectionArg,
}

#[derive(Copy, Clone, ValueEnum)]
enum SectionArg {
    Isolated,
    Coupled,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    basis: BasisArgs,
    #[arg(long)]
    operator: String,
    /// Comma-separated `y(0), y(1), ...`.
    #[arg(long, value_delimiter = ',', required = true)]
    initials: Vec<String>,
    #[arg(long, default_value_t = 0)]
    section: usize,
    #[arg(long, value_enum, default_value_t = SectionArg::Coupled)]
    mode: SectionArg,
    #[arg(long, default_value_t = 16)]
    terms: usize,
    #[arg(long)]
    guess_order: Option<usize>,
    #[arg(long)]
    guess_degree: Option<usize>,
    #[arg(long)]
    series_order: Option<u32>,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Candidate operator in S and qk.
    #[arg(long)]
    candidate: String,
}

#[derive(Args, Clone)]
struct CorpusArgs {
    /// Case name or `all`.
    #[arg(long, default_value = "all")]
    corpus: String,
    #[arg(long)]
    json: bool,
}

fn job_from(a: &SolveArgs) -> Job {
    Job {
        name: String::new(),
        description: String::new(),
        params: a.basis.params.clone(),
        operator: a.operator.clone(),
        initials: a.initials.clone(),
        basis: a.basis.basis.clone(),
        sections: a.basis.sections,
        section: a.section,
        mode: Some(match a.mode {
            SectionArg::Isolated => ModeSpec::Isolated,
            SectionArg::Coupled => ModeSpec::Coupled,
        }),
        terms: a.terms,
        guess_order: a.guess_order,
        guess_degree: a.guess_degree,
        identity: None,
        series_order: a.series_order,
        expect: Default::default(),
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn print_compat(c: &CompatReport) {
    println!("{}: A = {}, B = {}, t = {}", c.operator, c.lower, c.upper, c.t);
    for (r, row) in c.alpha.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            println!("  alpha[{r}][{}] = {a}", j as i64 - c.lower as i64);
        }
    }
}

#[derive(Serialize)]
struct CompatOutput {
    basis: String,
    compatibility: Vec<CompatReport>,
    verified_to: usize,
    verified: bool,
}

fn cmd_compat(a: &BasisArgs) -> Result<bool> {
    let ctx = qfactorial::arith::Ctx::new(&a.params, qfactorial::pipeline::basis_is_arithmetic(&a.basis))?;
    let basis = parse_basis(&a.basis, &ctx)?;
    let mut reports = Vec::new();
    let mut ok = true;
    let beta = compat_mul_beta(&basis);
    ok &= compat_verify(&basis, &beta_operator(&basis), &beta, VERIFY_K)?.ok;
    let shift = compat_shift(&basis, None)?;
    ok &= compat_verify(&basis, &shift_operator(&basis), &shift, VERIFY_K)?.ok;
    for (name, c) in [("beta", beta), ("E", shift)] {
        let c = if a.sections > 1 { c.refine(a.sections / c.sections().max(1))? } else { c };
        reports.push(CompatReport::new(name, &c));
    }
    let out = CompatOutput { basis: basis.label().into(), compatibility: reports, verified_to: VERIFY_K, verified: ok };
    if a.json {
        print_json(&out);
    } else {
        println!("basis: {}", out.basis);
        out.compatibility.iter().for_each(print_compat);
        println!("verified to k = {VERIFY_K}: {}", if ok { "ok" } else { "FAILED" });
    }
    Ok(ok)
}

#[derive(Serialize)]
struct TransformOutput {
    basis: String,
    operator: String,
    sections: usize,
    /// Row `j`, column `r`: contribution of section `r` to equation `j`.
    matrix: Vec<Vec<String>>,
    section_operator: Option<String>,
}

fn cmd_transform(a: &TransformArgs) -> Result<bool> {
    let ctx = qfactorial::arith::Ctx::new(&a.basis.params, qfactorial::pipeline::basis_is_arithmetic(&a.basis.basis))?;
    let basis = parse_basis(&a.basis.basis, &ctx)?;
    let op = parse_operator(&a.operator, &ctx.n, Mode::N)?;
    let m = transform_matrix(&op, &basis, a.basis.sections)?;
    let matrix: Vec<Vec<String>> =
        m.entries().iter().map(|row| row.iter().map(|e| format_operator(e, Mode::K)).collect()).collect();
    let section_operator = match a.section {
        Some(r) => {
            let mode = match a.mode {
                SectionArg::Isolated => qfactorial::solver::SectionMode::Isolated,
                SectionArg::Coupled => qfactorial::solver::SectionMode::Coupled,
            };
            Some(format_operator(&transformed_annihilator(&op, &basis, a.basis.sections, r, mode)?, Mode::K))
        }
        None => None,
    };
    let out = TransformOutput {
        basis: basis.label().into(),
        operator: a.operator.clone(),
        sections: a.basis.sections,
        matrix,
        section_operator,
    };
    if a.basis.json {
        print_json(&out);
    } else if let Some(s) = &out.section_operator {
        println!("{s}");
    } else if out.sections == 1 {
        println!("{}", out.matrix[0][0]);
    } else {
        for (j, row) in out.matrix.iter().enumerate() {
            for (r, e) in row.iter().enumerate() {
                println!("[{j}][{r}] {e}");
            }
        }
    }
    Ok(true)
}

fn print_report(r: &Report) {
    println!("basis: {}", r.basis);
    println!("transformed: {}", r.transformed_operator);
    println!("initial coefficients: {}", r.initial_coefficients.join(", "));
    if let Some(g) = &r.guessed_operator {
        println!("guessed: {g}");
    }
    if let Some(c) = &r.certificate {
        let w = c.witness.map(|w| format!(", fails at term {w}")).unwrap_or_default();
        println!(
            "certificate: {} (lclm order {}, {} checks{w})",
            if c.valid { "valid" } else { "INVALID" },
            c.lclm_order,
            c.checks
        );
    }
    if let Some(c) = &r.closed_form {
        println!("closed form: {c}");
    }
    if !r.identity_checks.is_empty() {
        let bad: Vec<String> = r.identity_checks.iter().filter(|c| !c.equal).map(|c| c.index.to_string()).collect();
        let n = r.identity_checks.len();
        if bad.is_empty() {
            println!("identity: holds for n < {n}");
        } else {
            println!("identity: FAILS at n = {}", bad.join(", "));
        }
    }
    if let Some(s) = &r.limit_series {
        println!("limit to q^{} (stable from n = {}): {}", s.order, s.stable_from, s.series);
    }
    for c in &r.checks {
        println!("{}: {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<bool> {
    let out = run_job(&job_from(a))?;
    if a.basis.json {
        print_json(&out.report);
    } else {
        print_report(&out.report);
    }
    Ok(out.report.passed())
}

#[derive(Serialize)]
struct VerifyOutput {
    transformed_operator: String,
    candidate: String,
    valid: bool,
    lclm_order: usize,
    checks: usize,
    witness: Option<i64>,
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let job = job_from(&a.solve);
    let out = run_job(&job)?;
    let ctx = job_context(&job)?;
    let cand = parse_operator(&a.candidate, &ctx.k, Mode::K)?;
    let cert = certify(&out.transformed, &out.coefficients, &cand)?;
    let v = VerifyOutput {
        transformed_operator: out.report.transformed_operator.clone(),
        candidate: format_operator(&cand, Mode::K),
        valid: cert.valid,
        lclm_order: cert.lclm.0.order(),
        checks: cert.checks,
        witness: cert.witness,
    };
    if a.solve.basis.json {
        print_json(&v);
    } else {
        println!("transformed: {}", v.transformed_operator);
        println!("candidate: {}", v.candidate);
        match v.witness {
            None if v.valid => println!("certificate: valid (lclm order {}, {} checks)", v.lclm_order, v.checks),
            Some(w) => println!("certificate: INVALID, fails at term {w}"),
            None => println!("certificate: INVALID, lclm leading coefficient vanishes"),
        }
    }
    Ok(v.valid)
}

fn print_case(r: &CaseResult, json: bool) {
    if json {
        println!("{}", serde_json::to_string(r).expect("serializable"));
        return;
    }
    println!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.name);
    for m in &r.mismatches {
        println!("  {m}");
    }
}

fn cmd_corpus(a: &CorpusArgs) -> Result<bool> {
    let names: Vec<&str> = if a.corpus == "all" { Vec::new() } else { a.corpus.split(',').collect() };
    let results = corpus::run_corpus(&names)?;
    for r in &results {
        print_case(r, a.json);
    }
    Ok(results.iter().all(|r| r.passed))
}

#[derive(Serialize)]
struct BatchError<'a> {
    line: usize,
    code: &'a str,
    message: String,
}

fn cmd_batch() -> Result<bool> {
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    let mut all = true;
    for (i, line) in stdin.lock().lines().enumerate() {
        let line = line.map_err(|e| Error::Usage(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let result = serde_json::from_str::<Job>(&line)
            .map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })
            .and_then(|job| run_job(&job));
        let text = match result {
            Ok(o) => {
                all &= o.report.passed();
                serde_json::to_string(&o.report)
            }
            Err(e) => {
                all = false;
                serde_json::to_string(&BatchError { line: i + 1, code: e.code(), message: e.to_string() })
            }
        }
        .expect("serializable");
        writeln!(stdout, "{text}").map_err(|e| Error::Usage(e.to_string()))?;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compat(a) => cmd_compat(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Corpus(a) => cmd_corpus(a),
        Command::Batch => cmd_batch(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
