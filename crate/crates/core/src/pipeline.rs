//! End-to-end jobs: parse the inputs, transform, expand, guess, certify and
//! summarize everything in a serializable report.

use serde::{Deserialize, Serialize};

use crate::arith::{Ctx, RatFn};
use crate::basis::FactorialBasis;
use crate::compat::{compat_mul_beta, compat_shift, Compatibility};
use crate::error::{Error, Result};
use crate::expr::{format_operator, format_ratfn, parse_operator, parse_ratfn, Mode};
use crate::ore::OreOp;
use crate::product::product_basis;
use crate::series::Series;
use crate::solver::{
    certify, check_annihilates, expand_in_basis, first_order_closed_form, guess_minimal, transformed_annihilator,
    GuessConfig, SectionMode, SeqGen,
};

/// Whether a basis text uses `beta(n) = n`.
pub fn basis_is_arithmetic(src: &str) -> bool {
    src.contains("Binom")
}

/// Parses `C(a,c;t;e)`, `P(e)`, `F`, `Binom` and `Product(X, Y, ...)`.
pub fn parse_basis(src: &str, ctx: &Ctx) -> Result<FactorialBasis> {
    let s = src.trim();
    let err = |msg: &str| Error::Parse { pos: 0, msg: format!("basis `{s}`: {msg}") };
    let args = |inner: &str| -> Result<Vec<i64>> {
        inner.split([',', ';']).map(|x| x.trim().parse::<i64>().map_err(|_| err("expected integers"))).collect()
    };
    if s == "F" {
        return FactorialBasis::q_falling(ctx);
    }
    if s == "Binom" {
        return FactorialBasis::binomial(ctx);
    }
    let (head, rest) = s.split_once('(').ok_or_else(|| err("unknown basis"))?;
    let inner = rest.strip_suffix(')').ok_or_else(|| err("missing `)`"))?;
    match head.trim() {
        "P" => {
            let v = args(inner)?;
            match v.as_slice() {
                [e] if *e > 0 => FactorialBasis::q_power(ctx, *e as u32),
                _ => Err(err("P takes one positive integer")),
            }
        }
        "C" => {
            if inner.matches(';').count() != 2 || inner.matches(',').count() != 1 {
                return Err(err("expected C(a,c;t;e)"));
            }
            let v = args(inner)?;
            if v[3] <= 0 {
                return Err(err("e must be positive"));
            }
            FactorialBasis::q_binomial(ctx, v[0], v[1], v[2], v[3] as u32)
        }
        "Product" => {
            let mut factors = Vec::new();
            let mut depth = 0;
            let mut start = 0;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        factors.push(parse_basis(&inner[start..i], ctx)?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            factors.push(parse_basis(&inner[start..], ctx)?);
            product_basis(&factors)
        }
        _ => Err(err("unknown basis")),
    }
}

fn default_sections() -> usize {
    1
}

fn default_terms() -> usize {
    16
}

/// Which identity to check once a closed form is known:
/// `y(n) = sum_k c(k) B_(t k + r)(n + shift)` over `basis`.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct IdentitySpec {
    pub basis: Option<String>,
    #[serde(default = "default_sections")]
    pub sections: usize,
    #[serde(default)]
    pub section: usize,
    #[serde(default)]
    pub shift: i64,
    pub up_to: usize,
}

/// Expected outputs, compared by the corpus runner.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
pub struct Expect {
    pub transformed: Option<String>,
    pub guessed: Option<String>,
    pub closed_form: Option<String>,
    pub initial_coefficients: Option<Vec<String>>,
    /// Error code the job must fail with.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    Isolated,
    Coupled,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct Job {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub params: Vec<String>,
    /// Recurrence operator in `E` and `qn`.
    pub operator: String,
    /// `y(0), y(1), ...`.
    pub initials: Vec<String>,
    pub basis: String,
    #[serde(default = "default_sections")]
    pub sections: usize,
    #[serde(default)]
    pub section: usize,
    pub mode: Option<ModeSpec>,
    /// Number of section coefficients computed by the oracle.
    #[serde(default = "default_terms")]
    pub terms: usize,
    pub guess_order: Option<usize>,
    pub guess_degree: Option<usize>,
    pub identity: Option<IdentitySpec>,
    /// Truncation order for the `n -> infinity` limit of the sequence.
    pub series_order: Option<u32>,
    #[serde(default)]
    pub expect: Expect,
}

impl Job {
    pub fn section_mode(&self) -> SectionMode {
        match self.mode {
            Some(ModeSpec::Isolated) => SectionMode::Isolated,
            _ => SectionMode::Coupled,
        }
    }

    pub fn guess_config(&self) -> GuessConfig {
        let d = GuessConfig::default();
        GuessConfig {
            max_order: self.guess_order.unwrap_or(d.max_order),
            max_degree: self.guess_degree.unwrap_or(d.max_degree),
            margin: d.margin,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InputReport {
    pub operator: String,
    pub initials: Vec<String>,
    pub params: Vec<String>,
    pub sections: usize,
    pub section: usize,
    pub mode: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CompatReport {
    pub operator: String,
    #[serde(rename = "A")]
    pub lower: usize,
    #[serde(rename = "B")]
    pub upper: usize,
    pub t: usize,
    /// `alpha[r][A + i]` is the coefficient of `B_(k + i)` for `k = t m + r`.
    pub alpha: Vec<Vec<String>>,
}

impl CompatReport {
    pub fn new(operator: &str, c: &Compatibility) -> Self {
        let (a, b) = (c.lower() as i64, c.upper() as i64);
        let alpha = (0..c.sections()).map(|r| (-a..=b).map(|i| format_ratfn(&c.alpha(r, i))).collect()).collect();
        CompatReport { operator: operator.into(), lower: c.lower(), upper: c.upper(), t: c.sections(), alpha }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CertificateReport {
    pub valid: bool,
    pub lclm_order: usize,
    pub checks: usize,
    pub witness: Option<i64>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdentityCheck {
    pub index: usize,
    pub equal: bool,
}

/// `y(n) mod q^(order+1)` once it no longer changes with `n`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LimitSeries {
    pub order: u32,
    /// First `n` from which the truncations agree over the inspected window.
    pub stable_from: usize,
    pub series: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub input: InputReport,
    pub basis: String,
    pub compatibility: Vec<CompatReport>,
    pub transformed_operator: String,
    pub initial_coefficients: Vec<String>,
    pub guessed_operator: Option<String>,
    pub certificate: Option<CertificateReport>,
    pub closed_form: Option<String>,
    pub identity_checks: Vec<IdentityCheck>,
    pub limit_series: Option<LimitSeries>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
            && self.identity_checks.iter().all(|c| c.equal)
            && self.certificate.as_ref().is_none_or(|c| c.valid)
    }
}

/// Everything a job produces, before formatting.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub ctx: Ctx,
    pub basis: FactorialBasis,
    pub recurrence: OreOp,
    pub sequence: Vec<RatFn>,
    pub transformed: OreOp,
    pub coefficients: Vec<RatFn>,
    pub guessed: Option<OreOp>,
    pub closed_form: Option<crate::solver::ClosedForm>,
    pub report: Report,
}

pub fn job_context(job: &Job) -> Result<Ctx> {
    Ctx::new(&job.params, basis_is_arithmetic(&job.basis))
}

pub fn run_job(job: &Job) -> Result<Outcome> {
    let ctx = job_context(job)?;
    let basis = parse_basis(&job.basis, &ctx)?;
    let recurrence = parse_operator(&job.operator, &ctx.n, Mode::N)?;
    let initials: Vec<RatFn> = job.initials.iter().map(|s| parse_ratfn(s, &ctx.n)).collect::<Result<_>>()?;
    let (t, r, mode) = (job.sections, job.section, job.section_mode());
    if t == 0 || r >= t {
        return Err(Error::Usage(format!("section {r} out of range for {t} sections")));
    }

    let mut compatibility = Vec::new();
    if let Ok(c) = compat_shift(&basis, None) {
        compatibility.push(CompatReport::new("E", &c));
    }
    compatibility.push(CompatReport::new("beta", &compat_mul_beta(&basis)));

    let transformed = transformed_annihilator(&recurrence, &basis, t, r, mode)?;

    // oracle coefficients of the chosen section
    let (et, er, count) = match mode {
        SectionMode::Isolated => (t, r, job.terms),
        SectionMode::Coupled => (1, 0, t * job.terms + r),
    };
    let need = basis.leading_index(et * (count - 1) + er, Some(8 * count + 16))?.unwrap_or(count) + 1;
    let up_to = job.identity.as_ref().map_or(0, |i| i.up_to + 1);
    let sequence = SeqGen::new(&recurrence, initials.clone(), 0)?.unroll(need.max(up_to).max(initials.len()))?;
    let full = expand_in_basis(&sequence, &basis, et, er, count)?;
    let coefficients: Vec<RatFn> = match mode {
        SectionMode::Isolated => full,
        SectionMode::Coupled => full.into_iter().skip(r).step_by(t).collect(),
    };
    let mut checks = vec![Check {
        name: "transformed operator annihilates oracle coefficients".into(),
        passed: check_annihilates(&transformed, &coefficients, 0).is_ok(),
    }];

    let mut guessed = None;
    let mut certificate = None;
    let mut current = transformed.clone();
    if transformed.order() >= 2 {
        let mut cfg = job.guess_config();
        cfg.max_order = cfg.max_order.min(transformed.order() - 1);
        // the proven operator extends the oracle terms; fall back to them at singular indices
        let terms = SeqGen::new(&transformed, coefficients.clone(), 0)
            .and_then(|g| g.unroll(cfg.terms_needed().max(coefficients.len())))
            .unwrap_or_else(|_| coefficients.clone());
        if let Some(g) = guess_minimal(&terms, basis.table(), &cfg)? {
            if g.order() < transformed.order() {
                let cert = certify(&transformed, &terms, &g)?;
                if cert.valid {
                    current = g.clone();
                }
                certificate = Some(CertificateReport {
                    valid: cert.valid,
                    lclm_order: cert.lclm.0.order(),
                    checks: cert.checks,
                    witness: cert.witness,
                });
            }
            guessed = Some(g);
        }
    }

    let mut closed_form = None;
    if current.order() == 1 && current.min_exp() == Some(0) {
        let cf = first_order_closed_form(&current, &coefficients[0])?;
        let mut ok = true;
        for (k, c) in coefficients.iter().enumerate() {
            ok &= cf.eval(k)? == *c;
        }
        checks.push(Check { name: "closed form reproduces oracle coefficients".into(), passed: ok });
        closed_form = Some(cf);
    }

    let mut identity_checks = Vec::new();
    if let (Some(spec), Some(cf)) = (&job.identity, &closed_form) {
        let ib = match &spec.basis {
            Some(b) => parse_basis(b, &ctx)?,
            None => basis.clone(),
        };
        for n in 0..=spec.up_to {
            let m = n as i64 + spec.shift;
            let mut rhs = RatFn::zero(&ctx.n);
            if m >= 0 {
                let kmax = m as usize + 1;
                let elems = ib.elements_at(m, spec.sections * kmax + spec.section)?;
                for k in 0..=kmax {
                    let e = &elems[spec.sections * k + spec.section];
                    if !e.is_zero() {
                        rhs = rhs.add(&cf.eval(k)?.retag(&ctx.n)?.mul(&e.retag(&ctx.n)?));
                    }
                }
            }
            identity_checks.push(IdentityCheck { index: n, equal: rhs == sequence[n].retag(&ctx.n)? });
        }
    }

    let n_init = transformed.max_exp().unwrap_or(0).max(1) as usize;
    let report = Report {
        input: InputReport {
            operator: job.operator.clone(),
            initials: job.initials.clone(),
            params: job.params.clone(),
            sections: t,
            section: r,
            mode: match mode {
                SectionMode::Isolated => "isolated".into(),
                SectionMode::Coupled => "coupled".into(),
            },
        },
        basis: basis.label().to_string(),
        compatibility,
        transformed_operator: format_operator(&transformed, Mode::K),
        initial_coefficients: coefficients.iter().take(n_init).map(format_ratfn).collect(),
        guessed_operator: guessed.as_ref().map(|g| format_operator(g, Mode::K)),
        certificate,
        closed_form: closed_form.as_ref().map(|c| c.to_string()),
        identity_checks,
        limit_series: match job.series_order {
            Some(order) => Some(limit_series(&recurrence, &initials, order)?),
            None => None,
        },
        checks,
    };
    Ok(Outcome { ctx, basis, recurrence, sequence, transformed, coefficients, guessed, closed_form, report })
}

/// Truncations of `y(n)` for growing `n` until `window` consecutive ones agree.
pub fn limit_series(recurrence: &OreOp, initials: &[RatFn], order: u32) -> Result<LimitSeries> {
    let window = 3;
    let max_n = 4 * order as usize + 16;
    let terms = SeqGen::new(recurrence, initials.to_vec(), 0)?.unroll(max_n + 1)?;
    let mut last: Option<Series> = None;
    let mut run = 0;
    for (n, y) in terms.iter().enumerate() {
        let s = Series::from_ratfn(y, order)?;
        if last.as_ref() == Some(&s) {
            run += 1;
            if run + 1 >= window {
                let from = n + 1 - window;
                return Ok(LimitSeries { order, stable_from: from, series: format_ratfn(&s.to_ratfn()) });
            }
        } else {
            run = 0;
        }
        last = Some(s);
    }
    Err(Error::Budget(format!("no stable truncation to q^{order} up to n = {max_n}")))
}
