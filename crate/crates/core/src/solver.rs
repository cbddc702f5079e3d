//! Expansion in a basis, transfer of annihilators, unrolling, guessing,
//! certification and first-order closed forms.

use std::fmt;
use std::sync::Arc;

use crate::arith::{RatFn, ShiftKind, VarTable};
use crate::basis::FactorialBasis;
use crate::compat::{compile_expr, BasisCompat};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank_mod};
use crate::ore::{OreMat, OreOp};
use crate::qfunc::qpoch;

const PRIME: u64 = 2_147_483_629;

/// Coefficients `c_k` of `y(n) = sum_k c_k B_(t k + r)(n)`.
///
/// `y` holds `y(0), y(1), ...`. The elements of the chosen section must have
/// strictly increasing leading indices. Every supplied value of `y` is checked,
/// so a sequence outside the span of the section is reported as inconsistent.
pub fn expand_in_basis(
    y: &[RatFn],
    basis: &FactorialBasis,
    sections: usize,
    section: usize,
    count: usize,
) -> Result<Vec<RatFn>> {
    if sections == 0 || section >= sections {
        return Err(Error::Usage(format!("section {section} out of range for {sections} sections")));
    }
    let tab = basis.table();
    let y: Vec<RatFn> = y.iter().map(|v| v.retag(tab)).collect::<Result<_>>()?;
    let nmax = y.len();
    if nmax == 0 {
        return Err(Error::InsufficientTerms("no sequence values given".into()));
    }
    // elements B_(t k + r) for all k whose leading index can lie below nmax
    let kmax = sections * nmax + section;
    let steps = basis.step_values(kmax)?;
    let table: Vec<Vec<RatFn>> = (0..nmax as i64)
        .map(|n| basis.elements_with_steps(n, &steps).into_iter().skip(section).step_by(sections).collect::<Vec<_>>())
        .collect();
    let mut leads = Vec::new();
    for k in 0..table[0].len() {
        match (0..nmax).find(|&n| !table[n][k].is_zero()) {
            Some(n) => {
                if leads.last().is_some_and(|&l| l >= n) {
                    return Err(Error::Invalid(format!(
                        "{}: element {} of section {section} is not triangular (leading index {n})",
                        basis.label(),
                        sections * k + section
                    )));
                }
                leads.push(n);
            }
            None => break,
        }
    }
    let mut coeffs: Vec<RatFn> = Vec::with_capacity(leads.len());
    for (k, &n) in leads.iter().enumerate() {
        let mut rest = y[n].clone();
        for (j, c) in coeffs.iter().enumerate() {
            rest = rest.sub(&c.mul(&table[n][j]));
        }
        coeffs.push(rest.checked_div(&table[n][k])?);
    }
    for (n, yn) in y.iter().enumerate() {
        let mut acc = RatFn::zero(tab);
        for (k, c) in coeffs.iter().enumerate().take_while(|(k, _)| leads[*k] <= n) {
            acc = acc.add(&c.mul(&table[n][k]));
        }
        if acc != *yn {
            return Err(Error::Inconsistent(format!(
                "y({n}) is not in the span of section {section} of {} in {sections} sections",
                basis.label()
            )));
        }
    }
    if coeffs.len() < count {
        return Err(Error::InsufficientTerms(format!(
            "{count} coefficients need y(n) for n <= {}, only {nmax} values given",
            required_values(basis, sections, section, count)?.saturating_sub(1)
        )));
    }
    coeffs.truncate(count);
    Ok(coeffs)
}

// Number of values y(0..m) that determine `count` coefficients.
fn required_values(basis: &FactorialBasis, sections: usize, section: usize, count: usize) -> Result<usize> {
    if count == 0 {
        return Ok(0);
    }
    let k = sections * (count - 1) + section;
    Ok(basis.leading_index(k, Some(4 * k + 16))?.map_or(k + 1, |n| n + 1))
}

/// Expansion coefficients from initial values of `y` alone.
///
/// Values beyond the supplied ones are produced by the `n`-recurrence `op`
/// when it is given.
pub fn initial_coefficients(
    y_initials: &[RatFn],
    op: Option<&OreOp>,
    basis: &FactorialBasis,
    sections: usize,
    section: usize,
    up_to: usize,
) -> Result<Vec<RatFn>> {
    let need = required_values(basis, sections, section, up_to)?;
    let values = match op {
        Some(op) => SeqGen::new(op, y_initials.to_vec(), 0)?.unroll(need.max(y_initials.len()))?,
        None => {
            if y_initials.len() < need {
                return Err(Error::InsufficientTerms(format!(
                    "{up_to} coefficients need {need} values y(0..{need}), got {}",
                    y_initials.len()
                )));
            }
            y_initials.to_vec()
        }
    };
    expand_in_basis(&values, basis, sections, section, up_to)
}

/// Multiplies by a power of `S` from the left so that no negative powers remain.
/// Operators whose lowest power is positive are kept, since their solutions
/// start at index zero.
pub fn normalize(op: &OreOp) -> OreOp {
    let m = op.min_exp().unwrap_or(0);
    let op = if m < 0 { op.shift_left(-m).expect("shift variable present") } else { op.clone() };
    op.primitive()
}

/// How the sequences of the other sections are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionMode {
    /// The sequence is expanded in the chosen section only.
    Isolated,
    /// The sequence is expanded in the whole basis; the other sections are eliminated.
    Coupled,
}

/// Image of an `n`-domain operator in `sections` sections.
pub fn transform_matrix(expr: &OreOp, basis: &FactorialBasis, sections: usize) -> Result<OreMat> {
    let comp = BasisCompat::compute(basis)?;
    compile_expr(basis, expr, &comp, sections)
}

/// Annihilator of the section sequence `c(t k + r)` for solutions of `expr`.
pub fn transformed_annihilator(
    expr: &OreOp,
    basis: &FactorialBasis,
    sections: usize,
    section: usize,
    mode: SectionMode,
) -> Result<OreOp> {
    if section >= sections {
        return Err(Error::Usage(format!("section {section} out of range for {sections} sections")));
    }
    let m = transform_matrix(expr, basis, sections)?;
    if sections == 1 {
        return Ok(normalize(&m.into_scalar().expect("one section")));
    }
    section_operator(&m, section, mode)
}

/// Eliminates every section but `r` from the system `M c = 0`.
pub fn section_operator(m: &OreMat, r: usize, mode: SectionMode) -> Result<OreOp> {
    let t = m.size();
    let mut rows: Vec<Vec<OreOp>> = m.entries().to_vec();
    if mode == SectionMode::Coupled {
        for j in (0..t).filter(|&j| j != r) {
            // rewrite column j for the shifted unknown S^m c_j, so its entries have no negative powers
            let low = rows.iter().filter_map(|row| row[j].min_exp()).min().unwrap_or(0);
            for row in rows.iter_mut() {
                row[j] = row[j].shift_right(-low);
            }
            let Some(p) = rows.iter().position(|row| !row[j].is_zero()) else { continue };
            let pivot = rows.remove(p);
            for row in rows.iter_mut().filter(|row| !row[j].is_zero()) {
                let (_, u, w) = row[j].lclm(&pivot[j])?;
                *row = (0..t).map(|c| u.mul(&row[c]).sub(&w.mul(&pivot[c]))).collect();
                debug_assert!(row[j].is_zero());
            }
        }
    }
    let candidates: Vec<OreOp> = rows
        .iter()
        .filter(|row| mode == SectionMode::Isolated || (0..t).all(|c| c == r || row[c].is_zero()))
        .map(|row| &row[r])
        .filter(|op| !op.is_zero())
        .map(normalize)
        .collect();
    best_candidate(candidates)
        .ok_or_else(|| Error::Budget(format!("elimination left no nonzero operator for section {r} of {t}")))
}

// Right gcd of annihilators without negative powers that all start at S^0;
// otherwise the least one.
fn best_candidate(mut cands: Vec<OreOp>) -> Option<OreOp> {
    cands.sort_by_key(|c| (c.order(), c.max_exp(), weight(c)));
    let first = cands.first()?.clone();
    if cands.iter().all(|c| c.min_exp() == Some(0)) {
        let mut g = first.clone();
        for c in &cands[1..] {
            match g.gcrd(c) {
                Ok(h) if !h.is_one_op() => g = h,
                _ => return Some(first),
            }
        }
        return Some(g.primitive());
    }
    Some(first)
}

fn weight(op: &OreOp) -> usize {
    op.coeffs().values().map(|c| c.num().len() + c.den().len()).sum()
}

/// Checks that `op` annihilates `terms` (indexed from `offset`).
pub fn check_annihilates(op: &OreOp, terms: &[RatFn], offset: i64) -> Result<()> {
    let terms: Vec<RatFn> = terms.iter().map(|t| t.retag(op.table())).collect::<Result<_>>()?;
    let (first, out) = op.apply_to_seq(&terms, offset)?;
    match out.iter().position(|x| !x.is_zero()) {
        None => Ok(()),
        Some(i) => {
            Err(Error::Inconsistent(format!("operator does not annihilate the terms at k = {}", first + i as i64)))
        }
    }
}

/// A sequence given by an annihilator and initial values.
#[derive(Clone, Debug)]
pub struct SeqGen {
    annihilator: OreOp,
    initials: Vec<RatFn>,
    offset: i64,
    singular: Vec<i64>,
}

impl SeqGen {
    /// `initials` are the terms at `offset, offset + 1, ...`. Negative powers are
    /// removed first; every equation at an index `k >= offset` is used.
    pub fn new(annihilator: &OreOp, initials: Vec<RatFn>, offset: i64) -> Result<Self> {
        if annihilator.is_zero() {
            return Err(Error::Invalid("the zero operator generates no sequence".into()));
        }
        let annihilator = normalize(annihilator);
        let table = annihilator.table().clone();
        let initials = initials.iter().map(|x| x.retag(&table)).collect::<Result<_>>()?;
        let singular = annihilator.singular_indices(offset);
        Ok(SeqGen { annihilator, initials, offset, singular })
    }

    pub fn annihilator(&self) -> &OreOp {
        &self.annihilator
    }

    pub fn initials(&self) -> &[RatFn] {
        &self.initials
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Equation indices `k` whose leading coefficient vanishes or where a coefficient has a pole.
    pub fn singular_indices(&self) -> &[i64] {
        &self.singular
    }

    /// Terms at `offset .. offset + count`.
    ///
    /// Supplied initials beyond the order are checked against the recurrence.
    pub fn unroll(&self, count: usize) -> Result<Vec<RatFn>> {
        let op = &self.annihilator;
        let table = op.table();
        let hi = op.max_exp().expect("nonzero") as i64;
        let lead = op.leading_coeff();
        let mut out: Vec<RatFn> = Vec::with_capacity(count);
        for idx in 0..count as i64 {
            let j = self.offset + idx;
            let k = j - hi;
            if k < self.offset {
                let v = self.initials.get(idx as usize).ok_or(Error::MissingInitial(j))?;
                out.push(v.clone());
                continue;
            }
            let given = self.initials.get(idx as usize);
            if self.singular.contains(&k) {
                let lc = lead.eval_at_power(k);
                if let Ok(lc) = &lc {
                    if lc.is_zero() && op.coeffs().values().all(|c| c.eval_at_power(k).is_ok()) {
                        let rest = self.partial(k, &out, hi)?;
                        if !rest.is_zero() {
                            return Err(Error::Inconsistent(format!(
                                "equation at k = {k} fails for the given initials"
                            )));
                        }
                    }
                }
                out.push(given.ok_or(Error::MissingInitial(j))?.clone());
                continue;
            }
            let rest = self.partial(k, &out, hi)?;
            let value = rest.neg().checked_div(&lead.eval_at_power(k)?)?;
            if let Some(g) = given {
                if *g != value {
                    return Err(Error::Inconsistent(format!(
                        "initial value at index {j} disagrees with the recurrence"
                    )));
                }
            }
            out.push(value.retag(table)?);
        }
        Ok(out)
    }

    // sum of the non-leading terms of the equation at k
    fn partial(&self, k: i64, out: &[RatFn], hi: i64) -> Result<RatFn> {
        let mut acc = RatFn::zero(self.annihilator.table());
        for (i, c) in self.annihilator.coeffs() {
            let i = *i as i64;
            if i == hi {
                continue;
            }
            let term = &out[(k + i - self.offset) as usize];
            if !term.is_zero() {
                acc = acc.add(&c.eval_at_power(k)?.mul(term));
            }
        }
        Ok(acc)
    }
}

/// Search budget for guessing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuessConfig {
    pub max_order: usize,
    pub max_degree: usize,
    pub margin: usize,
}

impl Default for GuessConfig {
    fn default() -> Self {
        GuessConfig { max_order: 4, max_degree: 8, margin: 10 }
    }
}

impl GuessConfig {
    /// Terms needed to cover the whole search range.
    pub fn terms_needed(&self) -> usize {
        (self.max_order + 1) * (self.max_degree + 2) + self.margin
    }
}

// value of v^d at index k
fn shift_power(table: &Arc<VarTable>, k: i64, d: usize) -> Result<RatFn> {
    match table.shift_kind() {
        Some(ShiftKind::Geometric(e)) => Ok(RatFn::q_pow(table, e as i64 * k * d as i64)),
        Some(ShiftKind::Arithmetic) => Ok(RatFn::from_int(table, k).pow(d as i64)?),
        None => Err(Error::NoShiftVar),
    }
}

fn sample_point(table: &VarTable) -> Vec<u64> {
    (0..table.nvars()).map(|i| 1_000_003 + 7919 * i as u64 * (i as u64 + 3)).collect()
}

/// Lowest `(order, degree)` operator `sum x_(i,d) v^d S^i` annihilating `terms`
/// (indexed from 0), or `None` within the budget.
pub fn guess_minimal(terms: &[RatFn], table: &Arc<VarTable>, cfg: &GuessConfig) -> Result<Option<OreOp>> {
    let terms: Vec<RatFn> = terms.iter().map(|t| t.retag(table)).collect::<Result<_>>()?;
    if terms.iter().all(RatFn::is_zero) {
        return Ok(Some(OreOp::one(table)));
    }
    let point = sample_point(table);
    let modular: Vec<Option<u64>> = terms.iter().map(|t| t.eval_mod(&point, PRIME)).collect();
    let vmod: Vec<Option<u64>> = (0..terms.len() as i64)
        .map(|k| shift_power(table, k, 1).ok().and_then(|v| v.eval_mod(&point, PRIME)))
        .collect();
    for order in 1..=cfg.max_order {
        for degree in 0..=cfg.max_degree {
            let unknowns = (order + 1) * (degree + 1);
            if terms.len() < order + unknowns + 1 {
                continue;
            }
            let rows = terms.len() - order;
            if full_rank_mod(&modular, &vmod, order, degree, rows) {
                continue;
            }
            if let Some(op) = solve_ansatz(&terms, table, order, degree, cfg.margin)? {
                return Ok(Some(op));
            }
        }
    }
    Ok(None)
}

fn full_rank_mod(terms: &[Option<u64>], v: &[Option<u64>], order: usize, degree: usize, rows: usize) -> bool {
    let mut m = Vec::with_capacity(rows);
    for k in 0..rows {
        let Some(vk) = v[k] else { return false };
        let mut row = Vec::with_capacity((order + 1) * (degree + 1));
        for i in 0..=order {
            let Some(c) = terms[k + i] else { return false };
            let mut p = c;
            for _ in 0..=degree {
                row.push(p);
                p = crate::arith::poly::mul_mod(p, vk, PRIME);
            }
        }
        m.push(row);
    }
    rank_mod(&m, PRIME) == (order + 1) * (degree + 1)
}

fn solve_ansatz(
    terms: &[RatFn],
    table: &Arc<VarTable>,
    order: usize,
    degree: usize,
    margin: usize,
) -> Result<Option<OreOp>> {
    let unknowns = (order + 1) * (degree + 1);
    let rows = terms.len() - order;
    // rows are scaled by their first nonzero term, which keeps entries small for
    // hypergeometric-like sequences
    let build = |k: usize| -> Result<Vec<RatFn>> {
        let scale = terms[k..=k + order].iter().find(|t| !t.is_zero()).cloned().unwrap_or_else(|| RatFn::one(table));
        let ratios: Vec<RatFn> = terms[k..=k + order].iter().map(|t| t.div(&scale)).collect();
        let mut row = Vec::with_capacity(unknowns);
        for r in &ratios {
            for d in 0..=degree {
                row.push(shift_power(table, k as i64, d)?.mul(r));
            }
        }
        Ok(row)
    };
    let use_rows = rows.min(unknowns + margin);
    let mut m: Vec<Vec<RatFn>> = (0..use_rows).map(build).collect::<Result<_>>()?;
    loop {
        let ns = nullspace(&m, unknowns, table);
        let mut cands: Vec<OreOp> = ns.iter().map(|x| ansatz_operator(x, table, order, degree)).collect();
        cands.sort_by_key(|op| (op.order(), support(op)));
        let found = cands.into_iter().find(|op| op.order() == order && check_annihilates(op, terms, 0).is_ok());
        if let Some(op) = found {
            return Ok(Some(op.primitive()));
        }
        if m.len() == rows || ns.is_empty() {
            return Ok(None);
        }
        m = (0..rows).map(build).collect::<Result<_>>()?;
    }
}

fn support(op: &OreOp) -> usize {
    op.coeffs().values().map(|c| c.num().len()).sum()
}

fn ansatz_operator(x: &[RatFn], table: &Arc<VarTable>, order: usize, degree: usize) -> OreOp {
    let v = RatFn::shift_var(table).expect("shift variable present");
    let coeffs = (0..=order).map(|i| {
        let mut c = RatFn::zero(table);
        let mut p = RatFn::one(table);
        for d in 0..=degree {
            c = c.add(&x[i * (degree + 1) + d].mul(&p));
            p = p.mul(&v);
        }
        (i as i32, c)
    });
    OreOp::from_coeffs(table, coeffs)
}

/// Proof that the sequence of `(proven, initials)` is annihilated by `guessed`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub proven: OreOp,
    pub guessed: OreOp,
    /// `l = u * proven = w * guessed`.
    pub lclm: (OreOp, OreOp, OreOp),
    /// Number of terms of `guessed` applied to the sequence that were checked to vanish.
    pub checks: usize,
    /// `w` has no vanishing leading coefficient beyond the checked range.
    pub leading_ok: bool,
    pub valid: bool,
    /// Index of the first term the guessed recurrence fails to reproduce.
    pub witness: Option<i64>,
}

/// Certifies `guessed` against the sequence defined by `proven` and its initials
/// (terms from index 0).
pub fn certify(proven: &OreOp, initials: &[RatFn], guessed: &OreOp) -> Result<Certificate> {
    let proven = normalize(proven);
    let guessed = normalize(guessed);
    let (l, u, w) = proven.lclm(&guessed)?;
    if u.mul(&proven) != l || w.mul(&guessed) != l {
        return Err(Error::Invalid("lclm cofactors do not reproduce the multiple".into()));
    }
    // s = guessed(c) satisfies w s = u proven c = 0 wherever u is finite
    let mut bad: Vec<i64> = w.singular_indices(0);
    for c in u.coeffs().values() {
        bad.extend(c.pole_indices(0));
    }
    let ow = w.max_exp().unwrap_or(0) as i64;
    let last = bad.iter().copied().max().map_or(ow - 1, |m| m.max(-1) + ow);
    let checks = (last + 1).max(ow).max(0) as usize;
    let gen = SeqGen::new(&proven, initials.to_vec(), 0)?;
    let hi = guessed.max_exp().unwrap_or(0) as usize;
    let terms = gen.unroll(checks + hi)?;
    let (first, s) = guessed.apply_to_seq(&terms, 0)?;
    let witness = s.iter().position(|x| !x.is_zero()).map(|i| first + i as i64 + hi as i64);
    let leading_ok = !w.leading_coeff().is_zero();
    Ok(Certificate {
        proven,
        guessed,
        lclm: (l, u, w),
        checks: s.len(),
        leading_ok,
        valid: witness.is_none() && leading_ok,
        witness,
    })
}

/// `c(k) = c(0) prod_(j<k) r(j)` for a first-order recurrence.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub initial: RatFn,
    pub ratio: RatFn,
    pub shape: Shape,
}

/// Recognized shape of `prod_(j<k) r(j)`.
#[derive(Clone, Debug)]
pub enum Shape {
    /// `scalar^k q^((a k^2 + b k) / 2) prod (b_i; q^(e_i))_k^(s_i)`.
    Hypergeometric { scalar: RatFn, quad: i64, lin: i64, pochhammers: Vec<(RatFn, i64, i32)> },
    /// No pattern matched; the explicit product.
    Product,
}

/// Closed form of the solution of a first-order operator `p1 S + p0`.
pub fn first_order_closed_form(op: &OreOp, initial: &RatFn) -> Result<ClosedForm> {
    let op = normalize(op);
    if op.order() != 1 || op.min_exp() != Some(0) {
        return Err(Error::Invalid(format!("expected a first-order operator, got order {}", op.order())));
    }
    let ratio = op.coeff(0).neg().checked_div(&op.coeff(1))?;
    let shape = match_shape(&ratio).unwrap_or(Shape::Product);
    Ok(ClosedForm { initial: initial.retag(op.table())?, ratio, shape })
}

// r(v) = A v^g prod (1 - b_i v^(e_i))^(s_i)
fn match_shape(r: &RatFn) -> Option<Shape> {
    let table = r.table();
    let s = table.shift_index()?;
    let ShiftKind::Geometric(ev) = table.shift_kind()? else { return None };
    let mut scalar = RatFn::one(table);
    let mut g: i64 = 0;
    let mut pochhammers = Vec::new();
    for (poly, sign) in [(r.num(), 1i32), (r.den(), -1i32)] {
        let content = poly.monomial_content();
        let gv = content.exp(s) as i64;
        let rest = poly.div_monomial(crate::arith::Monomial::var(s, content.exp(s)));
        let parts = rest.coefficients_in(s);
        let nonzero: Vec<(usize, &crate::arith::ZPoly)> =
            parts.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let c0 = RatFn::from_poly(table, parts[0].clone());
        match nonzero.len() {
            1 => {}
            2 => {
                let (e, ce) = nonzero[1];
                let b = RatFn::from_poly(table, ce.clone()).neg().div(&c0);
                pochhammers.push((b, e as i64 * ev as i64, sign));
            }
            _ => return None,
        }
        if sign > 0 {
            scalar = scalar.mul(&c0);
            g += gv;
        } else {
            scalar = scalar.div(&c0);
            g -= gv;
        }
    }
    // move the pure q-power of the scalar into the exponent
    let qd = crate::series::valuation(&scalar)?;
    let scalar = scalar.mul(&RatFn::q_pow(table, -qd));
    let ge = g * ev as i64;
    Some(Shape::Hypergeometric { scalar, quad: ge, lin: 2 * qd - ge, pochhammers })
}

impl ClosedForm {
    /// Exact value at index `k >= 0`.
    pub fn eval(&self, k: usize) -> Result<RatFn> {
        let table = self.ratio.table();
        let body = match &self.shape {
            Shape::Hypergeometric { scalar, quad, lin, pochhammers } => {
                let ki = k as i64;
                let mut acc = scalar.pow(ki)?.mul(&RatFn::q_pow(table, (quad * ki * ki + lin * ki) / 2));
                for (b, e, s) in pochhammers {
                    let p = qpoch(b, &RatFn::q_pow(table, *e), k);
                    acc = if *s > 0 { acc.mul(&p) } else { acc.checked_div(&p)? };
                }
                acc
            }
            Shape::Product => {
                let mut acc = RatFn::one(table);
                for j in 0..k as i64 {
                    acc = acc.mul(&self.ratio.eval_at_power(j)?);
                }
                acc
            }
        };
        Ok(self.initial.mul(&body))
    }
}

fn exponent_text(quad: i64, lin: i64) -> Option<String> {
    // (quad k^2 + lin k) / 2 written as c k (a k + b)
    if quad % 2 != 0 || lin % 2 != 0 {
        return Some(format!("({quad}k^2{lin:+}k)/2"));
    }
    let (a, b) = (quad / 2, lin / 2);
    if a == 0 && b == 0 {
        return None;
    }
    if a == 0 {
        return Some(if b == 1 { "k".into() } else { format!("{b}k") });
    }
    let g = num_integer::Integer::gcd(&a, &b) * a.signum();
    let (a1, b1) = (a / g, b / g);
    let inner = match (a1, b1) {
        (1, 0) => "k".to_string(),
        (_, 0) => format!("{a1}k"),
        (1, _) => format!("k{b1:+}"),
        _ => format!("{a1}k{b1:+}"),
    };
    let lead = match g {
        1 => String::new(),
        -1 => "-".into(),
        _ => g.to_string(),
    };
    if b1 == 0 {
        let kk = if a1 == 1 { "k^2".to_string() } else { format!("{a1}k^2") };
        return Some(format!("{lead}{kk}"));
    }
    Some(format!("{lead}k({inner})"))
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::expr::format_ratfn;
        let mut parts = Vec::new();
        if !self.initial.is_one() {
            parts.push(wrap(&format_ratfn(&self.initial)));
        }
        match &self.shape {
            Shape::Hypergeometric { scalar, quad, lin, pochhammers } => {
                if !scalar.is_one() {
                    parts.push(format!("{}^k", wrap(&format_ratfn(scalar))));
                }
                if let Some(e) = exponent_text(*quad, *lin) {
                    parts.push(if e == "k" { "q^k".into() } else { format!("q^({e})") });
                }
                for (b, e, s) in pochhammers {
                    let base = if *e == 1 { "q".to_string() } else { format!("q^{e}") };
                    let p = format!("({};{base})_k", format_ratfn(b));
                    parts.push(if *s > 0 { p } else { format!("1/{p}") });
                }
            }
            Shape::Product => {
                parts.push(format!("prod_(j=0)^(k-1) ({})|_(k=j)", format_ratfn(&self.ratio)));
            }
        }
        if parts.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", parts.join("*"))
    }
}

fn wrap(s: &str) -> String {
    if s.chars().all(|c| c.is_alphanumeric() || c == '^') {
        s.to_string()
    } else {
        format!("({s})")
    }
}

/// Per-index comparison of two lists of exact values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<(usize, bool)>,
}

impl IdentityReport {
    pub fn all_equal(&self) -> bool {
        self.checks.iter().all(|(_, e)| *e)
    }
}

/// Compares `lhs(n)` and `rhs(n)` for `n <= up_to`.
pub fn verify_identity(
    lhs: impl Fn(usize) -> Result<RatFn>,
    rhs: impl Fn(usize) -> Result<RatFn>,
    up_to: usize,
) -> Result<IdentityReport> {
    let mut checks = Vec::with_capacity(up_to + 1);
    for n in 0..=up_to {
        checks.push((n, lhs(n)? == rhs(n)?));
    }
    Ok(IdentityReport { checks })
}
