//! Compatibility of operators with factorial bases, and the induced recurrence operators.
//!
//! An operator `L` is `(A, B)`-compatible with a basis in `t` sections when
//! `L B_k(n) = sum_(i=-A..B) alpha_(r,i)(m) B_(k+i)(n)` for `k = m t + r`.

use std::sync::Arc;

use crate::arith::{RatFn, ShiftKind, VarTable};
use crate::basis::{BetaKind, FactorialBasis, Seed};
use crate::error::{Error, Result};
use crate::linalg::nullspace;
use crate::ore::{OreMat, OreOp};

pub const DEFAULT_SHIFT_CAP: usize = 6;
pub const DEFAULT_VERIFY_K: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    lower: usize,
    upper: usize,
    // alpha[r][i + lower] as a function of the section variable
    alpha: Vec<Vec<RatFn>>,
}

impl Compatibility {
    pub fn new(lower: usize, upper: usize, alpha: Vec<Vec<RatFn>>) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|row| row.len() != lower + upper + 1) {
            return Err(Error::Invalid("compatibility table has the wrong shape".into()));
        }
        Ok(Compatibility { lower, upper, alpha })
    }

    /// `A`.
    pub fn lower(&self) -> usize {
        self.lower
    }

    /// `B`.
    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn sections(&self) -> usize {
        self.alpha.len()
    }

    fn table(&self) -> &Arc<VarTable> {
        self.alpha[0][0].table()
    }

    /// `alpha_(r,i)(m)` for `-A <= i <= B`.
    pub fn alpha(&self, r: usize, i: i64) -> RatFn {
        let j = i + self.lower as i64;
        if j < 0 || j > (self.lower + self.upper) as i64 {
            return RatFn::zero(self.table());
        }
        self.alpha[r][j as usize].clone()
    }

    #[cfg(test)]
    pub(crate) fn alpha_mut(&mut self, r: usize, i: i64) -> &mut RatFn {
        &mut self.alpha[r][(i + self.lower as i64) as usize]
    }

    /// `alpha_i(k)` at a concrete index.
    pub fn alpha_at(&self, k: i64, i: i64) -> Result<RatFn> {
        let t = self.sections() as i64;
        self.alpha(k.rem_euclid(t) as usize, i).eval_at_power(k.div_euclid(t))
    }

    /// The same compatibility in `t * lambda` sections.
    pub fn refine(&self, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::Usage("refinement factor must be positive".into()));
        }
        let t = self.sections();
        let mut alpha = Vec::with_capacity(t * lambda);
        for rp in 0..t * lambda {
            let (r, c) = (rp % t, (rp / t) as i64);
            let row = self.alpha[r].iter().map(|x| x.reindex(lambda as u32, c)).collect::<Result<Vec<_>>>()?;
            alpha.push(row);
        }
        Ok(Compatibility { lower: self.lower, upper: self.upper, alpha })
    }

    /// Drops identically vanishing outer columns.
    pub fn trimmed(&self) -> Self {
        let mut lower = self.lower as i64;
        let mut upper = self.upper as i64;
        while lower > 0 && self.alpha.iter().enumerate().all(|(r, _)| self.alpha(r, -lower).is_zero()) {
            lower -= 1;
        }
        while upper > 0 && self.alpha.iter().enumerate().all(|(r, _)| self.alpha(r, upper).is_zero()) {
            upper -= 1;
        }
        let alpha = (0..self.sections()).map(|r| (-lower..=upper).map(|i| self.alpha(r, i)).collect()).collect();
        Compatibility { lower: lower as usize, upper: upper as usize, alpha }
    }

    /// `R(L) = sum_i alpha_(-i)(k + i) S^i` for a single section.
    pub fn rec_operator(&self) -> Result<OreOp> {
        if self.sections() != 1 {
            return Err(Error::Invalid("recurrence operator needs one section; use the matrix form".into()));
        }
        self.rec_matrix().map(|m| m.into_scalar().expect("1x1 matrix"))
    }

    /// Matrix of recurrence: row `j` is the target section, column `r` the source section.
    pub fn rec_matrix(&self) -> Result<OreMat> {
        let t = self.sections() as i64;
        let table = self.table().clone();
        let mut entries = vec![vec![OreOp::zero(&table); t as usize]; t as usize];
        for j in 0..t {
            for r in 0..t {
                let mut terms = Vec::new();
                for i in -(self.lower as i64)..=self.upper as i64 {
                    if (j - r - i).rem_euclid(t) != 0 {
                        continue;
                    }
                    let d = (j - r - i) / t;
                    let c = self.alpha(r as usize, i);
                    if !c.is_zero() {
                        terms.push((d as i32, c.substitute_shift(d)?));
                    }
                }
                entries[j as usize][r as usize] = OreOp::from_coeffs(&table, terms);
            }
        }
        Ok(OreMat::from_entries(entries))
    }
}

/// `x_(r)(k + delta)` for `k = m t + r`, as a function of `m`.
fn at_offset(f: &[RatFn], r: usize, delta: i64) -> Result<RatFn> {
    let t = f.len() as i64;
    let idx = r as i64 + delta;
    f[idx.rem_euclid(t) as usize].substitute_shift(idx.div_euclid(t))
}

/// Value of a per-section function at the concrete index `k`.
fn at_index(f: &[RatFn], k: i64) -> Result<RatFn> {
    let t = f.len() as i64;
    f[k.rem_euclid(t) as usize].eval_at_power(k.div_euclid(t))
}

/// `gamma^k` per section, as a function of `m`.
fn gamma_power(basis: &FactorialBasis) -> Result<Vec<RatFn>> {
    let table = basis.table();
    let t = basis.sections() as i64;
    (0..t)
        .map(|r| match basis.beta() {
            BetaKind::Geometric(e) => RatFn::q_v_monomial(table, 1, e as i64 * r, (e as i64 * t) as u32),
            BetaKind::Arithmetic => Ok(RatFn::one(table)),
        })
        .collect()
}

/// Multiplication by `beta(n)` is `(0, 1)`-compatible with every factorial basis.
pub fn compat_mul_beta(basis: &FactorialBasis) -> Compatibility {
    let alpha = (0..basis.sections()).map(|r| vec![basis.root(r), basis.a(r).inv().expect("a_r is nonzero")]).collect();
    Compatibility { lower: 0, upper: 1, alpha }
}

/// `(A, 0)`-compatibility of the shift `E` with the least `A <= cap`.
///
/// With `alpha_(-j)(k) = gamma^k a(k-1)...a(k-j) u_j(k)`, expanding `E B_(k+1)`
/// gives `u_(j+1)(k+1) - u_(j+1)(k) = g_j(k) u_j(k)` with
/// `g_j(k) = (gamma rho(k-j) + nu - rho(k)) / gamma` and `u_0 = 1`. For
/// geometric or arithmetic roots these sums close symbolically; otherwise the
/// table is reconstructed from exact values.
pub fn compat_shift(basis: &FactorialBasis, cap: Option<usize>) -> Result<Compatibility> {
    if *basis.seed() != Seed::One {
        return Err(Error::NotCompatible(format!(
            "{} has B_0 != 1, so E B_k is not a combination of basis elements",
            basis.label()
        )));
    }
    let cap = cap.unwrap_or(DEFAULT_SHIFT_CAP);
    let comp = match shift_symbolic(basis, cap)? {
        Some(c) => c,
        None => shift_interpolated(basis, cap)?,
    };
    let report = compat_verify(basis, &shift_operator(basis), &comp, DEFAULT_VERIFY_K)?;
    if !report.ok {
        return Err(Error::NotCompatible(format!("{} fails at {:?}", basis.label(), report.failure)));
    }
    Ok(comp)
}

fn g_values(basis: &FactorialBasis, rho: &[RatFn], j: i64) -> Result<Vec<RatFn>> {
    let (gamma, nu) = basis.beta_action();
    let (gamma, nu) = (gamma.retag(basis.table())?, nu.retag(basis.table())?);
    (0..basis.sections()).map(|r| Ok(gamma.mul(&at_offset(rho, r, -j)?).add(&nu).sub(&rho[r]).div(&gamma))).collect()
}

fn alpha_from_u(basis: &FactorialBasis, gpow: &[RatFn], us: &[Vec<RatFn>]) -> Result<Compatibility> {
    let t = basis.sections();
    let a: Vec<RatFn> = (0..t).map(|r| basis.a(r).clone()).collect();
    let lower = us.len() - 1;
    let mut alpha = vec![Vec::with_capacity(lower + 1); t];
    for (r, row) in alpha.iter_mut().enumerate() {
        for j in (0..=lower).rev() {
            let mut p = gpow[r].mul(&us[j][r]);
            for l in 1..=j as i64 {
                p = p.mul(&at_offset(&a, r, -l)?);
            }
            row.push(p);
        }
    }
    Ok(Compatibility { lower, upper: 0, alpha })
}

fn shift_symbolic(basis: &FactorialBasis, cap: usize) -> Result<Option<Compatibility>> {
    let t = basis.sections();
    let table = basis.table();
    let rho: Vec<RatFn> = (0..t).map(|r| basis.root(r)).collect();
    let mut us = vec![vec![RatFn::one(table); t]];
    for j in 0..=cap {
        let g = g_values(basis, &rho, j as i64)?;
        let h: Vec<RatFn> = g.iter().zip(&us[j]).map(|(g, u)| g.mul(u)).collect();
        let mut anti = Vec::with_capacity(t);
        for hs in &h {
            match antidifference(hs)? {
                Some(f) => anti.push(f),
                None => return Ok(None),
            }
        }
        // sum over l < k of h(l), for k in each section
        let mut below = RatFn::zero(table);
        for l in 0..j as i64 {
            below = below.add(&at_index(&h, l)?);
        }
        let mut next = Vec::with_capacity(t);
        for r in 0..t {
            let mut acc = below.neg();
            for (s, f) in anti.iter().enumerate() {
                acc = acc.add(&f.substitute_shift(i64::from(s < r))?);
            }
            next.push(acc);
        }
        if next.iter().all(RatFn::is_zero) {
            let gpow = gamma_power(basis)?;
            return alpha_from_u(basis, &gpow, &us).map(Some);
        }
        us.push(next);
    }
    Err(Error::NotCompatible(format!("{}: E is not (A,0)-compatible for A <= {cap}", basis.label())))
}

/// `F(M) = sum_(m < M) h(m)` when `h` is a Laurent polynomial in the section variable
/// and the sum is again rational.
fn antidifference(h: &RatFn) -> Result<Option<RatFn>> {
    let table = h.table();
    if h.is_zero() {
        return Ok(Some(h.clone()));
    }
    let s = table.shift_index().ok_or(Error::NoShiftVar)?;
    let den = h.den();
    let (dlo, dhi) = (den.low_degree_in(s).unwrap_or(0), den.degree_in(s).unwrap_or(0));
    if dlo != dhi {
        return Ok(None);
    }
    let dconst = RatFn::from_poly(table, den.coefficients_in(s)[dhi as usize].clone());
    let coeffs = h.num().coefficients_in(s);
    match table.shift_kind().expect("shift") {
        ShiftKind::Geometric(e) => {
            let v = RatFn::shift_var(table)?;
            let mut acc = RatFn::zero(table);
            for (d, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let deg = d as i64 - dhi as i64;
                if deg == 0 {
                    return Ok(None);
                }
                let c = RatFn::from_poly(table, c.clone()).div(&dconst);
                let one = RatFn::one(table);
                let term = v.pow(deg)?.sub(&one).div(&RatFn::q_pow(table, e as i64 * deg).sub(&one));
                acc = acc.add(&c.mul(&term));
            }
            Ok(Some(acc))
        }
        ShiftKind::Arithmetic => {
            if dhi != 0 {
                return Ok(None);
            }
            let p = h.clone();
            let deg = coeffs.len();
            // forward differences at 0
            let mut vals: Vec<RatFn> = (0..=deg as i64).map(|x| p.eval_at_power(x)).collect::<Result<_>>()?;
            let v = RatFn::shift_var(table)?;
            let mut acc = RatFn::zero(table);
            let mut binom = v.clone();
            for j in 0..=deg {
                acc = acc.add(&vals[0].mul(&binom));
                // binom(M, j + 2)
                let f = v.sub(&RatFn::from_int(table, j as i64 + 1)).div(&RatFn::from_int(table, j as i64 + 2));
                binom = binom.mul(&f);
                vals = vals.windows(2).map(|w| w[1].sub(&w[0])).collect();
                if vals.is_empty() {
                    break;
                }
            }
            Ok(Some(acc))
        }
    }
}

const FIT_POINTS: usize = 40;

fn shift_interpolated(basis: &FactorialBasis, cap: usize) -> Result<Compatibility> {
    let t = basis.sections();
    let table = basis.table();
    let rho: Vec<RatFn> = (0..t).map(|r| basis.root(r)).collect();
    let a: Vec<RatFn> = (0..t).map(|r| basis.a(r).clone()).collect();
    let (gamma, nu) = basis.beta_action();
    let (gamma, nu) = (gamma.retag(table)?, nu.retag(table)?);
    let kmax = (FIT_POINTS * t) as i64 + cap as i64;
    // u[j][k] for k >= j - 1
    let mut u = vec![vec![RatFn::one(table); kmax as usize + 1]];
    let mut lower = 0;
    for j in 0..=cap {
        let mut next = vec![RatFn::zero(table); kmax as usize + 1];
        for k in j as i64..kmax {
            let g = gamma.mul(&at_index(&rho, k - j as i64)?).add(&nu).sub(&at_index(&rho, k)?).div(&gamma);
            next[k as usize + 1] = next[k as usize].add(&g.mul(&u[j][k as usize]));
        }
        if next.iter().all(RatFn::is_zero) {
            break;
        }
        u.push(next);
        lower = j + 1;
        if j == cap {
            return Err(Error::NotCompatible(format!("{}: E is not (A,0)-compatible for A <= {cap}", basis.label())));
        }
    }
    let mut alpha = vec![Vec::new(); t];
    for (r, row) in alpha.iter_mut().enumerate() {
        for j in (0..=lower).rev() {
            let mut pts = Vec::new();
            for m in 0..FIT_POINTS as i64 {
                let k = m * t as i64 + r as i64;
                if k < j as i64 {
                    continue;
                }
                let mut val = basis.beta_value(k).retag(table)?.mul(&u[j][k as usize]);
                if basis.beta() == BetaKind::Arithmetic {
                    val = u[j][k as usize].clone();
                }
                for l in 1..=j as i64 {
                    val = val.mul(&at_index(&a, k - l)?);
                }
                pts.push((m, val));
            }
            let f = fit_rational(table, &pts).ok_or_else(|| {
                Error::NotCompatible(format!("{}: no rational shift coefficient found for section {r}", basis.label()))
            })?;
            row.push(f);
        }
    }
    Ok(Compatibility { lower, upper: 0, alpha })
}

/// Rational function of the section variable through the given points, of least total degree.
pub fn fit_rational(table: &Arc<VarTable>, pts: &[(i64, RatFn)]) -> Option<RatFn> {
    let v = RatFn::shift_var(table).ok()?;
    let point = |m: i64| RatFn::one(table).mul(&v).eval_at_power(m);
    let xs: Vec<RatFn> = pts.iter().map(|(m, _)| point(*m)).collect::<Result<_>>().ok()?;
    for total in 0..pts.len().saturating_sub(3) {
        for dd in 0..=total {
            let dn = total - dd;
            let ncols = dn + dd + 2;
            if ncols + 2 > pts.len() {
                continue;
            }
            let rows: Vec<Vec<RatFn>> = xs
                .iter()
                .zip(pts)
                .take(ncols + 2)
                .map(|(x, (_, y))| {
                    let mut row: Vec<RatFn> = (0..=dn as i64).map(|i| x.pow(i).expect("nonzero point")).collect();
                    row.extend((0..=dd as i64).map(|i| y.mul(&x.pow(i).expect("nonzero point")).neg()));
                    row
                })
                .collect();
            let ns = nullspace(&rows, ncols, table);
            let Some(sol) = ns.into_iter().next() else { continue };
            let poly = |cs: &[RatFn]| cs.iter().rev().fold(RatFn::zero(table), |acc, c| acc.mul(&v).add(c));
            let den = poly(&sol[dn + 1..]);
            if den.is_zero() {
                continue;
            }
            let f = poly(&sol[..=dn]).div(&den);
            let fits = pts.iter().all(|(m, y)| f.eval_at_power(*m).is_ok_and(|z| z == *y));
            if fits {
                return Some(f);
            }
        }
    }
    None
}

/// `E` as an operator on sequences in `n`.
pub fn shift_operator(basis: &FactorialBasis) -> OreOp {
    OreOp::shift(&basis.ctx().n, 1)
}

/// Multiplication by `beta(n)` as an operator on sequences in `n`.
pub fn beta_operator(basis: &FactorialBasis) -> OreOp {
    let n = &basis.ctx().n;
    let c = match basis.beta() {
        BetaKind::Geometric(e) => RatFn::q_v_monomial(n, 1, 0, e).expect("shift variable"),
        BetaKind::Arithmetic => RatFn::shift_var(n).expect("shift variable"),
    };
    OreOp::scalar(c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub checks: usize,
    /// First `(k, n)` at which the identity fails.
    pub failure: Option<(usize, i64)>,
}

/// Checks `L B_k(n) = sum_i alpha_i(k) B_(k+i)(n)` for `k <= kmax` at
/// `n = 0..=k+A+B+2`, which determines both sides as polynomials in `beta(n)`.
pub fn compat_verify(basis: &FactorialBasis, op: &OreOp, comp: &Compatibility, kmax: usize) -> Result<VerifyReport> {
    if !comp.sections().is_multiple_of(basis.sections()) && !basis.sections().is_multiple_of(comp.sections()) {
        return Err(Error::Invalid("section counts do not align".into()));
    }
    let table = basis.table();
    let (lo, hi) = (comp.lower(), comp.upper());
    let reach = op.max_exp().unwrap_or(0).max(0) as i64;
    if op.min_exp().unwrap_or(0) < 0 {
        return Err(Error::Invalid("operator must not contain negative powers of E".into()));
    }
    let nmax = (kmax + lo + hi + 2) as i64;
    let steps = basis.step_values(kmax + hi)?;
    let elems: Vec<Vec<RatFn>> = (0..=nmax + reach).map(|n| basis.elements_with_steps(n, &steps)).collect();
    let mut checks = 0;
    for k in 0..=kmax {
        let rhs_coeffs: Result<Vec<(usize, RatFn)>> = (-(lo as i64)..=hi as i64)
            .filter(|i| k as i64 + i >= 0)
            .map(|i| Ok(((k as i64 + i) as usize, comp.alpha_at(k as i64, i)?)))
            .collect();
        let rhs_coeffs = match rhs_coeffs {
            Ok(c) => c,
            Err(Error::SingularEvaluation { .. }) => {
                return Ok(VerifyReport { ok: false, checks, failure: Some((k, 0)) })
            }
            Err(e) => return Err(e),
        };
        for n in 0..=(k + lo + hi + 2) as i64 {
            let mut lhs = RatFn::zero(table);
            for (i, c) in op.coeffs() {
                let x = &elems[(n + *i as i64) as usize][k];
                if x.is_zero() {
                    continue;
                }
                lhs = lhs.add(&c.eval_at_power(n)?.retag(table)?.mul(x));
            }
            let mut rhs = RatFn::zero(table);
            for (j, c) in &rhs_coeffs {
                rhs = rhs.add(&c.mul(&elems[n as usize][*j]));
            }
            checks += 1;
            if lhs != rhs {
                return Ok(VerifyReport { ok: false, checks, failure: Some((k, n)) });
            }
        }
    }
    Ok(VerifyReport { ok: true, checks, failure: None })
}

/// Verified `(E, beta)` compatibilities of a basis.
#[derive(Clone, Debug)]
pub struct BasisCompat {
    pub shift: Compatibility,
    pub beta: Compatibility,
}

impl BasisCompat {
    pub fn compute(basis: &FactorialBasis) -> Result<Self> {
        Ok(BasisCompat { shift: compat_shift(basis, None)?, beta: compat_mul_beta(basis) })
    }

    pub fn refine(&self, lambda: usize) -> Result<Self> {
        Ok(BasisCompat { shift: self.shift.refine(lambda)?, beta: self.beta.refine(lambda)? })
    }
}

/// Image of an operator `sum_l p_l(q^n) E^l` under the recurrence map, in `sections` sections.
///
/// Each `p_l` must be a polynomial in `beta(n)`, with coefficients free of `q^n`.
pub fn compile_expr(basis: &FactorialBasis, expr: &OreOp, comp: &BasisCompat, sections: usize) -> Result<OreMat> {
    let t = comp.shift.sections();
    if sections == 0 || !sections.is_multiple_of(t) {
        return Err(Error::Usage(format!("{sections} sections is not a multiple of the basis' {t}")));
    }
    let comp = comp.refine(sections / t)?;
    let rb = comp.beta.rec_matrix()?;
    let re = comp.shift.rec_matrix()?;
    let ktab = basis.table().clone();
    let n_tab = expr.table();
    let s = n_tab.shift_index().ok_or(Error::NoShiftVar)?;
    let e = match basis.beta() {
        BetaKind::Geometric(e) => e,
        BetaKind::Arithmetic => 1,
    };
    if expr.min_exp().unwrap_or(0) < 0 {
        return Err(Error::Invalid("operator must not contain negative powers of E".into()));
    }
    let mut epow = vec![OreMat::identity(&ktab, sections)];
    let mut bpow = vec![OreMat::identity(&ktab, sections)];
    let mut out = OreMat::zero(&ktab, sections);
    for (l, p) in expr.coeffs() {
        if p.den().contains_var(s) {
            return Err(Error::Invalid(format!("coefficient of E^{l} is not polynomial in the basis variable")));
        }
        let dconst = RatFn::from_poly(&ktab, p.den().clone());
        while epow.len() <= *l as usize {
            let next = epow.last().expect("nonempty").mul(&re);
            epow.push(next);
        }
        let mut acc = OreMat::zero(&ktab, sections);
        for (j, c) in p.num().coefficients_in(s).into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !(j as u32).is_multiple_of(e) {
                return Err(Error::Invalid(format!("q^({j}n) is not a power of beta(n) = q^({e}n)")));
            }
            let d = j / e as usize;
            while bpow.len() <= d {
                let next = bpow.last().expect("nonempty").mul(&rb);
                bpow.push(next);
            }
            let c = RatFn::from_poly(&ktab, c).div(&dconst);
            acc = acc.add(&bpow[d].scale_left(&c));
        }
        out = out.add(&acc.mul(&epow[*l as usize]));
    }
    Ok(out)
}
