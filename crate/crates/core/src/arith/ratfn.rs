//! Rational functions in `q`, parameters and one shift variable.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gcd::gcd_cofactors;
use super::monomial::Monomial;
use super::poly::{inv_mod, Poly, QPoly, ZPoly};
use super::vars::{tables_match, ShiftKind, VarTable};
use crate::error::{Error, Result};

/// `num / den` with `num`, `den` coprime in `Z[q, params, v]` and the leading
/// coefficient of `den` positive. Zero is `0 / 1`.
#[derive(Clone)]
pub struct RatFn {
    table: Arc<VarTable>,
    num: ZPoly,
    den: ZPoly,
}

impl RatFn {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        RatFn { table: table.clone(), num: ZPoly::zero(), den: ZPoly::one() }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::from_int(table, 1)
    }

    pub fn from_int(table: &Arc<VarTable>, c: i64) -> Self {
        RatFn { table: table.clone(), num: ZPoly::constant(BigInt::from(c)), den: ZPoly::one() }
    }

    pub fn from_bigint(table: &Arc<VarTable>, c: BigInt) -> Self {
        RatFn { table: table.clone(), num: ZPoly::constant(c), den: ZPoly::one() }
    }

    pub fn from_rational(table: &Arc<VarTable>, c: &BigRational) -> Self {
        RatFn { table: table.clone(), num: ZPoly::constant(c.numer().clone()), den: ZPoly::constant(c.denom().clone()) }
    }

    /// A polynomial in the table's variables.
    pub fn from_poly(table: &Arc<VarTable>, p: ZPoly) -> Self {
        RatFn { table: table.clone(), num: p, den: ZPoly::one() }
    }

    pub fn from_parts(table: &Arc<VarTable>, num: ZPoly, den: ZPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(table.clone(), num, den))
    }

    pub fn from_qpolys(table: &Arc<VarTable>, num: &QPoly, den: &QPoly) -> Result<Self> {
        let (ln, zn) = num.to_z();
        let (ld, zd) = den.to_z();
        Self::from_parts(table, zn.scale(&ld), zd.scale(&ln))
    }

    /// `x_i`, where index 0 is `q`.
    pub fn var(table: &Arc<VarTable>, i: usize) -> Self {
        assert!(i < table.nvars());
        Self::from_poly(table, ZPoly::var(i))
    }

    pub fn q(table: &Arc<VarTable>) -> Self {
        Self::var(table, 0)
    }

    pub fn param(table: &Arc<VarTable>, name: &str) -> Result<Self> {
        let i = table.param_index(name).ok_or_else(|| Error::Usage(format!("undeclared parameter `{name}`")))?;
        Ok(Self::var(table, i))
    }

    pub fn shift_var(table: &Arc<VarTable>) -> Result<Self> {
        let i = table.shift_index().ok_or(Error::NoShiftVar)?;
        Ok(Self::var(table, i))
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(table: &Arc<VarTable>, e: i64) -> Self {
        let m = Monomial::var(0, e.unsigned_abs() as u32);
        let p = ZPoly::monomial(m, BigInt::one());
        if e >= 0 {
            Self::from_poly(table, p)
        } else {
            RatFn { table: table.clone(), num: ZPoly::one(), den: p }
        }
    }

    /// `c * q^a * v^d` with `d >= 0`.
    pub fn q_v_monomial(table: &Arc<VarTable>, c: i64, a: i64, d: u32) -> Result<Self> {
        let s = table.shift_index().ok_or(Error::NoShiftVar)?;
        let v = Self::from_poly(table, ZPoly::monomial(Monomial::var(s, d), BigInt::from(c)));
        Ok(v.mul(&Self::q_pow(table, a)))
    }

    fn normalize(table: Arc<VarTable>, num: ZPoly, den: ZPoly) -> Self {
        if num.is_zero() {
            return Self::zero(&table);
        }
        let (_, mut n, mut d) = gcd_cofactors(&num, &den);
        if d.normalize_sign() {
            n = n.neg();
        }
        RatFn { table, num: n, den: d }
    }

    fn fix_sign(table: Arc<VarTable>, mut num: ZPoly, mut den: ZPoly) -> Self {
        if den.normalize_sign() {
            num = num.neg();
        }
        RatFn { table, num, den }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn num(&self) -> &ZPoly {
        &self.num
    }

    pub fn den(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The value as a rational number when no variable occurs.
    pub fn as_constant(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(BigRational::new(n, d))
    }

    pub fn contains_var(&self, i: usize) -> bool {
        self.num.contains_var(i) || self.den.contains_var(i)
    }

    pub fn contains_shift(&self) -> bool {
        self.table.shift_index().is_some_and(|s| self.contains_var(s))
    }

    /// Relabels the value into another table with the same parameter layout.
    pub fn retag(&self, table: &Arc<VarTable>) -> Result<Self> {
        if !self.table.same_layout(table) || self.table.nvars() > table.nvars() && self.contains_shift() {
            return Err(Error::TableMismatch);
        }
        Ok(RatFn { table: table.clone(), num: self.num.clone(), den: self.den.clone() })
    }

    fn check(&self, o: &RatFn) -> Result<()> {
        if tables_match(&self.table, &o.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn neg(&self) -> Self {
        RatFn { table: self.table.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn checked_add(&self, o: &RatFn) -> Result<Self> {
        self.check(o)?;
        Ok(self.add_impl(o, false))
    }

    pub fn checked_sub(&self, o: &RatFn) -> Result<Self> {
        self.check(o)?;
        Ok(self.add_impl(o, true))
    }

    pub fn checked_mul(&self, o: &RatFn) -> Result<Self> {
        self.check(o)?;
        Ok(self.mul_impl(o))
    }

    pub fn checked_div(&self, o: &RatFn) -> Result<Self> {
        self.check(o)?;
        Ok(self.mul_impl(&o.inv()?))
    }

    pub fn add(&self, o: &RatFn) -> Self {
        self.checked_add(o).expect("matching variable tables")
    }

    pub fn sub(&self, o: &RatFn) -> Self {
        self.checked_sub(o).expect("matching variable tables")
    }

    pub fn mul(&self, o: &RatFn) -> Self {
        self.checked_mul(o).expect("matching variable tables")
    }

    /// Panics on division by zero; use [`RatFn::checked_div`] otherwise.
    pub fn div(&self, o: &RatFn) -> Self {
        self.checked_div(o).expect("nonzero divisor with matching table")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::fix_sign(self.table.clone(), self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let e = n.unsigned_abs() as u32;
        Ok(RatFn { table: self.table.clone(), num: base.num.pow(e), den: base.den.pow(e) })
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.mul(&Self::from_int(&self.table, c))
    }

    fn add_impl(&self, o: &RatFn, negate: bool) -> Self {
        let c = if negate { o.num.neg() } else { o.num.clone() };
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RatFn { table: self.table.clone(), num: c, den: o.den.clone() };
        }
        let (a, b, d) = (&self.num, &self.den, &o.den);
        if b.is_one() && d.is_one() {
            return RatFn { table: self.table.clone(), num: a.add(&c), den: ZPoly::one() };
        }
        if b == d {
            let num = a.add(&c);
            return Self::normalize(self.table.clone(), num, b.clone());
        }
        let (g, b1, d1) = gcd_cofactors(b, d);
        let num = a.mul(&d1).add(&c.mul(&b1));
        if num.is_zero() {
            return Self::zero(&self.table);
        }
        if g.is_one() {
            return RatFn { table: self.table.clone(), num, den: b1.mul(d) };
        }
        let (_, num, g1) = gcd_cofactors(&num, &g);
        Self::fix_sign(self.table.clone(), num, b1.mul(&d1).mul(&g1))
    }

    fn mul_impl(&self, o: &RatFn) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.table);
        }
        let (_, a1, d1) = gcd_cofactors(&self.num, &o.den);
        let (_, c1, b1) = gcd_cofactors(&o.num, &self.den);
        Self::fix_sign(self.table.clone(), a1.mul(&c1), b1.mul(&d1))
    }

    fn shift_data(&self) -> Result<(usize, ShiftKind)> {
        let s = self.table.shift_index().ok_or(Error::NoShiftVar)?;
        Ok((s, self.table.shift_kind().expect("shift kind")))
    }

    /// The image under `steps` applications of the shift.
    pub fn substitute_shift(&self, steps: i64) -> Result<Self> {
        if steps == 0 {
            return Ok(self.clone());
        }
        let (s, kind) = self.shift_data()?;
        if !self.contains_var(s) {
            return Ok(self.clone());
        }
        match kind {
            ShiftKind::Geometric(e) => {
                let c = e as i64 * steps;
                let map = |m: Monomial| (m.exp(0) as i64 + c * m.exp(s) as i64, m.without(0));
                let (n, nlow) = map_laurent_q(&self.num, map);
                let (d, dlow) = map_laurent_q(&self.den, map);
                let (n, d) = attach_q_power(n, d, nlow - dlow);
                // v -> q^c v is an automorphism, so only a power of q can be shared
                let common = n.monomial_content().gcd(d.monomial_content());
                let qpart = Monomial::var(0, common.exp(0));
                Ok(Self::fix_sign(self.table.clone(), n.div_monomial(qpart), d.div_monomial(qpart)))
            }
            ShiftKind::Arithmetic => {
                let t = ZPoly::var(s).add(&ZPoly::constant(BigInt::from(steps)));
                Ok(Self::fix_sign(self.table.clone(), self.num.compose_var(s, &t), self.den.compose_var(s, &t)))
            }
        }
    }

    /// Substitutes `v -> q^c v^d` (geometric) or `v -> d v + c` (arithmetic).
    pub fn reindex(&self, d: u32, c: i64) -> Result<Self> {
        let (s, kind) = self.shift_data()?;
        if !self.contains_var(s) || (d == 1 && c == 0) {
            return Ok(self.clone());
        }
        match kind {
            ShiftKind::Geometric(_) => {
                let map = |m: Monomial| {
                    let j = m.exp(s);
                    (m.exp(0) as i64 + c * j as i64, m.with_exp(s, j * d).without(0))
                };
                let (n, nlow) = map_laurent_q(&self.num, map);
                let (dd, dlow) = map_laurent_q(&self.den, map);
                let (n, dd) = attach_q_power(n, dd, nlow - dlow);
                Ok(Self::normalize(self.table.clone(), n, dd))
            }
            ShiftKind::Arithmetic => {
                let t = ZPoly::var(s).scale(&BigInt::from(d)).add(&ZPoly::constant(BigInt::from(c)));
                Ok(Self::normalize(self.table.clone(), self.num.compose_var(s, &t), self.den.compose_var(s, &t)))
            }
        }
    }

    /// Instantiates the shift variable at index `k` (`v = q^(e k)` or `v = k`).
    pub fn eval_at_power(&self, k: i64) -> Result<Self> {
        let (s, kind) = self.shift_data()?;
        if !self.contains_var(s) {
            return Ok(self.clone());
        }
        let (n, d) = match kind {
            ShiftKind::Geometric(e) => {
                let c = e as i64 * k;
                let map = |m: Monomial| (m.exp(0) as i64 + c * m.exp(s) as i64, m.without(0).without(s));
                let (n, nlow) = map_laurent_q(&self.num, map);
                let (d, dlow) = map_laurent_q(&self.den, map);
                if d.is_zero() {
                    return Err(Error::SingularEvaluation { k });
                }
                attach_q_power(n, d, nlow - dlow)
            }
            ShiftKind::Arithmetic => {
                let kv = BigInt::from(k);
                let d = self.den.eval_var(s, &kv);
                if d.is_zero() {
                    return Err(Error::SingularEvaluation { k });
                }
                (self.num.eval_var(s, &kv), d)
            }
        };
        Ok(Self::normalize(self.table.clone(), n, d))
    }

    /// Substitutes variable `i` by a rational function over the same table.
    pub fn substitute_var(&self, i: usize, value: &RatFn) -> Result<Self> {
        self.check(value)?;
        if !self.contains_var(i) {
            return Ok(self.clone());
        }
        let horner = |p: &ZPoly| {
            let mut acc = RatFn::zero(&self.table);
            for c in p.coefficients_in(i).into_iter().rev() {
                acc = acc.mul(value).add(&RatFn::from_poly(&self.table, c));
            }
            acc
        };
        let n = horner(&self.num);
        let d = horner(&self.den);
        n.checked_div(&d)
    }

    /// Indices `k >= from` where the numerator vanishes at the shift instance.
    pub fn numerator_zero_indices(&self, from: i64) -> Vec<i64> {
        zero_indices(&self.num, &self.table, from)
    }

    /// Indices `k >= from` where the denominator vanishes at the shift instance.
    pub fn pole_indices(&self, from: i64) -> Vec<i64> {
        zero_indices(&self.den, &self.table, from)
    }

    /// Value modulo `p` at a point given for every variable; `None` at a pole.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> Option<u64> {
        let n = self.num.eval_mod(point, p);
        let d = self.den.eval_mod(point, p);
        inv_mod(d, p).map(|di| super::poly::mul_mod(n, di, p))
    }

    /// Degree of numerator and denominator in the shift variable.
    pub fn shift_degrees(&self) -> (u32, u32) {
        match self.table.shift_index() {
            Some(s) => (self.num.degree_in(s).unwrap_or(0), self.den.degree_in(s).unwrap_or(0)),
            None => (0, 0),
        }
    }

    /// Maximal exponent of `q` in numerator and denominator.
    pub fn q_degree(&self) -> u32 {
        self.num.degree_in(0).unwrap_or(0).max(self.den.degree_in(0).unwrap_or(0))
    }
}

// Rewrites each term `c * q^a * rest` with `(a', rest') = f(m)` and shifts all
// q-exponents so the smallest is zero; returns the polynomial and that minimum.
fn map_laurent_q(p: &ZPoly, f: impl Fn(Monomial) -> (i64, Monomial)) -> (ZPoly, i64) {
    let mapped: Vec<(i64, Monomial, &BigInt)> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let (a, rest) = f(*m);
            (a, rest, c)
        })
        .collect();
    let low = mapped.iter().map(|t| t.0).min().unwrap_or(0);
    let terms = mapped.into_iter().map(|(a, rest, c)| (rest * Monomial::var(0, (a - low) as u32), c.clone())).collect();
    (Poly::from_terms(terms), low)
}

// Multiplies the quotient `n / d` by `q^shift`.
fn attach_q_power(n: ZPoly, d: ZPoly, shift: i64) -> (ZPoly, ZPoly) {
    let m = Monomial::var(0, shift.unsigned_abs() as u32);
    if shift >= 0 {
        (n.mul_term(m, &BigInt::one()), d)
    } else {
        (n, d.mul_term(m, &BigInt::one()))
    }
}

fn zero_indices(p: &ZPoly, table: &VarTable, from: i64) -> Vec<i64> {
    let (s, kind) = match (table.shift_index(), table.shift_kind()) {
        (Some(s), Some(k)) => (s, k),
        _ => return Vec::new(),
    };
    if p.is_zero() || !p.contains_var(s) {
        return Vec::new();
    }
    let coeffs = p.coefficients_in(s);
    let top = coeffs.len() - 1;
    let vanishes = |k: i64| -> bool {
        let table = Arc::new(table.clone());
        let f = RatFn::from_poly(&table, p.clone());
        f.eval_at_power(k).map(|x| x.is_zero()).unwrap_or(false)
    };
    match kind {
        ShiftKind::Geometric(e) => {
            let low_top = coeffs[top].low_degree_in(0).unwrap_or(0) as i64;
            let mut bound = i64::MIN;
            for (d, c) in coeffs.iter().enumerate().take(top) {
                if let Some(h) = c.degree_in(0) {
                    let span = h as i64 - low_top;
                    let step = e as i64 * (top - d) as i64;
                    bound = bound.max(span.div_euclid(step));
                }
            }
            if bound == i64::MIN {
                return Vec::new();
            }
            (from..=bound).filter(|&k| vanishes(k)).collect()
        }
        ShiftKind::Arithmetic => {
            // any integer root is a root of the coefficient of one fixed monomial
            let (m0, _) = coeffs[top].terms()[0];
            let uni: Vec<BigInt> = coeffs.iter().map(|c| c.coeff_of(m0)).collect();
            let lead = uni[top].abs();
            let maxc = uni.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero);
            let cauchy = BigInt::one() + maxc / lead;
            let bound: i64 = i64::try_from(cauchy).unwrap_or(i64::MAX / 4);
            (from.max(-bound)..=bound).filter(|&k| vanishes(k)).collect()
        }
    }
}

impl PartialEq for RatFn {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den && tables_match(&self.table, &o.table)
    }
}

impl Eq for RatFn {}

impl Hash for RatFn {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl std::ops::Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        RatFn::add(self, o)
    }
}

impl std::ops::Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        RatFn::sub(self, o)
    }
}

impl std::ops::Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        RatFn::mul(self, o)
    }
}

impl std::ops::Div for &RatFn {
    type Output = RatFn;
    fn div(self, o: &RatFn) -> RatFn {
        RatFn::div(self, o)
    }
}

impl std::ops::Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn::neg(self)
    }
}
