//! Laurent skew polynomials in a shift `S` with rational-function coefficients.
//!
//! The commutation rule is `S^i c = sigma^i(c) S^i`, where `sigma` is the shift
//! action declared by the coefficient table.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::arith::vars::tables_match;
use crate::arith::{RatFn, VarTable};
use crate::error::{Error, Result};
use crate::linalg::nullspace;

#[derive(Clone, PartialEq, Eq)]
pub struct OreOp {
    table: Arc<VarTable>,
    coeffs: BTreeMap<i32, RatFn>,
}

impl OreOp {
    pub fn zero(table: &Arc<VarTable>) -> Self {
        OreOp { table: table.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(table: &Arc<VarTable>) -> Self {
        Self::scalar(RatFn::one(table))
    }

    pub fn scalar(c: RatFn) -> Self {
        let table = c.table().clone();
        Self::from_coeffs(&table, [(0, c)])
    }

    /// `S^i`.
    pub fn shift(table: &Arc<VarTable>, i: i32) -> Self {
        Self::from_coeffs(table, [(i, RatFn::one(table))])
    }

    /// `c S^i`.
    pub fn term(c: RatFn, i: i32) -> Self {
        let table = c.table().clone();
        Self::from_coeffs(&table, [(i, c)])
    }

    pub fn from_coeffs(table: &Arc<VarTable>, coeffs: impl IntoIterator<Item = (i32, RatFn)>) -> Self {
        let mut map: BTreeMap<i32, RatFn> = BTreeMap::new();
        for (i, c) in coeffs {
            assert!(tables_match(c.table(), table), "coefficient table mismatch");
            let s = match map.remove(&i) {
                Some(prev) => prev.add(&c),
                None => c,
            };
            if !s.is_zero() {
                map.insert(i, s);
            }
        }
        OreOp { table: table.clone(), coeffs: map }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, RatFn> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one_op(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(RatFn::is_one)
    }

    pub fn coeff(&self, i: i32) -> RatFn {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| RatFn::zero(&self.table))
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// `max i - min i`; zero for the zero operator.
    pub fn order(&self) -> usize {
        match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) => (b - a) as usize,
            _ => 0,
        }
    }

    pub fn leading_coeff(&self) -> RatFn {
        self.coeffs.values().next_back().cloned().unwrap_or_else(|| RatFn::zero(&self.table))
    }

    pub fn trailing_coeff(&self) -> RatFn {
        self.coeffs.values().next().cloned().unwrap_or_else(|| RatFn::zero(&self.table))
    }

    fn check(&self, o: &OreOp) -> Result<()> {
        if tables_match(&self.table, &o.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn checked_add(&self, o: &OreOp) -> Result<Self> {
        self.check(o)?;
        Ok(Self::from_coeffs(&self.table, self.coeffs.clone().into_iter().chain(o.coeffs.clone())))
    }

    pub fn add(&self, o: &OreOp) -> Self {
        self.checked_add(o).expect("matching tables")
    }

    pub fn neg(&self) -> Self {
        OreOp { table: self.table.clone(), coeffs: self.coeffs.iter().map(|(i, c)| (*i, c.neg())).collect() }
    }

    pub fn sub(&self, o: &OreOp) -> Self {
        self.add(&o.neg())
    }

    /// `c * self`.
    pub fn scale_left(&self, c: &RatFn) -> Self {
        Self::from_coeffs(&self.table, self.coeffs.iter().map(|(i, a)| (*i, c.mul(a))))
    }

    /// `S^k * self`.
    pub fn shift_left(&self, k: i32) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (i, c) in &self.coeffs {
            out.insert(i + k, c.substitute_shift(k as i64)?);
        }
        Ok(OreOp { table: self.table.clone(), coeffs: out })
    }

    /// `self * S^k` (coefficients unchanged).
    pub fn shift_right(&self, k: i32) -> Self {
        OreOp { table: self.table.clone(), coeffs: self.coeffs.iter().map(|(i, c)| (i + k, c.clone())).collect() }
    }

    pub fn checked_mul(&self, o: &OreOp) -> Result<Self> {
        self.check(o)?;
        let mut acc: BTreeMap<i32, RatFn> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &o.coeffs {
                let t = a.mul(&b.substitute_shift(*i as i64)?);
                let e = acc.entry(i + j).or_insert_with(|| RatFn::zero(&self.table));
                *e = e.add(&t);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(OreOp { table: self.table.clone(), coeffs: acc })
    }

    /// Skew product `self * o`.
    pub fn mul(&self, o: &OreOp) -> Self {
        self.checked_mul(o).expect("matching tables with a shift variable")
    }

    /// `(self * S^(-m), m)` with minimal exponent zero.
    pub fn right_normalized(&self) -> (Self, i32) {
        let m = self.min_exp().unwrap_or(0);
        (self.shift_right(-m), m)
    }

    /// `(S^(-m) * self, m)` with minimal exponent zero; preserves the solution space.
    pub fn left_normalized(&self) -> Result<(Self, i32)> {
        let m = self.min_exp().unwrap_or(0);
        Ok((self.shift_left(-m)?, m))
    }

    pub fn monic(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let inv = self.leading_coeff().inv()?;
        Ok(self.scale_left(&inv))
    }

    /// Left scalar multiple with polynomial, content-free coefficients and a
    /// positive leading term in the leading coefficient.
    pub fn primitive(&self) -> Self {
        use crate::arith::gcd::gcd;
        use crate::arith::ZPoly;
        if self.is_zero() {
            return self.clone();
        }
        let mut den = ZPoly::one();
        for c in self.coeffs.values() {
            let g = gcd(&den, c.den());
            den = den.mul(&c.den().div_exact(&g).expect("gcd divides"));
        }
        let mut num = ZPoly::zero();
        let scaled: Vec<(i32, ZPoly)> = self
            .coeffs
            .iter()
            .map(|(i, c)| {
                let m = den.div_exact(c.den()).expect("lcm is a multiple");
                (*i, c.num().mul(&m))
            })
            .collect();
        for (_, p) in &scaled {
            num = gcd(&num, p);
        }
        let lead_negative = scaled.last().is_some_and(|(_, p)| p.lead_coeff() < num_bigint::BigInt::from(0));
        let sign = if lead_negative { -1 } else { 1 };
        let coeffs = scaled.into_iter().map(|(i, p)| {
            let c = p.div_exact(&num).expect("content divides").scale(&num_bigint::BigInt::from(sign));
            (i, RatFn::from_poly(&self.table, c))
        });
        Self::from_coeffs(&self.table, coeffs)
    }

    /// Right Euclidean division: `self = quo * den + rem` with `order(rem) < order(den)`.
    pub fn right_divide(&self, den: &OreOp) -> Result<(OreOp, OreOp)> {
        self.check(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.min_exp().unwrap_or(0) < 0 || den.min_exp().unwrap_or(0) < 0 {
            return Err(Error::Invalid("right division needs operators without negative powers".into()));
        }
        let dmax = den.max_exp().expect("nonzero");
        let dlead = den.leading_coeff();
        let mut quo = OreOp::zero(&self.table);
        let mut rem = self.clone();
        while let Some(rmax) = rem.max_exp() {
            if rmax < dmax {
                break;
            }
            let d = rmax - dmax;
            let c = rem.leading_coeff().checked_div(&dlead.substitute_shift(d as i64)?)?;
            let t = OreOp::term(c, d);
            rem = rem.sub(&t.mul(den));
            debug_assert!(rem.max_exp().is_none_or(|m| m < rmax));
            quo = quo.add(&t);
        }
        debug_assert!(quo.mul(den).add(&rem) == *self);
        Ok((quo, rem))
    }

    /// Monic greatest common right divisor.
    pub fn gcrd(&self, o: &OreOp) -> Result<OreOp> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Err(Error::Invalid("gcrd of the zero operator".into()));
        }
        let mut a = self.right_normalized().0;
        let mut b = o.right_normalized().0;
        if a.max_exp() < b.max_exp() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (_, r) = a.right_divide(&b)?;
            a = b;
            b = if r.is_zero() { r } else { r.right_normalized().0.monic()? };
        }
        a.monic()
    }

    /// Least common left multiple `l = u * self = w * o`, with `l` monic.
    /// Both operators must be free of negative powers of `S`.
    pub fn lclm(&self, o: &OreOp) -> Result<(OreOp, OreOp, OreOp)> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Err(Error::Invalid("lclm of the zero operator".into()));
        }
        let (p, q) = (self, o);
        let (pmin, qmin) = (p.min_exp().expect("nonzero"), q.min_exp().expect("nonzero"));
        if pmin < 0 || qmin < 0 {
            return Err(Error::Invalid("lclm needs operators without negative powers".into()));
        }
        let a = p.max_exp().expect("nonzero") as usize;
        let b = q.max_exp().expect("nonzero") as usize;
        let t = &self.table;
        for n in a.max(b)..=a + b + pmin.max(qmin) as usize {
            let nu = n - a + 1;
            let nw = n - b + 1;
            let mut rows = vec![vec![RatFn::zero(t); nu + nw]; n + 1];
            for i in 0..nu {
                let sp = p.shift_left(i as i32)?;
                for (e, c) in sp.coeffs() {
                    rows[*e as usize][i] = c.clone();
                }
            }
            for j in 0..nw {
                let sq = q.shift_left(j as i32)?;
                for (e, c) in sq.coeffs() {
                    rows[*e as usize][nu + j] = c.neg();
                }
            }
            let ns = nullspace(&rows, nu + nw, t);
            if let Some(x) = ns.into_iter().next() {
                let u = OreOp::from_coeffs(t, x[..nu].iter().cloned().enumerate().map(|(i, c)| (i as i32, c)));
                let w = OreOp::from_coeffs(t, x[nu..].iter().cloned().enumerate().map(|(j, c)| (j as i32, c)));
                let l = u.mul(p);
                let inv = l.leading_coeff().inv()?;
                let (l, u, w) = (l.scale_left(&inv), u.scale_left(&inv), w.scale_left(&inv));
                debug_assert!(w.mul(q) == l);
                return Ok((l, u, w));
            }
        }
        Err(Error::Budget("lclm ansatz found no solution".into()))
    }

    /// Coefficient `c_i` evaluated at index `k`.
    pub fn coeff_at(&self, i: i32, k: i64) -> Result<RatFn> {
        self.coeff(i).eval_at_power(k)
    }

    /// `(L c)(k) = sum_i c_i(k) c(k + i)` for `c` given on `offset..offset + terms.len()`.
    /// Returns the first output index and the outputs.
    pub fn apply_to_seq(&self, terms: &[RatFn], offset: i64) -> Result<(i64, Vec<RatFn>)> {
        if self.is_zero() {
            return Ok((offset, vec![RatFn::zero(&self.table); terms.len()]));
        }
        let lo = self.min_exp().expect("nonzero") as i64;
        let hi = self.max_exp().expect("nonzero") as i64;
        let first = offset - lo;
        let last = offset + terms.len() as i64 - 1 - hi;
        if last < first {
            return Err(Error::InsufficientTerms(format!(
                "operator spans {} indices but only {} terms given",
                hi - lo + 1,
                terms.len()
            )));
        }
        let mut out = Vec::with_capacity((last - first + 1) as usize);
        for k in first..=last {
            out.push(self.apply_at(k, |j| Some(terms[(j - offset) as usize].clone()))?);
        }
        Ok((first, out))
    }

    /// `(L c)(k)` with the sequence supplied by a lookup.
    pub fn apply_at(&self, k: i64, seq: impl Fn(i64) -> Option<RatFn>) -> Result<RatFn> {
        let mut acc = RatFn::zero(&self.table);
        for (i, c) in &self.coeffs {
            let j = k + *i as i64;
            let x = seq(j).ok_or_else(|| Error::InsufficientTerms(format!("term {j} unavailable")))?;
            if x.is_zero() {
                continue;
            }
            let x = if tables_match(x.table(), &self.table) { x } else { x.retag(&self.table)? };
            acc = acc.add(&c.eval_at_power(k)?.mul(&x));
        }
        Ok(acc)
    }

    /// Writes `self = S^power * core` where `core` has a nonzero `S^0` coefficient.
    pub fn remove_shift_factor(&self) -> Result<(OreOp, i32)> {
        let (core, m) = self.left_normalized()?;
        Ok((core, m))
    }

    /// Indices `k >= from` at which the leading coefficient vanishes.
    pub fn leading_nonvanishing(&self, from: i64) -> Vec<i64> {
        if self.is_zero() {
            return Vec::new();
        }
        self.leading_coeff().numerator_zero_indices(from)
    }

    /// Indices `k >= from` where forward unrolling cannot divide: zeros of the
    /// leading coefficient and poles of any coefficient.
    pub fn singular_indices(&self, from: i64) -> Vec<i64> {
        let mut out = self.leading_nonvanishing(from);
        for c in self.coeffs.values() {
            out.extend(c.pole_indices(from));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RatFn) -> Result<RatFn>) -> Result<Self> {
        let mut out = Vec::new();
        for (i, c) in &self.coeffs {
            out.push((*i, f(c)?));
        }
        Ok(Self::from_coeffs(&self.table, out))
    }

    /// Moves the coefficients to another table with the same layout.
    pub fn retag(&self, table: &Arc<VarTable>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (i, c) in &self.coeffs {
            out.insert(*i, c.retag(table)?);
        }
        Ok(OreOp { table: table.clone(), coeffs: out })
    }

    /// Whether two operators agree up to a nonzero left scalar factor.
    pub fn equivalent(&self, o: &OreOp) -> bool {
        match (self.monic(), o.monic()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl std::fmt::Debug for OreOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}

/// A `t x t` matrix of operators acting on the sections of a sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OreMat {
    t: usize,
    entries: Vec<Vec<OreOp>>,
}

impl OreMat {
    pub fn zero(table: &Arc<VarTable>, t: usize) -> Self {
        OreMat { t, entries: vec![vec![OreOp::zero(table); t]; t] }
    }

    pub fn identity(table: &Arc<VarTable>, t: usize) -> Self {
        let mut m = Self::zero(table, t);
        for i in 0..t {
            m.entries[i][i] = OreOp::one(table);
        }
        m
    }

    pub fn from_entries(entries: Vec<Vec<OreOp>>) -> Self {
        let t = entries.len();
        assert!(entries.iter().all(|r| r.len() == t));
        OreMat { t, entries }
    }

    pub fn size(&self) -> usize {
        self.t
    }

    pub fn get(&self, j: usize, r: usize) -> &OreOp {
        &self.entries[j][r]
    }

    pub fn entries(&self) -> &[Vec<OreOp>] {
        &self.entries
    }

    pub fn add(&self, o: &OreMat) -> Self {
        assert_eq!(self.t, o.t);
        let entries =
            (0..self.t).map(|j| (0..self.t).map(|r| self.entries[j][r].add(&o.entries[j][r])).collect()).collect();
        OreMat { t: self.t, entries }
    }

    pub fn mul(&self, o: &OreMat) -> Self {
        assert_eq!(self.t, o.t);
        let t = self.t;
        let table = self.entries[0][0].table().clone();
        let mut entries = vec![vec![OreOp::zero(&table); t]; t];
        for (j, row) in entries.iter_mut().enumerate() {
            for (r, e) in row.iter_mut().enumerate() {
                let mut acc = OreOp::zero(&table);
                for s in 0..t {
                    let a = &self.entries[j][s];
                    let b = &o.entries[s][r];
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                *e = acc;
            }
        }
        OreMat { t, entries }
    }

    pub fn scale_left(&self, c: &RatFn) -> Self {
        OreMat {
            t: self.t,
            entries: self.entries.iter().map(|r| r.iter().map(|e| e.scale_left(c)).collect()).collect(),
        }
    }

    pub fn into_scalar(self) -> Option<OreOp> {
        (self.t == 1).then(|| self.entries.into_iter().next().unwrap().into_iter().next().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tb() -> Arc<VarTable> {
        VarTable::geometric(&[], "v", 1)
    }

    #[test]
    fn commutation_rule() {
        let t = tb();
        let v = RatFn::shift_var(&t).unwrap();
        let s = OreOp::shift(&t, 1);
        let prod = s.mul(&OreOp::scalar(v.clone()));
        assert_eq!(prod, OreOp::term(RatFn::q(&t).mul(&v), 1));
    }

    #[test]
    fn product_expansion() {
        let t = tb();
        let v = RatFn::shift_var(&t).unwrap();
        let s = OreOp::shift(&t, 1);
        let a = s.sub(&OreOp::scalar(v.clone()));
        let b = s.add(&OreOp::scalar(v.clone()));
        let q = RatFn::q(&t);
        let one = RatFn::one(&t);
        let expected = OreOp::from_coeffs(&t, [(2, one.clone()), (1, q.sub(&one).mul(&v)), (0, v.mul(&v).neg())]);
        assert_eq!(a.mul(&b), expected);
    }

    #[test]
    fn division_identity() {
        let t = tb();
        let v = RatFn::shift_var(&t).unwrap();
        let num = OreOp::shift(&t, 2).sub(&OreOp::scalar(v.mul(&v)));
        let den = OreOp::shift(&t, 1).sub(&OreOp::scalar(v.clone()));
        let (quo, rem) = num.right_divide(&den).unwrap();
        assert_eq!(quo.mul(&den).add(&rem), num);
        assert_eq!(quo, OreOp::shift(&t, 1).add(&OreOp::scalar(RatFn::q(&t).mul(&v))));
        let (q1, r1) = num.right_divide(&num).unwrap();
        assert!(q1 == OreOp::one(&t) && r1.is_zero());
    }

    #[test]
    fn lclm_of_first_order_pair() {
        let t = tb();
        let v = RatFn::shift_var(&t).unwrap();
        let p = OreOp::shift(&t, 1).sub(&OreOp::one(&t));
        let q = OreOp::shift(&t, 1).sub(&OreOp::scalar(v));
        let (l, u, w) = p.lclm(&q).unwrap();
        assert_eq!(l.order(), 2);
        assert_eq!(u.mul(&p), w.mul(&q));
        assert!(p.gcrd(&q).unwrap().is_one_op());
    }

    #[test]
    fn shift_factor_removal() {
        let t = tb();
        let s3 = OreOp::shift(&t, 3);
        let (core, m) = s3.remove_shift_factor().unwrap();
        assert_eq!((core, m), (OreOp::one(&t), 3));
    }
}
