//! Power series in `q` truncated after `q^order`, with polynomial coefficients
//! in the remaining variables.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::arith::{Monomial, RatFn, VarTable, ZPoly};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    table: Arc<VarTable>,
    order: u32,
    poly: ZPoly,
}

impl std::fmt::Debug for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} + O(q^{})", RatFn::from_poly(&self.table, self.poly.clone()), self.order + 1)
    }
}

fn truncate(p: &ZPoly, order: u32) -> ZPoly {
    ZPoly::from_terms(p.terms().iter().filter(|(m, _)| m.exp(0) <= order).cloned().collect())
}

/// `q`-adic valuation of a nonzero rational function.
pub fn valuation(f: &RatFn) -> Option<i64> {
    if f.is_zero() {
        return None;
    }
    let n = f.num().low_degree_in(0).unwrap_or(0) as i64;
    let d = f.den().low_degree_in(0).unwrap_or(0) as i64;
    Some(n - d)
}

impl Series {
    pub fn zero(table: &Arc<VarTable>, order: u32) -> Self {
        Series { table: table.clone(), order, poly: ZPoly::zero() }
    }

    pub fn one(table: &Arc<VarTable>, order: u32) -> Self {
        Series { table: table.clone(), order, poly: ZPoly::one() }
    }

    pub fn from_poly(table: &Arc<VarTable>, p: &ZPoly, order: u32) -> Self {
        Series { table: table.clone(), order, poly: truncate(p, order) }
    }

    /// Expansion of `f`; the denominator must have an integer unit as its `q^0` part.
    pub fn from_ratfn(f: &RatFn, order: u32) -> Result<Self> {
        let t = f.table();
        if f.den().is_one() {
            return Ok(Self::from_poly(t, f.num(), order));
        }
        let inv = Self::from_poly(t, f.den(), order).inv()?;
        Ok(Self::from_poly(t, f.num(), order).mul(&inv))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &ZPoly {
        &self.poly
    }

    pub fn to_ratfn(&self) -> RatFn {
        RatFn::from_poly(&self.table, self.poly.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, o: &Series) -> Series {
        let order = self.order.min(o.order);
        Series { table: self.table.clone(), order, poly: truncate(&self.poly.add(&o.poly), order) }
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Series {
        Series { table: self.table.clone(), order: self.order, poly: self.poly.neg() }
    }

    pub fn mul(&self, o: &Series) -> Series {
        let order = self.order.min(o.order);
        let mut acc = ZPoly::zero();
        for (m, c) in o.poly.terms() {
            if m.exp(0) > order {
                continue;
            }
            let part: Vec<(Monomial, BigInt)> = self
                .poly
                .terms()
                .iter()
                .filter(|(n, _)| n.exp(0) + m.exp(0) <= order)
                .map(|(n, d)| (*n * *m, d * c))
                .collect();
            acc = acc.add(&ZPoly::from_terms(part));
        }
        Series { table: self.table.clone(), order, poly: acc }
    }

    /// Inverse of a series whose `q^0` part is `1` or `-1`.
    pub fn inv(&self) -> Result<Series> {
        let c0 = ZPoly::from_terms(self.poly.terms().iter().filter(|(m, _)| m.exp(0) == 0).cloned().collect());
        let unit = match c0.constant_value() {
            Some(c) if c.abs().is_one() => c,
            _ => return Err(Error::Invalid("series inverse needs a unit constant term".into())),
        };
        // u = unit (1 + h), 1/u = unit sum (-h)^i
        let h =
            Series { table: self.table.clone(), order: self.order, poly: self.poly.scale(&unit).sub(&ZPoly::one()) };
        let mut acc = Series::one(&self.table, self.order);
        let mut pow = acc.clone();
        for _ in 0..self.order {
            pow = pow.mul(&h).neg();
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(Series { table: self.table.clone(), order: self.order, poly: acc.poly.scale(&unit) })
    }

    /// `(x; q^step)_inf` for a monomial-like `x` of positive `q`-valuation.
    pub fn qpoch_inf(x: &RatFn, step: u32, order: u32) -> Result<Series> {
        let t = x.table();
        let v = valuation(x).ok_or_else(|| Error::Invalid("zero argument in an infinite product".into()))?;
        if v <= 0 || step == 0 || !x.is_polynomial() {
            return Err(Error::Invalid("infinite product needs a polynomial argument with positive valuation".into()));
        }
        let mut acc = Series::one(t, order);
        let mut cur = x.clone();
        let mut val = v;
        let base = RatFn::q_pow(t, step as i64);
        while val <= order as i64 {
            acc = acc.mul(&Series::from_poly(t, &ZPoly::one().sub(cur.num()), order));
            cur = cur.mul(&base);
            val += step as i64;
        }
        Ok(acc)
    }
}

/// Comparison of a partial sum with a truncated target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesReport {
    pub order: u32,
    pub terms_used: usize,
    pub equal: bool,
    /// First `q`-degree where the two sides differ.
    pub first_difference: Option<u32>,
}

/// Checks `sum_k terms[k] = target + O(q^(order+1))`.
///
/// `bound(k)` is a lower bound for the valuation of the `k`-th summand. It is
/// checked against every supplied term and must exceed `order` from
/// `terms.len()` on, where it has to be nondecreasing (checked to `4 * len`).
pub fn verify_series(terms: &[RatFn], bound: impl Fn(usize) -> i64, target: &Series) -> Result<SeriesReport> {
    let order = target.order();
    for (k, t) in terms.iter().enumerate() {
        if let Some(v) = valuation(t) {
            if v < bound(k) {
                return Err(Error::Invalid(format!(
                    "summand {k} has valuation {v} below the declared bound {}",
                    bound(k)
                )));
            }
        }
    }
    let n = terms.len();
    if bound(n) <= order as i64 {
        return Err(Error::InsufficientTerms(format!(
            "declared valuation bound {} at k = {n} does not exceed q^{order}",
            bound(n)
        )));
    }
    if (n..4 * n.max(1)).any(|k| bound(k + 1) < bound(k)) {
        return Err(Error::Invalid("declared valuation bound is not nondecreasing".into()));
    }
    let mut acc = Series::zero(&target.table, order);
    for t in terms {
        acc = acc.add(&Series::from_ratfn(&t.retag(&target.table)?, order)?);
    }
    let diff = acc.sub(target);
    let first_difference = diff.poly.terms().iter().map(|(m, _)| m.exp(0)).min();
    Ok(SeriesReport { order, terms_used: n, equal: diff.is_zero(), first_difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfunc::qpoch_pow;

    #[test]
    fn euler_pentagonal() {
        let t = VarTable::plain(&[]);
        let s = Series::qpoch_inf(&RatFn::q(&t), 1, 30).unwrap();
        let mut expected = ZPoly::zero();
        for j in -5i64..=5 {
            let e = (j * (3 * j - 1) / 2) as u32;
            if e <= 30 {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                expected = expected.add(&ZPoly::monomial(Monomial::var(0, e), BigInt::from(sign)));
            }
        }
        assert_eq!(s.poly(), &expected);
    }

    #[test]
    fn inverse_round_trip() {
        let t = VarTable::plain(&["a"]);
        let f = RatFn::one(&t).add(&RatFn::param(&t, "a").unwrap().mul(&RatFn::q_pow(&t, 2)));
        let s = Series::from_ratfn(&f, 20).unwrap();
        let i = s.inv().unwrap();
        assert_eq!(s.mul(&i), Series::one(&t, 20));
    }

    #[test]
    fn durfee_square_identity() {
        // sum_k q^(k^2) / (q;q)_k^2 = 1 / (q;q)_inf
        let t = VarTable::plain(&[]);
        let terms: Vec<RatFn> =
            (0..25).map(|k| RatFn::q_pow(&t, k * k).div(&qpoch_pow(&t, 1, 1, k as usize).pow(2).unwrap())).collect();
        let target = Series::qpoch_inf(&RatFn::q(&t), 1, 24).unwrap().inv().unwrap();
        let rep = verify_series(&terms, |k| (k * k) as i64, &target).unwrap();
        assert!(rep.equal);
    }

    #[test]
    fn insufficient_terms_rejected() {
        let t = VarTable::plain(&[]);
        let terms = vec![RatFn::one(&t)];
        let target = Series::one(&t, 10);
        assert!(verify_series(&terms, |k| k as i64, &target).is_err());
    }
}
