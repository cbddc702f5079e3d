//! Sparse multivariate polynomials over an exact coefficient ring.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, MAX_VARS};

/// Exact coefficient ring used by [`Poly`].
pub trait Coeff: Clone + PartialEq + Eq + Debug + Send + Sync + Zero + One {
    fn neg_ref(&self) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// `Some(self / o)` when the quotient exists in the ring.
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn from_i64(v: i64) -> Self;
    fn is_negative(&self) -> bool;
}

impl Coeff for BigInt {
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let (q, r) = self.div_rem(o);
        r.is_zero().then_some(q)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coeff for BigRational {
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        (!o.is_zero()).then(|| self / o)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Terms sorted by strictly decreasing monomial; no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<C> {
    terms: Vec<(Monomial, C)>,
}

pub type ZPoly = Poly<BigInt>;
pub type QPoly = Poly<BigRational>;

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial::var(i, 1), C::one())
    }

    /// Builds from arbitrary terms, combining duplicates and dropping zeros.
    pub fn from_terms(mut terms: Vec<(Monomial, C)>) -> Self {
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        let mut out: Vec<(Monomial, C)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.add_ref(&c),
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, C)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<C> {
        match self.terms.as_slice() {
            [] => Some(C::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Coefficient of the monomial `1`.
    pub fn constant_term(&self) -> C {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => C::zero(),
        }
    }

    pub fn lead(&self) -> Option<&(Monomial, C)> {
        self.terms.first()
    }

    pub fn lead_coeff(&self) -> C {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(C::zero)
    }

    pub fn coeff_of(&self, m: Monomial) -> C {
        match self.terms.binary_search_by(|t| m.cmp(&t.0)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => C::zero(),
        }
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c.neg_ref())).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.merge(o, true)
    }

    fn merge(&self, o: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &o.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { b[j].1.neg_ref() } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { a[i].1.sub_ref(&b[j].1) } else { a[i].1.add_ref(&b[j].1) };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { t.1.neg_ref() } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return o.mul_term(*m, c);
        }
        if o.terms.len() == 1 {
            let (m, c) = &o.terms[0];
            return self.mul_term(*m, c);
        }
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = *ma * *mb;
                let p = ca.mul_ref(cb);
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(p);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let s = e.get().add_ref(&p);
                        *e.get_mut() = s;
                    }
                }
            }
        }
        Poly { terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn mul_term(&self, m: Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(mm, cc)| (*mm * m, cc.mul_ref(c))).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.mul_term(Monomial::ONE, c)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                out.push((m.try_div(*dm)?, c.div_exact(dc)?));
            }
            return Some(Poly { terms: out });
        }
        let (dm, dc) = d.terms[0].clone();
        let mut rem: BTreeMap<Monomial, C> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(Monomial, C)> = Vec::new();
        while let Some((&rm, rc)) = rem.iter().next_back() {
            let qm = rm.try_div(dm)?;
            let qc = rc.div_exact(&dc)?;
            for (m, c) in &d.terms {
                let key = *m * qm;
                let p = c.mul_ref(&qc);
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(p.neg_ref());
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let s = e.get().sub_ref(&p);
                        if s.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = s;
                        }
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Degree in variable `i` (`None` for the zero polynomial).
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.exp(i)).max()
    }

    /// Lowest exponent of variable `i` (`None` for the zero polynomial).
    pub fn low_degree_in(&self, i: usize) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.exp(i)).min()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.total()).max()
    }

    /// Bitmask of variables that occur.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (m, _) in &self.terms {
            for i in 0..MAX_VARS {
                if m.exp(i) > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    pub fn contains_var(&self, i: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(i) > 0)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::ONE,
            Some((m, _)) => it.fold(*m, |acc, (mm, _)| acc.gcd(*mm)),
        }
    }

    pub fn div_monomial(&self, m: Monomial) -> Self {
        Poly { terms: self.terms.iter().map(|(mm, c)| (mm.div(m), c.clone())).collect() }
    }

    /// Coefficients with respect to variable `i`: entry `d` is the coefficient of `x_i^d`.
    pub fn coefficients_in(&self, i: usize) -> Vec<Self> {
        let deg = match self.degree_in(i) {
            None => return Vec::new(),
            Some(d) => d as usize,
        };
        let mut buckets: Vec<Vec<(Monomial, C)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            buckets[m.exp(i) as usize].push((m.without(i), c.clone()));
        }
        buckets.into_iter().map(Poly::from_terms).collect()
    }

    /// Inverse of [`Poly::coefficients_in`].
    pub fn from_coefficients_in(i: usize, coeffs: &[Self]) -> Self {
        let mut terms = Vec::new();
        for (d, c) in coeffs.iter().enumerate() {
            if d == 0 {
                terms.extend(c.terms.iter().cloned());
            } else {
                let xm = Monomial::var(i, d as u32);
                terms.extend(c.terms.iter().map(|(m, cc)| (*m * xm, cc.clone())));
            }
        }
        Poly::from_terms(terms)
    }

    /// Leading coefficient with respect to variable `i`, a polynomial free of `x_i`.
    pub fn lead_coeff_in(&self, i: usize) -> Self {
        match self.degree_in(i) {
            None => Self::zero(),
            Some(d) => Poly::from_terms(
                self.terms.iter().filter(|(m, _)| m.exp(i) == d).map(|(m, c)| (m.without(i), c.clone())).collect(),
            ),
        }
    }

    /// Substitutes `x_i := value` (a ring element).
    pub fn eval_var(&self, i: usize, value: &C) -> Self {
        let deg = match self.degree_in(i) {
            None => return Self::zero(),
            Some(d) => d as usize,
        };
        let mut powers = Vec::with_capacity(deg + 1);
        powers.push(C::one());
        for k in 1..=deg {
            let p = powers[k - 1].mul_ref(value);
            powers.push(p);
        }
        Poly::from_terms(
            self.terms.iter().map(|(m, c)| (m.without(i), c.mul_ref(&powers[m.exp(i) as usize]))).collect(),
        )
    }

    /// Substitutes `x_i := poly`.
    pub fn compose_var(&self, i: usize, value: &Self) -> Self {
        let coeffs = self.coefficients_in(i);
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    /// Applies a monomial map to every term (the map must be injective on the support
    /// or the caller accepts recombination).
    pub fn map_monomials(&self, f: impl Fn(Monomial) -> Monomial) -> Self {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (f(*m), c.clone())).collect())
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))).collect())
    }

    /// Makes the leading coefficient non-negative; returns whether it negated.
    pub fn normalize_sign(&mut self) -> bool {
        if let Some((_, c)) = self.terms.first() {
            if c.is_negative() {
                *self = self.neg();
                return true;
            }
        }
        false
    }
}

impl ZPoly {
    /// Gcd of the integer coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_integer(&self, d: &BigInt) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let (q, r) = c.div_rem(d);
                    debug_assert!(r.is_zero());
                    (*m, q)
                })
                .collect(),
        }
    }

    pub fn max_norm(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn to_q(&self) -> QPoly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, BigRational::from_integer(c.clone()))).collect() }
    }

    /// Evaluates every variable at a value modulo the prime `p`.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = bigint_mod(c, p);
            for (i, &x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t = mul_mod(t, pow_mod(x, e as u64, p), p);
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }
}

impl QPoly {
    /// Clears denominators: returns `(l, z)` with `self = z / l`, `l > 0` and `z` integral.
    pub fn to_z(&self) -> (BigInt, ZPoly) {
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            l = l.lcm(c.denom());
        }
        let terms = self.terms.iter().map(|(m, c)| (*m, c.numer() * (&l / c.denom()))).collect();
        (l, Poly { terms })
    }
}

pub(crate) fn bigint_mod(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    r.try_into().expect("residue fits in u64")
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

impl<C: Coeff> Debug for Poly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{:?}*{:?}", c, m.exps())?;
        }
        Ok(())
    }
}
