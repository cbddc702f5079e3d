//! beta(n)-factorial bases in sections.
//!
//! A basis is stored through its step coefficients: `B_(k+1)(n) = (a(k) beta(n) + b(k)) B_k(n)`
//! with `a(k) = a_r(m)`, `b(k) = b_r(m)` for `k = m t + r`. Each `a_r`, `b_r` is a
//! rational function of the section variable (`q^m`, or `m` in the arithmetic case).

use std::fmt;
use std::sync::Arc;

use crate::arith::{Ctx, RatFn, VarTable};
use crate::error::{Error, Result};
use crate::qfunc::qbinom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BetaKind {
    /// `beta(n) = q^(e n)`
    Geometric(u32),
    /// `beta(n) = n`
    Arithmetic,
}

/// Extra factor of every element, for bases whose first element is not `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Seed {
    One,
    /// `[a n + c choose bottom]` in base `q^e`.
    QBinom {
        a: i64,
        c: i64,
        bottom: i64,
        e: u32,
    },
}

#[derive(Clone)]
pub struct FactorialBasis {
    ctx: Ctx,
    beta: BetaKind,
    a: Vec<RatFn>,
    b: Vec<RatFn>,
    seed: Seed,
    label: String,
}

impl fmt::Debug for FactorialBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {} section(s)", self.label, self.a.len())
    }
}

impl FactorialBasis {
    pub fn new(ctx: &Ctx, beta: BetaKind, a: Vec<RatFn>, b: Vec<RatFn>, label: impl Into<String>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::Invalid("need one (a, b) pair per section".into()));
        }
        if a.iter().any(RatFn::is_zero) {
            return Err(Error::Invalid("a_r(m) must be nonzero".into()));
        }
        if ctx.arithmetic() != (beta == BetaKind::Arithmetic) {
            return Err(Error::Invalid("basis kind does not match the variable context".into()));
        }
        Ok(FactorialBasis { ctx: ctx.clone(), beta, a, b, seed: Seed::One, label: label.into() })
    }

    /// Basis given by its root sequence and the leading-coefficient sequence `c(k)`
    /// (one entry per section, each a function of `m`).
    pub fn from_roots(ctx: &Ctx, beta: BetaKind, roots: Vec<RatFn>, lead: Vec<RatFn>, label: &str) -> Result<Self> {
        let t = roots.len();
        if lead.len() != t {
            return Err(Error::Invalid("one leading coefficient per section".into()));
        }
        let mut a = Vec::with_capacity(t);
        let mut b = Vec::with_capacity(t);
        for r in 0..t {
            // c(k+1) for k = m t + r lives in section r+1, or section 0 at m+1
            let next = if r + 1 < t { lead[r + 1].clone() } else { lead[0].substitute_shift(1)? };
            let ar = next.checked_div(&lead[r])?;
            b.push(roots[r].mul(&ar).neg());
            a.push(ar);
        }
        Self::new(ctx, beta, a, b, label)
    }

    /// `P(e)`: elements `q^(e k n)`.
    pub fn q_power(ctx: &Ctx, e: u32) -> Result<Self> {
        if e == 0 {
            return Err(Error::Usage("P(e) needs e >= 1".into()));
        }
        let k = &ctx.k;
        Self::new(ctx, BetaKind::Geometric(e), vec![RatFn::one(k)], vec![RatFn::zero(k)], format!("P({e})"))
    }

    /// `F`: elements `prod_(i<k) (q^n - q^i)`.
    pub fn q_falling(ctx: &Ctx) -> Result<Self> {
        let k = &ctx.k;
        let v = RatFn::shift_var(k)?;
        Self::new(ctx, BetaKind::Geometric(1), vec![RatFn::one(k)], vec![v.neg()], "F")
    }

    /// `C(a,c;t;e)`: elements `[a n + c choose k + t]` in base `q^e`.
    pub fn q_binomial(ctx: &Ctx, a_arg: i64, c: i64, t_shift: i64, e: u32) -> Result<Self> {
        if a_arg < 1 || e < 1 || t_shift < 0 || c < 0 {
            return Err(Error::Usage(format!("C({a_arg},{c};{t_shift};{e}) needs a >= 1, c >= 0, t >= 0, e >= 1")));
        }
        let k = &ctx.k;
        let e64 = e as i64;
        let v = RatFn::shift_var(k)?;
        let one = RatFn::one(k);
        let ve = v.pow(e64)?;
        // 1 - q^(e(k+t+1))
        let d = one.sub(&RatFn::q_pow(k, e64 * (t_shift + 1)).mul(&ve));
        let a = RatFn::q_pow(k, e64 * (c - t_shift)).neg().div(&ve.mul(&d));
        let b = one.div(&d);
        let label = format!("C({a_arg},{c};{t_shift};{e})");
        let mut basis = Self::new(ctx, BetaKind::Geometric((a_arg as u32) * e), vec![a], vec![b], label)?;
        if t_shift > 0 {
            basis.seed = Seed::QBinom { a: a_arg, c, bottom: t_shift, e };
        }
        Ok(basis)
    }

    /// Classical binomial basis `binom(n, k)` with `beta(n) = n`.
    pub fn binomial(ctx: &Ctx) -> Result<Self> {
        let k = &ctx.k;
        let kv = RatFn::shift_var(k)?;
        let one = RatFn::one(k);
        let d = kv.add(&one);
        Self::new(ctx, BetaKind::Arithmetic, vec![one.div(&d)], vec![kv.neg().div(&d)], "Binom")
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.ctx.k
    }

    pub fn beta(&self) -> BetaKind {
        self.beta
    }

    pub fn sections(&self) -> usize {
        self.a.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn a(&self, r: usize) -> &RatFn {
        &self.a[r]
    }

    pub fn b(&self, r: usize) -> &RatFn {
        &self.b[r]
    }

    /// Root `rho_r(m) = -b_r(m) / a_r(m)`.
    pub fn root(&self, r: usize) -> RatFn {
        self.b[r].div(&self.a[r]).neg()
    }

    fn split(&self, k: i64) -> (usize, i64) {
        let t = self.sections() as i64;
        (k.rem_euclid(t) as usize, k.div_euclid(t))
    }

    pub fn a_at(&self, k: i64) -> Result<RatFn> {
        let (r, m) = self.split(k);
        self.a[r].eval_at_power(m)
    }

    pub fn b_at(&self, k: i64) -> Result<RatFn> {
        let (r, m) = self.split(k);
        self.b[r].eval_at_power(m)
    }

    pub fn root_at(&self, k: i64) -> Result<RatFn> {
        let (r, m) = self.split(k);
        self.root(r).eval_at_power(m)
    }

    /// `beta(n)` as a value.
    pub fn beta_value(&self, n: i64) -> RatFn {
        match self.beta {
            BetaKind::Geometric(e) => RatFn::q_pow(&self.ctx.k, e as i64 * n),
            BetaKind::Arithmetic => RatFn::from_int(&self.ctx.k, n),
        }
    }

    /// `(gamma, nu)` with `E beta(n) = gamma beta(n) + nu`.
    pub fn beta_action(&self) -> (RatFn, RatFn) {
        let k = &self.ctx.k;
        match self.beta {
            BetaKind::Geometric(e) => (RatFn::q_pow(k, e as i64), RatFn::zero(k)),
            BetaKind::Arithmetic => (RatFn::one(k), RatFn::one(k)),
        }
    }

    fn seed_value(&self, n: i64) -> RatFn {
        match &self.seed {
            Seed::One => RatFn::one(&self.ctx.k),
            Seed::QBinom { a, c, bottom, e } => qbinom(&self.ctx.k, a * n + c, *bottom, *e),
        }
    }

    /// Step coefficients `(a(j), b(j))` for `j < kmax`.
    pub fn step_values(&self, kmax: usize) -> Result<Vec<(RatFn, RatFn)>> {
        (0..kmax as i64).map(|j| Ok((self.a_at(j)?, self.b_at(j)?))).collect()
    }

    /// `B_0(n), ..., B_kmax(n)`.
    pub fn elements_at(&self, n: i64, kmax: usize) -> Result<Vec<RatFn>> {
        let steps = self.step_values(kmax)?;
        Ok(self.elements_with_steps(n, &steps))
    }

    pub(crate) fn elements_with_steps(&self, n: i64, steps: &[(RatFn, RatFn)]) -> Vec<RatFn> {
        let beta = self.beta_value(n);
        let mut out = Vec::with_capacity(steps.len() + 1);
        let mut cur = self.seed_value(n);
        out.push(cur.clone());
        for (a, b) in steps {
            if !cur.is_zero() {
                cur = cur.mul(&a.mul(&beta).add(b));
            }
            out.push(cur.clone());
        }
        out
    }

    /// Exact value of `B_k(n)`.
    pub fn element(&self, k: usize, n: i64) -> Result<RatFn> {
        Ok(self.elements_at(n, k)?.pop().expect("at least one element"))
    }

    /// Least `n` with `B_k(n) != 0`, searched up to `bound` (default `k + 8`).
    pub fn leading_index(&self, k: usize, bound: Option<usize>) -> Result<Option<usize>> {
        let bound = bound.unwrap_or(k + 8);
        let steps = self.step_values(k)?;
        for n in 0..=bound {
            let v = self.elements_with_steps(n as i64, &steps);
            if !v[k].is_zero() {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// The same basis described in `t * lambda` sections.
    pub fn refine(&self, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::Usage("refinement factor must be positive".into()));
        }
        if lambda == 1 {
            return Ok(self.clone());
        }
        let t = self.sections();
        let mut a = Vec::with_capacity(t * lambda);
        let mut b = Vec::with_capacity(t * lambda);
        for rp in 0..t * lambda {
            let (r, c) = (rp % t, (rp / t) as i64);
            a.push(self.a[r].reindex(lambda as u32, c)?);
            b.push(self.b[r].reindex(lambda as u32, c)?);
        }
        Ok(FactorialBasis {
            ctx: self.ctx.clone(),
            beta: self.beta,
            a,
            b,
            seed: self.seed.clone(),
            label: self.label.clone(),
        })
    }
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

pub(crate) fn lcm_usize(a: usize, b: usize) -> usize {
    a / gcd_usize(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::new(&[], false).unwrap()
    }

    #[test]
    fn power_basis_values() {
        let c = ctx();
        let p1 = FactorialBasis::q_power(&c, 1).unwrap();
        assert_eq!(p1.element(3, 2).unwrap(), RatFn::q_pow(&c.k, 6));
        let p2 = FactorialBasis::q_power(&c, 2).unwrap();
        assert_eq!(p2.element(1, 4).unwrap(), RatFn::q_pow(&c.k, 8));
        assert!(p1.root(0).is_zero());
    }

    #[test]
    fn falling_basis_values() {
        let c = ctx();
        let f = FactorialBasis::q_falling(&c).unwrap();
        let q = |e| RatFn::q_pow(&c.k, e);
        let one = RatFn::one(&c.k);
        assert_eq!(f.element(2, 2).unwrap(), q(2).sub(&one).mul(&q(2).sub(&q(1))));
        for k in 1..6 {
            for n in 0..k {
                assert!(f.element(k, n as i64).unwrap().is_zero());
            }
        }
        assert_eq!(f.root_at(3).unwrap(), q(3));
    }

    #[test]
    fn binomial_basis_matches_gaussian_binomials() {
        let c = ctx();
        let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
        for n in 0..8 {
            for k in 0..8 {
                assert_eq!(b.element(k, n).unwrap(), qbinom(&c.k, n, k as i64, 1));
            }
        }
        let shifted = FactorialBasis::q_binomial(&c, 1, 1, 1, 1).unwrap();
        for n in 0..6 {
            for k in 0..6 {
                assert_eq!(shifted.element(k, n).unwrap(), qbinom(&c.k, n + 1, k as i64 + 1, 1));
            }
        }
    }

    #[test]
    fn refinement_preserves_elements() {
        let c = ctx();
        let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
        let r = b.refine(3).unwrap();
        assert_eq!(r.sections(), 3);
        for k in 0..10 {
            assert_eq!(r.element(k, 7).unwrap(), b.element(k, 7).unwrap());
        }
    }
}
