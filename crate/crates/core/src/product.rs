//! Interlaced products of factorial bases sharing one `beta(n)`.
//!
//! For factors `P^(0), ..., P^(m-1)` the product basis is
//! `1, P^(0)_1, P^(0)_1 P^(1)_1, ..., ` so that
//! `B_(mk+r) = prod_(i<r) P^(i)_(k+1) prod_(i>=r) P^(i)_k`.

use crate::basis::{lcm_usize, FactorialBasis, Seed};
use crate::compat::{beta_operator, compat_mul_beta, compat_shift, compat_verify, Compatibility};
use crate::error::{Error, Result};

/// The product basis in `m * lcm(t_i)` sections.
pub fn product_basis(factors: &[FactorialBasis]) -> Result<FactorialBasis> {
    if factors.len() < 2 {
        return Err(Error::Usage("a product basis needs at least two factors".into()));
    }
    let first = &factors[0];
    for f in factors {
        if f.beta() != first.beta() {
            return Err(Error::Invalid(format!("{} and {} use different beta(n)", first.label(), f.label())));
        }
        if !f.table().same_layout(first.table()) {
            return Err(Error::TableMismatch);
        }
        if *f.seed() != Seed::One {
            return Err(Error::Invalid(format!("{} does not start at 1", f.label())));
        }
    }
    let m = factors.len();
    let l = factors.iter().map(FactorialBasis::sections).fold(1, lcm_usize);
    let mut a = Vec::with_capacity(m * l);
    let mut b = Vec::with_capacity(m * l);
    for s in 0..l {
        for f in factors {
            let ti = f.sections();
            let (d, c) = ((l / ti) as u32, (s / ti) as i64);
            a.push(f.a(s % ti).reindex(d, c)?.retag(first.table())?);
            b.push(f.b(s % ti).reindex(d, c)?.retag(first.table())?);
        }
    }
    let label = format!("Product({})", factors.iter().map(FactorialBasis::label).collect::<Vec<_>>().join(", "));
    FactorialBasis::new(first.ctx(), first.beta(), a, b, label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    Shift,
    MulBeta,
}

/// Compatibility of `atom` with the product, derived on the interlaced data and
/// checked against the bounds `A' <= m max A_i`, `B' <= max B_i`.
pub fn inherit_compat(factors: &[FactorialBasis], product: &FactorialBasis, atom: Atom) -> Result<Compatibility> {
    let m = factors.len();
    let t = m * factors.iter().map(FactorialBasis::sections).fold(1, lcm_usize);
    let factor_comps: Vec<Compatibility> = match atom {
        Atom::Shift => factors.iter().map(|f| compat_shift(f, None)).collect::<Result<_>>()?,
        Atom::MulBeta => factors.iter().map(compat_mul_beta).collect(),
    };
    let max_a = factor_comps.iter().map(Compatibility::lower).max().unwrap_or(0);
    let max_b = factor_comps.iter().map(Compatibility::upper).max().unwrap_or(0);
    let comp = match atom {
        Atom::Shift => compat_shift(product, Some(m * max_a))?,
        Atom::MulBeta => {
            let c = compat_mul_beta(product);
            let op = beta_operator(product);
            if !compat_verify(product, &op, &c, crate::compat::DEFAULT_VERIFY_K)?.ok {
                return Err(Error::NotCompatible(format!("beta(n) on {}", product.label())));
            }
            c
        }
    }
    .trimmed();
    if comp.sections() != t || comp.lower() > m * max_a || comp.upper() > max_b {
        return Err(Error::NotCompatible(format!(
            "{}: inherited ({}, {}) in {} sections exceeds ({}, {}) in {t}",
            product.label(),
            comp.lower(),
            comp.upper(),
            comp.sections(),
            m * max_a,
            max_b
        )));
    }
    Ok(comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Ctx, RatFn};
    use crate::qfunc::qbinom;

    #[test]
    fn interlaced_elements() {
        let c = Ctx::new(&[], false).unwrap();
        let p = FactorialBasis::q_power(&c, 1).unwrap();
        let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
        let prod = product_basis(&[p, b]).unwrap();
        assert_eq!(prod.sections(), 2);
        for k in 0..6 {
            for n in 0..6 {
                let expected = RatFn::q_pow(&c.k, (k * n) as i64).mul(&qbinom(&c.k, n as i64, k as i64, 1));
                assert_eq!(prod.element(2 * k, n as i64).unwrap(), expected);
            }
        }
    }

    #[test]
    fn single_factor_rejected() {
        let c = Ctx::new(&[], false).unwrap();
        let p = FactorialBasis::q_power(&c, 1).unwrap();
        assert!(product_basis(&[p]).is_err());
    }

    #[test]
    fn mismatched_beta_rejected() {
        let c = Ctx::new(&[], false).unwrap();
        let p = FactorialBasis::q_power(&c, 1).unwrap();
        let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 2).unwrap();
        assert!(matches!(product_basis(&[p, b]), Err(Error::Invalid(_))));
    }
}
