//! q-Pochhammer symbols and Gaussian binomials as exact values.

use std::sync::Arc;

use crate::arith::{RatFn, VarTable};

/// `(a; base)_k` for `k >= 0`.
pub fn qpoch(a: &RatFn, base: &RatFn, k: usize) -> RatFn {
    let one = RatFn::one(a.table());
    let mut acc = one.clone();
    let mut x = a.clone();
    for _ in 0..k {
        acc = acc.mul(&one.sub(&x));
        x = x.mul(base);
    }
    acc
}

/// `(q^a; q^b)_k` with integer exponents.
pub fn qpoch_pow(table: &Arc<VarTable>, a: i64, b: i64, k: usize) -> RatFn {
    qpoch(&RatFn::q_pow(table, a), &RatFn::q_pow(table, b), k)
}

/// Gaussian binomial `[n choose k]` in base `q^e`; zero unless `0 <= k <= n`.
pub fn qbinom(table: &Arc<VarTable>, n: i64, k: i64, e: u32) -> RatFn {
    if k < 0 || n < 0 || k > n {
        return RatFn::zero(table);
    }
    let k = k.min(n - k);
    let e = e as i64;
    let mut num = RatFn::one(table);
    let mut den = RatFn::one(table);
    let one = RatFn::one(table);
    for j in 0..k {
        num = num.mul(&one.sub(&RatFn::q_pow(table, e * (n - j))));
        den = den.mul(&one.sub(&RatFn::q_pow(table, e * (j + 1))));
    }
    num.div(&den)
}

/// Classical binomial coefficient as a value.
pub fn binom(table: &Arc<VarTable>, n: i64, k: i64) -> RatFn {
    if k < 0 || n < 0 || k > n {
        return RatFn::zero(table);
    }
    let mut acc = num_bigint::BigInt::from(1);
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    RatFn::from_bigint(table, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomial_small() {
        let t = VarTable::plain(&[]);
        let q = RatFn::q(&t);
        let one = RatFn::one(&t);
        // [4 choose 2] = (1 + q^2)(1 + q + q^2)
        let expected = one.add(&q.mul(&q)).mul(&one.add(&q).add(&q.mul(&q)));
        assert_eq!(qbinom(&t, 4, 2, 1), expected);
        assert!(qbinom(&t, 2, 3, 1).is_zero());
        assert!(qbinom(&t, 2, 2, 1).is_one());
    }

    #[test]
    fn q_pochhammer_three() {
        let t = VarTable::plain(&[]);
        let p = qpoch_pow(&t, 1, 1, 3);
        let q = |e| RatFn::q_pow(&t, e);
        let one = RatFn::one(&t);
        let expected = one.sub(&q(1)).sub(&q(2)).add(&q(4)).add(&q(5)).sub(&q(6));
        assert_eq!(p, expected);
    }
}
