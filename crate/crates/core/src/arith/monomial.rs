//! Packed exponent vectors.
//!
//! A monomial stores up to [`MAX_VARS`] exponents in 16-bit fields of a `u128`,
//! with the total degree in the top field. Variable `0` sits in the least
//! significant field, so plain integer comparison of the packed words is the
//! graded lexicographic order in which variable `0` (always `q`) is compared last.

use std::cmp::Ordering;

/// Maximum number of variables a monomial can carry.
pub const MAX_VARS: usize = 7;

/// Largest exponent a single field may hold.
pub const MAX_EXP: u32 = (1 << 15) - 1;

const FIELD: u32 = 16;
const TOTAL_SHIFT: u32 = FIELD * MAX_VARS as u32;
const FIELD_MASK: u128 = 0xFFFF;
// high bit of every field, including the total-degree field
const GUARD: u128 = {
    let mut g = 0u128;
    let mut i = 0;
    while i <= MAX_VARS {
        g |= 0x8000u128 << (FIELD * i as u32);
        i += 1;
    }
    g
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(i: usize, e: u32) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        assert!(e <= MAX_EXP, "exponent {e} too large");
        Monomial(((e as u128) << (FIELD * i as u32)) | ((e as u128) << TOTAL_SHIFT))
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut m = Monomial::ONE;
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                m = m * Monomial::var(i, e);
            }
        }
        m
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (FIELD * i as u32)) & FIELD_MASK) as u32
    }

    #[inline]
    pub fn total(self) -> u32 {
        (self.0 >> TOTAL_SHIFT) as u32
    }

    pub fn exps(self) -> [u32; MAX_VARS] {
        let mut out = [0; MAX_VARS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.exp(i);
        }
        out
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// Componentwise `self <= other`.
    #[inline]
    pub fn divides(self, other: Monomial) -> bool {
        ((other.0 | GUARD) - self.0) & GUARD == GUARD
    }

    /// `self / other`; `other` must divide `self`.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, other: Monomial) -> Monomial {
        debug_assert!(other.divides(self));
        Monomial(self.0 - other.0)
    }

    pub fn try_div(self, other: Monomial) -> Option<Monomial> {
        other.divides(self).then(|| Monomial(self.0 - other.0))
    }

    /// Componentwise minimum.
    pub fn gcd(self, other: Monomial) -> Monomial {
        let mut exps = [0u32; MAX_VARS];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exp(i).min(other.exp(i));
        }
        Monomial::from_exps(&exps)
    }

    /// Componentwise maximum.
    pub fn lcm(self, other: Monomial) -> Monomial {
        let mut exps = [0u32; MAX_VARS];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exp(i).max(other.exp(i));
        }
        Monomial::from_exps(&exps)
    }

    /// The same monomial with the exponent of variable `i` replaced.
    pub fn with_exp(self, i: usize, e: u32) -> Monomial {
        let mut exps = self.exps();
        exps[i] = e;
        Monomial::from_exps(&exps)
    }

    pub fn without(self, i: usize) -> Monomial {
        self.with_exp(i, 0)
    }

    pub fn pow(self, n: u32) -> Monomial {
        let mut exps = self.exps();
        for e in exps.iter_mut() {
            *e = e.checked_mul(n).filter(|&x| x <= MAX_EXP).expect("monomial exponent overflow");
        }
        Monomial::from_exps(&exps)
    }
}

impl std::ops::Mul for Monomial {
    type Output = Monomial;

    #[inline]
    fn mul(self, rhs: Monomial) -> Monomial {
        let r = self.0 + rhs.0;
        assert!(r & GUARD == 0, "monomial exponent overflow");
        Monomial(r)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x^{:?}", self.exps())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_roundtrip() {
        let m = Monomial::from_exps(&[3, 0, 2, 0, 0, 0, 7]);
        assert_eq!(m.exps(), [3, 0, 2, 0, 0, 0, 7]);
        assert_eq!(m.total(), 12);
    }

    #[test]
    fn grlex_with_q_last() {
        // same total degree: the higher variable decides
        let qv = Monomial::from_exps(&[1, 0, 1]);
        let q2 = Monomial::from_exps(&[2]);
        assert!(qv > q2);
        let v2 = Monomial::from_exps(&[0, 0, 2]);
        assert!(v2 > qv);
        assert!(Monomial::var(0, 3) > Monomial::var(2, 2));
    }

    #[test]
    fn divisibility() {
        let a = Monomial::from_exps(&[2, 1, 0]);
        let b = Monomial::from_exps(&[3, 1, 4]);
        assert!(a.divides(b));
        assert!(!b.divides(a));
        assert_eq!(b.div(a) * a, b);
        assert_eq!(a.gcd(b), a);
        assert_eq!(a.lcm(b), b);
        assert!(Monomial::ONE.divides(a));
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_is_caught() {
        let big = Monomial::var(0, MAX_EXP);
        let _ = big * big;
    }
}
