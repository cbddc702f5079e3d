#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use qfactorial::arith::{Ctx, Monomial, RatFn, VarTable, ZPoly};
use qfactorial::basis::FactorialBasis;
use qfactorial::compat::{compile_expr, BasisCompat};
use qfactorial::expr::{format_operator, format_ratfn, parse_operator, parse_ratfn, Mode};
use qfactorial::ore::OreOp;
use qfactorial::series::Series;

pub type Terms = Vec<(u32, u32, u32, i64)>;

pub fn ctx() -> Ctx {
    Ctx::new(&["a".to_string()], false).unwrap()
}

// exponents of (q, a, shift variable) with a coefficient
pub fn terms(max_terms: usize, shift: u32) -> impl Strategy<Value = Terms> {
    prop::collection::vec((0u32..3, 0u32..2, 0u32..=shift, -3i64..=3), 1..=max_terms)
}

pub fn poly(table: &Arc<VarTable>, ts: &[(u32, u32, u32, i64)]) -> ZPoly {
    let n = table.nvars();
    ZPoly::from_terms(
        ts.iter()
            .map(|&(eq, ea, ev, c)| {
                let mut exps = vec![0u32; n];
                exps[0] = eq;
                exps[1] = ea;
                if n > 2 {
                    exps[2] = ev;
                }
                (Monomial::from_exps(&exps), BigInt::from(c))
            })
            .collect(),
    )
}

pub fn ratfn(table: &Arc<VarTable>, num: &Terms, den: &[(u32, u32, u32, i64)]) -> RatFn {
    let d = poly(table, den);
    let d = if d.is_zero() { ZPoly::one() } else { d };
    RatFn::from_parts(table, poly(table, num), d).unwrap()
}

pub fn op_terms(max_order: usize) -> impl Strategy<Value = Vec<Terms>> {
    prop::collection::vec(terms(3, 2), 1..=max_order + 1)
}

// operator with a nonzero constant term and nonzero leading coefficient
pub fn operator(table: &Arc<VarTable>, cs: &[Terms]) -> OreOp {
    let last = cs.len() - 1;
    OreOp::from_coeffs(
        table,
        cs.iter().enumerate().map(|(i, t)| {
            let p = poly(table, t);
            let p = if p.is_zero() && (i == 0 || i == last) { ZPoly::one() } else { p };
            (i as i32, RatFn::from_poly(table, p))
        }),
    )
}

pub fn basis(c: &Ctx, which: usize) -> FactorialBasis {
    match which {
        0 => FactorialBasis::q_binomial(c, 1, 0, 0, 1).unwrap(),
        1 => FactorialBasis::q_falling(c).unwrap(),
        2 => FactorialBasis::q_power(c, 1).unwrap(),
        _ => FactorialBasis::q_binomial(c, 1, 0, 0, 2).unwrap(),
    }
}

pub fn ratfn_field_axioms(a: &Terms, ad: &Terms, b: &Terms, bd: &Terms, c: &Terms) -> Result<(), TestCaseError> {
    let t = VarTable::plain(&["a"]);
    let (x, y, z) = (ratfn(&t, a, ad), ratfn(&t, b, bd), ratfn(&t, c, &[]));
    prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
    prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    prop_assert_eq!(x.add(&y), y.add(&x));
    prop_assert_eq!(x.mul(&y), y.mul(&x));
    prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
    prop_assert!(x.sub(&x).is_zero());
    prop_assert_eq!(x.mul(&RatFn::one(&t)), x.clone());
    if !x.is_zero() {
        prop_assert!(x.mul(&x.inv().unwrap()).is_one());
    }
    if !y.is_zero() {
        prop_assert_eq!(x.div(&y).mul(&y), x.clone());
    }
    Ok(())
}

pub fn ratfn_round_trip(a: &Terms, ad: &Terms) -> Result<(), TestCaseError> {
    let t = VarTable::plain(&["a"]);
    let x = ratfn(&t, a, ad);
    prop_assert_eq!(parse_ratfn(&format_ratfn(&x), &t).unwrap(), x);
    Ok(())
}

pub fn ore_right_division(a: &[Terms], b: &[Terms]) -> Result<(), TestCaseError> {
    let c = ctx();
    let (a, b) = (operator(&c.k, a), operator(&c.k, b));
    let (quo, rem) = a.right_divide(&b).unwrap();
    prop_assert_eq!(quo.mul(&b).add(&rem), a);
    prop_assert!(rem.is_zero() || rem.order() < b.order() || rem.max_exp() < b.max_exp());
    Ok(())
}

pub fn ore_gcrd(x: &[Terms], y: &[Terms], f: &[Terms]) -> Result<(), TestCaseError> {
    let c = ctx();
    let f = operator(&c.k, f);
    let (a, b) = (operator(&c.k, x).mul(&f), operator(&c.k, y).mul(&f));
    let g = a.gcrd(&b).unwrap();
    prop_assert!(a.right_divide(&g).unwrap().1.is_zero());
    prop_assert!(b.right_divide(&g).unwrap().1.is_zero());
    prop_assert!(g.right_divide(&f).unwrap().1.is_zero());
    Ok(())
}

pub fn ore_lclm(x: &[Terms], y: &[Terms]) -> Result<(), TestCaseError> {
    let c = ctx();
    let (a, b) = (operator(&c.k, x), operator(&c.k, y));
    let (l, u, w) = a.lclm(&b).unwrap();
    prop_assert_eq!(u.mul(&a), l.clone());
    prop_assert_eq!(w.mul(&b), l.clone());
    prop_assert!(l.order() <= a.order() + b.order());
    prop_assert!(l.right_divide(&a).unwrap().1.is_zero());
    prop_assert!(l.right_divide(&b).unwrap().1.is_zero());
    Ok(())
}

pub fn operator_round_trip(x: &[Terms]) -> Result<(), TestCaseError> {
    let c = ctx();
    let a = operator(&c.k, x);
    prop_assert_eq!(parse_operator(&format_operator(&a, Mode::K), &c.k, Mode::K).unwrap(), a);
    Ok(())
}

pub fn series_inverse(a: &Terms) -> Result<(), TestCaseError> {
    let t = VarTable::plain(&["a"]);
    // 1 + q * f has a unit constant term
    let f = RatFn::one(&t).add(&RatFn::q(&t).mul(&ratfn(&t, a, &[])));
    let s = Series::from_ratfn(&f, 15).unwrap();
    prop_assert_eq!(s.mul(&s.inv().unwrap()), Series::one(&t, 15));
    Ok(())
}

pub fn homomorphism(x: &[Terms], y: &[Terms], which: usize, sections: usize) -> Result<(), TestCaseError> {
    let c = ctx();
    let b = basis(&c, which);
    let bc = BasisCompat::compute(&b).unwrap();
    // expressions must be polynomial in beta(n) = q^(e n)
    let e = if which == 3 { 2 } else { 1 };
    let scale = |cs: &[Terms]| -> Vec<Terms> {
        cs.iter().map(|t| t.iter().map(|&(a, b, v, k)| (a, b, e * v, k)).collect()).collect()
    };
    let (l1, l2) = (operator(&c.n, &scale(x)), operator(&c.n, &scale(y)));
    let r = |l: &OreOp| compile_expr(&b, l, &bc, sections).unwrap();
    prop_assert_eq!(r(&l1.mul(&l2)), r(&l1).mul(&r(&l2)));
    prop_assert_eq!(r(&l1.add(&l2)), r(&l1).add(&r(&l2)));
    Ok(())
}
