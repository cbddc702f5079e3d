use qfactorial::arith::{Ctx, RatFn};
use qfactorial::basis::FactorialBasis;
use qfactorial::compat::{
    beta_operator, compat_mul_beta, compat_shift, compat_verify, compile_expr, shift_operator, BasisCompat,
};
use qfactorial::expr::{parse_operator, Mode};
use qfactorial::ore::{OreMat, OreOp};
use qfactorial::product::{inherit_compat, product_basis, Atom};

fn ctx(params: &[&str]) -> Ctx {
    Ctx::new(&params.iter().map(|s| s.to_string()).collect::<Vec<_>>(), false).unwrap()
}

fn k_op(c: &Ctx, s: &str) -> OreOp {
    parse_operator(s, &c.k, Mode::K).unwrap()
}

fn n_op(c: &Ctx, s: &str) -> OreOp {
    parse_operator(s, &c.n, Mode::N).unwrap()
}

fn matrix(c: &Ctx, rows: &[&[&str]]) -> OreMat {
    OreMat::from_entries(rows.iter().map(|r| r.iter().map(|s| k_op(c, s)).collect()).collect())
}

#[test]
fn power_basis_operators() {
    let c = ctx(&[]);
    for e in 1..=3u32 {
        let p = FactorialBasis::q_power(&c, e).unwrap();
        assert_eq!(compat_mul_beta(&p).rec_operator().unwrap(), k_op(&c, "S^(-1)"));
        let expected = k_op(&c, &format!("q^({e}k)"));
        assert_eq!(compat_shift(&p, None).unwrap().rec_operator().unwrap(), expected);
    }
}

#[test]
fn falling_basis_operators() {
    let c = ctx(&[]);
    let f = FactorialBasis::q_falling(&c).unwrap();
    assert_eq!(compat_mul_beta(&f).rec_operator().unwrap(), k_op(&c, "S^(-1) + q^k"));
    let e = compat_shift(&f, None).unwrap();
    assert_eq!(e.rec_operator().unwrap(), k_op(&c, "q^k + q^k*(q^(k+1) - 1)*S"));
    // E f_k = q^(k-1)(q^k - 1) f_(k-1) + q^k f_k
    assert_eq!(e.alpha(0, -1), k_op(&c, "q^(k-1)*(q^k-1)").coeff(0));
}

#[test]
fn q_binomial_beta_expansion() {
    let c = ctx(&[]);
    let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
    let m = compat_mul_beta(&b);
    // q^n [n,k] = q^k [n,k] + q^k (q^(k+1) - 1) [n,k+1]
    assert_eq!(m.alpha(0, 0), k_op(&c, "q^k").coeff(0));
    assert_eq!(m.alpha(0, 1), k_op(&c, "q^k*(q^(k+1)-1)").coeff(0));
    assert_eq!(m.rec_operator().unwrap(), k_op(&c, "q^(k-1)*(q^k-1)*S^(-1) + q^k"));
}

#[test]
fn pochhammer_operator_image() {
    let c = ctx(&["z"]);
    let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
    let bc = BasisCompat::compute(&b).unwrap();
    let img = compile_expr(&b, &n_op(&c, "E - 1 + z*qn"), &bc, 1).unwrap().into_scalar().unwrap();
    // the S^0 coefficient is R(E) + z R(q^n) at S^0, i.e. q^k + z q^k - 1
    let expected = k_op(&c, "(z*q^k/q)*(q^k-1)*S^(-1) + ((z+1)*q^k - 1) + S");
    assert_eq!(img, expected);
    // (z;q)_n = sum_k (-1)^k z^k q^((k^2-k)/2) [n,k]
    let z = RatFn::param(&c.k, "z").unwrap();
    let coeffs: Vec<RatFn> =
        (0..12i64).map(|k| z.neg().pow(k).unwrap().mul(&RatFn::q_pow(&c.k, (k * k - k) / 2))).collect();
    let (_, out) = img.apply_to_seq(&coeffs, 0).unwrap();
    assert!(out.iter().all(RatFn::is_zero));
}

#[test]
fn constant_expression_is_identity() {
    let c = ctx(&[]);
    let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
    let bc = BasisCompat::compute(&b).unwrap();
    let img = compile_expr(&b, &n_op(&c, "1"), &bc, 2).unwrap();
    assert_eq!(img, OreMat::identity(&c.k, 2));
}

#[test]
fn homomorphism_on_products() {
    let c = ctx(&[]);
    let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
    let bc = BasisCompat::compute(&b).unwrap();
    let l1 = n_op(&c, "E - q*qn");
    let l2 = n_op(&c, "qn*E + 1");
    let r = |l: &OreOp| compile_expr(&b, l, &bc, 1).unwrap().into_scalar().unwrap();
    assert_eq!(r(&l1.mul(&l2)), r(&l1).mul(&r(&l2)));
    assert_eq!(r(&l1.add(&l2)), r(&l1).add(&r(&l2)));
}

#[test]
fn binomial_family_shift_orders() {
    let c = ctx(&[]);
    for (a, cc, e) in [(1, 0, 1), (2, 0, 1), (2, 3, 2), (1, 0, 3)] {
        let b = FactorialBasis::q_binomial(&c, a, cc, 0, e).unwrap();
        let comp = compat_shift(&b, None).unwrap();
        assert_eq!(comp.lower(), a as usize);
        assert_eq!(comp.upper(), 0);
    }
}

#[test]
fn shifted_binomial_seed_is_not_shift_compatible() {
    let c = ctx(&[]);
    let b = FactorialBasis::q_binomial(&c, 1, 1, 1, 1).unwrap();
    assert!(compat_shift(&b, None).is_err());
    assert!(compat_verify(&b, &beta_operator(&b), &compat_mul_beta(&b), 10).unwrap().ok);
}

#[test]
fn refined_binomial_table_two_sections() {
    let c = ctx(&[]);
    let b = FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap();
    let comp = compat_shift(&b, None).unwrap().refine(2).unwrap();
    let b2 = b.refine(2).unwrap();
    assert!(compat_verify(&b2, &shift_operator(&b2), &comp, 25).unwrap().ok);
    // E [n,k] = q^k [n,k] + [n,k-1]
    assert_eq!(comp.alpha(0, 0), k_op(&c, "q^(2k)").coeff(0));
    assert_eq!(comp.alpha(1, 0), k_op(&c, "q^(2k+1)").coeff(0));
    assert!(comp.alpha(0, -1).is_one() && comp.alpha(1, -1).is_one());
}

fn example_product(c: &Ctx) -> (Vec<FactorialBasis>, FactorialBasis) {
    let factors = vec![FactorialBasis::q_power(c, 2).unwrap(), FactorialBasis::q_binomial(c, 1, 0, 0, 2).unwrap()];
    let prod = product_basis(&factors).unwrap();
    (factors, prod)
}

#[test]
fn product_elements_and_leading_indices() {
    let c = ctx(&[]);
    let (_, prod) = example_product(&c);
    assert_eq!(prod.sections(), 2);
    // B_3(1) = P_2(1) Q_1(1) = q^4
    assert_eq!(prod.element(3, 1).unwrap(), RatFn::q_pow(&c.k, 4));
    for k in 0..10 {
        assert_eq!(prod.leading_index(2 * k, None).unwrap(), Some(k));
        assert_eq!(prod.leading_index(2 * k + 1, None).unwrap(), Some(k));
    }
}

#[test]
fn product_recurrence_matrices() {
    let c = ctx(&[]);
    let (factors, prod) = example_product(&c);
    let beta = inherit_compat(&factors, &prod, Atom::MulBeta).unwrap();
    // q^(2n) B_(2k) = B_(2k+1); q^(2n) B_(2k+1) = q^(2k) B_(2k+1) + q^(2k)(q^(2k+2) - 1) B_(2k+2)
    assert!(beta.alpha(0, 0).is_zero() && beta.alpha(0, 1).is_one());
    assert_eq!(beta.alpha(1, 0), k_op(&c, "q^(2k)").coeff(0));
    assert_eq!(beta.alpha(1, 1), k_op(&c, "q^(2k)*(q^(2k+2)-1)").coeff(0));
    let rb = beta.rec_matrix().unwrap();
    assert_eq!(rb, matrix(&c, &[&["0", "q^(2k-2)*(q^(2k)-1)*S^(-1)"], &["1", "q^(2k)"]]));

    let shift = inherit_compat(&factors, &prod, Atom::Shift).unwrap();
    assert_eq!((shift.lower(), shift.upper(), shift.sections()), (2, 0, 2));
    // E B_(2k) = q^(2k) B_(2k-1) + q^(4k) B_(2k)
    assert_eq!(shift.alpha(0, -1), k_op(&c, "q^(2k)").coeff(0));
    assert_eq!(shift.alpha(0, 0), k_op(&c, "q^(4k)").coeff(0));
    assert!(shift.alpha(0, -2).is_zero());
    let re = shift.rec_matrix().unwrap();
    let expected = matrix(&c, &[&["q^(4k)", "q^(4k)*(q^(2k)-1)"], &["q^(2k+2)*S", "q^(4k+2) + q^(4k+4)*S"]]);
    assert_eq!(re, expected);
    assert!(compat_verify(&prod, &shift_operator(&prod), &shift, 25).unwrap().ok);
}

#[test]
fn product_of_power_and_binomial() {
    let c = ctx(&[]);
    let factors = vec![FactorialBasis::q_power(&c, 1).unwrap(), FactorialBasis::q_binomial(&c, 1, 0, 0, 1).unwrap()];
    let prod = product_basis(&factors).unwrap();
    let shift = inherit_compat(&factors, &prod, Atom::Shift).unwrap();
    assert!(shift.lower() <= 2);
    assert_eq!(shift.sections(), 2);
}
