use qfactorial::arith::{Ctx, RatFn};
use qfactorial::basis::FactorialBasis;
use qfactorial::expr::{parse_operator, parse_ratfn, Mode};
use qfactorial::ore::OreOp;
use qfactorial::qfunc::qpoch_pow;
use qfactorial::solver::{
    certify, check_annihilates, expand_in_basis, first_order_closed_form, guess_minimal, initial_coefficients,
    normalize, transformed_annihilator, verify_identity, GuessConfig, SectionMode, SeqGen, Shape,
};
use qfactorial::Error;

fn ctx(params: &[&str]) -> Ctx {
    Ctx::new(&params.iter().map(|s| s.to_string()).collect::<Vec<_>>(), false).unwrap()
}

fn k_op(c: &Ctx, s: &str) -> OreOp {
    parse_operator(s, &c.k, Mode::K).unwrap()
}

fn n_op(c: &Ctx, s: &str) -> OreOp {
    parse_operator(s, &c.n, Mode::N).unwrap()
}

fn k_vals(c: &Ctx, xs: &[&str]) -> Vec<RatFn> {
    xs.iter().map(|s| parse_ratfn(s, &c.k).unwrap()).collect()
}

fn binomial(c: &Ctx) -> FactorialBasis {
    FactorialBasis::q_binomial(c, 1, 0, 0, 1).unwrap()
}

// RR_i(N) from the defining recurrence, computed directly
fn rr_values(c: &Ctx, i: usize, count: usize) -> Vec<RatFn> {
    let mut v = vec![RatFn::one(&c.n), if i == 1 { RatFn::one(&c.n).add(&RatFn::q(&c.n)) } else { RatFn::one(&c.n) }];
    while v.len() < count {
        let n = v.len() as i64;
        let next = v[v.len() - 1].add(&RatFn::q_pow(&c.n, n).mul(&v[v.len() - 2]));
        v.push(next);
    }
    v
}

#[test]
fn pochhammer_expansion_coefficients() {
    let c = ctx(&["z"]);
    let z = RatFn::param(&c.n, "z").unwrap();
    // (z;q)_n by its product definition
    let y: Vec<RatFn> = (0..12)
        .map(|n| (0..n).fold(RatFn::one(&c.n), |acc, j| acc.mul(&RatFn::one(&c.n).sub(&z.mul(&RatFn::q_pow(&c.n, j))))))
        .collect();
    let coeffs = expand_in_basis(&y, &binomial(&c), 1, 0, 11).unwrap();
    let zk = RatFn::param(&c.k, "z").unwrap();
    for (k, got) in coeffs.iter().enumerate() {
        let k = k as i64;
        assert_eq!(*got, zk.neg().pow(k).unwrap().mul(&RatFn::q_pow(&c.k, (k * k - k) / 2)));
    }
    let op = transformed_annihilator(&n_op(&c, "E - 1 + z*qn"), &binomial(&c), 1, 0, SectionMode::Coupled).unwrap();
    check_annihilates(&op, &coeffs, 0).unwrap();
}

#[test]
fn basis_element_expands_to_a_delta() {
    let c = ctx(&[]);
    let b = binomial(&c);
    let y: Vec<RatFn> = (0..10).map(|n| b.element(5, n).unwrap()).collect();
    let coeffs = expand_in_basis(&y, &b, 1, 0, 9).unwrap();
    for (k, v) in coeffs.iter().enumerate() {
        assert_eq!(v.is_one(), k == 5);
        assert!(k == 5 || v.is_zero());
    }
}

#[test]
fn rogers_ramanujan_coefficients() {
    let c = ctx(&[]);
    let b = binomial(&c);
    let c1 = expand_in_basis(&rr_values(&c, 1, 8), &b, 1, 0, 7).unwrap();
    assert_eq!(c1, k_vals(&c, &["1", "q", "0", "q^4", "-q^7", "q^9+q^11", "-q^13-q^14-q^16"]));
    let c2 = expand_in_basis(&rr_values(&c, 2, 7), &b, 1, 0, 6).unwrap();
    assert_eq!(c2, k_vals(&c, &["1", "0", "q^2", "-q^4", "q^6+q^7", "-q^9-q^10-q^11"]));
}

#[test]
fn initial_coefficients_from_the_recurrence() {
    let c = ctx(&[]);
    let op = n_op(&c, "E^2 - E - q^2*qn");
    let init = [RatFn::one(&c.n), RatFn::one(&c.n).add(&RatFn::q(&c.n))];
    let got = initial_coefficients(&init, Some(&op), &binomial(&c), 1, 0, 4).unwrap();
    assert_eq!(got, k_vals(&c, &["1", "q", "0", "q^4"]));
    let err = initial_coefficients(&init, None, &binomial(&c), 1, 0, 4).unwrap_err();
    assert!(matches!(err, Error::InsufficientTerms(_)));
}

#[test]
fn sequence_outside_a_section_is_inconsistent() {
    let c = ctx(&[]);
    let y = rr_values(&c, 1, 8);
    let err = expand_in_basis(&y, &binomial(&c), 2, 1, 3).unwrap_err();
    assert_eq!(err.code(), "inconsistent_initials");
}

#[test]
fn unroll_geometric_recurrence() {
    let c = ctx(&[]);
    // c(k+1) = q^k c(k), c(k) = q^(k(k-1)/2)
    let g = SeqGen::new(&k_op(&c, "S - q^k"), vec![RatFn::one(&c.k)], 0).unwrap();
    let terms = g.unroll(8).unwrap();
    for (k, t) in terms.iter().enumerate() {
        let k = k as i64;
        assert_eq!(*t, RatFn::q_pow(&c.k, k * (k - 1) / 2));
    }
}

#[test]
fn unroll_needs_values_at_singular_indices() {
    let c = ctx(&[]);
    // (1 - q^k) c(k+1) = c(k) is singular at k = 0
    let op = k_op(&c, "(1 - q^k)*S - 1");
    let g = SeqGen::new(&op, vec![RatFn::zero(&c.k)], 0).unwrap();
    assert_eq!(g.singular_indices(), &[0]);
    assert_eq!(g.unroll(3).unwrap_err(), Error::MissingInitial(1));
    let g = SeqGen::new(&op, vec![RatFn::zero(&c.k), RatFn::one(&c.k)], 0).unwrap();
    let t = g.unroll(4).unwrap();
    assert_eq!(t[2], RatFn::one(&c.k).div(&RatFn::one(&c.k).sub(&RatFn::q(&c.k))));
    // a nonzero c(0) contradicts the equation at k = 0
    let g = SeqGen::new(&op, vec![RatFn::one(&c.k), RatFn::one(&c.k)], 0).unwrap();
    assert_eq!(g.unroll(3).unwrap_err().code(), "inconsistent_initials");
}

#[test]
fn unroll_checks_extra_initials() {
    let c = ctx(&[]);
    let op = k_op(&c, "S - 1");
    let g = SeqGen::new(&op, k_vals(&c, &["1", "1", "2"]), 0).unwrap();
    assert_eq!(g.unroll(4).unwrap_err().code(), "inconsistent_initials");
}

#[test]
fn guess_constant_sequence() {
    let c = ctx(&[]);
    let terms = vec![RatFn::one(&c.k); 40];
    let g = guess_minimal(&terms, &c.k, &GuessConfig::default()).unwrap().unwrap();
    assert_eq!(g, k_op(&c, "S - 1"));
}

#[test]
fn guess_quadratic_exponent() {
    let c = ctx(&[]);
    let terms: Vec<RatFn> = (0..40).map(|k| RatFn::q_pow(&c.k, k * k)).collect();
    let g = guess_minimal(&terms, &c.k, &GuessConfig::default()).unwrap().unwrap();
    assert!(g.equivalent(&k_op(&c, "S - q^(2k+1)")));
}

#[test]
fn guess_reports_nothing_outside_the_budget() {
    let c = ctx(&[]);
    let primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    let terms: Vec<RatFn> = primes.iter().map(|p| RatFn::from_int(&c.k, *p)).collect();
    let cfg = GuessConfig { max_order: 2, max_degree: 1, margin: 4 };
    assert_eq!(guess_minimal(&terms, &c.k, &cfg).unwrap(), None);
}

#[test]
fn certify_rejects_a_wrong_guess() {
    let c = ctx(&[]);
    let proven = k_op(&c, "S^2 + q^(k+1)*S - q^(k+2)");
    let cert = certify(&proven, &k_vals(&c, &["1", "q"]), &k_op(&c, "S - 1")).unwrap();
    assert!(!cert.valid);
    assert_eq!(cert.witness, Some(1));
}

#[test]
fn certify_accepts_a_right_factor() {
    let c = ctx(&[]);
    let core = k_op(&c, "S^2 - q^(2k+4)");
    let proven = k_op(&c, "S - q^k").mul(&core);
    let initials = k_vals(&c, &["1", "q", "q^4"]);
    let cert = certify(&proven, &initials, &core).unwrap();
    assert!(cert.valid, "{cert:?}");
    let (l, u, w) = &cert.lclm;
    assert_eq!(u.mul(&cert.proven), *l);
    assert_eq!(w.mul(&cert.guessed), *l);
}

#[test]
fn closed_form_quadratic_exponent() {
    let c = ctx(&[]);
    let cf = first_order_closed_form(&k_op(&c, "S - q^(4k+4)"), &RatFn::one(&c.k)).unwrap();
    assert_eq!(cf.to_string(), "q^(2k(k+1))");
    for k in 0..8i64 {
        assert_eq!(cf.eval(k as usize).unwrap(), RatFn::q_pow(&c.k, 2 * k * (k + 1)));
    }
}

#[test]
fn closed_form_with_pochhammer() {
    let c = ctx(&["a"]);
    let op = k_op(&c, "S - a*q^(6k+4)*(1 - q^(6k+3))");
    let cf = first_order_closed_form(&op, &RatFn::one(&c.k)).unwrap();
    assert_eq!(cf.to_string(), "a^k*q^(k(3k+1))*(q^3;q^6)_k");
    let a = RatFn::param(&c.k, "a").unwrap();
    for k in 0..6i64 {
        let expected =
            a.pow(k).unwrap().mul(&RatFn::q_pow(&c.k, 3 * k * k + k)).mul(&qpoch_pow(&c.k, 3, 6, k as usize));
        assert_eq!(cf.eval(k as usize).unwrap(), expected);
    }
}

#[test]
fn closed_form_signed_scalar() {
    let c = ctx(&["t"]);
    let cf = first_order_closed_form(&k_op(&c, "S + t"), &RatFn::one(&c.k)).unwrap();
    assert_eq!(cf.to_string(), "(-t)^k");
}

#[test]
fn closed_form_falls_back_to_a_product() {
    let c = ctx(&[]);
    let op = k_op(&c, "S - (1 + q^k + q^(2k))");
    let cf = first_order_closed_form(&op, &RatFn::one(&c.k)).unwrap();
    assert!(matches!(cf.shape, Shape::Product));
    let mut acc = RatFn::one(&c.k);
    for k in 0..6i64 {
        assert_eq!(cf.eval(k as usize).unwrap(), acc);
        acc = acc.mul(&RatFn::one(&c.k).add(&RatFn::q_pow(&c.k, k)).add(&RatFn::q_pow(&c.k, 2 * k)));
    }
}

#[test]
fn normalize_clears_negative_powers() {
    let c = ctx(&[]);
    let op = k_op(&c, "S^(-1) + q^k");
    let n = normalize(&op);
    assert_eq!(n.min_exp(), Some(0));
    assert!(n.equivalent(&k_op(&c, "1 + q^(k+1)*S")));
}

#[test]
fn identity_report_marks_each_index() {
    let c = ctx(&[]);
    let b = binomial(&c);
    // [n,k] vanishes for k > n, so both truncations agree
    let lhs = |n: usize| -> qfactorial::Result<RatFn> {
        let e = b.elements_at(n as i64, n)?;
        Ok(e.iter().fold(RatFn::zero(b.table()), |acc, x| acc.add(x)))
    };
    let rhs = |n: usize| -> qfactorial::Result<RatFn> {
        let e = b.elements_at(n as i64, n + 2)?;
        Ok(e.iter().fold(RatFn::zero(b.table()), |acc, x| acc.add(x)))
    };
    let rep = verify_identity(lhs, rhs, 6).unwrap();
    assert!(rep.all_equal());
    assert_eq!(rep.checks.len(), 7);
}
