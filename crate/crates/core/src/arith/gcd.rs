//! Multivariate gcd over the integers.
//!
//! Integer and monomial content are split off first, then variables that occur
//! in only one argument are eliminated through coefficient gcds. What remains
//! goes to the heuristic evaluation/interpolation gcd, with a recursive
//! primitive remainder sequence as fallback.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::poly::ZPoly;

const HEU_TRIES: usize = 6;

/// Returns `(h, f/h, g/h)` where `h` is the gcd with positive leading coefficient.
pub fn gcd_cofactors(f: &ZPoly, g: &ZPoly) -> (ZPoly, ZPoly, ZPoly) {
    if f.is_zero() && g.is_zero() {
        return (ZPoly::zero(), ZPoly::zero(), ZPoly::zero());
    }
    if f.is_zero() {
        let mut h = g.clone();
        let neg = h.normalize_sign();
        let unit = if neg { ZPoly::constant(-BigInt::one()) } else { ZPoly::one() };
        return (h, ZPoly::zero(), unit);
    }
    if g.is_zero() {
        let (h, cg, cf) = gcd_cofactors(g, f);
        return (h, cf, cg);
    }
    let h = gcd(f, g);
    let cf = f.div_exact(&h).expect("gcd divides first argument");
    let cg = g.div_exact(&h).expect("gcd divides second argument");
    (h, cf, cg)
}

/// Gcd with positive leading coefficient (zero only if both inputs are zero).
pub fn gcd(f: &ZPoly, g: &ZPoly) -> ZPoly {
    if f.is_zero() {
        let mut h = g.clone();
        h.normalize_sign();
        return h;
    }
    if g.is_zero() {
        let mut h = f.clone();
        h.normalize_sign();
        return h;
    }
    let c = f.content().gcd(&g.content());
    let mf = f.monomial_content();
    let mg = g.monomial_content();
    let m = mf.gcd(mg);
    let f1 = f.div_integer(&f.content()).div_monomial(mf);
    let g1 = g.div_integer(&g.content()).div_monomial(mg);
    let mut h = primitive_gcd(&f1, &g1).mul_term(m, &c);
    h.normalize_sign();
    h
}

// Both arguments primitive and free of monomial content.
fn primitive_gcd(f: &ZPoly, g: &ZPoly) -> ZPoly {
    if f.is_constant() || g.is_constant() {
        return ZPoly::one();
    }
    if f == g || *f == g.neg() {
        return f.clone();
    }
    let fm = f.var_mask();
    let gm = g.var_mask();
    if fm & !gm != 0 {
        return reduce_by_coefficients(f, g, (fm & !gm).trailing_zeros() as usize);
    }
    if gm & !fm != 0 {
        return reduce_by_coefficients(g, f, (gm & !fm).trailing_zeros() as usize);
    }
    if let Some((h, _, _)) = heu_gcd(f, g) {
        return h;
    }
    prs_gcd(f, g)
}

// `g` does not involve variable `i`, so the gcd divides every coefficient of `f` in `x_i`.
fn reduce_by_coefficients(f: &ZPoly, g: &ZPoly, i: usize) -> ZPoly {
    let mut coeffs = f.coefficients_in(i);
    coeffs.sort_by_key(|c| c.len());
    let mut acc = g.clone();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        acc = gcd(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn top_var(mask: u32) -> usize {
    31 - mask.leading_zeros() as usize
}

fn heu_gcd(f: &ZPoly, g: &ZPoly) -> Option<(ZPoly, ZPoly, ZPoly)> {
    let mask = f.var_mask() | g.var_mask();
    if mask == 0 {
        let a = f.constant_term();
        let b = g.constant_term();
        let h = a.gcd(&b);
        if h.is_zero() {
            return None;
        }
        return Some((ZPoly::constant(h.clone()), ZPoly::constant(&a / &h), ZPoly::constant(&b / &h)));
    }
    let cont = f.content().gcd(&g.content());
    let f = f.div_integer(&cont);
    let g = g.div_integer(&cont);
    let var = top_var(mask);

    let f_norm = f.max_norm();
    let g_norm = g.max_norm();
    let b = BigInt::from(2) * (&f_norm).min(&g_norm) + BigInt::from(29);
    let lc_bound = (&f_norm / f.lead_coeff().abs()).min(&g_norm / g.lead_coeff().abs());
    // the division test only certifies the gcd for xi >= 2 min(|f|, |g|) + 2
    let mut xi = b.max(BigInt::from(2) * lc_bound + BigInt::from(2));

    let cont_poly = ZPoly::constant(cont);
    for _ in 0..HEU_TRIES {
        let ff = f.eval_var(var, &xi);
        let gg = g.eval_var(var, &xi);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some((h, cff, cfg)) = heu_gcd(&ff, &gg) {
                let h = interpolate(&h, &xi, var);
                let h = primitive(&h);
                if !h.is_zero() {
                    if let Some(cf) = f.div_exact(&h) {
                        if let Some(cg) = g.div_exact(&h) {
                            return Some((h.mul(&cont_poly), cf, cg));
                        }
                    }
                }
                let cf = interpolate(&cff, &xi, var);
                if !cf.is_zero() {
                    if let Some(h) = f.div_exact(&cf) {
                        if let Some(cg) = g.div_exact(&h) {
                            return Some((h.mul(&cont_poly), cf, cg));
                        }
                    }
                }
                let cg = interpolate(&cfg, &xi, var);
                if !cg.is_zero() {
                    if let Some(h) = g.div_exact(&cg) {
                        if let Some(cf) = f.div_exact(&h) {
                            return Some((h.mul(&cont_poly), cf, cg));
                        }
                    }
                }
            }
        }
        let root4 = xi.sqrt().sqrt();
        xi = &xi * BigInt::from(73794) * root4 / BigInt::from(27011);
    }
    None
}

fn primitive(h: &ZPoly) -> ZPoly {
    if h.is_zero() {
        return h.clone();
    }
    let mut p = h.div_integer(&h.content());
    p.normalize_sign();
    p
}

// Recovers a polynomial in `x_var` from its image at `x_var = xi` via balanced xi-adic digits.
fn interpolate(h: &ZPoly, xi: &BigInt, var: usize) -> ZPoly {
    let half = xi / BigInt::from(2);
    let mut rest = h.clone();
    let mut coeffs = Vec::new();
    while !rest.is_zero() {
        let digit = ZPoly::from_terms(
            rest.terms()
                .iter()
                .map(|(m, c)| {
                    let mut r = c.mod_floor(xi);
                    if r > half {
                        r -= xi;
                    }
                    (*m, r)
                })
                .collect(),
        );
        rest = rest.sub(&digit).div_integer(xi);
        coeffs.push(digit);
    }
    ZPoly::from_coefficients_in(var, &coeffs)
}

fn content_in(f: &ZPoly, var: usize) -> ZPoly {
    let mut coeffs = f.coefficients_in(var);
    coeffs.sort_by_key(|c| c.len());
    let mut acc = ZPoly::zero();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        acc = gcd(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn prem(f: &ZPoly, g: &ZPoly, var: usize) -> ZPoly {
    let dg = g.degree_in(var).unwrap_or(0);
    let lg = g.lead_coeff_in(var);
    let mut r = f.clone();
    while let Some(dr) = r.degree_in(var) {
        if dr < dg {
            break;
        }
        let lr = r.lead_coeff_in(var);
        let shift = Monomial::var(var, dr - dg);
        r = r.mul(&lg).sub(&lr.mul(g).mul_term(shift, &BigInt::one()));
    }
    r
}

fn prs_gcd(f: &ZPoly, g: &ZPoly) -> ZPoly {
    let mask = f.var_mask() | g.var_mask();
    if mask == 0 {
        return ZPoly::constant(f.constant_term().gcd(&g.constant_term()));
    }
    let var = top_var(mask);
    let cf = content_in(f, var);
    let cg = content_in(g, var);
    let c = gcd(&cf, &cg);
    let mut a = f.div_exact(&cf).expect("content divides");
    let mut b = g.div_exact(&cg).expect("content divides");
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.degree_in(var) == Some(0) {
            return c;
        }
        let r = prem(&a, &b, var);
        if r.is_zero() {
            break;
        }
        let rc = content_in(&r, var);
        a = b;
        b = r.div_exact(&rc).expect("content divides");
    }
    let mut h = b.mul(&c);
    h.normalize_sign();
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::Poly;

    fn z(terms: &[(i64, &[u32])]) -> ZPoly {
        Poly::from_terms(terms.iter().map(|(c, e)| (Monomial::from_exps(e), BigInt::from(*c))).collect())
    }

    #[test]
    fn univariate_common_factor() {
        let a = z(&[(1, &[2]), (-1, &[0])]);
        let b = z(&[(1, &[1]), (-1, &[0])]);
        let c = z(&[(1, &[1]), (1, &[0])]);
        let (h, ca, cb) = gcd_cofactors(&a, &b.mul(&b));
        assert_eq!(h, b);
        assert_eq!(ca, c);
        assert_eq!(cb, b);
    }

    #[test]
    fn multivariate_with_content() {
        let g = z(&[(3, &[1, 1]), (-6, &[0, 0, 2]), (3, &[2])]);
        let a = z(&[(2, &[0, 1]), (1, &[3])]).mul(&g);
        let b = z(&[(5, &[1, 0, 1]), (-1, &[0])]).mul(&g).scale(&BigInt::from(2));
        // leading term of g is -6 v^2
        assert_eq!(gcd(&a, &b), g.neg());
    }

    #[test]
    fn mismatched_variables() {
        let g = z(&[(1, &[1]), (1, &[0])]);
        let a = z(&[(1, &[0, 1]), (1, &[2])]).mul(&g);
        let b = z(&[(1, &[3]), (2, &[0])]).mul(&g);
        assert_eq!(gcd(&a, &b), g);
    }

    #[test]
    fn prs_matches_heuristic() {
        let g = z(&[(1, &[2, 1]), (-3, &[0, 1, 1]), (1, &[0])]);
        let a = z(&[(1, &[1, 0, 2]), (7, &[0, 2])]).mul(&g);
        let b = z(&[(2, &[3]), (-1, &[0, 0, 1])]).mul(&g);
        let mut p = prs_gcd(&a, &b);
        p.normalize_sign();
        assert_eq!(p, g);
        assert_eq!(gcd(&a, &b), g);
    }

    #[test]
    fn evaluation_point_at_twice_a_coefficient() {
        // at the smallest admissible point a coefficient of the gcd sits at xi / 2
        let g = z(&[(2, &[0, 1, 1]), (-1, &[1])]);
        let a = z(&[(2, &[1, 0, 1]), (1, &[0])]).mul(&g);
        assert_eq!(gcd(&a, &g), g);
        assert_eq!(gcd(&a.neg(), &g), g);
    }

    #[test]
    fn coprime_inputs() {
        let a = z(&[(1, &[1, 1]), (1, &[0])]);
        let b = z(&[(1, &[1]), (-1, &[0, 1])]);
        assert!(gcd(&a, &b).is_one());
    }
}
