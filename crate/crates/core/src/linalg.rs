//! Dense linear algebra over rational functions, with a modular rank filter.

use std::sync::Arc;

use crate::arith::poly::{inv_mod, mul_mod};
use crate::arith::{RatFn, VarTable};

fn weight(x: &RatFn) -> usize {
    x.num().len() + x.den().len()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<RatFn>], ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let pick = (row..nrows).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| weight(&m[r][col]));
        let Some(p) = pick else { continue };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("nonzero pivot");
        for c in col..ncols {
            if !m[row][c].is_zero() {
                m[row][c] = m[row][c].mul(&inv);
            }
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for c in col..ncols {
                if !pivot_row[c].is_zero() {
                    other[c] = other[c].sub(&f.mul(&pivot_row[c]));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of the right nullspace `{x : M x = 0}`.
pub fn nullspace(m: &[Vec<RatFn>], ncols: usize, table: &Arc<VarTable>) -> Vec<Vec<RatFn>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![RatFn::zero(table); ncols];
        x[free] = RatFn::one(table);
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = a[i][free].neg();
        }
        basis.push(x);
    }
    basis
}

/// Rank of a matrix over `F_p`.
pub fn rank_mod(m: &[Vec<u64>], p: u64) -> usize {
    let mut a = m.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut row = 0;
    for col in 0..ncols {
        let Some(piv) = (row..nrows).find(|&r| a[r][col] != 0) else { continue };
        a.swap(row, piv);
        let inv = inv_mod(a[row][col], p).expect("nonzero pivot");
        for c in col..ncols {
            a[row][c] = mul_mod(a[row][c], inv, p);
        }
        for r in 0..nrows {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in col..ncols {
                    let sub = mul_mod(f, a[row][c], p);
                    a[r][c] = (a[r][c] + p - sub) % p;
                }
            }
        }
        row += 1;
        if row == nrows {
            break;
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let t = VarTable::plain(&[]);
        let q = RatFn::q(&t);
        let one = RatFn::one(&t);
        let m = vec![vec![one.clone(), q.clone()], vec![q.clone(), q.mul(&q)]];
        let ns = nullspace(&m, 2, &t);
        assert_eq!(ns.len(), 1);
        let x = &ns[0];
        assert!(one.mul(&x[0]).add(&q.mul(&x[1])).is_zero());
    }

    #[test]
    fn modular_rank() {
        let p = 101;
        assert_eq!(rank_mod(&[vec![1, 2], vec![2, 4]], p), 1);
        assert_eq!(rank_mod(&[vec![1, 2], vec![2, 5]], p), 2);
    }
}
