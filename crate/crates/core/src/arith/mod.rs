//! Exact arithmetic: packed monomials, sparse polynomials, gcd and rational functions.

pub mod gcd;
pub mod monomial;
pub mod poly;
pub mod ratfn;
pub mod vars;

pub use monomial::Monomial;
pub use poly::{Coeff, Poly, QPoly, ZPoly};
pub use ratfn::RatFn;
pub use vars::{Ctx, ShiftKind, ShiftVar, VarTable};
