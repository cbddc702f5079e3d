//! Text form of operators and rational functions.
//!
//! Grammar: atoms are the operator symbol (`E` or `S`), the shift variable
//! (`qn`, `qk`, or `n`, `k` in the arithmetic case), `q`, parameter names and
//! integers; operators are `+ - * / ^` with parentheses. Products compose
//! left to right and `E`, `qn` do not commute. A power of `q` may carry a
//! linear exponent in the index, as in `q^(2k+4)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::arith::{Monomial, RatFn, ShiftKind, VarTable, ZPoly};
use crate::error::{Error, Result};
use crate::ore::OreOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Operators in `E` acting on sequences in `n`.
    N,
    /// Operators in `S` acting on coefficient sequences in `k`.
    K,
}

impl Mode {
    pub fn op_symbol(self) -> &'static str {
        match self {
            Mode::N => "E",
            Mode::K => "S",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    table: &'a Arc<VarTable>,
    mode: Mode,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn index_symbol(&self) -> Option<String> {
        let sv = self.table.shift()?;
        match sv.kind {
            ShiftKind::Geometric(_) => Some(sv.name.strip_prefix('q').unwrap_or(&sv.name).to_string()),
            ShiftKind::Arithmetic => None,
        }
    }

    fn expr(&mut self) -> Result<OreOp> {
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OreOp> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.checked_mul(&self.factor()?)?;
            } else if self.eat('/') {
                let pos = self.here();
                let d = self.factor()?;
                let Some(c) = as_scalar(&d) else {
                    return Err(Error::Parse { pos, msg: "can only divide by a scalar".into() });
                };
                let inv = c.inv().map_err(|_| Error::Parse { pos, msg: "division by zero".into() })?;
                acc = acc.checked_mul(&OreOp::scalar(inv))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<OreOp> {
        let is_q = self.peek() == Some(&Tok::Ident("q".into()));
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.here();
        let (c, a) = self.exponent(is_q)?;
        if a != 0 {
            let v = RatFn::shift_var(self.table)?.pow(a)?;
            return Ok(OreOp::scalar(RatFn::q_pow(self.table, c).mul(&v)));
        }
        power(&base, c).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::Parse { pos, msg: other.to_string() },
        })
    }

    // Returns `(c, a)` for the exponent `a * index + c`.
    fn exponent(&mut self, allow_index: bool) -> Result<(i64, i64)> {
        let idx = if allow_index { self.index_symbol() } else { None };
        if self.eat('(') {
            let mut c = 0i64;
            let mut a = 0i64;
            let mut first = true;
            loop {
                let sign = if self.eat('-') {
                    -1
                } else if self.eat('+') || first {
                    1
                } else {
                    break;
                };
                first = false;
                let (tc, ta) = self.linear_term(idx.as_deref(), true)?;
                c += sign * tc;
                a += sign * ta;
            }
            self.expect(')')?;
            Ok((c, a))
        } else if self.eat('-') {
            let (tc, ta) = self.linear_term(idx.as_deref(), false)?;
            Ok((-tc, -ta))
        } else {
            self.linear_term(idx.as_deref(), false)
        }
    }

    fn linear_term(&mut self, idx: Option<&str>, inner: bool) -> Result<(i64, i64)> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let n: i64 = n.try_into().or_else(|_| self.err("exponent too large"))?;
                let Some(i) = idx.filter(|_| inner) else { return Ok((n, 0)) };
                let star = self.peek() == Some(&Tok::Sym('*'));
                if self.toks.get(self.pos + usize::from(star)).map(|t| &t.1) == Some(&Tok::Ident(i.to_string())) {
                    self.pos += 1 + usize::from(star);
                    return Ok((0, n));
                }
                Ok((n, 0))
            }
            Some(Tok::Ident(s)) if Some(s.as_str()) == idx => {
                self.pos += 1;
                Ok((0, 1))
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<OreOp> {
        let t = self.table;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(OreOp::scalar(RatFn::from_bigint(t, n)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(s)) => {
                if s == self.mode.op_symbol() {
                    self.pos += 1;
                    return Ok(OreOp::shift(t, 1));
                }
                if s == "q" {
                    self.pos += 1;
                    return Ok(OreOp::scalar(RatFn::q(t)));
                }
                if t.shift().is_some_and(|sv| sv.name == s) {
                    self.pos += 1;
                    return Ok(OreOp::scalar(RatFn::shift_var(t)?));
                }
                if t.param_index(&s).is_some() {
                    self.pos += 1;
                    return Ok(OreOp::scalar(RatFn::param(t, &s)?));
                }
                self.err(format!("unknown symbol `{s}`"))
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn as_scalar(op: &OreOp) -> Option<RatFn> {
    match op.coeffs().len() {
        0 => Some(RatFn::zero(op.table())),
        1 => op.coeffs().get(&0).cloned(),
        _ => None,
    }
}

fn power(base: &OreOp, e: i64) -> Result<OreOp> {
    if e >= 0 {
        let mut acc = OreOp::one(base.table());
        for _ in 0..e {
            acc = acc.checked_mul(base)?;
        }
        return Ok(acc);
    }
    if base.coeffs().len() != 1 {
        return Err(Error::Invalid("negative power of a sum".into()));
    }
    let (&i, c) = base.coeffs().iter().next().expect("one term");
    // (c S^i)^(-1) = sigma^(-i)(1/c) S^(-i)
    let ci = c.inv()?;
    let inv = OreOp::term(if i == 0 { ci } else { ci.substitute_shift(-(i as i64))? }, -i);
    power(&inv, -e)
}

/// Parses an operator over `table`.
pub fn parse_operator(src: &str, table: &Arc<VarTable>, mode: Mode) -> Result<OreOp> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: src.len(), table, mode };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Parses a scalar (no operator symbol).
pub fn parse_ratfn(src: &str, table: &Arc<VarTable>) -> Result<RatFn> {
    let op = parse_operator(src, table, Mode::K)?;
    as_scalar(&op).ok_or(Error::Parse { pos: 0, msg: "expected a scalar, found an operator".into() })
}

fn index_name(table: &VarTable) -> Option<String> {
    let sv = table.shift()?;
    match sv.kind {
        ShiftKind::Geometric(_) => Some(sv.name.strip_prefix('q').unwrap_or(&sv.name).to_string()),
        ShiftKind::Arithmetic => None,
    }
}

fn q_exponent(c: i64, a: i64, idx: &str) -> String {
    let lin = match a {
        0 => String::new(),
        1 => idx.to_string(),
        -1 => format!("-{idx}"),
        _ => format!("{a}{idx}"),
    };
    let body = match (a, c) {
        (0, c) => c.to_string(),
        (_, 0) => lin,
        (_, c) if c > 0 => format!("{lin}+{c}"),
        (_, c) => format!("{lin}{c}"),
    };
    if a == 0 && c >= 0 || a == 1 && c == 0 {
        body
    } else {
        format!("({body})")
    }
}

// `c * q^qa * v^va * params` with the q-exponents given as signed integers.
fn format_monomial(table: &VarTable, coeff: &BigInt, m: Monomial, qa: i64, va: i64) -> String {
    let mut factors = Vec::new();
    for (i, name) in table.params().iter().enumerate() {
        match m.exp(i + 1) {
            0 => {}
            1 => factors.push(name.clone()),
            e => factors.push(format!("{name}^{e}")),
        }
    }
    match (table.shift_kind(), index_name(table)) {
        (Some(ShiftKind::Geometric(e)), Some(idx)) => {
            let a = va * e as i64;
            if qa != 0 || a != 0 {
                if qa == 1 && a == 0 {
                    factors.push("q".into());
                } else {
                    factors.push(format!("q^{}", q_exponent(qa, a, &idx)));
                }
            }
        }
        _ => {
            match qa {
                0 => {}
                1 => factors.push("q".into()),
                e if e > 0 => factors.push(format!("q^{e}")),
                e => factors.push(format!("q^({e})")),
            }
            if let Some(sv) = table.shift() {
                match va {
                    0 => {}
                    1 => factors.push(sv.name.clone()),
                    e => factors.push(format!("{}^{e}", sv.name)),
                }
            }
        }
    }
    let mag = coeff.abs();
    let sign = if coeff.is_negative() { "-" } else { "" };
    if factors.is_empty() {
        format!("{sign}{mag}")
    } else if mag.is_one() {
        format!("{sign}{}", factors.join("*"))
    } else {
        format!("{sign}{mag}*{}", factors.join("*"))
    }
}

fn join_signed(parts: &[String]) -> String {
    let mut s = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            s.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(p);
        }
    }
    s
}

// Polynomial divided by the monomial `q^dq v^dv`.
fn format_laurent(table: &VarTable, p: &ZPoly, dq: i64, dv: i64) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let shift = table.shift_index();
    let parts: Vec<String> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let va = shift.map_or(0, |s| m.exp(s) as i64) - dv;
            let qa = m.exp(0) as i64 - dq;
            format_monomial(table, c, *m, qa, va)
        })
        .collect();
    join_signed(&parts)
}

pub fn format_ratfn(f: &RatFn) -> String {
    let table = f.table();
    let den = f.den();
    if den.is_monomial() && den.lead_coeff().is_one() {
        let m = den.terms()[0].0;
        let only_q_v = (1..=table.params().len()).all(|i| m.exp(i) == 0);
        let geometric = matches!(table.shift_kind(), Some(ShiftKind::Geometric(_)) | None);
        let dv = table.shift_index().map_or(0, |s| m.exp(s) as i64);
        if only_q_v && (geometric || dv == 0) {
            return format_laurent(table, f.num(), m.exp(0) as i64, dv);
        }
    }
    let num = format_laurent(table, f.num(), 0, 0);
    let dens = format_laurent(table, den, 0, 0);
    let num = if f.num().len() > 1 { format!("({num})") } else { num };
    let dens = if den.len() > 1 || !den.lead_coeff().is_one() || den.total_degree() > Some(1) {
        format!("({dens})")
    } else {
        dens
    };
    format!("{num}/{dens}")
}

fn single_term(f: &RatFn) -> bool {
    f.num().len() == 1 && f.den().is_monomial() && f.den().lead_coeff().is_one()
}

/// Prints `sum_i c_i S^i`, highest power first (lowest first when negative powers occur).
pub fn format_operator(op: &OreOp, mode: Mode) -> String {
    if op.is_zero() {
        return "0".into();
    }
    let sym = mode.op_symbol();
    let mut terms: Vec<(&i32, &RatFn)> = op.coeffs().iter().collect();
    if op.min_exp().unwrap_or(0) >= 0 {
        terms.reverse();
    }
    let parts: Vec<String> = terms
        .into_iter()
        .map(|(&i, c)| {
            let s = match i {
                0 => String::new(),
                1 => sym.to_string(),
                i if i > 0 => format!("{sym}^{i}"),
                i => format!("{sym}^({i})"),
            };
            if s.is_empty() {
                return format_ratfn(c);
            }
            if c.is_one() {
                return s;
            }
            if c.neg().is_one() {
                return format!("-{s}");
            }
            let cs = format_ratfn(c);
            if single_term(c) {
                format!("{cs}*{s}")
            } else if c.num().terms().iter().all(|(_, x)| x.is_negative()) && c.den().is_monomial() {
                format!("-({})*{s}", format_ratfn(&c.neg()))
            } else {
                format!("({cs})*{s}")
            }
        })
        .collect();
    join_signed(&parts)
}

/// Integer value of an exact constant, if it is one.
pub fn as_integer(f: &RatFn) -> Option<BigInt> {
    let c = f.as_constant()?;
    if c.denom().is_one() {
        Some(c.numer().clone())
    } else {
        None
    }
}
