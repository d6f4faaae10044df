//! A small expression language for building [`FunctionExpr`]s.
//!
//! ```text
//! expr := add
//! add  := mul (('+' | '-') mul)*
//! mul  := pow (('*' | '/') pow)*
//! pow  := atom ('^' int)?
//! atom := number | 'x' | 'pinf(' cplx [';' cplx] ')' | 'pn(' cplx ',' int ')'
//!       | 'theta' [1-4] | 'poly(' cplx (',' cplx)* ')' | '(' expr ')' | '-' atom
//! ```
//!
//! A complex literal (`1.5`, `0.3+0.1i`, `-2i`) is one token and may not
//! contain whitespace, so `1+2i` is a single constant while `1 + 2i` is a sum.
//! `pinf(a; b)` is `(a z, a/z; b)∞` with `b` defaulting to the global `q`,
//! `pn(a, n)` is the finite product `(a z, a/z; q)_n`, `poly(c0, c1, …)` lists
//! ascending coefficients, and `theta1..4` are the Jacobi functions with nome
//! `q^{1/2}`, so that their zero lattices have base `q`.

use std::fmt;

use crate::error::{Error, Result};
use crate::funcrep::{poly_mul, theta_in_x, FunctionExpr, ProductForm, Term};
use crate::qcore::{QParam, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const MAX_DEPTH: usize = 200;
const MAX_TERMS: usize = 4096;
const MAX_PN: u32 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    Var,
    PInf { a: C64, base: Option<C64> },
    PN { a: C64, n: u32 },
    Theta(u8),
    Poly(Vec<C64>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    depth: usize,
}

fn syntax<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        offset,
        message: message.into(),
    })
}

fn semantic<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Semantic {
        offset,
        message: message.into(),
    })
}

/// Parses an expression.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        depth: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return syntax(0, "empty expression");
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return syntax(p.pos, format!("unexpected '{}'", p.peek_char()));
    }
    Ok(e)
}

/// Parses a lone complex literal such as `0.3+0.1i`.
pub fn parse_complex(src: &str) -> Result<C64> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let c = p.cplx()?;
    p.skip_ws();
    if !p.at_end() {
        return syntax(p.pos, format!("unexpected '{}' after complex literal", p.peek_char()));
    }
    Ok(c)
}

/// Formats a complex number so that [`parse_complex`] reads it back exactly.
pub fn format_complex(c: C64) -> String {
    fmt_c(c)
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> String {
        String::from_utf8_lossy(&self.src[self.pos..(self.pos + 1).min(self.src.len())]).into_owned()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else if self.at_end() {
            syntax(self.pos, format!("expected '{}' but input ended", b as char))
        } else {
            syntax(
                self.pos,
                format!("expected '{}', found '{}'", b as char, self.peek_char()),
            )
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return syntax(self.pos, "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.mul()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.mul()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.mul()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn mul(&mut self) -> Result<Expr> {
        let mut lhs = self.pow()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.pow()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.pow()?));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn pow(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let k = self.int()?;
            let k = i32::try_from(k).or_else(|_| syntax(at, "exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            return syntax(start, "expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<i64>().or_else(|_| syntax(start, "integer out of range"))
    }

    fn atom(&mut self) -> Result<Expr> {
        self.enter()?;
        self.skip_ws();
        let start = self.pos;
        let e = match self.peek() {
            None => return syntax(start, "expected an operand but input ended"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                e
            }
            Some(b'-') if !self.number_follows(1) => {
                self.pos += 1;
                Expr::Neg(Box::new(self.atom()?))
            }
            Some(b) if b.is_ascii_digit() || b == b'.' || b == b'-' || b == b'+' => Expr::Const(self.cplx()?),
            Some(b'x') => {
                self.pos += 1;
                Expr::Var
            }
            Some(_) if self.keyword("pinf(") => {
                let a_at = self.pos;
                let a = self.cplx()?;
                let base = if self.eat(b';') {
                    let b_at = self.pos;
                    let b = self.cplx()?;
                    if !(b.norm() < 1.0) {
                        return semantic(b_at, format!("factor base {} needs |base| < 1", fmt_c(b)));
                    }
                    if b == ZERO {
                        return semantic(b_at, "factor base must be nonzero");
                    }
                    Some(b)
                } else {
                    None
                };
                self.expect(b')')?;
                if a == ZERO {
                    return semantic(a_at, "generator must be nonzero");
                }
                Expr::PInf { a, base }
            }
            Some(_) if self.keyword("pn(") => {
                let a_at = self.pos;
                let a = self.cplx()?;
                self.expect(b',')?;
                self.skip_ws();
                let n_at = self.pos;
                let n = self.int()?;
                self.expect(b')')?;
                if a == ZERO {
                    return semantic(a_at, "generator must be nonzero");
                }
                if !(0..=MAX_PN as i64).contains(&n) {
                    return semantic(n_at, format!("pn degree must lie in 0..={MAX_PN}"));
                }
                Expr::PN { a, n: n as u32 }
            }
            Some(_) if self.keyword("theta") => match self.peek() {
                Some(d @ b'1'..=b'4') => {
                    self.pos += 1;
                    Expr::Theta(d - b'0')
                }
                _ => return syntax(self.pos, "theta needs an index 1..4"),
            },
            Some(_) if self.keyword("poly(") => {
                let mut coeffs = vec![self.cplx()?];
                while self.eat(b',') {
                    coeffs.push(self.cplx()?);
                }
                self.expect(b')')?;
                Expr::Poly(coeffs)
            }
            Some(_) => return syntax(start, format!("unexpected '{}'", self.peek_char())),
        };
        self.depth -= 1;
        Ok(e)
    }

    /// Whether a numeric literal starts `off` bytes ahead.
    fn number_follows(&self, off: usize) -> bool {
        matches!(self.src.get(self.pos + off), Some(b) if b.is_ascii_digit() || *b == b'.')
    }

    /// `[sign] real [('+'|'-') real 'i']` or `[sign] real 'i'`, no whitespace inside.
    fn cplx(&mut self) -> Result<C64> {
        self.skip_ws();
        let start = self.pos;
        let first = self.real()?;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok(C64::new(0.0, first));
        }
        // a trailing imaginary part only counts if it ends in 'i'
        if matches!(self.peek(), Some(b'+' | b'-')) && self.number_follows(1) {
            let save = self.pos;
            if let Ok(im) = self.real() {
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    return Ok(C64::new(first, im));
                }
            }
            self.pos = save;
        }
        if !first.is_finite() {
            return syntax(start, "number out of range");
        }
        Ok(C64::new(first, 0.0))
    }

    fn real(&mut self) -> Result<f64> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        let mut digits = 0;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
            digits += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            self.pos = start;
            return syntax(start, "expected a number");
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_digits = self.pos;
            while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_digits {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => syntax(start, "number out of range"),
        }
    }
}

// ---------------------------------------------------------------------------
// printing

fn fmt_real(v: f64) -> String {
    // `{}` gives the shortest string that reads back to the same f64
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn fmt_c(c: C64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => fmt_real(c.re),
        (true, false) => format!("{}i", fmt_real(c.im)),
        (false, false) => {
            let sign = if c.im < 0.0 { "-" } else { "+" };
            format!("{}{sign}{}i", fmt_real(c.re), fmt_real(c.im.abs()))
        }
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8| {
            if prec(e) >= min {
                e.to_string()
            } else {
                format!("({e})")
            }
        };
        let list = |cs: &[C64]| cs.iter().map(|c| fmt_c(*c)).collect::<Vec<_>>().join(", ");
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_c(*c)),
            Expr::Var => write!(f, "x"),
            Expr::PInf { a, base: None } => write!(f, "pinf({})", fmt_c(*a)),
            Expr::PInf { a, base: Some(b) } => write!(f, "pinf({}; {})", fmt_c(*a), fmt_c(*b)),
            Expr::PN { a, n } => write!(f, "pn({}, {n})", fmt_c(*a)),
            Expr::Theta(j) => write!(f, "theta{j}"),
            Expr::Poly(cs) => write!(f, "poly({})", list(cs)),
            Expr::Add(l, r) => write!(f, "{} + {}", wrap(l, 1), wrap(r, 2)),
            Expr::Sub(l, r) => write!(f, "{} - {}", wrap(l, 1), wrap(r, 2)),
            Expr::Mul(l, r) => write!(f, "{} * {}", wrap(l, 2), wrap(r, 3)),
            Expr::Div(l, r) => write!(f, "{} / {}", wrap(l, 2), wrap(r, 3)),
            Expr::Pow(b, k) => write!(f, "{}^{k}", wrap(b, 4)),
            Expr::Neg(e) => write!(f, "-({e})"),
        }
    }
}

// ---------------------------------------------------------------------------
// lowering

/// A finite sum of product forms.
type Sum = Vec<ProductForm>;

fn scale(s: Sum, c: C64) -> Sum {
    s.into_iter()
        .map(|mut p| {
            p.constant *= c;
            p
        })
        .collect()
}

fn product(a: &Sum, b: &Sum) -> Result<Sum> {
    if a.len() * b.len() > MAX_TERMS {
        return Err(Error::UnsupportedShape(format!("expansion exceeds {MAX_TERMS} terms")));
    }
    Ok(a.iter().flat_map(|p| b.iter().map(move |r| p.mul(r))).collect())
}

fn reciprocal(s: &Sum) -> Result<Sum> {
    match s.as_slice() {
        [p] => Ok(vec![p.reciprocal()?]),
        _ => Err(Error::UnsupportedShape("division by a sum of terms".into())),
    }
}

/// Turns an expression into a sum of product forms over the global `q`.
///
/// Products and integer powers distribute over sums; division is accepted
/// only by a single product form without a polynomial part, since a sum of
/// quotients must share such a denominator to stay in product form.
pub fn lower(e: &Expr, q: &QParam) -> Result<FunctionExpr> {
    let sum = lower_sum(e, q)?;
    let terms: Vec<Term> = sum
        .into_iter()
        .map(|p| p.normalized())
        .filter(|p| p.constant != ZERO)
        .map(|form| Term { coefficient: ONE, form })
        .collect();
    if terms.is_empty() {
        return Ok(FunctionExpr::constant(ZERO));
    }
    Ok(FunctionExpr { terms })
}

fn lower_sum(e: &Expr, q: &QParam) -> Result<Sum> {
    Ok(match e {
        Expr::Const(c) => vec![ProductForm::constant(*c)],
        Expr::Var => vec![ProductForm::constant(ONE).with_poly(vec![ZERO, ONE])],
        Expr::PInf { a, base } => vec![ProductForm::phi_inf(*a, base.unwrap_or(q.q()), 1)?],
        Expr::PN { a, n } => {
            let mut poly = vec![ONE];
            let mut w = *a;
            for _ in 0..*n {
                poly = poly_mul(&poly, &[ONE + w * w, -w * 2.0]);
                w *= q.q();
            }
            vec![ProductForm::constant(ONE).with_poly(poly)]
        }
        Expr::Theta(j) => {
            let nome = QParam::new(q.sqrt_q())?;
            vec![theta_in_x(*j, &nome)?]
        }
        Expr::Poly(cs) => vec![ProductForm::constant(ONE).with_poly(cs.clone())],
        Expr::Add(l, r) => {
            let mut s = lower_sum(l, q)?;
            s.extend(lower_sum(r, q)?);
            s
        }
        Expr::Sub(l, r) => {
            let mut s = lower_sum(l, q)?;
            s.extend(scale(lower_sum(r, q)?, -ONE));
            s
        }
        Expr::Neg(x) => scale(lower_sum(x, q)?, -ONE),
        Expr::Mul(l, r) => product(&lower_sum(l, q)?, &lower_sum(r, q)?)?,
        Expr::Div(l, r) => product(&lower_sum(l, q)?, &reciprocal(&lower_sum(r, q)?)?)?,
        Expr::Pow(b, k) => {
            let base = lower_sum(b, q)?;
            let (base, k) = if *k < 0 {
                (reciprocal(&base)?, k.unsigned_abs())
            } else {
                (base, *k as u32)
            };
            if let [p] = base.as_slice() {
                vec![p.powi(k as i32)?]
            } else {
                let mut acc = vec![ProductForm::constant(ONE)];
                for _ in 0..k {
                    acc = product(&acc, &base)?;
                }
                acc
            }
        }
    })
}

/// `lower(parse(src))`.
pub fn compile(src: &str, q: &QParam) -> Result<FunctionExpr> {
    lower(&parse(src)?, q)
}
