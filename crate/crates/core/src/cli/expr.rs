//! Closed expression language for multipliers and generators.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | atom
//! atom    := number | 'pi' | 'i' | 't' | func '(' expr ')' | '(' expr ')'
//!          | 'piecewise' '(' piece (';' piece)* ')'
//! piece   := '[' expr ',' expr ']' ':' expr
//! func    := 'sin' | 'cos' | 'exp' | 'abs'
//! ```
//!
//! Piece bounds must be constant. A piecewise expression takes the first
//! piece whose closed interval contains `t` and is zero elsewhere.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::framecore::SampledFunction;

/// Denominators at or below this modulus are an evaluation error.
pub const DIVISION_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    I,
    T,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Piecewise(Vec<Piece>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expression error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::InvalidArgument(e.to_string())
    }
}

/// Parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMultiplier {
    pub source: String,
    pub ast: Expr,
}

impl ExprMultiplier {
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        self.ast.eval(t)
    }

    /// Values at the nodes of `grid`.
    pub fn sample(&self, grid: &Arc<Grid>) -> Result<SampledFunction> {
        let values = grid.nodes().iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        SampledFunction::new(Arc::clone(grid), values)
    }
}

pub fn parse_multiplier(src: &str) -> std::result::Result<ExprMultiplier, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser { src, pos: 0 };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(ExprMultiplier {
        source: src.to_string(),
        ast,
    })
}

impl Expr {
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        Ok(match self {
            Expr::Num(x) => Complex64::new(*x, 0.0),
            Expr::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::I => Complex64::new(0.0, 1.0),
            Expr::T => Complex64::new(t, 0.0),
            Expr::Neg(e) => -e.eval(t)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(t)?, b.eval(t)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.norm() <= DIVISION_GUARD {
                            return Err(Error::InvalidArgument(format!(
                                "division by {y} at t = {t} in {self}"
                            )));
                        }
                        x / y
                    }
                }
            }
            Expr::Call(f, e) => {
                let x = e.eval(t)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Abs => Complex64::new(x.norm(), 0.0),
                }
            }
            Expr::Piecewise(pieces) => match pieces.iter().find(|p| p.lo <= t && t <= p.hi) {
                Some(p) => p.body.eval(t)?,
                None => Complex64::new(0.0, 0.0),
            },
        })
    }

    fn depends_on_t(&self) -> bool {
        match self {
            Expr::T | Expr::Piecewise(_) => true,
            Expr::Num(_) | Expr::Pi | Expr::I => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_t(),
            Expr::Bin(_, a, b) => a.depends_on_t() || b.depends_on_t(),
        }
    }
}

/// Fully parenthesized, so printing and reparsing gives the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::I => f.write_str("i"),
            Expr::T => f.write_str("t"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let c = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({a} {c} {b})")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Piecewise(pieces) => {
                f.write_str("piecewise(")?;
                for (k, p) in pieces.iter().enumerate() {
                    if k > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "[{:?}, {:?}]: {}", p.lo, p.hi, p.body)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for ExprMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> std::result::Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let len = self.src[start..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(self.src.len() - start);
                let ident = &self.src[start..start + len];
                self.pos += len;
                let func = match ident {
                    "pi" => return Ok(Expr::Pi),
                    "i" => return Ok(Expr::I),
                    "t" => return Ok(Expr::T),
                    "piecewise" => return self.piecewise(),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "abs" => Func::Abs,
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            message: format!("unknown identifier '{ident}'"),
                        })
                    }
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(c) => Err(self.error(format!("unexpected character '{c}'"))),
        }
    }

    fn number(&mut self) -> std::result::Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let x: f64 = text.parse().map_err(|_| ParseError {
            offset: start,
            message: format!("invalid number '{text}'"),
        })?;
        self.pos = end;
        Ok(Expr::Num(x))
    }

    fn piecewise(&mut self) -> std::result::Result<Expr, ParseError> {
        self.expect('(')?;
        let mut pieces = Vec::new();
        loop {
            self.expect('[')?;
            let lo = self.constant()?;
            self.expect(',')?;
            let hi = self.constant()?;
            self.expect(']')?;
            if !(lo <= hi) {
                return Err(self.error(format!("empty piece [{lo}, {hi}]")));
            }
            self.expect(':')?;
            let body = self.expr()?;
            pieces.push(Piece { lo, hi, body });
            if !self.eat(';') {
                break;
            }
        }
        self.expect(')')?;
        Ok(Expr::Piecewise(pieces))
    }

    fn constant(&mut self) -> std::result::Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let e = self.expr()?;
        let err = |message: &str| ParseError {
            offset: start,
            message: message.into(),
        };
        if e.depends_on_t() {
            return Err(err("piece bounds must not depend on t"));
        }
        let v = e.eval(0.0).map_err(|_| err("piece bound is not finite"))?;
        if v.im != 0.0 || !v.re.is_finite() {
            return Err(err("piece bounds must be finite reals"));
        }
        Ok(v.re)
    }
}
