//! Expressions for the univariate functions of a Stäckel system.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" unary)?
//! atom   := number | "x" | "x" digits | func "(" expr ")" | "(" expr ")"
//! func   := sqrt | sin | cos | sinh | cosh | exp
//! ```
//!
//! `x` is the variable the function belongs to; `x1`, `x2`, ... name
//! coordinates explicitly (1-based).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sqrt" => Self::Sqrt,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "sinh" => Self::Sinh,
            "cosh" => Self::Cosh,
            "exp" => Self::Exp,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Self::Sqrt => "sqrt",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Sinh => "sinh",
            Self::Cosh => "cosh",
            Self::Exp => "exp",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Self::Sqrt => v.sqrt(),
            Self::Sin => v.sin(),
            Self::Cos => v.cos(),
            Self::Sinh => v.sinh(),
            Self::Cosh => v.cosh(),
            Self::Exp => v.exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// `None` is the owning variable, `Some(k)` is coordinate `k` (0-based).
    Var(Option<usize>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Value with the owning variable `own` taken from `x[own]`.
    pub fn eval(&self, own: usize, x: &[f64]) -> f64 {
        match self {
            Self::Num(v) => *v,
            Self::Var(None) => x[own],
            Self::Var(Some(k)) => x[*k],
            Self::Neg(a) => -a.eval(own, x),
            Self::Add(a, b) => a.eval(own, x) + b.eval(own, x),
            Self::Sub(a, b) => a.eval(own, x) - b.eval(own, x),
            Self::Mul(a, b) => a.eval(own, x) * b.eval(own, x),
            Self::Div(a, b) => a.eval(own, x) / b.eval(own, x),
            Self::Pow(a, b) => {
                let e = b.eval(own, x);
                let base = a.eval(own, x);
                if e.fract() == 0.0 && e.abs() < 64.0 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
            Self::Call(f, a) => f.apply(a.eval(own, x)),
        }
    }

    /// Value of an expression without variables.
    pub fn eval_const(&self) -> Option<f64> {
        if self.is_constant() {
            Some(self.eval(0, &[0.0]))
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Num(_) => true,
            Self::Var(_) => false,
            Self::Neg(a) | Self::Call(_, a) => a.is_constant(),
            Self::Add(a, b) | Self::Sub(a, b) | Self::Mul(a, b) | Self::Div(a, b) | Self::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// Coordinates (0-based) the expression reads when owned by `own`.
    pub fn variables(&self, own: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect(own, &mut out);
        out
    }

    fn collect(&self, own: usize, out: &mut BTreeSet<usize>) {
        match self {
            Self::Num(_) => {}
            Self::Var(v) => {
                out.insert(v.unwrap_or(own));
            }
            Self::Neg(a) | Self::Call(_, a) => a.collect(own, out),
            Self::Add(a, b) | Self::Sub(a, b) | Self::Mul(a, b) | Self::Div(a, b) | Self::Pow(a, b) => {
                a.collect(own, out);
                b.collect(own, out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Num(v) => write!(f, "{v}"),
            Self::Var(None) => write!(f, "x"),
            Self::Var(Some(k)) => write!(f, "x{}", k + 1),
            Self::Neg(a) => write!(f, "(-{a})"),
            Self::Add(a, b) => write!(f, "({a} + {b})"),
            Self::Sub(a, b) => write!(f, "({a} - {b})"),
            Self::Mul(a, b) => write!(f, "({a} * {b})"),
            Self::Div(a, b) => write!(f, "({a} / {b})"),
            Self::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Self::Call(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>().map(Expr::Num).map_err(|_| ParseError {
            position: start,
            message: format!("malformed number '{text}'"),
        })
    }

    fn word(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii word");
        if word == "x" {
            return Ok(Expr::Var(None));
        }
        if let Some(idx) = word.strip_prefix('x') {
            if let Ok(k) = idx.parse::<usize>() {
                if k == 0 {
                    return Err(ParseError {
                        position: start,
                        message: "coordinates are numbered from 1".into(),
                    });
                }
                return Ok(Expr::Var(Some(k - 1)));
            }
        }
        let f = Func::from_name(word).ok_or_else(|| ParseError {
            position: start,
            message: format!("unknown name '{word}'"),
        })?;
        if !self.eat(b'(') {
            return Err(self.error("expected '(' after function name"));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.error("expected ')'"));
        }
        Ok(Expr::Call(f, Box::new(arg)))
    }
}
