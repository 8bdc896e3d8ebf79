//! A small expression language for scalar functions of `(x, y)`.
//!
//! Frames, metric functions and Killing data are written as strings in this
//! language and evaluated into [`Jet`]s at requested base points.  The grammar
//! is conventional: `+ - * / ^` with `^` binding tighter than unary minus and
//! associating to the right, `i` as the imaginary unit, and the calls
//! `sin cos sinh cosh exp ln sqrt`.

use std::fmt;

use thiserror::Error;

use crate::jets::{Axis, Jet, JetError, C};

#[derive(Debug, Error, PartialEq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("evaluation error in `{context}`: {source}")]
    Domain {
        context: String,
        source: JetError,
    },
    #[error("unsupported exponent in `{0}`: non-constant or non-integral power of a near-zero base")]
    BadExponent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Abstract syntax tree of an expression in `x` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(C),
    Var(Axis),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(re: f64) -> Expr {
        Expr::Num(C::new(re, 0.0))
    }

    pub fn var_x() -> Expr {
        Expr::Var(Axis::X)
    }

    pub fn var_y() -> Expr {
        Expr::Var(Axis::Y)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Bin(BinOp::Div, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        // fold so that `-1.5` and `Num(-1.5)` are the same tree, which keeps
        // printing/parsing a structural round trip
        match a {
            Expr::Num(v) => Expr::Num(-v),
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Call(Func::Sqrt, Box::new(a))
    }

    /// Evaluate as a jet at `base` to the given order.
    pub fn eval_jet(&self, base: (C, C), order: usize) -> Result<Jet, EvalError> {
        match self {
            Expr::Num(v) => Ok(Jet::constant(order, *v)),
            Expr::Var(axis) => Ok(Jet::variable(
                order,
                *axis,
                match axis {
                    Axis::X => base.0,
                    Axis::Y => base.1,
                },
            )),
            Expr::Neg(inner) => Ok(inner.eval_jet(base, order)?.neg()),
            Expr::Bin(op, a, b) => {
                let ja = a.eval_jet(base, order)?;
                let jb = b.eval_jet(base, order)?;
                match op {
                    BinOp::Add => Ok(ja.checked_add(&jb).expect("same order")),
                    BinOp::Sub => Ok(ja.checked_sub(&jb).expect("same order")),
                    BinOp::Mul => Ok(ja.checked_mul(&jb).expect("same order")),
                    BinOp::Div => {
                        let inv = jb.reciprocal().map_err(|e| EvalError::Domain {
                            context: b.to_string(),
                            source: e,
                        })?;
                        Ok(ja.checked_mul(&inv).expect("same order"))
                    }
                    BinOp::Pow => eval_pow(self, &ja, &jb),
                }
            }
            Expr::Call(f, a) => {
                let ja = a.eval_jet(base, order)?;
                let ctx = || self.to_string();
                match f {
                    Func::Sin => Ok(ja.sin()),
                    Func::Cos => Ok(ja.cos()),
                    Func::Sinh => Ok(ja.sinh()),
                    Func::Cosh => Ok(ja.cosh()),
                    Func::Exp => Ok(ja.exp()),
                    Func::Ln => ja.ln().map_err(|e| EvalError::Domain {
                        context: ctx(),
                        source: e,
                    }),
                    Func::Sqrt => ja.sqrt().map_err(|e| EvalError::Domain {
                        context: ctx(),
                        source: e,
                    }),
                }
            }
        }
    }

    /// Constant-fold the expression at the origin; errors if `x`/`y` occur.
    pub fn eval_const(&self) -> Result<C, EvalError> {
        if self.uses_vars() {
            return Err(EvalError::BadExponent(format!(
                "expected a constant expression, got `{self}`"
            )));
        }
        Ok(self
            .eval_jet((C::new(0.0, 0.0), C::new(0.0, 0.0)), 0)?
            .value())
    }

    fn uses_vars(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.uses_vars(),
            Expr::Bin(_, a, b) => a.uses_vars() || b.uses_vars(),
        }
    }
}

fn eval_pow(whole: &Expr, base: &Jet, exp: &Jet) -> Result<Jet, EvalError> {
    // Constant integer exponents use repeated multiplication; anything else
    // goes through exp(b ln a), which needs the base away from zero.
    let mut nonconst = 0.0f64;
    for i in 0..=exp.order() {
        for j in 0..=(exp.order() - i) {
            if i + j > 0 {
                nonconst = nonconst.max(exp.coeff(i, j).norm());
            }
        }
    }
    let e0 = exp.value();
    let near_int = e0.im.abs() < 1e-12 && (e0.re - e0.re.round()).abs() < 1e-12;
    if nonconst < 1e-13 && near_int && e0.re.abs() <= 256.0 {
        return base
            .powi(e0.re.round() as i64)
            .map_err(|e| EvalError::Domain {
                context: whole.to_string(),
                source: e,
            });
    }
    let ln = base.ln().map_err(|e| EvalError::Domain {
        context: whole.to_string(),
        source: e,
    })?;
    Ok(exp.checked_mul(&ln).expect("same order").exp())
}

// Printing is fully parenthesized below the top level, so print -> parse is a
// structural round trip.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::Var(Axis::X) => write!(f, "x"),
            Expr::Var(Axis::Y) => write!(f, "y"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: C) -> fmt::Result {
    if v.im == 0.0 {
        write!(f, "{}", v.re)
    } else if v.re == 0.0 && v.im == 1.0 {
        write!(f, "i")
    } else if v.re == 0.0 {
        write!(f, "({} * i)", v.im)
    } else {
        write!(f, "({} + ({} * i))", v.re, v.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let b = self.src[self.pos];
        let tok = match b {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut exp_end = end + 1;
                    if exp_end < self.src.len()
                        && (self.src[exp_end] == b'+' || self.src[exp_end] == b'-')
                    {
                        exp_end += 1;
                    }
                    if exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                        while exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                            exp_end += 1;
                        }
                        end = exp_end;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: format!("invalid number `{text}`"),
                })?;
                self.pos = end;
                return Ok(Some((start, Token::Num(value))));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap().to_owned();
                self.pos = end;
                return Ok(Some((start, Token::Ident(text))));
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        self.pos += 1;
        Ok(Some((start, tok)))
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    idx: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.idx)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn offset(&self) -> usize {
        self.peek().map(|(o, _)| *o).unwrap_or(self.end_offset)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some((_, tok)) = self.peek() {
            let op = match tok {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some((_, tok)) = self.peek() {
            let op = match tok {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // unary minus binds looser than ^, so -x^2 parses as -(x^2)
    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some((_, Token::Minus)) = self.peek() {
            self.bump();
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some((_, Token::Caret)) = self.peek() {
            self.bump();
            // right associative; allow a signed exponent
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            None => Err(ParseError {
                offset,
                message: "unexpected end of input".into(),
            }),
            Some((_, Token::Num(v))) => Ok(Expr::num(v)),
            Some((_, Token::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Token::RParen)) => Ok(inner),
                    other => Err(ParseError {
                        offset: other.map(|(o, _)| o).unwrap_or(self.end_offset),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some((off, Token::Ident(name))) => match name.as_str() {
                "x" => Ok(Expr::var_x()),
                "y" => Ok(Expr::var_y()),
                "i" => Ok(Expr::Num(C::new(0.0, 1.0))),
                "sin" | "cos" | "sinh" | "cosh" | "exp" | "ln" | "sqrt" => {
                    let func = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "sinh" => Func::Sinh,
                        "cosh" => Func::Cosh,
                        "exp" => Func::Exp,
                        "ln" => Func::Ln,
                        _ => Func::Sqrt,
                    };
                    match self.bump() {
                        Some((_, Token::LParen)) => {}
                        other => {
                            return Err(ParseError {
                                offset: other.map(|(o, _)| o).unwrap_or(self.end_offset),
                                message: format!("expected `(` after `{name}`"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    match self.bump() {
                        Some((_, Token::RParen)) => Ok(Expr::Call(func, Box::new(arg))),
                        other => Err(ParseError {
                            offset: other.map(|(o, _)| o).unwrap_or(self.end_offset),
                            message: "expected `)`".into(),
                        }),
                    }
                }
                _ => Err(ParseError {
                    offset: off,
                    message: format!("unknown identifier `{name}`"),
                }),
            },
            Some((off, tok)) => Err(ParseError {
                offset: off,
                message: format!("unexpected token {tok:?}"),
            }),
        }
    }
}

/// Parse a source string into an expression tree.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(source);
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next()? {
        tokens.push(t);
    }
    if tokens.is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty input".into(),
        });
    }
    let end_offset = source.len();
    let mut parser = Parser {
        tokens,
        idx: 0,
        end_offset,
    };
    let expr = parser.expr()?;
    if let Some((off, tok)) = parser.peek() {
        return Err(ParseError {
            offset: *off,
            message: format!("trailing input {tok:?}"),
        });
    }
    Ok(expr)
}
