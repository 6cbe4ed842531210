//! Expression grammar for chart files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | name | '(' expr ')'
//! number := digits ('.' digits)?
//! ```
//!
//! Numbers are exact; `1/3` is a quotient of two literals. Exponents are non-negative integers.

use std::fmt;

use fedosov_core::{Jet, Rational};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(Rational),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Parse failure at a 1-based column of the expression text.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct SyntaxError {
    pub column: usize,
    pub message: String,
}

/// Evaluation failure when expanding an expression into a jet.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("denominator vanishes at the base point")]
    ZeroDenominator,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Rational),
    Name(String),
    Op(char),
    End,
}

struct Lexer {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(),
            pos: 0,
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.chars.len() + 1, |&(col, _)| col)
    }

    fn next(&mut self) -> Result<(usize, Token), SyntaxError> {
        while self
            .chars
            .get(self.pos)
            .is_some_and(|&(_, c)| c.is_whitespace())
        {
            self.pos += 1;
        }
        let column = self.column();
        let Some(&(_, c)) = self.chars.get(self.pos) else {
            return Ok((column, Token::End));
        };
        if c.is_ascii_digit() {
            return self.number(column).map(|t| (column, t));
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while self
                .chars
                .get(self.pos)
                .is_some_and(|&(_, c)| c.is_alphanumeric() || c == '_')
            {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos]
                .iter()
                .map(|&(_, c)| c)
                .collect();
            return Ok((column, Token::Name(name)));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((column, Token::Op(c)));
        }
        Err(SyntaxError {
            column,
            message: format!("unexpected character '{c}'"),
        })
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|&(_, c)| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        self.chars[start..self.pos]
            .iter()
            .map(|&(_, c)| c)
            .collect()
    }

    fn number(&mut self, column: usize) -> Result<Token, SyntaxError> {
        let int = self.digits();
        let mut text = int;
        let mut denom = String::from("1");
        if self.chars.get(self.pos).is_some_and(|&(_, c)| c == '.') {
            self.pos += 1;
            let frac = self.digits();
            if frac.is_empty() {
                return Err(SyntaxError {
                    column: self.column(),
                    message: "expected digits after '.'".into(),
                });
            }
            denom.push_str(&"0".repeat(frac.len()));
            text.push_str(&frac);
        }
        format!("{text}/{denom}")
            .parse::<Rational>()
            .map(Token::Number)
            .map_err(|e| SyntaxError {
                column,
                message: format!("bad number: {e}"),
            })
    }
}

struct Parser<'a> {
    lexer: Lexer,
    peeked: (usize, Token),
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(usize, Token), SyntaxError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    fn error<T>(column: usize, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            column,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            match self.peeked.1 {
                Token::Op('+') => {
                    self.advance()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Op('-') => {
                    self.advance()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peeked.1 {
                Token::Op('*') => {
                    self.advance()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Op('/') => {
                    self.advance()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peeked.1 {
            Token::Op('-') => {
                self.advance()?;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Token::Op('+') => {
                self.advance()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peeked.1 != Token::Op('^') {
            return Ok(base);
        }
        self.advance()?;
        let (column, token) = self.advance()?;
        match token {
            Token::Number(q) if q.is_integer() => match q.to_u32() {
                Some(e) => Ok(Expr::Pow(Box::new(base), e)),
                None => Self::error(column, "exponent is out of range"),
            },
            _ => Self::error(column, "exponent must be a non-negative integer literal"),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let (column, token) = self.advance()?;
        match token {
            Token::Number(q) => Ok(Expr::Number(q)),
            Token::Name(name) => match self.names.iter().position(|n| *n == name) {
                Some(k) => Ok(Expr::Var(k)),
                None => Self::error(column, format!("unknown coordinate '{name}'")),
            },
            Token::Op('(') => {
                let inner = self.expr()?;
                let (column, close) = self.advance()?;
                if close != Token::Op(')') {
                    return Self::error(column, "expected ')'");
                }
                Ok(inner)
            }
            Token::End => Self::error(column, "unexpected end of expression"),
            Token::Op(c) => Self::error(column, format!("unexpected '{c}'")),
        }
    }
}

/// Parses `text` with the given coordinate names.
pub fn parse(text: &str, names: &[String]) -> Result<Expr, SyntaxError> {
    let mut lexer = Lexer::new(text);
    let first = lexer.next()?;
    let mut parser = Parser {
        lexer,
        peeked: first,
        names,
    };
    let e = parser.expr()?;
    match parser.peeked {
        (_, Token::End) => Ok(e),
        (column, ref t) => {
            Parser::error(column, format!("unexpected trailing input {}", describe(t)))
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Number(q) => format!("'{q}'"),
        Token::Name(n) => format!("'{n}'"),
        Token::Op(c) => format!("'{c}'"),
        Token::End => "end".into(),
    }
}

impl Expr {
    /// Taylor expansion at `base`, as a jet in the displacements `y = x - base`.
    pub fn to_jet(&self, base: &[Rational], order: usize) -> Result<Jet, EvalError> {
        let n = base.len();
        Ok(match self {
            Expr::Number(q) => Jet::constant(n, order, q.clone()),
            Expr::Var(k) => {
                let y = Jet::variable(n, order, *k).expect("coordinate index in range");
                &y + &Jet::constant(n, order, base[*k].clone())
            }
            Expr::Neg(a) => -&a.to_jet(base, order)?,
            Expr::Add(a, b) => &a.to_jet(base, order)? + &b.to_jet(base, order)?,
            Expr::Sub(a, b) => &a.to_jet(base, order)? - &b.to_jet(base, order)?,
            Expr::Mul(a, b) => &a.to_jet(base, order)? * &b.to_jet(base, order)?,
            Expr::Div(a, b) => {
                let den = b.to_jet(base, order)?;
                if den.constant_term().is_zero() {
                    return Err(EvalError::ZeroDenominator);
                }
                let inv = den.reciprocal().map_err(|_| EvalError::ZeroDenominator)?;
                &a.to_jet(base, order)? * &inv
            }
            Expr::Pow(a, e) => {
                let a = a.to_jet(base, order)?;
                let mut acc = Jet::one(n, order);
                for _ in 0..*e {
                    acc = &acc * &a;
                }
                acc
            }
        })
    }

    /// Floating-point value at `point`.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        match self {
            Expr::Number(q) => q.to_f64().unwrap_or(f64::NAN),
            Expr::Var(k) => point[*k],
            Expr::Neg(a) => -a.eval_f64(point),
            Expr::Add(a, b) => a.eval_f64(point) + b.eval_f64(point),
            Expr::Sub(a, b) => a.eval_f64(point) - b.eval_f64(point),
            Expr::Mul(a, b) => a.eval_f64(point) * b.eval_f64(point),
            Expr::Div(a, b) => a.eval_f64(point) / b.eval_f64(point),
            Expr::Pow(a, e) => a.eval_f64(point).powi(*e as i32),
        }
    }

    /// Exact value at a rational point, `None` on division by zero.
    pub fn eval_exact(&self, point: &[Rational]) -> Option<Rational> {
        Some(match self {
            Expr::Number(q) => q.clone(),
            Expr::Var(k) => point[*k].clone(),
            Expr::Neg(a) => -a.eval_exact(point)?,
            Expr::Add(a, b) => a.eval_exact(point)? + b.eval_exact(point)?,
            Expr::Sub(a, b) => a.eval_exact(point)? - b.eval_exact(point)?,
            Expr::Mul(a, b) => a.eval_exact(point)? * b.eval_exact(point)?,
            Expr::Div(a, b) => {
                let d = b.eval_exact(point)?;
                if d.is_zero() {
                    return None;
                }
                a.eval_exact(point)? / d
            }
            Expr::Pow(a, e) => {
                let a = a.eval_exact(point)?;
                let mut acc = Rational::one();
                for _ in 0..*e {
                    acc *= &a;
                }
                acc
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(q) => write!(f, "({q})"),
            Expr::Var(k) => write!(f, "#{k}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, e) => write!(f, "({a}^{e})"),
        }
    }
}
