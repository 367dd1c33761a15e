//! Exact rational expressions over coordinates, for grid density formulas.
//!
//! Grammar: `+ - * / ^` (integer exponents), parentheses, decimal or integer
//! literals, the variables `x y z` (or `x0 x1 …`), and `min`, `max`, `abs`.

use hclust_core::number::parse_rational;
use hclust_core::Rational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression error at column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(usize),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    Min,
    Max,
    Abs,
}

impl Expr {
    pub fn parse(text: &str, dim: usize) -> Result<Expr, ExprError> {
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
            dim,
        };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Evaluates at `point`; division by zero yields `None`.
    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        Some(match self {
            Expr::Num(r) => r.clone(),
            Expr::Var(i) => point[*i].clone(),
            Expr::Neg(e) => -e.eval(point)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(point)?, b.eval(point)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => {
                        if b.is_zero() {
                            return None;
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(e, k) => {
                let base = e.eval(point)?;
                if base.is_zero() && *k < 0 {
                    return None;
                }
                num_traits::pow::Pow::pow(&base, *k)
            }
            Expr::Call(f, args) => {
                let vals: Vec<Rational> =
                    args.iter().map(|a| a.eval(point)).collect::<Option<_>>()?;
                match f {
                    Func::Min => vals.into_iter().min()?,
                    Func::Max => vals.into_iter().max()?,
                    Func::Abs => vals[0].abs(),
                }
            }
        })
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn error(&self, message: &str) -> ExprError {
        ExprError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            left = Expr::Bin(op, Box::new(left), Box::new(self.product()?));
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            left = Expr::Bin(op, Box::new(left), Box::new(self.unary()?));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let k: i32 = digits.parse().map_err(|_| ExprError {
            column: start + 1,
            message: "expected an integer exponent".into(),
        })?;
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.')
                {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                parse_rational(&text).map(Expr::Num).map_err(|_| ExprError {
                    column: start + 1,
                    message: format!("bad number {text:?}"),
                })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let at = |message: String| ExprError {
                    column: start + 1,
                    message,
                };
                let func = match name.as_str() {
                    "min" => Some(Func::Min),
                    "max" => Some(Func::Max),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect('(')?;
                    let mut args = vec![self.sum()?];
                    while self.peek() == Some(',') {
                        self.pos += 1;
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    if f == Func::Abs && args.len() != 1 {
                        return Err(at("abs takes one argument".into()));
                    }
                    return Ok(Expr::Call(f, args));
                }
                let index = match name.as_str() {
                    "x" => Some(0),
                    "y" => Some(1),
                    "z" => Some(2),
                    _ => name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()),
                };
                match index {
                    Some(i) if i < self.dim => Ok(Expr::Var(i)),
                    Some(_) => Err(at(format!(
                        "variable {name} exceeds dimension {}",
                        self.dim
                    ))),
                    None => Err(at(format!("unknown name {name:?}"))),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}
