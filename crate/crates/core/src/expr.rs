//! Arithmetic expressions in the node coordinates `n` and `k`.
//!
//! Grammar (the custom-triangle interface):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | atom
//! atom   := integer | 'n' | 'k' | '(' expr ')'
//! ```
//!
//! Catalog triangles additionally use an internal power node with an
//! integer-valued exponent, which the parser does not accept.

use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_q, pow_q, qi, to_f64, Q};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Q, f64),
    N,
    K,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(x: Q) -> Expr {
        let f = to_f64(&x);
        Expr::Const(x, f)
    }

    pub fn int(v: i64) -> Expr {
        Expr::constant(qi(v))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        Expr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, n: usize, k: usize) -> Result<Q> {
        Ok(match self {
            Expr::Const(c, _) => c.clone(),
            Expr::N => qi(n as i64),
            Expr::K => qi(k as i64),
            Expr::Neg(a) => -a.eval(n, k)?,
            Expr::Add(a, b) => a.eval(n, k)? + b.eval(n, k)?,
            Expr::Sub(a, b) => a.eval(n, k)? - b.eval(n, k)?,
            Expr::Mul(a, b) => a.eval(n, k)? * b.eval(n, k)?,
            Expr::Div(a, b) => {
                let d = b.eval(n, k)?;
                if d.is_zero() {
                    return Err(Error::Expression(format!(
                        "division by zero at ({n},{k}) in `{self}`"
                    )));
                }
                a.eval(n, k)? / d
            }
            Expr::Pow(a, b) => {
                let e = b.eval(n, k)?;
                if !e.is_integer() {
                    return Err(Error::Expression(format!(
                        "non-integer exponent at ({n},{k}) in `{self}`"
                    )));
                }
                let base = a.eval(n, k)?;
                let e = e
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::Expression("exponent overflow".into()))?;
                if base.is_zero() && e < 0 {
                    return Err(Error::Expression(format!("0^{e} at ({n},{k})")));
                }
                pow_q(&base, e)
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c, _) => {
                let s = format_q(c);
                if s.starts_with('-') || s.contains('/') {
                    write!(f, "({s})")
                } else {
                    write!(f, "{s}")
                }
            }
            Expr::N => write!(f, "n"),
            Expr::K => write!(f, "k"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, b) => write!(f, "{a}^({b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Expression(format!("{msg} at offset {}", self.pos))
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

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                // U+2212 is accepted as a minus sign too
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                Some(0xE2) if self.src[self.pos..].starts_with("−".as_bytes()) => {
                    self.pos += "−".len();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(0xE2) if self.src[self.pos..].starts_with("−".as_bytes()) => {
                self.pos += "−".len();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'n') => {
                self.pos += 1;
                Ok(Expr::N)
            }
            Some(b'k') => {
                self.pos += 1;
                Ok(Expr::K)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: num_bigint::BigInt = text.parse().map_err(|_| self.error("bad integer"))?;
                Ok(Expr::constant(Q::from_integer(v)))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("n - k - 1").unwrap();
        assert_eq!(e.eval(5, 2).unwrap(), qi(2));
        let e = Expr::parse("(n+1) - 2*(k+1)/4").unwrap();
        assert_eq!(e.eval(3, 1).unwrap(), qi(3));
        let e = Expr::parse("-k + 1/3").unwrap();
        assert_eq!(e.eval(0, 0).unwrap(), q(1, 3));
        let e = Expr::parse("n − k").unwrap();
        assert_eq!(e.eval(4, 1).unwrap(), qi(3));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "n +", "(n", "x", "n k", "2^n", "1.5"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let e = Expr::parse("1/(n-k)").unwrap();
        assert!(e.eval(2, 2).is_err());
        assert_eq!(e.eval(3, 1).unwrap(), q(1, 2));
    }

    #[test]
    fn display_reparses() {
        let e = Expr::parse("(n+1) - (0-1/2)*(k+1)").unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        for n in 0..5 {
            for k in 0..=n {
                assert_eq!(e.eval(n, k).unwrap(), again.eval(n, k).unwrap());
            }
        }
    }

    #[test]
    fn power_node() {
        let p = Expr::pow(Expr::constant(q(1, 2)), Expr::sub(Expr::N, Expr::K));
        assert_eq!(p.eval(3, 1).unwrap(), q(1, 4));
    }
}
