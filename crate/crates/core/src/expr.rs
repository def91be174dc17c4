//! Closed-form sequence expressions in the integer variable `n`.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := '-' factor | postfix ('^' exponent)?
//! postfix  := atom '!'*
//! atom     := integer | 'n' | '(' expr ')'
//! exponent := '-'? integer | 'n'
//! ```
//!
//! `p/q` literals are ordinary divisions of integer literals. Exponents are
//! restricted to integers and `n`, so exact evaluation stays inside the
//! rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::seq::{Seq, Window};

#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Int(i64),
    Var,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Factorial(Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            Tok::End => Ok(e),
            _ => Err(p.error(&["operator", "end of input"])),
        }
    }

    pub fn eval<S: Scalar>(&self, n: i64) -> Result<S> {
        Ok(match self {
            Expr::Const(q) => S::from_rational(q),
            Expr::Var => S::from_int(n),
            Expr::Neg(a) => -a.eval::<S>(n)?,
            Expr::Add(a, b) => a.eval::<S>(n)? + b.eval::<S>(n)?,
            Expr::Sub(a, b) => a.eval::<S>(n)? - b.eval::<S>(n)?,
            Expr::Mul(a, b) => a.eval::<S>(n)? * b.eval::<S>(n)?,
            Expr::Div(a, b) => {
                let d = b.eval::<S>(n)?;
                if d.is_zero() {
                    return Err(Error::DivByZero(n));
                }
                a.eval::<S>(n)? / d
            }
            Expr::Pow(base, exp) => {
                let k = match exp {
                    Exponent::Int(k) => *k,
                    Exponent::Var => n,
                };
                base.eval::<S>(n)?.powi(k).ok_or(Error::DivByZero(n))?
            }
            Expr::Factorial(a) => {
                let v = a.eval::<S>(n)?;
                let k = v.to_f64().round();
                if v != S::from_int(k as i64) {
                    return Err(Error::NonIntegerFactorial(n));
                }
                if k < 0.0 {
                    return Err(Error::NegativeFactorial(n));
                }
                (1..=k as i64).fold(S::one(), |acc, i| acc * S::from_int(i))
            }
        })
    }

    pub fn tabulate<S: Scalar>(&self, w: Window) -> Result<Seq<S>> {
        Seq::try_from_fn(w, |n| self.eval(n))
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(q) => {
                let sign = if q.numer() < &BigInt::zero() { "-" } else { "" };
                let p = q.numer().magnitude();
                match (q.is_integer(), sign) {
                    (true, "") => write!(f, "{p}"),
                    (true, _) => write!(f, "(-{p})"),
                    (false, _) => write!(f, "({sign}{p}/{})", q.denom()),
                }
            }
            Expr::Var => f.write_str("n"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, Exponent::Int(k)) => write!(f, "({a}^{k})"),
            Expr::Pow(a, Exponent::Var) => write!(f, "({a}^n)"),
            Expr::Factorial(a) => write!(f, "({a}!)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bang,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '0'..='9' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = j + 1;
                    chars.next();
                }
                out.push((Tok::Int(text[i..end].parse().expect("digits")), i));
                continue;
            }
            'n' => Tok::Var,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{00b7}' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '!' => Tok::Bang,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(Error::Parse {
                    offset: i,
                    expected: vec!["integer", "n", "(", "operator"],
                })
            }
        };
        chars.next();
        out.push((tok, i));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> Error {
        Error::Parse {
            offset: self.tokens[self.pos].1,
            expected: expected.to_vec(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.postfix()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = match self.bump() {
            Tok::Var => Exponent::Var,
            Tok::Int(k) => Exponent::Int(self.small_int(k)?),
            Tok::Minus => match self.bump() {
                Tok::Int(k) => Exponent::Int(-self.small_int(k)?),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(&["integer"]));
                }
            },
            _ => {
                self.pos -= 1;
                return Err(self.error(&["integer", "n", "-"]));
            }
        };
        Ok(Expr::Pow(Box::new(base), exp))
    }

    fn small_int(&self, k: BigInt) -> Result<i64> {
        i64::try_from(k).map_err(|_| Error::Parse {
            offset: self.tokens[self.pos - 1].1,
            expected: vec!["exponent within i64 range"],
        })
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while *self.peek() == Tok::Bang {
            self.bump();
            e = Expr::Factorial(Box::new(e));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Int(k) => {
                self.bump();
                Ok(Expr::Const(Rational::from_integer(k)))
            }
            Tok::Var => {
                self.bump();
                Ok(Expr::Var)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&[")", "operator"]));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.error(&["integer", "n", "(", "-"])),
        }
    }
}
