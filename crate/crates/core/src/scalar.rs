//! Scalar backends.
//!
//! Every computation runs over one [`Scalar`] type chosen at the call site:
//! [`Rational`] for exact verification or `f64` for the closed forms that
//! leave the rationals. Sequences are generic over the scalar, so two backends
//! can never meet inside one computation.

use std::fmt::{self, Debug};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Num, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" | "exact" => Ok(Backend::Rational),
            "float" | "f64" => Ok(Backend::Float),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static + Num + Signed
{
    const BACKEND: Backend;

    fn from_int(n: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    /// Nearest value; the rational backend converts the binary float exactly.
    fn from_f64(x: f64) -> Self;

    /// Parses `p/q`, an integer, or a decimal literal.
    fn parse_literal(text: &str) -> Result<Self>;

    fn to_f64(&self) -> f64;

    /// Integer power; `None` for zero raised to a negative exponent.
    fn powi(&self, exp: i64) -> Option<Self>;

    /// Square root when it is representable in this backend.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Canonical text form used in CSV and JSON output.
    fn format(&self) -> String;

    fn is_exact() -> bool {
        Self::BACKEND == Backend::Rational
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Whether a defect of this size counts as zero against `scale`.
    ///
    /// Exact scalars must be identically zero. Floats pass when
    /// `|self| <= tol * scale`.
    fn negligible(&self, scale: f64, tol: f64) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.magnitude() <= tol * scale
        }
    }
}

pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Nonzero `p/q` with `|p| ≤ 20`, `1 ≤ q ≤ 9`: small enough to keep exact
/// fixtures fast, varied enough to avoid accidental identities.
pub fn random_rational(rng: &mut impl rand::Rng) -> Rational {
    loop {
        let x = rational(rng.gen_range(-20..=20), rng.gen_range(1..=9));
        if !x.is_zero() {
            return x;
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim().replace('\u{2212}', "-");
    let bad = || Error::InvalidLiteral(text.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    // decimal with optional exponent, converted exactly
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t.as_str(), 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= Pow::pow(&ten, scale as u32);
    } else {
        value /= Pow::pow(&ten, (-scale) as u32);
    }
    Ok(if neg { -value } else { value })
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Rational::zero)
    }

    fn parse_literal(text: &str) -> Result<Self> {
        parse_rational(text)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn powi(&self, exp: i64) -> Option<Self> {
        if exp < 0 {
            if self.is_zero() {
                return None;
            }
            Some(Pow::pow(self.recip(), exp.unsigned_abs()))
        } else {
            Some(Pow::pow(self, exp as u64))
        }
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let p = self.numer().sqrt();
        let q = self.denom().sqrt();
        (&p * &p == *self.numer() && &q * &q == *self.denom()).then(|| Rational::new(p, q))
    }

    fn format(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_rational(q: &Rational) -> Self {
        <Rational as Scalar>::to_f64(q)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn parse_literal(text: &str) -> Result<Self> {
        let t = text.trim().replace('\u{2212}', "-");
        if t.contains('/') {
            return parse_rational(&t).map(|q| Self::from_rational(&q));
        }
        t.parse::<f64>()
            .map_err(|_| Error::InvalidLiteral(text.to_string()))
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powi(&self, exp: i64) -> Option<Self> {
        if exp < 0 && *self == 0.0 {
            return None;
        }
        Some(f64::powi(*self, exp as i32))
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn format(&self) -> String {
        format!("{self:.16e}")
    }
}
