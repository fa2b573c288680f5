//! Privacy parameter ε, kept in a form whose exponential stays exact.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::real::Real;

/// A nonnegative privacy parameter.
///
/// `Ln(r)` is `ε = ln r`, so `e^ε = r` is rational. `Value(x)` is a rational
/// `ε = x`, so `e^ε` is the exact exponential term `e^x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Value(Rational),
    Ln(Rational),
}

impl Epsilon {
    pub fn zero() -> Self {
        Epsilon::Value(Rational::zero())
    }

    pub fn value(x: Rational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::domain(format!("epsilon must be >= 0, got {x}")));
        }
        Ok(Epsilon::Value(x))
    }

    /// `ε = ln r` for rational `r ≥ 1`.
    pub fn ln(r: Rational) -> Result<Self> {
        if r < Rational::one() {
            return Err(Error::domain(format!("ln({r}) is negative")));
        }
        Ok(Epsilon::Ln(r))
    }

    /// `e^ε`, exactly.
    pub fn exp(&self) -> Real {
        match self {
            Epsilon::Value(x) => Real::exp(x.clone()),
            Epsilon::Ln(r) => Real::from(r.clone()),
        }
    }

    /// `e^{k·ε}` for rational `k`; for the `ln` form only integer `k` stays exact.
    pub fn exp_times(&self, k: &Rational) -> Result<Real> {
        match self {
            Epsilon::Value(x) => Ok(Real::exp(x * k)),
            Epsilon::Ln(r) if k.is_integer() => {
                let n = k.to_integer();
                let n: i32 = n
                    .try_into()
                    .map_err(|_| Error::domain(format!("exponent {k} too large")))?;
                Ok(Real::from(num_traits::Pow::pow(r, n)))
            }
            Epsilon::Ln(r) => Err(Error::domain(format!(
                "e^({k}·ln {r}) is not an exact rational; give epsilon as a rational instead"
            ))),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Epsilon::Value(x) => x.is_zero(),
            Epsilon::Ln(r) => r.is_one(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Epsilon::Value(x) => rational::to_f64(x),
            Epsilon::Ln(r) => rational::to_f64(r).ln(),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Value(x) => write!(f, "{x}"),
            Epsilon::Ln(r) if r.is_one() => f.write_str("0"),
            Epsilon::Ln(r) => write!(f, "ln({r})"),
        }
    }
}

impl fmt::Debug for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Epsilon({self})")
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// `"ln(2)"`, `"ln(3/2)"`, `"1/4"` or `"0.25"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("ln(").and_then(|r| r.strip_suffix(')')) {
            return Epsilon::ln(rational::parse_rational(inner)?);
        }
        Epsilon::value(rational::parse_decimal(t)?)
    }
}

impl serde::Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a δ in `[0, 1]`, allowing exact decimals.
pub fn parse_delta(s: &str) -> Result<Rational> {
    let d = rational::parse_decimal(s)?;
    if d.is_negative() || d > Rational::one() {
        return Err(Error::domain(format!("delta must lie in [0,1], got {s}")));
    }
    Ok(d)
}
