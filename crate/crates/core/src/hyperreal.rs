//! Hyperreal scalars as finite Laurent polynomials in a fixed positive
//! unlimited `ω`.
//!
//! A value is `Σ a_k·ω^k` over finitely many integer `k`, with every stored
//! coefficient nonzero. Positive exponents are unlimited parts, negative
//! exponents infinitesimal parts, and `k = 0` is the real (standard) slice.
//! Order is lexicographic from the highest exponent down, which is the order
//! induced by `ω > r` for every real `r`.
//!
//! Coefficients are [`Real`]s, so plain rationals and exact Laplace tail
//! probabilities both scale `ω` without rounding.
//!
//! Text form is a signed sum of terms: `2*w^1 + 1 - 3*w^-1`. `ω` may be written
//! for `w`, and coefficients that are themselves sums are parenthesised:
//! `(1/2 - 1/2*e^(-1/2))*w^1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::real::Real;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Hyperreal {
    terms: BTreeMap<i32, Real>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    PositiveUnlimited,
    NegativeUnlimited,
    Limited,
    Infinitesimal,
    Zero,
}

impl Hyperreal {
    pub fn zero() -> Self {
        Hyperreal::default()
    }

    pub fn one() -> Self {
        Hyperreal::from(Real::one())
    }

    /// The unlimited `ω` itself.
    pub fn omega() -> Self {
        Hyperreal::monomial(Real::one(), 1)
    }

    pub fn monomial(coefficient: Real, exponent: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(exponent, coefficient);
        }
        Hyperreal { terms }
    }

    pub fn from_rational(q: Rational) -> Self {
        Hyperreal::from(Real::from(q))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: i32) -> Real {
        self.terms.get(&exponent).cloned().unwrap_or_default()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Real)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Highest exponent and its coefficient.
    pub fn leading(&self) -> Option<(i32, &Real)> {
        self.terms.iter().next_back().map(|(k, c)| (*k, c))
    }

    /// `Some(r)` when the value has no unlimited or infinitesimal part.
    pub fn as_real(&self) -> Option<Real> {
        match self.terms.len() {
            0 => Some(Real::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn signum(&self) -> i32 {
        self.leading().map_or(0, |(_, c)| c.signum())
    }

    pub fn classify(&self) -> Class {
        match self.leading() {
            None => Class::Zero,
            Some((k, c)) if k > 0 => {
                if c.is_positive() {
                    Class::PositiveUnlimited
                } else {
                    Class::NegativeUnlimited
                }
            }
            Some((k, _)) if k < 0 => Class::Infinitesimal,
            Some(_) => Class::Limited,
        }
    }

    pub fn is_unlimited(&self) -> bool {
        matches!(self.classify(), Class::PositiveUnlimited | Class::NegativeUnlimited)
    }

    /// Degree-0 coefficient of a limited value; infinitesimal parts are dropped.
    pub fn standard_part(&self) -> Result<Real> {
        if self.is_unlimited() {
            return Err(Error::domain(format!("standard part of unlimited value {self}")));
        }
        Ok(self.coefficient(0))
    }

    pub fn scale(&self, k: &Real) -> Hyperreal {
        let mut out = Hyperreal::zero();
        for (e, c) in &self.terms {
            out.insert(*e, c * k);
        }
        out
    }

    /// Division by a single term `c·ω^k` with `c` a nonzero monomial real.
    pub fn div_monomial(&self, divisor: &Hyperreal) -> Result<Hyperreal> {
        match divisor.terms.iter().next() {
            Some((k, c)) if divisor.terms.len() == 1 => {
                let inv = c.recip_monomial()?;
                Ok(self * &Hyperreal::monomial(inv, -k))
            }
            _ => Err(Error::domain(format!("cannot divide by non-monomial {divisor}"))),
        }
    }

    pub fn abs(&self) -> Hyperreal {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    fn insert(&mut self, exponent: i32, value: Real) {
        if value.is_zero() {
            self.terms.remove(&exponent);
        } else {
            self.terms.insert(exponent, value);
        }
    }
}

impl From<Real> for Hyperreal {
    fn from(r: Real) -> Self {
        Hyperreal::monomial(r, 0)
    }
}

impl From<i64> for Hyperreal {
    fn from(n: i64) -> Self {
        Hyperreal::from(Real::from(n))
    }
}

impl Add<&Hyperreal> for &Hyperreal {
    type Output = Hyperreal;
    fn add(self, rhs: &Hyperreal) -> Hyperreal {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            let sum = &out.coefficient(*k) + c;
            out.insert(*k, sum);
        }
        out
    }
}

impl Neg for &Hyperreal {
    type Output = Hyperreal;
    fn neg(self) -> Hyperreal {
        Hyperreal {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Sub<&Hyperreal> for &Hyperreal {
    type Output = Hyperreal;
    fn sub(self, rhs: &Hyperreal) -> Hyperreal {
        self + &(-rhs)
    }
}

impl Mul<&Hyperreal> for &Hyperreal {
    type Output = Hyperreal;
    fn mul(self, rhs: &Hyperreal) -> Hyperreal {
        let mut out = Hyperreal::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let k = ka + kb;
                let sum = &out.coefficient(k) + &(ca * cb);
                out.insert(k, sum);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Hyperreal> for Hyperreal {
            type Output = Hyperreal;
            fn $m(self, rhs: Hyperreal) -> Hyperreal { (&self).$m(&rhs) }
        }
        impl $tr<&Hyperreal> for Hyperreal {
            type Output = Hyperreal;
            fn $m(self, rhs: &Hyperreal) -> Hyperreal { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Hyperreal {
    type Output = Hyperreal;
    fn neg(self) -> Hyperreal {
        -&self
    }
}

impl std::iter::Sum for Hyperreal {
    fn sum<I: Iterator<Item = Hyperreal>>(iter: I) -> Hyperreal {
        iter.fold(Hyperreal::zero(), |acc, h| &acc + &h)
    }
}

impl Ord for Hyperreal {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Hyperreal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Hyperreal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if *k == 0 {
                // the real slice prints inline; its own signs join the sum
                let s = c.to_string();
                match s.strip_prefix('-') {
                    Some(rest) if !first => write!(f, " - {rest}")?,
                    _ if !first => write!(f, " + {s}")?,
                    _ => f.write_str(&s)?,
                }
                first = false;
                continue;
            }
            let single = c.terms().count() == 1;
            let (neg, coef) = if single && c.is_negative() { (true, -c) } else { (false, c.clone()) };
            let body = if coef == Real::one() {
                format!("w^{k}")
            } else if single {
                format!("{coef}*w^{k}")
            } else {
                format!("({coef})*w^{k}")
            };
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Hyperreal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hyperreal({self})")
    }
}

impl FromStr for Hyperreal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, chars: s.char_indices().peekable() };
        let value = p.sum()?;
        p.skip_ws();
        match p.chars.peek() {
            None => Ok(value),
            Some((i, c)) => Err(Error::parse(format!("unexpected {c:?} at byte {i} in {s:?}"))),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|(_, c)| *c)
    }

    fn err(&self, what: &str) -> Error {
        Error::parse(format!("{what} in {:?}", self.src))
    }

    fn sum(&mut self) -> Result<Hyperreal> {
        let mut acc = Hyperreal::zero();
        let mut sign = match self.peek() {
            Some('-') => {
                self.chars.next();
                -1
            }
            Some('+') => {
                self.chars.next();
                1
            }
            _ => 1,
        };
        loop {
            let term = self.product()?;
            acc = if sign < 0 { &acc - &term } else { &acc + &term };
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.chars.next();
        }
    }

    fn product(&mut self) -> Result<Hyperreal> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.chars.next();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Hyperreal> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some('w') | Some('ω') => {
                self.chars.next();
                let k = if self.peek() == Some('^') {
                    self.chars.next();
                    let lit = self.signed_literal()?;
                    lit.parse::<i32>().map_err(|_| self.err("bad exponent of w"))?
                } else {
                    1
                };
                Ok(Hyperreal::monomial(Real::one(), k))
            }
            Some('e') => {
                self.chars.next();
                self.expect('^')?;
                self.expect('(')?;
                let lit = self.signed_literal()?;
                self.expect(')')?;
                let x = rational::parse_rational(&lit)?;
                Ok(Hyperreal::from(Real::exp(x)))
            }
            Some(c) if c.is_ascii_digit() => {
                let lit = self.signed_literal()?;
                Ok(Hyperreal::from_rational(rational::parse_rational(&lit)?))
            }
            _ => Err(self.err("expected a term")),
        }
    }

    /// `[-]digits[/digits]`
    fn signed_literal(&mut self) -> Result<String> {
        let mut out = String::new();
        if let Some(c @ ('-' | '+')) = self.peek() {
            out.push(c);
            self.chars.next();
        }
        let mut seen_slash = false;
        while let Some((_, c)) = self.chars.peek().copied() {
            if c.is_ascii_digit() || (c == '/' && !seen_slash) {
                seen_slash |= c == '/';
                out.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if out.trim_start_matches(['-', '+']).is_empty() {
            return Err(self.err("expected a number"));
        }
        Ok(out)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.chars.next();
                Ok(())
            }
            _ => Err(self.err(&format!("expected {want:?}"))),
        }
    }
}

impl serde::Serialize for Hyperreal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Hyperreal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
