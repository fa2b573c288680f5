//! Exact reals of the form `Σ cᵢ·e^{xᵢ}` with rational `cᵢ` and `xᵢ`.
//!
//! This is the scalar every probability and expected utility lives in. Plain
//! rationals are the `x = 0` slice; Laplace tail probabilities such as
//! `½e^{-1/2}` are single extra terms. The set is a ring (exponents add under
//! multiplication), so the hockey-stick sums, expected utilities and
//! compensation formulas all stay exact.
//!
//! Ordering is decided by certified interval evaluation. Distinct rational
//! exponents give linearly independent exponentials over the rationals
//! (Lindemann–Weierstrass), so a canonical nonzero value is never zero and the
//! refinement loop in [`Real::signum`] always terminates.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hyperreal::Hyperreal;
use crate::rational::{self, round_down, round_up, Rational};

const START_BITS: u32 = 64;
const MAX_BITS: u32 = 1 << 16;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Real {
    // exponent -> nonzero coefficient
    terms: BTreeMap<Rational, Rational>,
}

impl Real {
    pub fn zero() -> Self {
        Real::default()
    }

    pub fn one() -> Self {
        Real::from(rational::int(1))
    }

    /// `e^x` exactly.
    pub fn exp(x: Rational) -> Self {
        Real::term(rational::int(1), x)
    }

    /// `coefficient · e^exponent`.
    pub fn term(coefficient: Rational, exponent: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(exponent, coefficient);
        }
        Real { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(q)` when the value is the plain rational `q`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Rational::zero()).cloned(),
            _ => None,
        }
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, k: &Rational) -> Real {
        if k.is_zero() {
            return Real::zero();
        }
        Real {
            terms: self.terms.iter().map(|(x, c)| (x.clone(), c * k)).collect(),
        }
    }

    /// Multiplicative inverse, defined only for single-term values.
    pub fn recip_monomial(&self) -> Result<Real> {
        match self.terms.iter().next() {
            Some((x, c)) if self.terms.len() == 1 => Ok(Real::term(c.recip(), -x.clone())),
            _ => Err(Error::domain(format!("{self} is not invertible as a monomial"))),
        }
    }

    /// Enclosure `lo ≤ self ≤ hi` with roughly `bits` bits of absolute precision
    /// per term.
    pub fn interval(&self, bits: u32) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (x, c) in &self.terms {
            let (el, eh) = exp_interval(x, bits);
            if c.is_positive() {
                lo += c * &el;
                hi += c * &eh;
            } else {
                lo += c * &eh;
                hi += c * &el;
            }
        }
        (lo, hi)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        if self.terms.is_empty() {
            return 0;
        }
        if self.terms.len() == 1 {
            let c = self.terms.values().next().unwrap();
            return if c.is_positive() { 1 } else { -1 };
        }
        let mut bits = START_BITS;
        loop {
            let (lo, hi) = self.interval(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
            assert!(bits <= MAX_BITS, "sign of {self} not resolved at {MAX_BITS} bits");
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Real {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(x, c)| rational::to_f64(c) * rational::to_f64(x).exp())
            .fold(0.0, |a, b| a + b)
    }
}

thread_local! {
    static EXP_CACHE: RefCell<HashMap<(Rational, u32), (Rational, Rational)>> = RefCell::new(HashMap::new());
}

const EXP_CACHE_LIMIT: usize = 4096;

/// Certified bounds on `e^x`, rounded outward to dyadics with `bits` fraction bits.
pub fn exp_interval(x: &Rational, bits: u32) -> (Rational, Rational) {
    let key = (x.clone(), bits);
    if let Some(hit) = EXP_CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let value = exp_interval_uncached(x, bits);
    EXP_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= EXP_CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, value.clone());
    });
    value
}

fn exp_interval_uncached(x: &Rational, bits: u32) -> (Rational, Rational) {
    if x.is_zero() {
        return (Rational::one(), Rational::one());
    }
    if x.is_negative() {
        let (lo, hi) = exp_interval(&-x, bits);
        return (round_down(&hi.recip(), bits), round_up(&lo.recip(), bits));
    }
    // halve until y <= 1/2, then square back up
    let half = rational::ratio(1, 2);
    let mut y = x.clone();
    let mut squarings = 0u32;
    while y > half {
        y /= rational::int(2);
        squarings += 1;
    }
    let work = bits + squarings + 16;
    let eps = Rational::new(1.into(), num_bigint::BigInt::one() << work);
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut k = 1i64;
    loop {
        term = term * &y / rational::int(k);
        sum += &term;
        if term < eps {
            break;
        }
        k += 1;
    }
    // remainder after the last added term is at most that term since y <= 1/2
    let mut lo = round_down(&sum, work);
    let mut hi = round_up(&(sum + &term), work);
    for _ in 0..squarings {
        lo = round_down(&(&lo * &lo), work);
        hi = round_up(&(&hi * &hi), work);
    }
    (round_down(&lo, bits), round_up(&hi, bits))
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Self {
        Real::term(q, Rational::zero())
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::from(rational::int(n))
    }
}

impl Add<&Real> for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        for (x, c) in &rhs.terms {
            let entry = self.terms.entry(x.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(x);
            }
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            terms: self.terms.iter().map(|(x, c)| (x.clone(), -c)).collect(),
        }
    }
}

impl Sub<&Real> for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        self + &(-rhs)
    }
}

impl Mul<&Real> for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        let mut out = Real::zero();
        for (xa, ca) in &self.terms {
            for (xb, cb) in &rhs.terms {
                out += &Real::term(ca * cb, xa + xb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real { (&self).$m(&rhs) }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |mut acc, r| {
            acc += &r;
            acc
        })
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match (self - other).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_factor(c: &Rational, x: &Rational) -> String {
    if x.is_zero() {
        return c.to_string();
    }
    if c.is_one() {
        format!("e^({x})")
    } else {
        format!("{c}*e^({x})")
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (x, c)) in self.terms.iter().rev().enumerate() {
            let body = fmt_factor(&c.abs(), x);
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({self})")
    }
}

impl FromStr for Real {
    type Err = Error;

    /// Same term syntax as [`Hyperreal`], restricted to the real slice:
    /// `"1/2 - 1/2*e^(-1/2)"`.
    fn from_str(s: &str) -> Result<Self> {
        let h: Hyperreal = s.parse()?;
        h.as_real()
            .ok_or_else(|| Error::parse(format!("{s:?} is not a real value")))
    }
}

impl serde::Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Real {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn exp_interval_brackets_known_values() {
        for (x, v) in [(ratio(1, 2), 0.5f64.exp()), (int(3), 3f64.exp()), (ratio(-7, 3), (-7.0f64 / 3.0).exp())] {
            let (lo, hi) = exp_interval(&x, 80);
            assert!(rational::to_f64(&lo) <= v * (1.0 + 1e-15));
            assert!(rational::to_f64(&hi) >= v * (1.0 - 1e-15));
            assert!(rational::to_f64(&(&hi - &lo)) < 1e-20);
        }
    }

    #[test]
    fn exponents_multiply_by_adding() {
        let a = Real::exp(ratio(1, 2));
        assert_eq!(&a * &a, Real::exp(int(1)));
        assert_eq!(&a * &a.recip_monomial().unwrap(), Real::one());
    }

    #[test]
    fn certified_sign_near_cancellation() {
        // e - 2.718281828459045 > 0, e - 2.718281828459046 < 0
        let e = Real::exp(int(1));
        let below = crate::rational::parse_decimal("2.718281828459045").unwrap();
        let above = crate::rational::parse_decimal("2.718281828459046").unwrap();
        assert!(e > Real::from(below));
        assert!(e < Real::from(above));
    }

    #[test]
    fn display_parse_round_trip() {
        let r = &Real::from(ratio(1, 2)) - &Real::term(ratio(1, 2), ratio(-1, 2));
        let s = r.to_string();
        assert_eq!(s, "1/2 - 1/2*e^(-1/2)");
        assert_eq!(s.parse::<Real>().unwrap(), r);
        assert_eq!(Real::zero().to_string().parse::<Real>().unwrap(), Real::zero());
    }

    #[test]
    fn rational_slice_is_exact() {
        let r = &Real::from(ratio(1, 7)) + &Real::from(ratio(6, 7));
        assert_eq!(r, Real::one());
        assert_eq!(r.as_rational(), Some(int(1)));
        assert_eq!(Real::exp(int(1)).as_rational(), None);
    }
}
