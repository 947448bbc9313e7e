//! Scalar abstraction shared by every computation in the crate.
//!
//! Two number types implement [`Real`]: `f64` (the default floating mode,
//! with a `1e-12` identity tolerance) and [`Rational`] (exact arbitrary
//! precision rationals, zero tolerance). All distributions, indices,
//! policies and oracles are generic over it so identities can be checked
//! either to machine precision or exactly.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Tolerance used by floating-point identity and inequality checks.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

pub trait Real:
    Clone
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    /// Slack allowed in identity checks (zero in exact mode).
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Parses `"3/7"`, `"0.125"`, `"-2"` or `"1e-3"`.
    fn parse_literal(s: &str) -> Option<Self>;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Finite and not NaN.
    fn is_finite_value(&self) -> bool;
}

impl Real for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            if d == 0.0 {
                return None;
            }
            return Some(n / d);
        }
        s.parse().ok()
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Exact parse of a rational or decimal literal (scientific notation allowed).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::parse_bytes(all_digits.as_bytes(), 10).unwrap_or_else(BigInt::zero);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

pub fn min_of<T: Real>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub fn max_of<T: Real>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// `max{x, 0}`.
pub fn positive_part<T: Real>(x: T) -> T {
    max_of(x, T::zero())
}

/// `|a - b| <= T::tolerance()`.
pub fn approx_eq<T: Real>(a: &T, b: &T) -> bool {
    (a.clone() - b.clone()).abs() <= T::tolerance()
}

/// Converts between scalar types, exactly when the target is exact.
pub fn convert<S: Real, T: Real>(x: &S) -> T {
    if S::EXACT && T::EXACT {
        // Rational -> Rational: go through the decimal-free string form.
        return T::parse_literal(&x.to_string()).expect("rational display round-trips");
    }
    T::from_f64(x.to_f64_lossy()).expect("finite scalar")
}

pub fn sum<T: Real, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().fold(T::zero(), |acc, x| acc + x)
}

pub fn one<T: Real>() -> T {
    T::one()
}

/// A real number extended with a `+∞` top element.
///
/// Only `min` and comparisons are defined on the top element; it never
/// enters arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Extended<T> {
    pub fn min(self, other: Extended<T>) -> Extended<T> {
        match (self, other) {
            (Extended::Infinity, x) | (x, Extended::Infinity) => x,
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(min_of(a, b)),
        }
    }

    pub fn min_finite(self, other: T) -> T {
        match self {
            Extended::Infinity => other,
            Extended::Finite(a) => min_of(a, other),
        }
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    /// `self <= x` with `+∞ <= x` false for every finite `x`.
    pub fn le_finite(&self, x: &T) -> bool {
        match self {
            Extended::Finite(a) => a <= x,
            Extended::Infinity => false,
        }
    }

    /// `self >= x`.
    pub fn ge_finite(&self, x: &T) -> bool {
        match self {
            Extended::Finite(a) => a >= x,
            Extended::Infinity => true,
        }
    }
}

impl<T: Real> From<T> for Extended<T> {
    fn from(x: T) -> Self {
        Extended::Finite(x)
    }
}
