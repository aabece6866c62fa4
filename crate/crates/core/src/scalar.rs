//! Number types used for function values, weights and probabilities.
//!
//! Two kinds are supported: exact rationals ([`Rational`]) and binary64 floats.
//! Generic code is written against [`Scalar`]; the kind tag decides whether
//! sign tests are exact or carried out with a tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Exact,
    Float,
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKind::Exact => f.write_str("exact"),
            ScalarKind::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone + PartialOrd + Signed + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const KIND: ScalarKind;

    fn to_f64(&self) -> f64;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Parses integers, decimals (with optional exponent) and `a/b` fractions.
    fn parse_scalar(s: &str) -> Option<Self>;

    fn powi(&self, k: u32) -> Self {
        num_traits::pow(self.clone(), k as usize)
    }

    /// `self < -tol`, with the tolerance ignored for exact scalars.
    fn is_below(&self, tol: f64) -> bool {
        match Self::KIND {
            ScalarKind::Exact => self.below_zero(),
            ScalarKind::Float => self.to_f64() < -tol,
        }
    }

    /// Strict comparison with zero; unlike `Signed`, `-0.0` and `0.0` are both zero.
    fn below_zero(&self) -> bool {
        *self < Self::zero()
    }

    fn above_zero(&self) -> bool {
        *self > Self::zero()
    }

    fn from_usize(k: usize) -> Self {
        Self::from_ratio(k as i64, 1)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: f64 = a.trim().parse().ok()?;
            let b: f64 = b.trim().parse().ok()?;
            return if b == 0.0 { None } else { Some(a / b) };
        }
        let v: f64 = s.parse().ok()?;
        v.is_finite().then_some(v)
    }

    fn powi(&self, k: u32) -> Self {
        f64::powi(*self, k as i32)
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn to_f64(&self) -> f64 {
        // Ratio::to_f64 rounds correctly even for huge numerators/denominators.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        parse_exact(s.trim())
    }
}

fn parse_exact(s: &str) -> Option<Rational> {
    if let Some((a, b)) = s.split_once('/') {
        let a = parse_exact(a.trim())?;
        let b = parse_exact(b.trim())?;
        return if b.is_zero() { None } else { Some(a / b) };
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
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits }).ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Exact conversion of a finite float into a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Converts a vector of scalars to floats.
pub fn to_f64_vec<S: Scalar>(values: &[S]) -> Vec<f64> {
    values.iter().map(Scalar::to_f64).collect()
}

/// Largest absolute value, as a float.
pub fn max_abs<S: Scalar>(values: &[S]) -> f64 {
    values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}
