//! Scalar backends: exact big rationals and `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Arbitrary precision rational used by the exact backend.
pub type Rational = BigRational;

/// Which arithmetic a computation runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "rational" => Ok(Backend::Exact),
            "float" | "f64" => Ok(Backend::Float),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// Field element usable by every routine in the crate.
///
/// Exact types report `EXACT = true`; comparisons against zero are then
/// literal. For floats `is_negligible` applies a relative threshold.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Signed
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// Exact binary value for rationals; non-finite input maps to zero.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// The exact value, when the backend carries one.
    fn to_rational(&self) -> Option<Rational>;

    /// Zero for exact types, `|x| <= tol * scale` for floats.
    fn is_negligible(&self, scale: f64, tol: f64) -> bool;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    /// Canonical textual form: `p/q` (or `p`) for rationals, 17 significant
    /// digits for floats.
    fn to_canonical_string(&self) -> String;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_default()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn is_negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }

    fn to_canonical_string(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        None
    }

    fn is_negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale.max(1.0)
    }

    fn to_canonical_string(&self) -> String {
        format_f64(*self)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        // huge numerators/denominators: scale down by the bit length difference
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shortest decimal that round-trips through `str::parse::<f64>`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Parses `p`, `p/q` or a finite decimal such as `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits_ok = |p: &str| p.chars().all(|c| c.is_ascii_digit());
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !digits_ok(int_digits) || !digits_ok(frac_part) || (int_digits.is_empty() && frac_part.is_empty()) {
            return Err(bad());
        }
        let whole: BigInt = if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().map_err(|_| bad())? };
        let frac: BigInt = if frac_part.is_empty() { BigInt::zero() } else { frac_part.parse().map_err(|_| bad())? };
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let mut r = Rational::new(whole * &scale + frac, scale);
        if negative {
            r = -r;
        }
        return Ok(r);
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Parses a scalar for the requested backend. Floats also accept `p/q`.
pub fn parse_scalar<T: Scalar>(s: &str) -> Result<T, Error> {
    if T::EXACT {
        return parse_rational(s).map(|r| T::from_rational(&r));
    }
    if let Ok(r) = parse_rational(s) {
        return Ok(T::from_rational(&r));
    }
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number `{s}`")));
    }
    Ok(T::from_rational(&Rational::from_float(v).ok_or_else(|| Error::Parse(s.to_string()))?))
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Pochhammer symbol `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer<T: Scalar>(a: &T, k: usize) -> T {
    let mut acc = T::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc = acc * term.clone();
        term = term + T::one();
    }
    acc
}

/// Relative scale used by float comparisons: `1 + |x|`.
pub fn scale_of<T: Scalar>(x: &T) -> f64 {
    1.0 + x.to_f64().abs()
}
