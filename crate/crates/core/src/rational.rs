//! Exact rational parsing and the JSON text form used by spatial documents.
//!
//! Rationals are written as JSON integers when integral and as `"num/den"`
//! strings otherwise. On input, decimal strings (`"1.25"`) and JSON floats are
//! also accepted and converted through their decimal text, so `0.1` reads as
//! exactly `1/10`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as a rational number")]
pub struct RationalParseError {
    pub input: String,
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a"`, `"a/b"` or a decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, RationalParseError> {
    let err = || RationalParseError { input: s.to_string() };
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mut num = BigInt::from_str(&digits).map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| err())
}

/// `"num/den"`, or just `"num"` when integral.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn serialize_rational<S: Serializer>(r: &BigRational, serializer: S) -> Result<S::Ok, S::Error> {
    match r.denom().is_one().then(|| r.numer().to_i64()).flatten() {
        Some(v) => serializer.serialize_i64(v),
        None => serializer.serialize_str(&format_rational(r)),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Int(i64),
    Float(f64),
    Text(String),
}

pub fn deserialize_rational<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigRational, D::Error> {
    match RationalRepr::deserialize(deserializer)? {
        RationalRepr::Int(v) => Ok(int(v)),
        RationalRepr::Float(f) if f.is_finite() => parse_rational(&format!("{f}")).map_err(de::Error::custom),
        RationalRepr::Float(f) => Err(de::Error::custom(format!("non-finite number {f}"))),
        RationalRepr::Text(s) => parse_rational(&s).map_err(de::Error::custom),
    }
}

/// Serde adapter for a single rational field (`#[serde(with = "rational::text")]`).
pub mod text {
    pub use super::deserialize_rational as deserialize;
    pub use super::serialize_rational as serialize;
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub(crate) struct RationalText(
    #[serde(serialize_with = "serialize_rational", deserialize_with = "deserialize_rational")] pub BigRational,
);

pub(crate) fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}
