//! Exact rationals and their text form.
//!
//! Rationals travel as `"p/q"` in lowest terms with the sign on the
//! numerator; integers print without a denominator.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::MalformedRational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    match t.split_once('/') {
        Some((a, b)) => {
            let num = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(num, den))
        }
        None => BigInt::from_str(t).map(Q::from_integer).map_err(|_| bad()),
    }
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Integer power with a possibly negative exponent.
pub fn pow_q(base: &Q, exp: i64) -> Q {
    if exp >= 0 {
        num_traits::pow::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

/// Nearest f64, robust to numerators and denominators beyond the f64 range.
pub fn to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    let (m, e) = to_f64_scaled(x);
    m * 2f64.powi(e.clamp(-1100, 1100) as i32)
}

/// Returns (mantissa, exponent) with x ≈ mantissa·2^exponent and mantissa in [0.5, 1).
pub fn to_f64_scaled(x: &Q) -> (f64, i64) {
    if x.is_zero() {
        return (0.0, 0);
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let num = x.numer().abs();
    let den = x.denom().clone();
    let shift = num.bits() as i64 - den.bits() as i64;
    // keep 64 significant bits in the quotient
    let (n2, d2) = if shift >= 64 {
        (num, den << (shift - 64) as usize)
    } else {
        (num << (64 - shift) as usize, den)
    };
    let quo = (n2 / d2).to_f64().unwrap_or(f64::MAX);
    let bits = quo.log2().floor() as i64 + 1;
    let mantissa = quo / 2f64.powi(bits as i32);
    (sign * mantissa, shift - 64 + bits)
}

/// Natural logarithm of a positive rational, without overflow.
pub fn ln_q(x: &Q) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = to_f64_scaled(x);
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

/// Decimal rendering with a fixed number of significant digits.
/// Integers below 10^15 print exactly; everything else in scientific notation.
pub fn format_decimal(x: &Q, digits: usize) -> String {
    if x.is_integer() && x.numer().abs() < BigInt::from(1_000_000_000_000_000i64) {
        return x.numer().to_string();
    }
    format_f64(to_f64(x), digits)
}

pub fn format_f64(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{:.*e}", digits - 1, v)
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}

pub mod serde_q {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_rows {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = rows
            .iter()
            .map(|r| r.iter().map(format_q).collect())
            .collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
        let text: Vec<Vec<String>> = Vec::deserialize(d)?;
        text.iter()
            .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_normalizes() {
        assert_eq!(parse_q("2/4").unwrap(), q(1, 2));
        assert_eq!(format_q(&parse_q("3/-6").unwrap()), "-1/2");
        assert_eq!(format_q(&parse_q(" 7 ").unwrap()), "7");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn huge_values_convert() {
        let big = pow_q(&qi(10), 400);
        assert!((ln_q(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        let tiny = pow_q(&q(1, 3), 1000);
        assert!((ln_q(&tiny) + 1000.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(to_f64(&tiny), 0.0);
        let ratio = pow_q(&qi(10), 400) / (pow_q(&qi(10), 400) * qi(4));
        assert_eq!(to_f64(&ratio), 0.25);
    }

    proptest! {
        #[test]
        fn text_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let x = q(n, d);
            prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        }
    }
}
