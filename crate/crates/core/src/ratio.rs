//! Exact rational values: parsing, formatting, and JSON encoding.
//!
//! Probabilities are `BigRational` throughout. The screening-off conditions
//! are exact equalities, so nothing here ever touches floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("too many `/` in `{0}`")]
    TooManySlashes(String),
}

/// Parses `a` or `a/b` into a reduced rational. Whitespace around the
/// number and the slash is tolerated; the denominator must be nonzero.
pub fn parse_ratio(text: &str) -> Result<BigRational, RatioParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(RatioParseError::Empty);
    }
    let mut parts = trimmed.split('/');
    let num_part = parts.next().ok_or(RatioParseError::Empty)?.trim();
    let den_part = parts.next().map(str::trim);
    if parts.next().is_some() {
        return Err(RatioParseError::TooManySlashes(trimmed.to_string()));
    }
    let num: BigInt = num_part
        .parse()
        .map_err(|_| RatioParseError::BadInteger(num_part.to_string()))?;
    let den: BigInt = match den_part {
        None => BigInt::one(),
        Some(d) => d
            .parse()
            .map_err(|_| RatioParseError::BadInteger(d.to_string()))?,
    };
    if den.is_zero() {
        return Err(RatioParseError::ZeroDenominator(trimmed.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Renders a reduced rational as `a` or `a/b`.
pub fn format_ratio(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn int_number(i: &BigInt) -> serde_json::Number {
    // Exact for any magnitude: serde_json is built with arbitrary_precision.
    serde_json::from_str(&i.to_string()).expect("integer literal is a valid JSON number")
}

/// `{"num": a, "den": b}` in lowest terms. `BigRational` keeps the sign on
/// the numerator and the denominator positive, matching the schema.
pub fn ratio_json(value: &BigRational) -> Value {
    json!({
        "num": int_number(value.numer()),
        "den": int_number(value.denom()),
    })
}

/// Convenience constructor for small literals in fixtures and tests.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_probability(value: &BigRational) -> bool {
    !value.is_negative() && *value <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_ratio("3").unwrap(), ratio(3, 1));
        assert_eq!(parse_ratio("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_ratio(" 2 / 4 ").unwrap(), ratio(1, 2));
        assert_eq!(parse_ratio("-1/3").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_ratio(""), Err(RatioParseError::Empty)));
        assert!(matches!(
            parse_ratio("x"),
            Err(RatioParseError::BadInteger(_))
        ));
        assert!(matches!(
            parse_ratio("1/0"),
            Err(RatioParseError::ZeroDenominator(_))
        ));
        assert!(matches!(
            parse_ratio("1/2/3"),
            Err(RatioParseError::TooManySlashes(_))
        ));
    }

    #[test]
    fn json_encoding_is_lowest_terms() {
        let v = parse_ratio("2/4").unwrap();
        assert_eq!(ratio_json(&v), json!({"num": 1, "den": 2}));
        assert_eq!(format_ratio(&v), "1/2");
        assert_eq!(format_ratio(&ratio(3, 1)), "3");
    }

    #[test]
    fn json_encoding_survives_big_integers() {
        let v = parse_ratio("170141183460469231731687303715884105727/3").unwrap();
        let encoded = serde_json::to_string(&ratio_json(&v)).unwrap();
        assert!(encoded.contains("170141183460469231731687303715884105727"));
    }
}
