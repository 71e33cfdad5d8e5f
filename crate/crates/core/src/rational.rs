//! Exact rationals and their `"p/q"` string encoding.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = Ratio<i64>;

/// Parses `"p/q"` or `"p"`; whitespace around the parts is tolerated.
pub fn parse(text: &str) -> Result<Rational, String> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match cleaned.split_once('/') {
        Some((n, d)) => (n, d),
        None => (cleaned.as_str(), "1"),
    };
    let num: i64 = num.parse().map_err(|_| format!("bad rational numerator in {text:?}"))?;
    let den: i64 = den.parse().map_err(|_| format!("bad rational denominator in {text:?}"))?;
    if den == 0 {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: reduced, `"p"` for integers, `"p/q"` otherwise.
pub fn format(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub(crate) mod opt_serde {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&format(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|text| parse(&text).map_err(serde::de::Error::custom)).transpose()
    }
}
