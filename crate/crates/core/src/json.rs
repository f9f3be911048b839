//! JSON encoding for exact integers.
//!
//! Integers whose magnitude is at most 2^53 are written as JSON numbers so
//! that any consumer can read them losslessly; anything larger is written as
//! a decimal string. Both forms are accepted on input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const SAFE_LIMIT: i64 = 1 << 53;

/// Serde adapter for a single arbitrary-precision integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_int(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(IntVisitor).map(JsonInt)
    }
}

pub fn serialize_int<S: Serializer>(value: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    match value.to_i64() {
        Some(small) if small.abs() <= SAFE_LIMIT => serializer.serialize_i64(small),
        _ => serializer.serialize_str(&value.to_string()),
    }
}

pub fn deserialize_int<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigInt, D::Error> {
    deserializer.deserialize_any(IntVisitor)
}

pub(crate) fn int_to_value(value: &BigInt) -> serde_json::Value {
    match value.to_i64() {
        Some(small) if small.abs() <= SAFE_LIMIT => serde_json::Value::from(small),
        _ => serde_json::Value::from(value.to_string()),
    }
}

/// Indented JSON with arrays of scalars kept on one line, so matrices read
/// row by row.
pub fn to_string_rows(value: &serde_json::Value) -> String {
    let mut out = String::new();
    write_rows(value, 0, &mut out);
    out
}

fn write_rows(value: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize| "  ".repeat(d);
    match value {
        Value::Array(items) if items.iter().any(|x| x.is_array() || x.is_object()) => {
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_rows(x, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_rows(x, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<BigInt, E> {
        if v.fract() == 0.0 && v.abs() <= SAFE_LIMIT as f64 {
            Ok(BigInt::from(v as i64))
        } else {
            Err(E::custom(format!("{v} is not an exact integer")))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        BigInt::from_str(v.trim()).map_err(|e| E::custom(format!("{v:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_are_numbers_and_large_values_are_strings() {
        assert_eq!(serde_json::to_string(&JsonInt(BigInt::from(-7))).unwrap(), "-7");
        let limit = BigInt::from(SAFE_LIMIT);
        assert_eq!(serde_json::to_string(&JsonInt(limit.clone())).unwrap(), "9007199254740992");
        let above = limit + BigInt::from(1);
        assert_eq!(serde_json::to_string(&JsonInt(above.clone())).unwrap(), "\"9007199254740993\"");
        let back: JsonInt = serde_json::from_str("\"9007199254740993\"").unwrap();
        assert_eq!(back.0, above);
    }

    #[test]
    fn rejects_fractional_numbers() {
        assert!(serde_json::from_str::<JsonInt>("1.5").is_err());
        assert!(serde_json::from_str::<JsonInt>("\"abc\"").is_err());
    }
}
