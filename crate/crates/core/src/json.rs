//! Serde adapters for arbitrary-precision values.
//!
//! Integers that fit in an `i64` are written as JSON numbers, larger ones as
//! decimal strings. Both forms are accepted on input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

struct JsonIntVisitor;

impl Visitor<'_> for JsonIntVisitor {
    type Value = JsonInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
        Ok(JsonInt(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
        Ok(JsonInt(v.into()))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<JsonInt, E> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Ok(JsonInt(BigInt::from(v as i64)))
        } else {
            Err(E::custom(format!("non-integral number {v}")))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
        BigInt::from_str(v.trim())
            .map(JsonInt)
            .map_err(|_| E::custom(format!("invalid integer string {v:?}")))
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(JsonIntVisitor)
    }
}

/// `{"num": .., "den": ..}` with the denominator positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRational {
    pub num: JsonInt,
    pub den: JsonInt,
}

impl From<&BigRational> for JsonRational {
    fn from(q: &BigRational) -> Self {
        JsonRational {
            num: JsonInt(q.numer().clone()),
            den: JsonInt(q.denom().clone()),
        }
    }
}

impl From<&BigInt> for JsonRational {
    fn from(v: &BigInt) -> Self {
        JsonRational {
            num: JsonInt(v.clone()),
            den: JsonInt(BigInt::one()),
        }
    }
}

impl TryFrom<JsonRational> for BigRational {
    type Error = String;

    fn try_from(q: JsonRational) -> Result<Self, String> {
        if q.den.0.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(q.num.0, q.den.0))
    }
}

pub fn ints(v: &[BigInt]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

pub fn rationals(v: &[BigRational]) -> Vec<JsonRational> {
    v.iter().map(JsonRational::from).collect()
}
