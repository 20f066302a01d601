//! JSON conventions shared by every emitted document.
//!
//! Rationals are written as `{"num": …, "den": …}` in lowest terms with a
//! positive denominator. Reals are written with 17 significant digits in
//! exponent form, which round-trips every `f64`; non-finite values become
//! `null`.

use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::value::RawValue;

use crate::Rational;

/// Formats a real at 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// An `f64` that serialises at 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_real(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

/// Serde adapter for [`Rational`] fields: `#[serde(serialize_with = "json::rational")]`.
pub fn rational<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    let mut st = serializer.serialize_struct("Rational", 2)?;
    st.serialize_field("num", &NumberText(r.numer().to_string()))?;
    st.serialize_field("den", &NumberText(r.denom().to_string()))?;
    st.end()
}

// i128 is not representable by every serde backend, so emit the digits raw.
struct NumberText(String);

impl Serialize for NumberText {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.0.clone()).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}
