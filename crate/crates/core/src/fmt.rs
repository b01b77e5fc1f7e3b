//! Fixed-width float text: 17 significant digits in scientific notation,
//! used by every JSON and CSV report so output bytes are stable.

use std::str::FromStr;

use serde::Serializer;

pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// `serialize_with` hook emitting `v` as a bare JSON number with 17
/// significant digits (non-finite values become `null`).
pub fn serialize_f64<S: Serializer>(v: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return serializer.serialize_none();
    }
    let number = serde_json::Number::from_str(&sig17(*v)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&number, serializer)
}

pub fn serialize_f64_slice<S: Serializer>(vs: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Wrapped(f64);
    impl serde::Serialize for Wrapped {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize_f64(&self.0, s)
        }
    }
    let mut seq = serializer.serialize_seq(Some(vs.len()))?;
    for v in vs {
        seq.serialize_element(&Wrapped(*v))?;
    }
    seq.end()
}
