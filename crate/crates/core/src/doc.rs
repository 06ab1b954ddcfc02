//! Shared pieces of the JSON document formats.

use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact integer in a document: a JSON number when it fits in 64 bits,
/// otherwise a decimal string. Both forms are accepted on input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Int, E> {
                Err(E::custom(format!("non-integer number {v}")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Int, E> {
                v.trim().parse::<BigInt>().map(Int).map_err(|_| E::custom(format!("bad integer `{v}`")))
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

pub fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

pub fn bigs(v: &[Int]) -> Vec<BigInt> {
    v.iter().map(|i| i.0.clone()).collect()
}

/// Either an inline document or a path to one, resolved relative to the
/// directory of the referencing document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DocRef<T> {
    Path(String),
    Inline(Box<T>),
}

impl<T: for<'de> Deserialize<'de>> DocRef<T> {
    /// Loads the referenced document; returns it with the directory that
    /// nested references inside it should be resolved against.
    pub fn resolve(self, base_dir: Option<&Path>) -> Result<(T, Option<PathBuf>)> {
        match self {
            DocRef::Inline(doc) => Ok((*doc, base_dir.map(Path::to_path_buf))),
            DocRef::Path(p) => {
                let path = match base_dir {
                    Some(dir) if Path::new(&p).is_relative() => dir.join(&p),
                    _ => PathBuf::from(&p),
                };
                let doc = read_json(&path)?;
                Ok((doc, path.parent().map(Path::to_path_buf)))
            }
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Canonical serialization: pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_canonical_json(value)?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}
