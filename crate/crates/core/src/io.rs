//! On-disk formats: flip pairs, witnesses and chains as JSON, and a plain
//! whitespace matrix format for flip pairs.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::equivalence::{EquivalenceWitness, SseChain, WitnessKind};
use crate::flip::{validate_flip_pair, FlipError, FlipPair, ZeroOneMatrix};
use crate::linalg::{IntMatrix, Rational};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Flip(#[from] FlipError),
}

/// Integers that fit in `i64` are JSON numbers, others decimal strings.
fn bigint_to_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

fn value_to_bigint(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| format!("{n} is not an integer")),
        Value::String(s) => s.parse().map_err(|_| format!("{s:?} is not an integer")),
        other => Err(format!("{other} is not an integer")),
    }
}

pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(bigint_to_value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<Value>::deserialize(d)?;
        raw.iter()
            .map(|v| value_to_bigint(v).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod int_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &IntMatrix, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            (0..m.rows()).map(|r| m.row(r).iter().map(bigint_to_value).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        let raw = Vec::<Vec<Value>>::deserialize(d)?;
        parse_rows(&raw).map_err(serde::de::Error::custom)
    }

    pub(super) fn parse_rows(raw: &[Vec<Value>]) -> Result<IntMatrix, String> {
        let rows: Vec<Vec<BigInt>> = raw
            .iter()
            .map(|r| r.iter().map(value_to_bigint).collect())
            .collect::<Result<_, _>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix rows".into());
        }
        Ok(IntMatrix::from_rows(&rows))
    }
}

/// `{"name": ..., "A": [[...]], "J": [[...]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u8>>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<u8>>,
}

impl PairFile {
    pub fn from_pair(name: Option<String>, p: &FlipPair) -> Self {
        PairFile {
            name,
            a: p.a().to_rows(),
            j: p.j().to_rows(),
        }
    }

    pub fn to_pair(&self) -> Result<FlipPair, FormatError> {
        let a = ZeroOneMatrix::from_rows(&self.a)?;
        let j = ZeroOneMatrix::from_rows(&self.j)?;
        Ok(validate_flip_pair(a, j)?)
    }
}

/// Parse the JSON layout without validating the pair.
pub fn parse_pair_json(src: &str) -> Result<PairFile, FormatError> {
    Ok(serde_json::from_str(src)?)
}

/// `A` rows, a blank line, then `J` rows; `#` starts a comment.
pub fn parse_pair_txt(src: &str) -> Result<PairFile, FormatError> {
    let mut groups: Vec<Vec<Vec<u8>>> = vec![Vec::new()];
    for line in src.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if !groups.last().unwrap().is_empty() {
                groups.push(Vec::new());
            }
            continue;
        }
        let row: Vec<u8> = line
            .split_whitespace()
            .map(|t| t.parse::<u8>())
            .collect::<Result<_, _>>()
            .map_err(|_| FormatError::Malformed(format!("bad matrix row {line:?}")))?;
        groups.last_mut().unwrap().push(row);
    }
    groups.retain(|g| !g.is_empty());
    match <[_; 2]>::try_from(groups) {
        Ok([a, j]) => Ok(PairFile { name: None, a, j }),
        Err(g) => Err(FormatError::Malformed(format!(
            "expected two matrices separated by a blank line, found {}",
            g.len()
        ))),
    }
}

pub fn render_pair_txt(p: &FlipPair) -> String {
    let fmt = |m: &ZeroOneMatrix| {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(u8::to_string).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    format!("{}\n\n{}\n", fmt(p.a()), fmt(p.j()))
}

/// `{"kind": "SE", "lag": 6, "D": [[...]], "E": [[...]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    pub kind: WitnessKind,
    pub lag: usize,
    #[serde(rename = "D", with = "int_matrix")]
    pub d: IntMatrix,
    #[serde(rename = "E", with = "int_matrix")]
    pub e: IntMatrix,
}

impl From<&EquivalenceWitness> for WitnessFile {
    fn from(w: &EquivalenceWitness) -> Self {
        WitnessFile {
            kind: w.kind,
            lag: w.lag,
            d: w.d.clone(),
            e: w.e.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkFile {
    #[serde(rename = "D", with = "int_matrix")]
    pub d: IntMatrix,
    #[serde(rename = "E", with = "int_matrix")]
    pub e: IntMatrix,
}

/// `{"kind": "SSE", "lag": l, "pairs": [...], "links": [{"D", "E"}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainFile {
    pub kind: WitnessKind,
    pub lag: usize,
    pub pairs: Vec<PairFile>,
    pub links: Vec<LinkFile>,
}

impl ChainFile {
    pub fn from_chain(chain: &SseChain) -> Self {
        ChainFile {
            kind: WitnessKind::SseChain,
            lag: chain.lag(),
            pairs: chain
                .pairs
                .iter()
                .map(|p| PairFile::from_pair(None, p))
                .collect(),
            links: chain
                .links
                .iter()
                .map(|l| LinkFile {
                    d: l.d.clone(),
                    e: l.e.clone(),
                })
                .collect(),
        }
    }

    pub fn to_chain(&self) -> Result<SseChain, FormatError> {
        if self.kind != WitnessKind::SseChain {
            return Err(FormatError::Malformed(format!(
                "expected kind SSE, got {:?}",
                self.kind
            )));
        }
        if self.lag != self.links.len() {
            return Err(FormatError::Malformed(format!(
                "lag {} but {} links",
                self.lag,
                self.links.len()
            )));
        }
        let pairs = self
            .pairs
            .iter()
            .map(PairFile::to_pair)
            .collect::<Result<Vec<_>, _>>()?;
        let links = self
            .links
            .iter()
            .map(|l| EquivalenceWitness::hee(l.d.clone(), l.e.clone()))
            .collect();
        Ok(SseChain { pairs, links })
    }
}
