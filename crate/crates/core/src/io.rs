//! JSON instance files.
//!
//! ```json
//! {"m":2,"n":2,"Q":[...16 values...],"C":[...4...],"D":[...4...],
//!  "metadata":{"kind":"rank","generator":"bap-gen/1","seed":7,"factors":[{"A":[...],"B":[...]}]}}
//! ```
//!
//! `Q` is flattened in `(i, j, k, l)` row-major order, `C` and `D` row-major.
//! Indices are zero-based everywhere. Numbers are written as shortest
//! round-trip decimals, so write-then-parse reproduces every value exactly.

use serde::{Deserialize, Serialize};

use crate::error::{BapError, Result};
use crate::model::{Instance, Matrix, QuadCost};
use crate::structure::FactoredQ;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Set when the writer exchanged the sides to put the smaller one first.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub swapped: bool,
    /// Factored form of `Q` in this file's orientation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorPair>>,
    /// Generator or reduction parameters, kept verbatim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn check_len(path: &str, actual: usize, expected: usize) -> Result<()> {
    if actual == expected {
        Ok(())
    } else {
        Err(BapError::Parse {
            path: path.to_string(),
            message: format!("expected length {expected}, got {actual}"),
        })
    }
}

fn check_finite(path: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(BapError::Parse {
            path: format!("{path}[{i}]"),
            message: "value is not finite".into(),
        }),
        None => Ok(()),
    }
}

pub(crate) fn json_error(e: serde_json::Error) -> BapError {
    BapError::Parse {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

impl InstanceFile {
    /// Captures an instance in its canonical orientation.
    pub fn from_instance(instance: &Instance, metadata: Option<Metadata>) -> Self {
        let metadata = if instance.swapped() {
            let mut md = metadata.unwrap_or_default();
            md.swapped = true;
            Some(md)
        } else {
            metadata
        };
        InstanceFile {
            m: instance.m(),
            n: instance.n(),
            q: instance.q().as_slice().to_vec(),
            c: instance.c().as_slice().to_vec(),
            d: instance.d().as_slice().to_vec(),
            metadata,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.m, self.n);
        if m == 0 || n == 0 {
            return Err(BapError::Parse {
                path: if m == 0 { "m" } else { "n" }.into(),
                message: "size parameters must be positive".into(),
            });
        }
        check_len("Q", self.q.len(), m * m * n * n)?;
        check_len("C", self.c.len(), m * m)?;
        check_len("D", self.d.len(), n * n)?;
        check_finite("Q", &self.q)?;
        check_finite("C", &self.c)?;
        check_finite("D", &self.d)?;
        if let Some(factors) = self.metadata.as_ref().and_then(|md| md.factors.as_ref()) {
            for (p, f) in factors.iter().enumerate() {
                check_len(&format!("metadata.factors[{p}].A"), f.a.len(), m * m)?;
                check_len(&format!("metadata.factors[{p}].B"), f.b.len(), n * n)?;
            }
        }
        Ok(())
    }

    /// Builds the instance; when `m > n` the result is the swapped canonical form.
    pub fn to_instance(&self) -> Result<Instance> {
        self.validate()?;
        Instance::new(
            QuadCost::new(self.m, self.n, self.q.clone())?,
            Matrix::new(self.m, self.c.clone())?,
            Matrix::new(self.n, self.d.clone())?,
        )
    }

    /// The factored form from metadata, in this file's orientation.
    pub fn factored(&self) -> Result<Option<FactoredQ>> {
        let Some(factors) = self.metadata.as_ref().and_then(|md| md.factors.as_ref()) else {
            return Ok(None);
        };
        let pairs = factors
            .iter()
            .map(|f| Ok((Matrix::new(self.m, f.a.clone())?, Matrix::new(self.n, f.b.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        FactoredQ::new(pairs).map(Some)
    }
}

/// Parses and validates an instance file.
pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile> {
    let file: InstanceFile = serde_json::from_slice(bytes).map_err(json_error)?;
    file.validate()?;
    Ok(file)
}

/// Serializes an instance file as compact JSON with a trailing newline.
pub fn write_instance(file: &InstanceFile) -> Vec<u8> {
    let mut out = serde_json::to_vec(file).expect("instance files always serialize");
    out.push(b'\n');
    out
}

/// QAP input for `reduce --from qap`: `Q` has `n^4` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QapFile {
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: Vec<f64>,
}

/// 3AP input for `reduce --from tap`: `A` has `n^3` entries, `a[(i*n + j)*n + k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TapFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
}

/// DISJOINT MATCHINGS input: two edge lists on `K_{n,n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingsFile {
    pub n: usize,
    #[serde(rename = "E1")]
    pub e1: Vec<(usize, usize)>,
    #[serde(rename = "E2")]
    pub e2: Vec<(usize, usize)>,
}

pub fn parse_qap(bytes: &[u8]) -> Result<QuadCost> {
    let f: QapFile = serde_json::from_slice(bytes).map_err(json_error)?;
    check_len("Q", f.q.len(), f.n.pow(4))?;
    check_finite("Q", &f.q)?;
    QuadCost::new(f.n, f.n, f.q)
}

pub fn parse_tap(bytes: &[u8]) -> Result<TapFile> {
    let f: TapFile = serde_json::from_slice(bytes).map_err(json_error)?;
    check_len("A", f.a.len(), f.n.pow(3))?;
    check_finite("A", &f.a)?;
    Ok(f)
}

pub fn parse_matchings(bytes: &[u8]) -> Result<MatchingsFile> {
    serde_json::from_slice(bytes).map_err(json_error)
}
