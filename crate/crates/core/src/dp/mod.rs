//! Personalized differential privacy: density-driven ε, the Laplace and
//! exponential mechanisms, sensitivity, utility, and the end-to-end
//! sanitization pipeline.

mod budget;
mod mapping;
mod mechanisms;
mod pipeline;
mod sensitivity;
mod utility;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::community::CommunityError;
use crate::coupling::{CouplingError, NoiseSource};
use crate::graph::NodeId;

pub use budget::{
    check_tradeoff, partition_densities, tune_mapping, BudgetDirection, MappingGrid, PrivacyAssignment, TradeoffReport,
    TuneOutcome,
};
pub use mapping::{map_density_to_epsilon, EpsilonMapping, MappingParams, SigmoidForm};
pub use mechanisms::{
    exponential_probabilities, exponential_release, exponential_select, laplace_release, privacy_ratio_bound,
    sample_laplace,
};
pub use pipeline::{sanitize_pipeline, PipelineConfig, PipelineOutput, SensitiveRecord};
pub use sensitivity::{global_sensitivity, Neighboring, Norm};
pub use utility::{expected_laplace_squared_error, rmse, squared_error};

#[derive(Debug, Error)]
pub enum DpError {
    #[error("density {0} outside [0, 1]")]
    InvalidDensity(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("record domain is empty")]
    EmptyDomain,
    #[error("no observations")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid record for node {node}: {reason}")]
    InvalidRecord { node: NodeId, reason: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Laplace,
    Exponential,
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Laplace => "laplace",
            Mechanism::Exponential => "exponential",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    Numeric(Vec<f64>),
    Item(String),
}

impl Payload {
    /// Bytes committed on-chain: little-endian `f64`s or the UTF-8 item.
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Payload::Numeric(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
            Payload::Item(s) => s.as_bytes().to_vec(),
        }
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Numeric(v) => {
                let parts: Vec<String> = v.iter().map(f64::to_string).collect();
                f.write_str(&parts.join(";"))
            }
            Payload::Item(s) => f.write_str(s),
        }
    }
}

/// One sanitized copy of a record, addressed to one community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanitizedRelease {
    pub releaser: NodeId,
    pub community_id: usize,
    pub epsilon: f64,
    pub payload: Payload,
    pub mechanism: Mechanism,
    pub noise_source: NoiseSource,
}

impl SanitizedRelease {
    pub const CSV_HEADER: &'static str = "community_id,epsilon,mechanism,releaser,noise_source,payload";

    pub fn write_csv_row<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            self.community_id, self.epsilon, self.mechanism, self.releaser, self.noise_source, self.payload
        )
    }
}

/// Release export with header row.
pub fn write_releases_csv<W: Write>(releases: &[SanitizedRelease], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", SanitizedRelease::CSV_HEADER)?;
    for r in releases {
        r.write_csv_row(&mut w)?;
    }
    Ok(())
}

fn format_err(line: usize, message: impl Into<String>) -> DpError {
    DpError::Format { line, message: message.into() }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, DpError> {
    s.trim().parse().map_err(|_| format_err(line, format!("bad {what} `{s}`")))
}

fn parse_values(s: &str, line: usize) -> Result<Vec<f64>, DpError> {
    s.split(';').map(|v| parse_field(v, line, "value")).collect()
}

/// Inverse of [`write_releases_csv`].
pub fn parse_releases_csv(text: &str) -> Result<Vec<SanitizedRelease>, DpError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SanitizedRelease::CSV_HEADER => {}
        _ => return Err(format_err(1, "missing release header")),
    }
    let mut out = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = raw.splitn(6, ',').collect();
        if f.len() != 6 {
            return Err(format_err(line, "expected 6 fields"));
        }
        let mechanism = match f[2] {
            "laplace" => Mechanism::Laplace,
            "exponential" => Mechanism::Exponential,
            other => return Err(format_err(line, format!("unknown mechanism `{other}`"))),
        };
        let payload = match mechanism {
            Mechanism::Laplace => Payload::Numeric(parse_values(f[5], line)?),
            Mechanism::Exponential => Payload::Item(f[5].to_string()),
        };
        out.push(SanitizedRelease {
            community_id: parse_field(f[0], line, "community id")?,
            epsilon: parse_field(f[1], line, "epsilon")?,
            releaser: NodeId(parse_field(f[3], line, "node id")?),
            mechanism,
            noise_source: f[4].parse().map_err(|e: String| format_err(line, e))?,
            payload,
        });
    }
    Ok(out)
}

/// Records as `node,kind,value,candidates`: `numeric` rows carry
/// `;`-separated values, `categorical` rows a value and `|`-separated
/// candidates. A header row and `#` comments are skipped.
pub fn parse_records_csv(text: &str) -> Result<BTreeMap<NodeId, SensitiveRecord>, DpError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || (line == 1 && t.starts_with("node,")) {
            continue;
        }
        let f: Vec<&str> = t.split(',').map(str::trim).collect();
        let node = NodeId(parse_field(f[0], line, "node id")?);
        let record = match (f.get(1).copied(), f.len()) {
            (Some("numeric"), 3) => SensitiveRecord::Numeric(parse_values(f[2], line)?),
            (Some("categorical"), 4) => SensitiveRecord::Categorical {
                value: f[2].to_string(),
                candidates: f[3].split('|').map(str::to_string).collect(),
            },
            _ => return Err(format_err(line, "expected `node,numeric,v1;v2` or `node,categorical,value,a|b`")),
        };
        if out.insert(node, record).is_some() {
            return Err(format_err(line, format!("duplicate record for node {node}")));
        }
    }
    Ok(out)
}
