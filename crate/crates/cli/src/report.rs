//! JSON output shapes. Every artifact carries the schema version and the
//! resolved configuration for provenance.

use serde::Serialize;

use deterrence_core::welfare::WelfareBreakdown;

use crate::config::RunConfig;

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, seed: Option<u64>, config: &RunConfig, body: T) -> Self {
        Self {
            schema_version: crate::SCHEMA_VERSION,
            command,
            seed,
            config: config.clone(),
            body,
        }
    }
}

#[derive(Serialize)]
pub struct BreakdownOut {
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    pub detection: f64,
    pub total: f64,
}

impl From<&WelfareBreakdown> for BreakdownOut {
    fn from(b: &WelfareBreakdown) -> Self {
        Self {
            j0: b.j0,
            j1: b.j1,
            j2: b.j2,
            detection: b.detection,
            total: b.total,
        }
    }
}

#[derive(Serialize)]
pub struct TierDeviation {
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    pub total: f64,
}

impl TierDeviation {
    /// Pairwise relative deviation, reported even when large.
    pub fn between(a: &WelfareBreakdown, b: &WelfareBreakdown) -> Self {
        fn rel(x: f64, y: f64) -> f64 {
            let denom = y.abs().max(1e-300);
            ((x - y) / denom).abs()
        }
        Self {
            j0: rel(a.j0, b.j0),
            j1: rel(a.j1, b.j1),
            j2: rel(a.j2, b.j2),
            total: rel(a.total, b.total),
        }
    }
}

#[derive(Serialize)]
pub struct EstimateOut {
    pub value: f64,
    pub se: f64,
    pub n_used: usize,
}

impl From<deterrence_core::estimate::EstimateWithSE> for EstimateOut {
    fn from(e: deterrence_core::estimate::EstimateWithSE) -> Self {
        Self {
            value: e.value,
            se: e.se,
            n_used: e.n_used,
        }
    }
}

/// Writes a JSON artifact with a trailing newline.
pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<(), crate::CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::CliError::Validation(format!("serialize: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
