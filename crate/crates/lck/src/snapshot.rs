//! JSON field snapshots.
//!
//! ```json
//! { "format": "lck-field", "version": 1, "kind": "metric",
//!   "n": 2, "grid": 16, "p": 1, "q": 1,
//!   "data": [[1.0, 0.0], [0.0, 0.0], ...] }
//! ```
//!
//! `data` lists `[re, im]` pairs node by node. A metric stores each `n × n`
//! matrix `h` row-major; a form stores its coefficients in the layout of
//! `PointForm`.

use std::path::Path;

use lck_core::fields::{FormField, MetricField, TorusGeometry};
use lck_core::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

const FORMAT: &str = "lck-field";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    format: String,
    version: u32,
    kind: String,
    n: usize,
    grid: usize,
    p: usize,
    q: usize,
    data: Vec<[f64; 2]>,
}

fn pack(data: &[C64]) -> Vec<[f64; 2]> {
    data.iter().map(|z| [z.re, z.im]).collect()
}

fn unpack(data: &[[f64; 2]]) -> Vec<C64> {
    data.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn header(kind: &str, geom: TorusGeometry, p: usize, q: usize, data: &[C64]) -> Snapshot {
    Snapshot {
        format: FORMAT.into(),
        version: 1,
        kind: kind.into(),
        n: geom.n(),
        grid: geom.grid(),
        p,
        q,
        data: pack(data),
    }
}

/// Serialize a metric.
pub fn metric_to_json(m: &MetricField) -> String {
    serde_json::to_string(&header("metric", m.geometry(), 1, 1, m.data())).expect("snapshot serializes")
}

/// Serialize a form field.
pub fn form_to_json(f: &FormField) -> String {
    let (p, q) = f.bidegree();
    serde_json::to_string(&header("form", f.geometry(), p, q, f.data())).expect("snapshot serializes")
}

fn parse(text: &str, kind: &str) -> Result<(Snapshot, TorusGeometry), CliError> {
    let s: Snapshot = serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))?;
    if s.format != FORMAT || s.version != 1 {
        return Err(CliError::Format(format!("unsupported snapshot format {} v{}", s.format, s.version)));
    }
    if s.kind != kind {
        return Err(CliError::Format(format!("expected a {kind} snapshot, found {}", s.kind)));
    }
    let geom = TorusGeometry::new(s.n, s.grid)?;
    Ok((s, geom))
}

/// Parse a metric snapshot.
pub fn metric_from_json(text: &str) -> Result<MetricField, CliError> {
    let (s, geom) = parse(text, "metric")?;
    Ok(MetricField::new(geom, unpack(&s.data))?)
}

/// Parse a form snapshot.
pub fn form_from_json(text: &str) -> Result<FormField, CliError> {
    let (s, geom) = parse(text, "form")?;
    Ok(FormField::from_data(geom, s.p, s.q, unpack(&s.data))?)
}

/// Write a metric snapshot to `path`.
pub fn write_metric(path: &Path, m: &MetricField) -> Result<(), CliError> {
    std::fs::write(path, metric_to_json(m)).map_err(|e| CliError::io(path, e))
}

/// Read a metric snapshot from `path`.
pub fn read_metric(path: &Path) -> Result<MetricField, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    metric_from_json(&text).map_err(|e| match e {
        CliError::Format(msg) => CliError::Format(format!("{}: {msg}", path.display())),
        e => e,
    })
}
