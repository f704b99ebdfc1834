//! CSV rows, key-value diagnostics and the CSV summary table.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One `grad-check` comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationRow {
    /// Complex dimension.
    pub n: usize,
    /// Grid points per axis.
    #[serde(rename = "N")]
    pub grid: usize,
    /// Metric preset label.
    pub preset: String,
    /// Metric seed.
    pub seed: u64,
    /// Direction index.
    #[serde(rename = "direction-id")]
    pub direction_id: usize,
    /// Analytic directional derivative.
    pub analytic: f64,
    /// Finite-difference estimate.
    pub fd: f64,
    /// `|analytic - fd| / |analytic|`.
    pub rel_err: f64,
    /// Observed finite-difference order.
    pub order: f64,
}

/// One flow iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// Iteration.
    pub iter: usize,
    /// Functional value.
    pub value: f64,
    /// Residual norm.
    pub grad_norm: f64,
    /// Accepted relative step.
    pub step: f64,
    /// Positivity margin.
    pub margin: f64,
}

impl From<&lck_core::flow::FlowRecord> for TraceRow {
    fn from(r: &lck_core::flow::FlowRecord) -> Self {
        TraceRow { iter: r.iter, value: r.value, grad_norm: r.grad_norm, step: r.step, margin: r.margin }
    }
}

/// Serialize rows as CSV with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parse CSV rows.
pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Format(e.to_string()))
}

/// Streaming CSV writer for flow traces.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    /// Wrap a sink; the header is written with the first row.
    pub fn new(sink: W) -> Self {
        TraceWriter { inner: csv::Writer::from_writer(sink) }
    }

    /// Append and flush one row.
    pub fn push(&mut self, row: &TraceRow) -> Result<(), CliError> {
        self.inner.serialize(row).map_err(|e| CliError::Format(e.to_string()))?;
        self.inner.flush().map_err(|e| CliError::Format(e.to_string()))
    }
}

/// `key = value` lines; floats in `{:.6e}`.
pub fn key_values(entries: &[(&str, String)]) -> String {
    let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    entries.iter().map(|(k, v)| format!("{k:<width$} = {v}\n")).collect()
}

/// Format a float for key-value output.
pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

/// Write `text` to `path`, with the path in the error.
pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Per-group summary of variation rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    /// Complex dimension.
    pub n: usize,
    /// Grid.
    pub grid: usize,
    /// Preset label.
    pub preset: String,
    /// Number of rows.
    pub rows: usize,
    /// Largest relative error.
    pub max_rel_err: f64,
    /// Smallest observed order.
    pub min_order: f64,
    /// Rows within `rel_tol` and at or above `min_order`.
    pub passing: usize,
}

/// Group rows by `(n, N, preset)`.
pub fn summarize(rows: &[VariationRow], rel_tol: f64, min_order: f64) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, usize, String), Vec<&VariationRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.n, r.grid, r.preset.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n, grid, preset), rs)| SummaryRow {
            n,
            grid,
            preset,
            rows: rs.len(),
            max_rel_err: rs.iter().map(|r| r.rel_err).fold(0.0, f64::max),
            min_order: rs.iter().map(|r| r.order).fold(f64::INFINITY, f64::min),
            passing: rs.iter().filter(|r| r.rel_err <= rel_tol && r.order >= min_order).count(),
        })
        .collect()
}

/// Fixed-width table of [`summarize`] output.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:>2} {:>3} {:<18} {:>5} {:>11} {:>9} {:>7}\n",
        "n", "N", "preset", "rows", "max_rel_err", "min_order", "passing"
    );
    for r in rows {
        s += &format!(
            "{:>2} {:>3} {:<18} {:>5} {:>11.3e} {:>9.3} {:>7}\n",
            r.n, r.grid, r.preset, r.rows, r.max_rel_err, r.min_order, r.passing
        );
    }
    s
}
