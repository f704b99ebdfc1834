//! Run configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Subcommand a configuration drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Run every verification suite.
    #[default]
    Verify,
    /// Evaluate the functional and print diagnostics.
    Eval,
    /// Compare analytic and finite-difference variations.
    GradCheck,
    /// Run the gradient flow.
    Flow,
    /// Summarize variation CSV files.
    Report,
}

/// Functional selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    /// `L`.
    #[default]
    L,
    /// `L̃_ρ`, with `ρ` from [`RunConfig::rho`].
    Normalized,
}

/// Verification depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Small grids and few samples; seconds to a minute.
    Quick,
    /// Default grids and sample counts.
    #[default]
    Full,
}

/// Metric generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    /// Constant identity metric.
    Flat,
    /// Random band-limited perturbation of the identity.
    #[default]
    RandomFourier,
    /// `e^f` times the identity for a random trigonometric `f` (lcK).
    ConformalFlat,
    /// `I + i∂∂̄φ` for a random potential (Kähler).
    KahlerPotential,
    /// Twisted product metric with torsion.
    ProductTwist,
    /// Metric read from a JSON snapshot.
    Snapshot,
}

/// Metric preset with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricSpec {
    /// Generator.
    pub preset: PresetKind,
    /// Perturbation amplitude.
    pub amp: f64,
    /// Fourier bandwidth (at most `N/4`).
    pub bandwidth: usize,
    /// Twist strength for `product-twist`.
    pub eps: f64,
    /// Generator seed.
    pub seed: u64,
    /// Snapshot file for `snapshot`.
    pub path: Option<PathBuf>,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec { preset: PresetKind::RandomFourier, amp: 0.2, bandwidth: 1, eps: 0.2, seed: 1, path: None }
    }
}

impl MetricSpec {
    /// Short label used in CSV rows.
    pub fn label(&self) -> &'static str {
        match self.preset {
            PresetKind::Flat => "flat",
            PresetKind::RandomFourier => "random-fourier",
            PresetKind::ConformalFlat => "conformal-flat",
            PresetKind::KahlerPotential => "kahler-potential",
            PresetKind::ProductTwist => "product-twist",
            PresetKind::Snapshot => "snapshot",
        }
    }
}

/// Random probe directions for `grad-check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirectionSpec {
    /// Number of directions.
    pub count: usize,
    /// First direction seed; direction `k` uses `seed + k`.
    pub seed: u64,
    /// Direction amplitude.
    pub amp: f64,
}

impl Default for DirectionSpec {
    fn default() -> Self {
        DirectionSpec { count: 20, seed: 1000, amp: 0.5 }
    }
}

/// Flow parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSpec {
    /// Iteration budget.
    pub max_iter: usize,
    /// First relative step.
    pub step: f64,
    /// Largest relative step.
    pub max_step: f64,
    /// Smallest relative step.
    pub min_step: f64,
    /// Backtracking factor.
    pub backtrack: f64,
    /// Armijo constant.
    pub armijo: f64,
    /// Absolute value tolerance.
    pub value_tol: f64,
    /// Value tolerance relative to the start.
    pub rel_value_tol: f64,
    /// Residual norm tolerance.
    pub grad_tol: f64,
    /// Positivity floor relative to the starting margin.
    pub floor: f64,
    /// Write a snapshot every this many iterations (`0` disables).
    pub checkpoint_every: usize,
}

impl Default for FlowSpec {
    fn default() -> Self {
        let d = lck_core::flow::FlowConfig::default();
        FlowSpec {
            max_iter: d.max_iter,
            step: d.step,
            max_step: d.max_step,
            min_step: d.min_step,
            backtrack: d.backtrack,
            armijo: d.armijo,
            value_tol: d.value_tol,
            rel_value_tol: d.rel_value_tol,
            grad_tol: d.grad_tol,
            floor: d.floor,
            checkpoint_every: 0,
        }
    }
}

/// Tolerances of the verification suites and of `grad-check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Pointwise algebra identities (relative).
    pub algebra: f64,
    /// Lee-form identities on band-limited presets.
    pub lee: f64,
    /// Functional identities.
    pub functional: f64,
    /// Analytic vs finite-difference variation (relative).
    pub fd_rel: f64,
    /// Smallest observed finite-difference order.
    pub fd_order: f64,
    /// `(d_ω L)(ω) = (n - 1) L(ω)` (relative).
    pub euler: f64,
    /// `(d_ω L)(fω) = 0` for unit-normalized `ω` (absolute).
    pub conformal_direction: f64,
    /// Riesz pairing vs differential (relative).
    pub riesz: f64,
    /// Residual realness defect.
    pub realness: f64,
    /// Residual norm at lcK metrics.
    pub critical: f64,
    /// Smallest residual norm at metrics with `L ≥ noncritical_value`.
    pub noncritical_residual: f64,
    /// Functional threshold for the previous check.
    pub noncritical_value: f64,
    /// Required flow reduction of the value.
    pub flow_reduction: f64,
    /// Pointwise fixture residuals.
    pub fixture: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-12,
            lee: 1e-8,
            functional: 1e-8,
            fd_rel: lck_core::variation::FD_REL_TOL,
            fd_order: lck_core::variation::MIN_FD_ORDER,
            euler: 1e-8,
            conformal_direction: 1e-8,
            riesz: 1e-6,
            realness: 1e-10,
            critical: 1e-7,
            noncritical_residual: 1e-6,
            noncritical_value: 1e-4,
            flow_reduction: 1e-2,
            fixture: 1e-10,
        }
    }
}

impl Tolerances {
    /// Multiply every upper-bound tolerance by `s` (lower bounds and the
    /// order threshold are left alone).
    pub fn scaled(&self, s: f64) -> Self {
        Tolerances {
            algebra: self.algebra * s,
            lee: self.lee * s,
            functional: self.functional * s,
            fd_rel: self.fd_rel * s,
            euler: self.euler * s,
            conformal_direction: self.conformal_direction * s,
            riesz: self.riesz * s,
            realness: self.realness * s,
            critical: self.critical * s,
            flow_reduction: (self.flow_reduction * s).min(1.0),
            fixture: self.fixture * s,
            ..self.clone()
        }
    }
}

/// Complete run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Subcommand; the command line overrides it.
    pub command: Command,
    /// Complex dimension.
    pub n: usize,
    /// Grid points per axis; `None` picks the default for `n`.
    pub grid: Option<usize>,
    /// Metric preset.
    pub metric: MetricSpec,
    /// Functional selector.
    pub functional: FunctionalKind,
    /// Reference metric `ρ` of the normalized functional.
    pub rho: MetricSpec,
    /// Probe directions.
    pub directions: DirectionSpec,
    /// Verification depth.
    pub profile: Profile,
    /// Flow parameters.
    pub flow: FlowSpec,
    /// Tolerance overrides.
    pub tolerances: Tolerances,
    /// Output directory.
    pub out: Option<PathBuf>,
    /// CSV files for `report`.
    pub inputs: Vec<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            n: 2,
            grid: None,
            metric: MetricSpec::default(),
            functional: FunctionalKind::L,
            rho: MetricSpec { seed: 2, ..MetricSpec::default() },
            directions: DirectionSpec::default(),
            profile: Profile::Full,
            flow: FlowSpec::default(),
            tolerances: Tolerances::default(),
            out: None,
            inputs: Vec::new(),
        }
    }
}

/// Default grid for each complex dimension.
pub fn default_grid(n: usize) -> usize {
    match n {
        2 => 16,
        3 => 8,
        _ => 4,
    }
}

/// Admissible grid range for each complex dimension.
pub fn grid_limits(n: usize) -> (usize, usize) {
    match n {
        2 => (4, 32),
        3 => (4, 12),
        _ => (4, 6),
    }
}

impl RunConfig {
    /// Parse a JSON document; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and parse a configuration file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Grid in effect.
    pub fn grid(&self) -> usize {
        self.grid.unwrap_or_else(|| default_grid(self.n))
    }

    /// Check dimension, grid and parameter ranges.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(2..=4).contains(&self.n) {
            return Err(CliError::Config(format!("n must be 2, 3 or 4 (got {})", self.n)));
        }
        let (lo, hi) = grid_limits(self.n);
        let g = self.grid();
        if g % 2 != 0 || g < lo || g > hi {
            return Err(CliError::Config(format!("grid for n = {} must be even in {lo}..={hi} (got {g})", self.n)));
        }
        for (what, m) in [("metric", &self.metric), ("rho", &self.rho)] {
            if m.bandwidth == 0 || 4 * m.bandwidth > g {
                return Err(CliError::Config(format!("{what}.bandwidth must be in 1..={}", g / 4)));
            }
            if m.preset == PresetKind::Snapshot && m.path.is_none() {
                return Err(CliError::Config(format!("{what}.path is required for the snapshot preset")));
            }
        }
        if self.functional == FunctionalKind::Normalized && self.n < 3 {
            return Err(CliError::Config("the normalized functional needs n >= 3".into()));
        }
        if self.directions.count == 0 {
            return Err(CliError::Config("directions.count must be positive".into()));
        }
        self.flow_config(None).validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// Core flow configuration; `rho` is required for the normalized functional.
    pub fn flow_config(&self, rho: Option<lck_core::fields::MetricField>) -> lck_core::flow::FlowConfig {
        let f = &self.flow;
        lck_core::flow::FlowConfig {
            objective: match rho {
                Some(r) => lck_core::flow::Objective::Normalized(r),
                None => lck_core::flow::Objective::L,
            },
            max_iter: f.max_iter,
            step: f.step,
            max_step: f.max_step,
            backtrack: f.backtrack,
            armijo: f.armijo,
            value_tol: f.value_tol,
            rel_value_tol: f.rel_value_tol,
            grad_tol: f.grad_tol,
            floor: f.floor,
            min_step: f.min_step,
        }
    }
}
