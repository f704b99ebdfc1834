//! Armijo gradient descent on the Hermitian cone.
//!
//! The descent direction is minus the representative of the differential in
//! the flat L² pairing `Σ Re tr(G g)` of Hermitian matrix fields, projected
//! onto the dealiased band `|k_a| ≤ N/4`. Trial steps are relative: a trial `τ` moves `h` by
//! `τ · margin(h) / sup |G|` along `-G`, so rescaling the start by a constant
//! rescales every iterate by the same constant.

use alloc::vec::Vec;

use crate::fields::{hermitian_coefficients, low_pass, FormField, MetricField, TorusGeometry};
use crate::lck::{classify, functional_value, normalizer, rho_pairing};
use crate::linalg::{cholesky, inverse, SmallMat};
use crate::variation::{el_residual, el_residual_normalized, ELResidual, Line};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Largest residual realness defect accepted by
/// [`gradient_metric_representation`].
pub const REALNESS_TOL: f64 = 1e-10;

/// Functional being minimized.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// `L(ω)`.
    L,
    /// `L̃_ρ(ω) = L(ω) / (∫ ω ∧ ρ_{n-1})^{n-1}` (`n ≥ 3`).
    Normalized(MetricField),
}

impl Objective {
    /// Value at `m`.
    pub fn value(&self, m: &MetricField) -> Result<f64> {
        match self {
            Objective::L => functional_value(m),
            Objective::Normalized(rho) => Ok(functional_value(m)? / normalizer(rho, m)?.powi(m.n() as i32 - 1)),
        }
    }

    /// Riesz representative of the differential at `m`.
    pub fn residual(&self, m: &MetricField) -> Result<ELResidual> {
        match self {
            Objective::L => el_residual(m),
            Objective::Normalized(rho) => el_residual_normalized(rho, m),
        }
    }

    fn line(&self, m: &MetricField, gamma: &FormField) -> Result<impl Fn(f64) -> Result<f64> + '_> {
        let line = Line::new(m, gamma)?;
        let (n0, n1) = match self {
            Objective::L => (1.0, 0.0),
            Objective::Normalized(rho) => (normalizer(rho, m)?, rho_pairing(rho, gamma)?),
        };
        let p = m.n() as i32 - 1;
        let normalized = matches!(self, Objective::Normalized(_));
        Ok(move |t: f64| {
            let v = line.value(t)?;
            if !normalized {
                return Ok(v);
            }
            let d = n0 + t * n1;
            if !(d > 0.0) {
                return Err(Error::NotPositive { margin: d });
            }
            Ok(v / d.powi(p))
        })
    }
}

/// Descent parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    /// Functional to minimize.
    pub objective: Objective,
    /// Iteration budget.
    pub max_iter: usize,
    /// First relative trial step.
    pub step: f64,
    /// Largest relative trial step.
    pub max_step: f64,
    /// Backtracking factor in `(0, 1)`; accepted steps grow by its inverse.
    pub backtrack: f64,
    /// Armijo constant in `(0, 1)`.
    pub armijo: f64,
    /// Stop once the value is at most this.
    pub value_tol: f64,
    /// Stop once the value is at most this times the initial value.
    pub rel_value_tol: f64,
    /// Stop once the residual norm is at most this.
    pub grad_tol: f64,
    /// Iterates keep `margin ≥ floor · margin(ω_0)`; in `(0, 1)`.
    pub floor: f64,
    /// Smallest relative trial step before giving up.
    pub min_step: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            objective: Objective::L,
            max_iter: 500,
            step: 0.1,
            max_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            value_tol: 1e-14,
            rel_value_tol: 1e-8,
            grad_tol: 1e-10,
            floor: 0.1,
            min_step: 1e-12,
        }
    }
}

impl FlowConfig {
    /// Check the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !pos(self.step) || !pos(self.min_step) || !pos(self.max_step) {
            return Err(Error::Parameter("flow step must be positive"));
        }
        if !unit(self.backtrack) {
            return Err(Error::Parameter("backtracking factor must lie in (0, 1)"));
        }
        if !unit(self.armijo) {
            return Err(Error::Parameter("Armijo constant must lie in (0, 1)"));
        }
        if !pos(self.value_tol) || !pos(self.rel_value_tol) || !pos(self.grad_tol) {
            return Err(Error::Parameter("flow tolerances must be positive"));
        }
        if !unit(self.floor) {
            return Err(Error::Parameter("positivity floor must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// One row of a [`FlowTrace`]; row `0` is the starting metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowRecord {
    /// Iteration index.
    pub iter: usize,
    /// Functional value.
    pub value: f64,
    /// `‖R‖_ω` of the residual at this iterate.
    pub grad_norm: f64,
    /// Relative step that produced this iterate (`0` for the start).
    pub step: f64,
    /// Smallest eigenvalue of `h`.
    pub margin: f64,
}

/// Why a flow stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowStatus {
    /// Value below the absolute or relative tolerance.
    Converged,
    /// Residual norm below tolerance at a positive value.
    Stationary,
    /// Iteration budget exhausted.
    Budget,
    /// No step keeps the positivity floor.
    PositivityStall,
    /// Backtracking fell below the smallest step without sufficient decrease.
    LineSearchStall,
}

impl FlowStatus {
    /// Lower-case label.
    pub fn as_str(self) -> &'static str {
        match self {
            FlowStatus::Converged => "converged",
            FlowStatus::Stationary => "stationary",
            FlowStatus::Budget => "budget",
            FlowStatus::PositivityStall => "positivity-stall",
            FlowStatus::LineSearchStall => "line-search-stall",
        }
    }
}

/// Result of [`run_flow`].
#[derive(Clone, Debug)]
pub struct FlowTrace {
    /// Start plus one record per accepted step.
    pub records: Vec<FlowRecord>,
    /// Terminal status.
    pub status: FlowStatus,
    /// Last accepted metric.
    pub metric: MetricField,
    /// `classify().lck` of the last metric, when the flow converged or stalled at a critical point.
    pub terminal_lck: Option<f64>,
}

impl FlowTrace {
    /// Whether the recorded values never increase.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].value <= w[0].value)
    }

    /// Last over first value.
    pub fn reduction(&self) -> f64 {
        let first = self.records[0].value;
        let last = self.records[self.records.len() - 1].value;
        if first > 0.0 {
            last / first
        } else {
            0.0
        }
    }
}

/// Hermitian matrix field `g` of a residual `γ = i Σ g_{jk̄} dz_j ∧ dz̄_k`;
/// rejects residuals whose realness defect exceeds [`REALNESS_TOL`].
pub fn gradient_metric_representation(res: &ELResidual) -> Result<Vec<C64>> {
    if res.realness > REALNESS_TOL {
        return Err(Error::NotReal { defect: res.realness });
    }
    hermitian_coefficients(&res.field)
}

/// Flat-pairing representative `det H · H^{-1} R H^{-1}` of a residual `R`,
/// so that `Σ Re tr(G g) · cell = ⟨⟨R, γ⟩⟩_ω`.
pub fn flat_representative(m: &MetricField, res: &ELResidual) -> Result<Vec<C64>> {
    let r = gradient_metric_representation(res)?;
    let n = m.n();
    let mut out = Vec::with_capacity(r.len());
    for (k, chunk) in r.chunks(n * n).enumerate() {
        let h = m.matrix(k);
        let hi = inverse(&h).ok_or(Error::NotPositive { margin: 0.0 })?;
        let g = hi.mul(&SmallMat::from_slice(n, chunk)).mul(&hi);
        out.extend_from_slice(g.scale(C64::new(m.frame(k).det(), 0.0)).as_slice());
    }
    Ok(out)
}

/// Inverse of [`gradient_metric_representation`]: the real `(1, 1)`-field of
/// node-major Hermitian matrices; rejects non-Hermitian input.
pub fn form_of_matrices(geom: TorusGeometry, g: &[C64]) -> Result<FormField> {
    let n = geom.n();
    if g.len() != n * n * geom.nodes() {
        return Err(Error::Parameter("matrix data length does not match geometry"));
    }
    for chunk in g.chunks(n * n) {
        let m = SmallMat::from_slice(n, chunk);
        if m.hermitian_defect() > 1e-12 * (1.0 + m.frobenius()) {
            return Err(Error::Parameter("matrix is not Hermitian"));
        }
    }
    FormField::from_data(geom, 1, 1, g.iter().map(|z| z * C64::new(0.0, 1.0)).collect())
}

fn above_floor(h: &[C64], g: &[C64], n: usize, s: f64, floor: f64) -> bool {
    h.chunks(n * n).zip(g.chunks(n * n)).all(|(h, g)| {
        let mut m = SmallMat::zeros(n);
        for z in 0..n * n {
            m.set(z / n, z % n, h[z] - g[z] * s);
        }
        for j in 0..n {
            m.set(j, j, m.get(j, j) - floor);
        }
        cholesky(&m).is_some()
    })
}

/// `⟨Δh, Δh⟩ / ⟨Δh, ΔG⟩` for `Δh = -s G_0`, in the flat coefficient pairing.
fn barzilai_borwein(g0: &[C64], g1: &[C64], s: f64) -> Option<f64> {
    let (mut ss, mut sy) = (0.0, 0.0);
    for (a, b) in g0.iter().zip(g1) {
        ss += a.norm_sqr();
        sy += (a.conj() * (a - b)).re;
    }
    (sy > 0.0).then(|| s * ss / sy)
}

/// Largest `s ∈ [0, s_max]` (up to bisection accuracy) with `h - s g` above the floor.
fn positivity_cap(h: &[C64], g: &[C64], n: usize, s_max: f64, floor: f64) -> f64 {
    if above_floor(h, g, n, s_max, floor) {
        return s_max;
    }
    let (mut lo, mut hi) = (0.0, s_max);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if above_floor(h, g, n, mid, floor) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Run the descent from `start`, calling `observe` on every accepted record
/// together with its metric.
pub fn run_flow(
    cfg: &FlowConfig,
    start: &MetricField,
    mut observe: impl FnMut(&FlowRecord, &MetricField),
) -> Result<FlowTrace> {
    cfg.validate()?;
    if let Objective::Normalized(rho) = &cfg.objective {
        if rho.geometry() != start.geometry() {
            return Err(Error::GeometryMismatch);
        }
    }
    let n = start.n();
    let floor = cfg.floor * start.margin();
    let mut m = start.clone();
    let mut value = cfg.objective.value(&m)?;
    let initial = value;
    let mut res = cfg.objective.residual(&m)?;
    let first = FlowRecord { iter: 0, value, grad_norm: res.norm, step: 0.0, margin: m.margin() };
    observe(&first, &m);
    let mut records = alloc::vec![first];
    let mut tau = cfg.step;
    let mut prev: Option<(Vec<C64>, f64)> = None;

    let status = loop {
        if value <= cfg.value_tol || value <= cfg.rel_value_tol * initial {
            break FlowStatus::Converged;
        }
        if res.norm <= cfg.grad_tol {
            break FlowStatus::Stationary;
        }
        if records.len() > cfg.max_iter {
            break FlowStatus::Budget;
        }
        let flat = flat_representative(&m, &res)?;
        let dir = low_pass(&form_of_matrices(m.geometry(), &flat)?, m.geometry().grid() / 4);
        let slope = res.pair(&m, &dir)?;
        if !(slope > 0.0) {
            break FlowStatus::Stationary;
        }
        let g = hermitian_coefficients(&dir)?;
        let sup = g.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let unit = m.margin() / sup;
        if let Some((g0, s0)) = prev.take() {
            if let Some(bb) = barzilai_borwein(&g0, &g, s0) {
                tau = (bb / unit).min(cfg.max_step);
            }
        }
        let cap = positivity_cap(m.data(), &g, n, tau * unit, floor);
        if cap <= cfg.min_step * unit {
            break FlowStatus::PositivityStall;
        }
        tau = cap / unit;

        let f = cfg.objective.line(&m, &dir.scale(C64::new(-1.0, 0.0)))?;
        let accepted = loop {
            let s = tau * unit;
            match f(s) {
                Ok(v) if v <= value - cfg.armijo * s * slope => break Some(v),
                Ok(_) | Err(Error::NotPositive { .. }) => {}
                Err(e) => return Err(e),
            }
            tau *= cfg.backtrack;
            if tau < cfg.min_step {
                break None;
            }
        };
        let Some(v) = accepted else {
            break FlowStatus::LineSearchStall;
        };
        let s = tau * unit;
        let data = m.data().iter().zip(&g).map(|(h, g)| h - g * s).collect();
        prev = Some((g, s));
        m = MetricField::new(m.geometry(), data)?;
        value = v;
        res = cfg.objective.residual(&m)?;
        let rec = FlowRecord { iter: records.len(), value, grad_norm: res.norm, step: tau, margin: m.margin() };
        observe(&rec, &m);
        records.push(rec);
        tau /= cfg.backtrack;
    };

    let terminal_lck = match status {
        FlowStatus::Converged | FlowStatus::Stationary => Some(classify(&m)?.lck),
        _ => None,
    };
    Ok(FlowTrace { records, status, metric: m, terminal_lck })
}
