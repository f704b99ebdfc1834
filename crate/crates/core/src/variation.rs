//! First variations of `L` and `L̃_ρ`, Euler–Lagrange residuals and the
//! finite-difference oracle that checks them.
//!
//! Directions `γ` are real `(1, 1)`-fields; `(d_ω F)(γ) = d/dt F(ω + tγ)` at
//! `t = 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::exterior::{volume_sign, Frame, PointForm};
use crate::fields::{
    adjoint_dbar, adjoint_partial, dbar, hermitian_coefficients, integrate_top, l2_inner, l2_norm, lambda_field, partial,
    FormField, MetricField, TorusGeometry,
};
use crate::lck::{functional_value, high_density, lee_form, lee_form_01, normalizer, power, rho_pairing, Regime};
use crate::linalg::{inverse, SmallMat};
use crate::sum::{CSum, Sum};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Relative tolerance for analytic vs finite-difference agreement.
pub const FD_REL_TOL: f64 = 1e-6;
/// Absolute floor of the same comparison.
pub const FD_ABS_TOL: f64 = 1e-8;
/// Smallest acceptable observed order of the central differences.
pub const MIN_FD_ORDER: f64 = 1.8;
/// How many times a probe step may be halved to stay in the cone.
pub const MAX_SHRINK: usize = 40;
/// Default first probe step, relative to `margin / |γ|`.
pub const DEFAULT_STEP: f64 = 0.02;

const I: C64 = C64::new(0.0, 1.0);

fn check_direction(m: &MetricField, gamma: &FormField) -> Result<()> {
    if m.geometry() != gamma.geometry() {
        return Err(Error::GeometryMismatch);
    }
    hermitian_coefficients(gamma).map(|_| ())
}

fn pointwise(a: &FormField, p: usize, q: usize, f: impl Fn(usize, &PointForm) -> PointForm) -> FormField {
    a.map(p, q, |k, v| f(k, v))
}

/// `d/dt Λ_{ω+tγ} α_t = Λ_ω α̇ - (γ ∧ ·)^⋆ α_0`.
pub fn lambda_variation(m: &MetricField, gamma: &FormField, alpha0: &FormField, alpha_dot: &FormField) -> Result<FormField> {
    check_direction(m, gamma)?;
    alpha0.check_compatible(alpha_dot)?;
    let a = lambda_field(m, alpha_dot)?;
    let (p, q) = a.bidegree();
    let b = pointwise(alpha0, p, q, |k, v| m.frame(k).wedge_adjoint(&gamma.at(k), v));
    a.sub(&b)
}

/// `d/dt θ^{0,1}_{ω+tγ}`: `⋆(γ ∧ ⋆∂̄ω) + Λ_ω(∂̄γ)` on surfaces, and
/// `(Λ_ω(∂̄γ) - (γ ∧ ·)^⋆ ∂̄ω) / (n - 1)` otherwise.
pub fn lee_variation(m: &MetricField, gamma: &FormField) -> Result<FormField> {
    check_direction(m, gamma)?;
    let n = m.n();
    let db = dbar(&m.omega());
    let lg = lambda_field(m, &dbar(gamma))?;
    match Regime::of(n)? {
        Regime::Surface => {
            let s = pointwise(&db, 0, 1, |k, v| {
                let f = m.frame(k);
                f.star(&gamma.at(k).wedge_unchecked(&f.star(v)))
            });
            s.add(&lg)
        }
        Regime::High => {
            let s = pointwise(&db, 0, 1, |k, v| m.frame(k).wedge_adjoint(&gamma.at(k), v));
            Ok(lg.sub(&s)?.scale(C64::new(1.0 / (n - 1) as f64, 0.0)))
        }
    }
}

/// Surface rewrite of [`lee_variation`]:
/// `-Λ_ω(γ) θ^{0,1} - i ξ_{θ^{0,1}} ⌟ γ + Λ_ω(∂̄γ)`, with `ξ_α ⌟ ω = i α`.
pub fn lee_variation_rewrite(m: &MetricField, gamma: &FormField) -> Result<FormField> {
    surface_only(m)?;
    check_direction(m, gamma)?;
    let t01 = lee_form_01(m)?;
    let lg = lambda_field(m, &dbar(gamma))?;
    let mut r = FormField::zeros(m.geometry(), 0, 1);
    for k in 0..m.geometry().nodes() {
        let f = m.frame(k);
        let t = t01.at(k);
        let g = gamma.at(k);
        let xi = f.xi_of_01(&t)?;
        let v = t * (-f.lambda(&g).scalar_value()) - xi.contract(&g)? * I;
        r.set(k, &v);
    }
    r.add(&lg)
}

fn surface_only(m: &MetricField) -> Result<()> {
    match m.n() {
        2 => Ok(()),
        n => Err(Error::Dimension(n)),
    }
}

fn high_only(m: &MetricField) -> Result<()> {
    match m.n() {
        3.. => Ok(()),
        n => Err(Error::Dimension(n)),
    }
}

/// The surface formulas for `(d_ω L)(γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceVariation {
    /// `2 Re ∫ ∂θ^{1,0} ∧ ∂̄ (d_ω θ^{0,1})(γ)` with the star form of the Lee variation.
    pub star_form: f64,
    /// Four-term form with `∫ Λγ ∂θ^{1,0} ∧ ∂̄θ^{0,1}` and `∫ ∂θ^{1,0} ∧ ∂̄Λ(∂̄γ)`.
    pub wedge_form: f64,
    /// Four-term form with `|∂θ^{1,0}|²` and `⟨⟨∂∂̄θ^{1,0}, ∂γ⟩⟩`.
    pub norm_form: f64,
    /// Two-term form `-2 Re ∫ ∂θ^{1,0} ∧ ∂̄Λ(γ ∧ θ^{0,1}) - 2 Re i⟨⟨∂∂̄θ^{1,0}, ∂γ⟩⟩`.
    pub two_term: f64,
}

impl SurfaceVariation {
    /// Largest pairwise relative disagreement among the three closed forms.
    pub fn spread(&self) -> f64 {
        let v = [self.wedge_form, self.norm_form, self.two_term];
        let scale = v.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        let mut s: f64 = 0.0;
        for a in v {
            for b in v {
                s = s.max((a - b).abs());
            }
        }
        s / scale
    }
}

struct SurfaceData {
    t01: FormField,
    dt10: FormField,
    ddbar: FormField,
}

impl SurfaceData {
    fn new(m: &MetricField) -> Result<Self> {
        let t01 = lee_form_01(m)?;
        let t10 = t01.conjugate();
        let dt10 = partial(&t10);
        let ddbar = partial(&dbar(&t10));
        Ok(SurfaceData { t01, dt10, ddbar })
    }

    fn wedge_dt10(&self, a02: &FormField) -> Result<f64> {
        Ok(integrate_top(&self.dt10.wedge(a02)?)?.re)
    }
}

/// All surface formulas for `(d_ω L)(γ)`.
pub fn surface_variation(m: &MetricField, gamma: &FormField) -> Result<SurfaceVariation> {
    surface_only(m)?;
    check_direction(m, gamma)?;
    let s = SurfaceData::new(m)?;
    let geom = m.geometry();

    let star_form = 2.0 * s.wedge_dt10(&dbar(&lee_variation(m, gamma)?))?;

    let lam = lambda_field(m, gamma)?;
    let mut xi_g = FormField::zeros(geom, 0, 1);
    let mut g_t = FormField::zeros(geom, 0, 1);
    let mut t1_w = CSum::default();
    let mut t1_n = Sum::default();
    for k in 0..geom.nodes() {
        let f = m.frame(k);
        let t = s.t01.at(k);
        let g = gamma.at(k);
        xi_g.set(k, &f.xi_of_01(&t)?.contract(&g)?);
        g_t.set(k, &f.lambda(&g.wedge_unchecked(&t)));
        let a = s.dt10.at(k);
        let l = lam.at(k).scalar_value();
        t1_w.add(l * a.wedge_unchecked(&a.conjugate()).coeffs()[0] / volume_sign(2));
        t1_n.add(l.re * f.norm_sqr(&a) * f.det());
    }
    let w = geom.cell_weight();
    let t1_w = -2.0 * (t1_w.value() * w).re;
    let t1_n = -2.0 * t1_n.value() * w;
    let t2 = -2.0 * s.wedge_dt10(&dbar(&lam).wedge(&s.t01)?)?;
    let t3_w = 2.0 * s.wedge_dt10(&dbar(&lambda_field(m, &dbar(gamma))?))?;
    let t3_n = -2.0 * (I * l2_inner(m, &s.ddbar, &partial(gamma))?).re;
    let t4 = -2.0 * s.wedge_dt10(&dbar(&xi_g).scale(I))?;
    let t2_short = -2.0 * s.wedge_dt10(&dbar(&g_t))?;

    Ok(SurfaceVariation {
        star_form,
        wedge_form: t1_w + t2 + t3_w + t4,
        norm_form: t1_n + t2 + t3_n + t4,
        two_term: t2_short + t3_n,
    })
}

/// `γ = ∂θ^{0,1} + ∂̄θ^{1,0}` (surfaces).
pub fn mixed_lee_direction(m: &MetricField) -> Result<FormField> {
    surface_only(m)?;
    let t01 = lee_form_01(m)?;
    partial(&t01).add(&dbar(&t01.conjugate()))
}

/// The two reduced expressions valid along [`mixed_lee_direction`]:
/// `-2 Re ∫ i ∂θ^{1,0} ∧ ∂̄(ξ_{θ^{0,1}} ⌟ γ)` and
/// `-2 Re ∫ ∂θ^{1,0} ∧ ∂̄Λ_ω(γ ∧ θ^{0,1})`.
pub fn reduced_mixed_variation(m: &MetricField) -> Result<[f64; 2]> {
    let gamma = mixed_lee_direction(m)?;
    let s = SurfaceData::new(m)?;
    let geom = m.geometry();
    let mut xi_g = FormField::zeros(geom, 0, 1);
    let mut g_t = FormField::zeros(geom, 0, 1);
    for k in 0..geom.nodes() {
        let f = m.frame(k);
        let t = s.t01.at(k);
        let g = gamma.at(k);
        xi_g.set(k, &f.xi_of_01(&t)?.contract(&g)?);
        g_t.set(k, &f.lambda(&g.wedge_unchecked(&t)));
    }
    Ok([-2.0 * s.wedge_dt10(&dbar(&xi_g).scale(I))?, -2.0 * s.wedge_dt10(&dbar(&g_t))?])
}

/// The three terms of the first variation for `n ≥ 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighVariation {
    /// `∫ i P ∧ P̄ ∧ γ ∧ ω_{n-4}` (zero for `n = 3`), `P = (∂̄ω)_prim`.
    pub torsion: f64,
    /// `2 Re ⟨⟨P, (∂̄γ)_prim⟩⟩`.
    pub dbar_gamma: f64,
    /// `-2 Re ⟨⟨θ^{0,1} ∧ γ, P⟩⟩`.
    pub lee: f64,
}

impl HighVariation {
    /// `(d_ω L)(γ)`.
    pub fn total(&self) -> f64 {
        self.torsion + self.dbar_gamma + self.lee
    }
}

/// `(d_ω L)(γ)` for `n ≥ 3`, term by term.
pub fn high_variation(m: &MetricField, gamma: &FormField) -> Result<HighVariation> {
    high_only(m)?;
    check_direction(m, gamma)?;
    let n = m.n();
    let lee = lee_form(m)?;
    let dg = dbar(gamma);
    let mut torsion = CSum::default();
    let mut a = CSum::default();
    let mut b = CSum::default();
    for k in 0..m.geometry().nodes() {
        let f = m.frame(k);
        let p = lee.prim01().at(k);
        let g = gamma.at(k);
        if n >= 4 {
            let top = p.wedge_unchecked(&p.conjugate()).wedge_unchecked(&g).wedge_unchecked(&power(&f, n - 4)) * I;
            torsion.add(top.coeffs()[0] / volume_sign(n));
        }
        let dgp = f.decompose(&dg.at(k))?.prim;
        a.add(f.inner(&p, &dgp) * f.det());
        b.add(f.inner(&lee.theta01().at(k).wedge_unchecked(&g), &p) * f.det());
    }
    let w = m.geometry().cell_weight();
    Ok(HighVariation {
        torsion: (torsion.value() * w).re,
        dbar_gamma: 2.0 * (a.value() * w).re,
        lee: -2.0 * (b.value() * w).re,
    })
}

/// `(d_ω L)(γ)` by the primary route of each regime.
pub fn variation_l(m: &MetricField, gamma: &FormField) -> Result<f64> {
    match Regime::of(m.n())? {
        Regime::Surface => Ok(surface_variation(m, gamma)?.two_term),
        Regime::High => Ok(high_variation(m, gamma)?.total()),
    }
}

/// `(d_ω L̃_ρ)(γ) = ((d_ω L)(γ) - (n - 1) (∫γ ∧ ρ_{n-1} / ∫ω ∧ ρ_{n-1}) L(ω)) / (∫ω ∧ ρ_{n-1})^{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedVariation {
    /// The derivative.
    pub value: f64,
    /// `(d_ω L)(γ)`.
    pub dl: f64,
    /// `(n - 1) (∫γ ∧ ρ_{n-1} / ∫ω ∧ ρ_{n-1}) L(ω)`.
    pub correction: f64,
    /// `∫ ω ∧ ρ_{n-1}`.
    pub normalizer: f64,
}

/// Analytic `(d_ω L̃_ρ)(γ)` (`n ≥ 3`).
pub fn normalized_variation(rho: &MetricField, m: &MetricField, gamma: &FormField) -> Result<NormalizedVariation> {
    high_only(m)?;
    if rho.geometry() != m.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let n = m.n();
    let dl = variation_l(m, gamma)?;
    let nz = normalizer(rho, m)?;
    let correction = (n - 1) as f64 * rho_pairing(rho, gamma)? / nz * functional_value(m)?;
    Ok(NormalizedVariation { value: (dl - correction) / nz.powi(n as i32 - 1), dl, correction, normalizer: nz })
}

/// Riesz representative of `d_ω L`: `⟨⟨field, γ⟩⟩_ω = (d_ω L)(γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ELResidual {
    /// Real `(1, 1)`-field.
    pub field: FormField,
    /// `‖field‖_ω`.
    pub norm: f64,
    /// `max |field - conj(field)| / max |field|` before symmetrization.
    pub realness: f64,
}

impl ELResidual {
    /// Symmetrize `raw` into a real field, recording its realness defect.
    pub fn new(m: &MetricField, raw: FormField) -> Result<Self> {
        let scale = raw.max_abs();
        let skew = raw.sub(&raw.conjugate())?.max_abs();
        let realness = if scale > 0.0 { skew / scale } else { skew };
        let field = raw.add(&raw.conjugate())?.scale(C64::new(0.5, 0.0));
        let norm = l2_norm(m, &field)?;
        Ok(ELResidual { field, norm, realness })
    }

    /// `⟨⟨field, γ⟩⟩_ω`.
    pub fn pair(&self, m: &MetricField, gamma: &FormField) -> Result<f64> {
        Ok(l2_inner(m, &self.field, gamma)?.re)
    }
}

/// Surface residual
/// `ξ_{θ^{1,0}} ⌟ ∂̄∂θ^{1,0} + ξ_{θ^{0,1}} ⌟ ∂∂̄θ^{0,1} - i∂^⋆∂∂̄θ^{1,0} + i∂̄^⋆∂̄∂θ^{0,1}`,
/// with `ξ_{θ^{1,0}} ⌟ = -i (θ^{1,0} ∧ ·)^⋆` and its conjugate.
pub fn el_residual_surface(m: &MetricField) -> Result<ELResidual> {
    surface_only(m)?;
    let t10 = lee_form_01(m)?.conjugate();
    let dbd = dbar(&partial(&t10));
    let a = adjoint_partial(m, &partial(&dbar(&t10)))?;
    let c = pointwise(&dbd, 1, 1, |k, v| m.frame(k).wedge_adjoint(&t10.at(k), v) * I);
    let xi_terms = c.add(&c.conjugate())?.scale(C64::new(-1.0, 0.0));
    let lap = a.conjugate().sub(&a)?.scale(I);
    ELResidual::new(m, xi_terms.add(&lap)?)
}

/// Residual for `n ≥ 3`:
/// `⋆(i P ∧ P̄ ∧ ω_{n-4}) + (∂̄^⋆ + iξ_{θ^{0,1}} ⌟)P + (∂^⋆ - iξ_{θ^{1,0}} ⌟)P̄`,
/// `P = (∂̄ω)_prim`, where `iξ_{θ^{0,1}} ⌟ P = -(θ^{0,1} ∧ ·)^⋆ P`.
pub fn el_residual_high(m: &MetricField) -> Result<ELResidual> {
    high_only(m)?;
    let n = m.n();
    let lee = lee_form(m)?;
    let p = lee.prim01();
    let mut r = adjoint_dbar(m, p)?;
    let d = pointwise(p, 1, 1, |k, v| {
        let f = m.frame(k);
        let mut x = -f.wedge_adjoint(&lee.theta01().at(k), v);
        if n >= 4 {
            let t = v.wedge_unchecked(&v.conjugate()).wedge_unchecked(&power(&f, n - 4)) * I;
            x += f.star(&t) * 0.5;
        }
        x
    });
    r = r.add(&d)?;
    ELResidual::new(m, r.add(&r.conjugate())?)
}

/// Residual of the regime of `m`.
pub fn el_residual(m: &MetricField) -> Result<ELResidual> {
    match Regime::of(m.n())? {
        Regime::Surface => el_residual_surface(m),
        Regime::High => el_residual_high(m),
    }
}

/// Riesz representative `S` of `γ ↦ ∫ γ ∧ ρ_{n-1}` for `⟨⟨·, ·⟩⟩_ω`:
/// coefficient matrix `(det H_ρ / det H) H H_ρ^{-1} H`.
pub fn pairing_representative(rho: &MetricField, m: &MetricField) -> Result<FormField> {
    if rho.geometry() != m.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let n = m.n();
    let mut data = Vec::with_capacity(n * n * m.geometry().nodes());
    for k in 0..m.geometry().nodes() {
        let h = m.matrix(k);
        let hr = rho.matrix(k);
        let fr = rho.frame(k);
        let c = fr.det() / m.frame(k).det();
        let hri = inverse(&hr).ok_or(Error::NotPositive { margin: 0.0 })?;
        let s = h.mul(&hri).mul(&h).scale(C64::new(0.0, c));
        data.extend_from_slice(s.as_slice());
    }
    FormField::from_data(m.geometry(), 1, 1, data)
}

/// Riesz representative of `d_ω L̃_ρ`:
/// `(R - (n - 1) (L(ω) / ∫ω ∧ ρ_{n-1}) S) / (∫ω ∧ ρ_{n-1})^{n-1}`.
pub fn el_residual_normalized(rho: &MetricField, m: &MetricField) -> Result<ELResidual> {
    high_only(m)?;
    let n = m.n();
    let r = el_residual_high(m)?;
    let nz = normalizer(rho, m)?;
    let c = (n - 1) as f64 * functional_value(m)? / nz;
    let s = pairing_representative(rho, m)?;
    let field = r.field.add_scaled(C64::new(-c, 0.0), &s)?.scale(C64::new(nz.powi(1 - n as i32), 0.0));
    ELResidual::new(m, field)
}

/// `L(ω + tγ)` along a fixed line, reusing `∂̄ω`, `∂̄γ` and the coefficient
/// matrices of `γ`.
#[derive(Clone, Debug)]
pub struct Line {
    geom: TorusGeometry,
    h: Vec<C64>,
    g: Vec<C64>,
    db_w: FormField,
    db_g: FormField,
}

impl Line {
    /// Line through `m` along the real `(1, 1)`-field `gamma`.
    pub fn new(m: &MetricField, gamma: &FormField) -> Result<Self> {
        if m.geometry() != gamma.geometry() {
            return Err(Error::GeometryMismatch);
        }
        Regime::of(m.n())?;
        Ok(Line {
            geom: m.geometry(),
            h: m.data().to_vec(),
            g: hermitian_coefficients(gamma)?,
            db_w: dbar(&m.omega()),
            db_g: dbar(gamma),
        })
    }

    fn frame(&self, k: usize, t: f64) -> Result<Frame> {
        let n = self.geom.n();
        let r = k * n * n..(k + 1) * n * n;
        let mut mat = SmallMat::zeros(n);
        for ((z, h), g) in (0..n * n).zip(&self.h[r.clone()]).zip(&self.g[r]) {
            mat.set(z / n, z % n, h + g * t);
        }
        Frame::from_matrix(&mat)
    }

    fn db(&self, k: usize, t: f64) -> PointForm {
        self.db_w.at(k) + self.db_g.at(k) * t
    }

    /// `L(ω + tγ)`; fails with [`Error::NotPositive`] outside the cone.
    pub fn value(&self, t: f64) -> Result<f64> {
        let n = self.geom.n();
        let w = self.geom.cell_weight();
        if n >= 3 {
            let mut s = Sum::default();
            for k in 0..self.geom.nodes() {
                s.add(high_density(&self.frame(k, t)?, &self.db(k, t)));
            }
            return Ok(s.value() * w);
        }
        let mut t01 = FormField::zeros(self.geom, 0, 1);
        for k in 0..self.geom.nodes() {
            t01.set(k, &self.frame(k, t)?.lambda(&self.db(k, t)));
        }
        let a = partial(&t01.conjugate());
        let mut s = Sum::default();
        for k in 0..self.geom.nodes() {
            let f = self.frame(k, t)?;
            s.add(f.norm_sqr(&a.at(k)) * f.det());
        }
        Ok(s.value() * w)
    }
}

/// Functionals the finite-difference oracle can probe.
#[derive(Clone, Copy, Debug)]
pub enum Functional<'a> {
    /// `L`.
    L,
    /// `L̃_ρ`.
    Normalized(&'a MetricField),
    /// `∫ ω ∧ ρ_{n-1}` (linear in `ω`).
    Normalizer(&'a MetricField),
}

/// Richardson-extrapolated central difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdEstimate {
    /// Extrapolated derivative.
    pub value: f64,
    /// Observed order `log2 |D(t) - D(t/2)| / |D(t/2) - D(t/4)|`; infinite when
    /// both differences are at round-off level.
    pub order: f64,
    /// First step actually used.
    pub step: f64,
    /// Central differences at `t`, `t/2`, `t/4`.
    pub raw: [f64; 3],
}

/// Central differences of `f` at `t0`, `t0/2`, `t0/4`, halving `t0` while any
/// probe leaves the cone.
pub fn richardson(mut f: impl FnMut(f64) -> Result<f64>, t0: f64) -> Result<FdEstimate> {
    if !(t0 > 0.0) {
        return Err(Error::Parameter("probe step must be positive"));
    }
    let mut t = t0;
    let mut last_margin = 0.0;
    for _ in 0..=MAX_SHRINK {
        match sweep(&mut f, t) {
            Ok(e) => return Ok(e),
            Err(Error::NotPositive { margin }) => {
                last_margin = margin;
                t *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ProbeStep { margin: last_margin })
}

fn sweep(f: &mut impl FnMut(f64) -> Result<f64>, t: f64) -> Result<FdEstimate> {
    let mut raw = [0.0; 3];
    let mut fmax: f64 = 0.0;
    for (j, d) in raw.iter_mut().enumerate() {
        let s = t / (1u32 << j) as f64;
        let (a, b) = (f(s)?, f(-s)?);
        fmax = fmax.max(a.abs()).max(b.abs());
        *d = (a - b) / (2.0 * s);
    }
    let floor = 1e3 * f64::EPSILON * fmax / (t / 4.0);
    let (e0, e1) = ((raw[0] - raw[1]).abs(), (raw[1] - raw[2]).abs());
    let order = if e0 <= floor && e1 <= floor { f64::INFINITY } else { (e0 / e1.max(floor)).log2() };
    Ok(FdEstimate { value: (4.0 * raw[2] - raw[1]) / 3.0, order, step: t, raw })
}

/// Default first step for the direction `γ` at `m`.
pub fn default_step(m: &MetricField, gamma: &FormField) -> f64 {
    let s = gamma.max_abs() * m.n() as f64;
    if s > 0.0 {
        DEFAULT_STEP * m.margin() / s
    } else {
        DEFAULT_STEP
    }
}

/// Finite-difference derivative of `F(ω + tγ)` at `t = 0`.
pub fn fd_directional(func: Functional<'_>, m: &MetricField, gamma: &FormField, t0: f64) -> Result<FdEstimate> {
    check_direction(m, gamma)?;
    match func {
        Functional::L => {
            let line = Line::new(m, gamma)?;
            richardson(|t| line.value(t), t0)
        }
        Functional::Normalized(rho) => {
            high_only(m)?;
            let line = Line::new(m, gamma)?;
            let n0 = normalizer(rho, m)?;
            let n1 = rho_pairing(rho, gamma)?;
            let e = m.n() as i32 - 1;
            richardson(|t| Ok(line.value(t)? / (n0 + t * n1).powi(e)), t0)
        }
        Functional::Normalizer(rho) => {
            if rho.geometry() != m.geometry() {
                return Err(Error::GeometryMismatch);
            }
            let mut probe = |t: f64| -> Result<f64> { normalizer(rho, &m.perturbed(t, gamma)?) };
            richardson(&mut probe, t0)
        }
    }
}

/// Analytic derivative checked against the finite-difference oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationReport {
    /// Analytic value (primary route).
    pub analytic: f64,
    /// Richardson finite-difference value.
    pub fd: f64,
    /// Observed central-difference order.
    pub fd_order: f64,
    /// Other analytic routes, by name.
    pub formulas: Vec<(&'static str, f64)>,
}

impl VariationReport {
    /// `|analytic - fd| / |analytic|`.
    pub fn rel_err(&self) -> f64 {
        (self.analytic - self.fd).abs() / self.analytic.abs().max(f64::MIN_POSITIVE)
    }

    /// `|analytic - fd| ≤ max(1e-6 |analytic|, 1e-8)` and order `≥ 1.8`.
    pub fn passes(&self) -> bool {
        (self.analytic - self.fd).abs() <= (FD_REL_TOL * self.analytic.abs()).max(FD_ABS_TOL) && self.fd_order >= MIN_FD_ORDER
    }
}

/// Surface first variation: all formulas plus the oracle.
pub fn first_variation_surface(m: &MetricField, gamma: &FormField) -> Result<VariationReport> {
    let s = surface_variation(m, gamma)?;
    let fd = fd_directional(Functional::L, m, gamma, default_step(m, gamma))?;
    Ok(VariationReport {
        analytic: s.two_term,
        fd: fd.value,
        fd_order: fd.order,
        formulas: vec![("star_form", s.star_form), ("wedge_form", s.wedge_form), ("norm_form", s.norm_form), ("two_term", s.two_term)],
    })
}

/// First variation for `n ≥ 3` plus the oracle.
pub fn first_variation_high(m: &MetricField, gamma: &FormField) -> Result<VariationReport> {
    let h = high_variation(m, gamma)?;
    let fd = fd_directional(Functional::L, m, gamma, default_step(m, gamma))?;
    Ok(VariationReport {
        analytic: h.total(),
        fd: fd.value,
        fd_order: fd.order,
        formulas: vec![("torsion", h.torsion), ("dbar_gamma", h.dbar_gamma), ("lee", h.lee)],
    })
}

/// Normalized first variation plus the oracle.
pub fn first_variation_normalized(rho: &MetricField, m: &MetricField, gamma: &FormField) -> Result<VariationReport> {
    let v = normalized_variation(rho, m, gamma)?;
    let fd = fd_directional(Functional::Normalized(rho), m, gamma, default_step(m, gamma))?;
    Ok(VariationReport {
        analytic: v.value,
        fd: fd.value,
        fd_order: fd.order,
        formulas: vec![("dl", v.dl), ("correction", v.correction), ("normalizer", v.normalizer)],
    })
}

/// First variation of the regime of `m`.
pub fn first_variation(m: &MetricField, gamma: &FormField) -> Result<VariationReport> {
    match Regime::of(m.n())? {
        Regime::Surface => first_variation_surface(m, gamma),
        Regime::High => first_variation_high(m, gamma),
    }
}
