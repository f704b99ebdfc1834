//! Lee forms, the energy functionals `L`, `𝓛` and `L̃_ρ`, and metric
//! diagnostics.
//!
//! For `n = 2` the functional is `L(ω) = ‖∂θ^{1,0}‖²`; for `n ≥ 3` it is
//! `L(ω) = ‖(∂̄ω)_prim‖²`. Both vanish exactly on lcK metrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::exterior::{volume_sign, Frame, PointForm};
use crate::fields::{
    adjoint_dbar, dbar, integrate_top, l2_norm_sqr, mixed_l2_norm, partial, FormField, MetricField, MixedField,
};
use crate::linalg::SmallMat;
use crate::sum::{CSum, Sum};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Relative tolerance for the agreement of the two routes to `L`.
pub const ROUTE_TOLERANCE: f64 = 1e-8;

/// Which definition of `L` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `n = 2`.
    Surface,
    /// `n ≥ 3`.
    High,
}

impl Regime {
    /// Regime of complex dimension `n ≥ 2`.
    pub fn of(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Regime::Surface),
            3.. => Ok(Regime::High),
            _ => Err(Error::Dimension(n)),
        }
    }

    /// Short tag.
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Surface => "surface",
            Regime::High => "high",
        }
    }
}

/// `ω_m = ω^m / m!` at one node.
pub(crate) fn power(f: &Frame, m: usize) -> PointForm {
    let w = f.omega();
    let mut r = PointForm::scalar(f.n(), C64::new(1.0, 0.0));
    for k in 1..=m {
        r = w.wedge_unchecked(&r) * (1.0 / k as f64);
    }
    r
}

fn top_value(n: usize, a: &PointForm) -> C64 {
    a.coeffs()[0] / volume_sign(n)
}

/// Lee form and primitive torsion of a metric:
/// `∂̄ω = (∂̄ω)_prim + ω ∧ θ^{0,1}` and its conjugate.
#[derive(Clone, Debug)]
pub struct LeeData {
    theta10: FormField,
    theta01: FormField,
    prim: FormField,
}

impl LeeData {
    /// `θ^{1,0}`.
    pub fn theta10(&self) -> &FormField {
        &self.theta10
    }

    /// `θ^{0,1}`.
    pub fn theta01(&self) -> &FormField {
        &self.theta01
    }

    /// `θ = θ^{1,0} + θ^{0,1}`.
    pub fn theta(&self) -> MixedField {
        MixedField::new(vec![self.theta10.clone(), self.theta01.clone()]).expect("same grid")
    }

    /// `(∂̄ω)_prim`, a `(1, 2)`-field (identically zero on surfaces).
    pub fn prim01(&self) -> &FormField {
        &self.prim
    }

    /// `(dω)_prim = (∂ω)_prim + (∂̄ω)_prim`.
    pub fn prim3(&self) -> MixedField {
        MixedField::new(vec![self.prim.conjugate(), self.prim.clone()]).expect("same grid")
    }

    /// `dθ` split by bidegree.
    pub fn dtheta(&self) -> MixedField {
        let mixed = partial(&self.theta01).add(&dbar(&self.theta10)).expect("same grid");
        MixedField::new(vec![partial(&self.theta10), mixed, dbar(&self.theta01)]).expect("same grid")
    }

    /// `max |dω - (dω)_prim - ω ∧ θ| / max |dω|`, with `dω` recomputed.
    pub fn reconstruction_defect(&self, m: &MetricField) -> Result<f64> {
        let w = m.omega();
        let d10 = partial(&w);
        let d01 = dbar(&w);
        let rebuilt01 = self.prim.add(&w.wedge(&self.theta01)?)?;
        let rebuilt10 = self.prim.conjugate().add(&w.wedge(&self.theta10)?)?;
        let err = d01.sub(&rebuilt01)?.max_abs().max(d10.sub(&rebuilt10)?.max_abs());
        let scale = d01.max_abs().max(d10.max_abs());
        Ok(if scale > 0.0 { err / scale } else { err })
    }

    /// `max |Λ_ω (∂̄ω)_prim|`.
    pub fn primitivity_defect(&self, m: &MetricField) -> f64 {
        (0..m.geometry().nodes())
            .map(|k| m.frame(k).lambda(&self.prim.at(k)).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Lee form of `m` by Lefschetz decomposition of `∂̄ω`, with
/// `θ = Λ_ω(dω) / (n - 1)`.
pub fn lee_form(m: &MetricField) -> Result<LeeData> {
    let geom = m.geometry();
    Regime::of(m.n())?;
    let db = dbar(&m.omega());
    let mut theta01 = FormField::zeros(geom, 0, 1);
    let mut prim = FormField::zeros(geom, 1, 2);
    for k in 0..geom.nodes() {
        let d = m.frame(k).decompose(&db.at(k))?;
        prim.set(k, &d.prim);
        theta01.set(k, &d.quotient.expect("degree three"));
    }
    Ok(LeeData { theta10: theta01.conjugate(), theta01, prim })
}

/// `θ^{0,1}` alone (no primitive part stored).
pub fn lee_form_01(m: &MetricField) -> Result<FormField> {
    let n = m.n();
    Regime::of(n)?;
    let db = dbar(&m.omega());
    let s = C64::new(1.0 / (n - 1) as f64, 0.0);
    Ok(db.map(0, 1, |k, a| m.frame(k).lambda(a) * s))
}

/// Value of `L` with both evaluation routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalValue {
    /// `L(ω) ≥ 0` (the norm route).
    pub value: f64,
    /// Dimension regime.
    pub regime: Regime,
    /// `‖∂θ^{1,0}‖²` or `‖(∂̄ω)_prim‖²`.
    pub norm_route: f64,
    /// `∫ ∂θ^{1,0} ∧ ∂̄θ^{0,1}` or `∫ i P ∧ P̄ ∧ ω_{n-3}` with `P = (∂̄ω)_prim`.
    pub integral_route: C64,
}

impl FunctionalValue {
    /// Relative disagreement between the two routes.
    pub fn route_defect(&self) -> f64 {
        (self.integral_route - self.norm_route).norm() / self.norm_route.max(f64::MIN_POSITIVE)
    }
}

/// `L(ω)` computed as an integral of a top form and as an `L²` norm; fails
/// with [`Error::Disagreement`] when the routes differ by more than
/// [`ROUTE_TOLERANCE`] relative to the natural scale of the integrand.
pub fn functional_l(m: &MetricField) -> Result<FunctionalValue> {
    let n = m.n();
    let regime = Regime::of(n)?;
    let geom = m.geometry();
    let (norm, integral, scale) = match regime {
        Regime::Surface => {
            let t01 = lee_form_01(m)?;
            let a = partial(&t01.conjugate());
            let b = dbar(&t01);
            let norm = l2_norm_sqr(m, &a)?;
            let integral = integrate_top(&a.wedge(&b)?)?;
            let scale = l2_norm_sqr(m, &b)?.max(norm);
            (norm, integral, scale)
        }
        Regime::High => {
            let lee = lee_form(m)?;
            let mut norm = Sum::default();
            let mut integral = CSum::default();
            for k in 0..geom.nodes() {
                let f = m.frame(k);
                let p = lee.prim.at(k);
                norm.add(f.norm_sqr(&p) * f.det());
                let top = p.wedge_unchecked(&p.conjugate()).wedge_unchecked(&power(&f, n - 3)) * C64::new(0.0, 1.0);
                integral.add(top_value(n, &top));
            }
            let w = geom.cell_weight();
            let norm = norm.value() * w;
            (norm, integral.value() * w, norm)
        }
    };
    let defect = (integral - norm).norm();
    if defect > ROUTE_TOLERANCE * scale.max(f64::MIN_POSITIVE) && defect > 1e-14 {
        return Err(Error::Disagreement { what: "L integral and norm routes", rel: defect / scale.max(f64::MIN_POSITIVE) });
    }
    Ok(FunctionalValue { value: norm, regime, norm_route: norm, integral_route: integral })
}

/// Pointwise `|(∂̄ω)_prim|² det h` from `h` and `∂̄ω` at one node, via
/// `|∂̄ω|² - (n - 1) |θ^{0,1}|²`.
pub(crate) fn high_density(f: &Frame, db: &PointForm) -> f64 {
    let n = f.n();
    let a = f.to_frame(db);
    let t = crate::exterior::lambda_on(&a).coeff_norm().powi(2) / ((n - 1) as f64);
    (a.coeff_norm().powi(2) - t).max(0.0) * f.det()
}

/// `L(ω)` by the cheapest route (no cross-check).
pub fn functional_value(m: &MetricField) -> Result<f64> {
    match Regime::of(m.n())? {
        Regime::Surface => {
            let t01 = lee_form_01(m)?;
            l2_norm_sqr(m, &partial(&t01.conjugate()))
        }
        Regime::High => {
            let db = dbar(&m.omega());
            let mut s = Sum::default();
            for k in 0..m.geometry().nodes() {
                s.add(high_density(&m.frame(k), &db.at(k)));
            }
            Ok(s.value() * m.geometry().cell_weight())
        }
    }
}

/// `𝓛(ω) = ‖dθ‖²` (surfaces), summed over the three bidegree parts.
pub fn functional_curly_l(m: &MetricField) -> Result<f64> {
    if m.n() != 2 {
        return Err(Error::Dimension(m.n()));
    }
    let t01 = lee_form_01(m)?;
    let t10 = t01.conjugate();
    let dt = MixedField::new(vec![partial(&t10), partial(&t01).add(&dbar(&t10))?, dbar(&t01)])?;
    Ok(mixed_l2_norm(m, &dt)?.powi(2))
}

/// `∫ (∂θ^{0,1} + ∂̄θ^{1,0})²` (surfaces).
pub fn mixed_square_integral(m: &MetricField) -> Result<f64> {
    if m.n() != 2 {
        return Err(Error::Dimension(m.n()));
    }
    let t01 = lee_form_01(m)?;
    let x = partial(&t01).add(&dbar(&t01.conjugate()))?;
    Ok(integrate_top(&x.wedge(&x)?)?.re)
}

/// `∫ γ ∧ ρ_{n-1}` for a `(1, 1)`-field `γ`.
pub fn rho_pairing(rho: &MetricField, gamma: &FormField) -> Result<f64> {
    if rho.geometry() != gamma.geometry() {
        return Err(Error::GeometryMismatch);
    }
    if gamma.bidegree() != (1, 1) {
        return Err(Error::Bidegree { expected: (1, 1), found: gamma.bidegree() });
    }
    let n = rho.n();
    let mut s = CSum::default();
    for k in 0..rho.geometry().nodes() {
        let top = gamma.at(k).wedge_unchecked(&power(&rho.frame(k), n - 1));
        s.add(top_value(n, &top));
    }
    Ok(s.value().re * rho.geometry().cell_weight())
}

/// `∫ ω ∧ ρ_{n-1}`.
pub fn normalizer(rho: &MetricField, m: &MetricField) -> Result<f64> {
    if rho.geometry() != m.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let v = rho_pairing(rho, &m.omega())?;
    if !(v > 0.0) {
        return Err(Error::NotPositive { margin: v });
    }
    Ok(v)
}

/// `L̃_ρ(ω) = L(ω) / (∫ ω ∧ ρ_{n-1})^{n-1}` (`n ≥ 3`).
pub fn functional_normalized(rho: &MetricField, m: &MetricField) -> Result<f64> {
    let n = m.n();
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    Ok(functional_value(m)? / normalizer(rho, m)?.powi(n as i32 - 1))
}

/// Residual norms measuring how far a metric is from each special class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// Complex dimension.
    pub n: usize,
    /// Smallest eigenvalue of `h` over the grid.
    pub margin: f64,
    /// `L(ω)`.
    pub functional: f64,
    /// `‖dω‖`.
    pub kahler: f64,
    /// `‖(dω)_prim‖ + ‖dθ‖` (`‖dθ‖` alone on surfaces).
    pub lck: f64,
    /// `‖(dω)_prim‖`.
    pub prim_torsion: f64,
    /// `‖dθ‖`.
    pub dtheta: f64,
    /// `‖d ω_{n-1}‖`.
    pub balanced: f64,
    /// `‖θ‖`.
    pub lee_norm: f64,
    /// `‖∂∂̄ ω_{n-1}‖`.
    pub gauduchon: f64,
    /// `‖∂̄^⋆ θ^{0,1}‖` (surfaces).
    pub gauduchon_lee: Option<f64>,
}

impl Diagnostics {
    /// Flat key/value view.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("n", self.n as f64),
            ("margin", self.margin),
            ("functional", self.functional),
            ("kahler", self.kahler),
            ("lck", self.lck),
            ("prim_torsion", self.prim_torsion),
            ("dtheta", self.dtheta),
            ("balanced", self.balanced),
            ("lee_norm", self.lee_norm),
            ("gauduchon", self.gauduchon),
        ];
        if let Some(g) = self.gauduchon_lee {
            v.push(("gauduchon_lee", g));
        }
        v
    }
}

/// Compute every residual of [`Diagnostics`].
pub fn classify(m: &MetricField) -> Result<Diagnostics> {
    let n = m.n();
    let regime = Regime::of(n)?;
    let geom = m.geometry();
    let w = m.omega();
    let dw = MixedField::new(vec![partial(&w), dbar(&w)])?;
    let kahler = mixed_l2_norm(m, &dw)?;
    drop(dw);
    drop(w);
    let lee = lee_form(m)?;
    let prim_torsion = mixed_l2_norm(m, &lee.prim3())?;
    let dtheta = mixed_l2_norm(m, &lee.dtheta())?;
    let lee_norm = mixed_l2_norm(m, &lee.theta())?;
    let lck = match regime {
        Regime::Surface => dtheta,
        Regime::High => prim_torsion + dtheta,
    };
    let wn1 = FormField::from_fn(geom, n - 1, n - 1, |k, _| power(&m.frame(k), n - 1));
    let balanced = mixed_l2_norm(m, &MixedField::new(vec![partial(&wn1), dbar(&wn1)])?)?;
    let gauduchon = l2_norm_sqr(m, &partial(&dbar(&wn1)))?.sqrt();
    let gauduchon_lee = match regime {
        Regime::Surface => Some(l2_norm_sqr(m, &adjoint_dbar(m, lee.theta01())?)?.sqrt()),
        Regime::High => None,
    };
    let functional = match regime {
        Regime::Surface => l2_norm_sqr(m, &partial(lee.theta10()))?,
        Regime::High => prim_torsion * prim_torsion / 2.0,
    };
    Ok(Diagnostics {
        n,
        margin: m.margin(),
        functional,
        kahler,
        lck,
        prim_torsion,
        dtheta,
        balanced,
        lee_norm,
        gauduchon,
        gauduchon_lee,
    })
}

/// Both sides of `τ̄^⋆ θ^{0,1} = |θ^{0,1}|²` on a surface, where
/// `τ̄ = [Λ, ∂̄ω ∧ ·]` and hence `τ̄^⋆ = [(∂̄ω ∧ ·)^⋆, ω ∧ ·]`.
pub fn tau_bar_star_theta(m: &MetricField) -> Result<(FormField, FormField)> {
    if m.n() != 2 {
        return Err(Error::Dimension(m.n()));
    }
    let db = dbar(&m.omega());
    let t01 = lee_form_01(m)?;
    let geom = m.geometry();
    let mut lhs = FormField::zeros(geom, 0, 0);
    let mut rhs = FormField::zeros(geom, 0, 0);
    for k in 0..geom.nodes() {
        let f = m.frame(k);
        let b = db.at(k);
        let t = t01.at(k);
        // (∂̄ω ∧ ·)^⋆ θ^{0,1} = 0 for bidegree reasons
        let v = f.wedge_adjoint(&b, &f.lefschetz(&t));
        lhs.set(k, &v);
        rhs.set(k, &PointForm::scalar(2, C64::new(f.norm_sqr(&t), 0.0)));
    }
    Ok((lhs, rhs))
}

/// Residuals of the lcK fixture `h = I / |z|²` on `C² \ {0}` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfSample {
    /// Sample point.
    pub z: [C64; 2],
    /// `|dω - ω ∧ θ|_ω`.
    pub lck: f64,
    /// `|dθ|_ω`.
    pub dtheta: f64,
    /// `|θ - Λ_ω(dω)|_ω`, comparing the candidate with the Lee form.
    pub lee: f64,
}

/// Summary of the fixture over several sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct HopfReport {
    /// Per-sample residuals.
    pub samples: Vec<HopfSample>,
}

impl HopfReport {
    /// Largest residual of any kind.
    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.lck.max(s.dtheta).max(s.lee)).fold(0.0, f64::max)
    }
}

fn one_form(n: usize, holo: bool, c: [C64; 2]) -> PointForm {
    let mut r = if holo { PointForm::zero(n, 1, 0) } else { PointForm::zero(n, 0, 1) };
    r.coeffs_mut().copy_from_slice(&c);
    r
}

/// Pointwise check of `dω = ω ∧ θ`, `dθ = 0` for `h = I / |z|²` with the
/// candidate `θ = -d log |z|²`, all derivatives coded by hand.
pub fn hopf_fixture_check(samples: &[[C64; 2]]) -> Result<HopfReport> {
    let n = 2;
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::new();
    for z in samples {
        let r2 = z[0].norm_sqr() + z[1].norm_sqr();
        if !(r2 > 1e-12) {
            return Err(Error::Parameter("fixture samples must avoid the origin"));
        }
        let r4 = r2 * r2;
        let h = SmallMat::identity(n).scale(C64::new(1.0 / r2, 0.0));
        let f = Frame::from_matrix(&h)?;
        // ∂_l h_{jk} = -δ_{jk} z̄_l / r⁴, ∂̄_l h_{jk} = -δ_{jk} z_l / r⁴
        let mut dw10 = PointForm::zero(n, 2, 1);
        let mut dw01 = PointForm::zero(n, 1, 2);
        for l in 0..n {
            for j in 0..n {
                let base = PointForm::monomial(n, 1 << j, 1 << j) * i;
                dw10 += PointForm::dz(n, l).wedge(&base)? * (-z[l].conj() / r4);
                dw01 += PointForm::dzbar(n, l).wedge(&base)? * (-z[l] / r4);
            }
        }
        // θ^{1,0}_j = -z̄_j / r², θ^{0,1}_j = -z_j / r²
        let t10 = one_form(n, true, [-z[0].conj() / r2, -z[1].conj() / r2]);
        let t01 = one_form(n, false, [-z[0] / r2, -z[1] / r2]);
        let w = f.omega();
        let lck = (f.norm_sqr(&(dw10 - w.wedge(&t10)?)) + f.norm_sqr(&(dw01 - w.wedge(&t01)?))).sqrt();
        let mut d20 = PointForm::zero(n, 2, 0);
        let mut d11 = PointForm::zero(n, 1, 1);
        let mut d02 = PointForm::zero(n, 0, 2);
        for l in 0..n {
            for j in 0..n {
                let delta = if j == l { 1.0 / r2 } else { 0.0 };
                // ∂_l θ^{1,0}_j = z̄_j z̄_l / r⁴
                d20 += PointForm::dz(n, l).wedge(&PointForm::dz(n, j))? * (z[j].conj() * z[l].conj() / r4);
                // ∂̄_l θ^{1,0}_j = -δ_{jl} / r² + z̄_j z_l / r⁴
                d11 += PointForm::dzbar(n, l).wedge(&PointForm::dz(n, j))? * (z[j].conj() * z[l] / r4 - delta);
                // ∂_l θ^{0,1}_j = -δ_{jl} / r² + z_j z̄_l / r⁴
                d11 += PointForm::dz(n, l).wedge(&PointForm::dzbar(n, j))? * (z[j] * z[l].conj() / r4 - delta);
                // ∂̄_l θ^{0,1}_j = z_j z_l / r⁴
                d02 += PointForm::dzbar(n, l).wedge(&PointForm::dzbar(n, j))? * (z[j] * z[l] / r4);
            }
        }
        let dtheta = (f.norm_sqr(&d20) + f.norm_sqr(&d11) + f.norm_sqr(&d02)).sqrt();
        let lee10 = f.lambda(&dw10) * (1.0 / (n - 1) as f64);
        let lee01 = f.lambda(&dw01) * (1.0 / (n - 1) as f64);
        let lee = (f.norm_sqr(&(lee10 - t10)) + f.norm_sqr(&(lee01 - t01))).sqrt();
        out.push(HopfSample { z: *z, lck, dtheta, lee });
    }
    Ok(HopfReport { samples: out })
}
