use super::{dbar, partial, FormField, MetricField, MixedField};
use crate::exterior::volume_sign;
use crate::sum::{CSum, Sum};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

fn check(m: &MetricField, a: &FormField) -> Result<()> {
    if m.geometry() != a.geometry() {
        return Err(Error::GeometryMismatch);
    }
    Ok(())
}

/// `⟨⟨a, b⟩⟩_ω = ∫ ⟨a, b⟩_ω dV_ω`, equal-weight quadrature.
pub fn l2_inner(m: &MetricField, a: &FormField, b: &FormField) -> Result<C64> {
    check(m, a)?;
    a.check_compatible(b)?;
    let mut s = CSum::default();
    for k in 0..m.geometry().nodes() {
        let f = m.frame(k);
        s.add(f.inner(&a.at(k), &b.at(k)) * f.det());
    }
    Ok(s.value() * m.geometry().cell_weight())
}

/// `‖a‖²_ω`.
pub fn l2_norm_sqr(m: &MetricField, a: &FormField) -> Result<f64> {
    check(m, a)?;
    let mut s = Sum::default();
    for k in 0..m.geometry().nodes() {
        let f = m.frame(k);
        s.add(f.norm_sqr(&a.at(k)) * f.det());
    }
    Ok(s.value() * m.geometry().cell_weight())
}

/// `‖a‖_ω`.
pub fn l2_norm(m: &MetricField, a: &FormField) -> Result<f64> {
    Ok(l2_norm_sqr(m, a)?.sqrt())
}

/// `‖a‖_ω` of a mixed form (homogeneous parts are orthogonal).
pub fn mixed_l2_norm(m: &MetricField, a: &MixedField) -> Result<f64> {
    let mut s = 0.0;
    for part in a.parts() {
        s += l2_norm_sqr(m, part)?;
    }
    Ok(s.sqrt())
}

/// `∫ f` for an `(n, n)`-field, with `∫ ω_0^n / n! = (2π)^{2n}`.
pub fn integrate_top(f: &FormField) -> Result<C64> {
    let g = f.geometry();
    let n = g.n();
    if f.bidegree() != (n, n) {
        return Err(Error::Bidegree { expected: (n, n), found: f.bidegree() });
    }
    let mut s = CSum::default();
    for z in f.data() {
        s.add(*z);
    }
    Ok(s.value() / volume_sign(n) * g.cell_weight())
}

/// Pointwise `⋆_ω`.
pub fn hodge_star_field(m: &MetricField, a: &FormField) -> Result<FormField> {
    check(m, a)?;
    let n = m.n();
    let (p, q) = a.bidegree();
    Ok(a.map(n - q, n - p, |k, v| m.frame(k).star(v)))
}

/// Pointwise `Λ_ω` (requires `p, q ≥ 1`).
pub fn lambda_field(m: &MetricField, a: &FormField) -> Result<FormField> {
    check(m, a)?;
    let (p, q) = a.bidegree();
    if p == 0 || q == 0 {
        return Err(Error::Bidegree { expected: (1, 1), found: (p, q) });
    }
    Ok(a.map(p - 1, q - 1, |k, v| m.frame(k).lambda(v)))
}

/// `∂̄^⋆ = -⋆ ∂ ⋆`.
pub fn adjoint_dbar(m: &MetricField, a: &FormField) -> Result<FormField> {
    let s = hodge_star_field(m, a)?;
    let r = hodge_star_field(m, &partial(&s))?;
    Ok(r.scale(C64::new(-1.0, 0.0)))
}

/// `∂^⋆ = -⋆ ∂̄ ⋆`.
pub fn adjoint_partial(m: &MetricField, a: &FormField) -> Result<FormField> {
    let s = hodge_star_field(m, a)?;
    let r = hodge_star_field(m, &dbar(&s))?;
    Ok(r.scale(C64::new(-1.0, 0.0)))
}
