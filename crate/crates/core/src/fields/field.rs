use alloc::vec;
use alloc::vec::Vec;

use super::TorusGeometry;
use crate::exterior::{binom, Frame, PointForm};
use crate::linalg::{hermitian_min_eigenvalue, SmallMat};
use crate::{Error, Result, C64};

/// A `(p, q)`-form sampled on every node of a torus grid.
///
/// Storage is node-major: the coefficients of node `k` occupy
/// `data[k·dim .. (k+1)·dim]` in [`PointForm`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct FormField {
    geom: TorusGeometry,
    p: usize,
    q: usize,
    dim: usize,
    data: Vec<C64>,
}

impl FormField {
    /// Zero field.
    pub fn zeros(geom: TorusGeometry, p: usize, q: usize) -> Self {
        let dim = binom(geom.n(), p) * binom(geom.n(), q);
        FormField { geom, p, q, dim, data: vec![C64::new(0.0, 0.0); dim * geom.nodes()] }
    }

    /// Field from raw node-major coefficients.
    pub fn from_data(geom: TorusGeometry, p: usize, q: usize, data: Vec<C64>) -> Result<Self> {
        let dim = binom(geom.n(), p) * binom(geom.n(), q);
        if data.len() != dim * geom.nodes() {
            return Err(Error::Parameter("field data length does not match geometry and bidegree"));
        }
        Ok(FormField { geom, p, q, dim, data })
    }

    /// Sample `f(node, coordinates)` on every node.
    pub fn from_fn(
        geom: TorusGeometry,
        p: usize,
        q: usize,
        mut f: impl FnMut(usize, &[f64]) -> PointForm,
    ) -> Self {
        let mut r = Self::zeros(geom, p, q);
        for k in 0..geom.nodes() {
            let x = geom.coords(k);
            let v = f(k, &x[..geom.axes()]);
            debug_assert_eq!(v.bidegree(), (p, q));
            r.set(k, &v);
        }
        r
    }

    /// Grid.
    #[inline]
    pub fn geometry(&self) -> TorusGeometry {
        self.geom
    }

    /// `(p, q)`.
    #[inline]
    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    /// Coefficients per node.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw node-major coefficients.
    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Mutable raw coefficients.
    #[inline]
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Coefficients of one node.
    #[inline]
    pub fn node(&self, k: usize) -> &[C64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    /// The form at one node.
    #[inline]
    pub fn at(&self, k: usize) -> PointForm {
        let mut f = PointForm::zero(self.geom.n(), self.p, self.q);
        f.coeffs_mut().copy_from_slice(self.node(k));
        f
    }

    /// Overwrite the form at one node.
    #[inline]
    pub fn set(&mut self, k: usize, v: &PointForm) {
        self.data[k * self.dim..(k + 1) * self.dim].copy_from_slice(v.coeffs());
    }

    /// Apply a pointwise map producing a `(p2, q2)`-field.
    pub fn map(&self, p2: usize, q2: usize, mut f: impl FnMut(usize, &PointForm) -> PointForm) -> FormField {
        let mut r = FormField::zeros(self.geom, p2, q2);
        for k in 0..self.geom.nodes() {
            let v = f(k, &self.at(k));
            r.set(k, &v);
        }
        r
    }

    pub(crate) fn check_compatible(&self, other: &FormField) -> Result<()> {
        if self.geom != other.geom {
            return Err(Error::GeometryMismatch);
        }
        if self.bidegree() != other.bidegree() {
            return Err(Error::Bidegree { expected: self.bidegree(), found: other.bidegree() });
        }
        Ok(())
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, t: C64, other: &FormField) -> Result<FormField> {
        self.check_compatible(other)?;
        let mut r = self.clone();
        for (x, y) in r.data.iter_mut().zip(&other.data) {
            *x += t * y;
        }
        Ok(r)
    }

    /// `self - other`.
    pub fn sub(&self, other: &FormField) -> Result<FormField> {
        self.add_scaled(C64::new(-1.0, 0.0), other)
    }

    /// `self + other`.
    pub fn add(&self, other: &FormField) -> Result<FormField> {
        self.add_scaled(C64::new(1.0, 0.0), other)
    }

    /// Multiply by a constant.
    pub fn scale(&self, t: C64) -> FormField {
        let mut r = self.clone();
        for x in r.data.iter_mut() {
            *x *= t;
        }
        r
    }

    /// Multiply node-wise by a function.
    pub fn scale_by(&self, f: &[f64]) -> FormField {
        let mut r = self.clone();
        for (k, chunk) in r.data.chunks_mut(self.dim.max(1)).enumerate() {
            for x in chunk {
                *x *= f[k];
            }
        }
        r
    }

    /// Pointwise complex conjugate, a `(q, p)`-field.
    pub fn conjugate(&self) -> FormField {
        self.map(self.q, self.p, |_, v| v.conjugate())
    }

    /// Pointwise exterior product.
    pub fn wedge(&self, other: &FormField) -> Result<FormField> {
        if self.geom != other.geom {
            return Err(Error::GeometryMismatch);
        }
        let (p, q) = (self.p + other.p, self.q + other.q);
        let mut r = FormField::zeros(self.geom, p, q);
        for k in 0..self.geom.nodes() {
            r.set(k, &self.at(k).wedge(&other.at(k))?);
        }
        Ok(r)
    }

    /// Largest coefficient modulus over the grid (metric-free).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// A form of mixed bidegree, stored as its homogeneous parts.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedField {
    parts: Vec<FormField>,
}

impl MixedField {
    /// Collect homogeneous parts, merging equal bidegrees.
    pub fn new(parts: Vec<FormField>) -> Result<Self> {
        let mut out: Vec<FormField> = Vec::new();
        for f in parts {
            if let Some(g) = out.iter_mut().find(|g| g.bidegree() == f.bidegree()) {
                *g = g.add(&f)?;
            } else {
                if let Some(g) = out.first() {
                    if g.geometry() != f.geometry() {
                        return Err(Error::GeometryMismatch);
                    }
                }
                out.push(f);
            }
        }
        out.sort_by_key(|f| f.bidegree());
        Ok(MixedField { parts: out })
    }

    /// Homogeneous parts in increasing `(p, q)` order.
    pub fn parts(&self) -> &[FormField] {
        &self.parts
    }

    /// The part of bidegree `(p, q)`, if present.
    pub fn part(&self, p: usize, q: usize) -> Option<&FormField> {
        self.parts.iter().find(|f| f.bidegree() == (p, q))
    }

    /// Largest coefficient modulus over all parts.
    pub fn max_abs(&self) -> f64 {
        self.parts.iter().fold(0.0, |m, f| m.max(f.max_abs()))
    }
}

/// Positive-definite Hermitian matrix field `h`, read as
/// `ω = i Σ h_{jk̄} dz_j ∧ dz̄_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    geom: TorusGeometry,
    data: Vec<C64>,
    margin: f64,
}

impl MetricField {
    /// Validate node-major `n × n` row-major matrices; computes the positivity
    /// margin (smallest eigenvalue over all nodes) and rejects margins `≤ 0`.
    pub fn new(geom: TorusGeometry, data: Vec<C64>) -> Result<Self> {
        let n = geom.n();
        if data.len() != n * n * geom.nodes() {
            return Err(Error::Parameter("metric data length does not match geometry"));
        }
        let mut margin = f64::INFINITY;
        for chunk in data.chunks(n * n) {
            let m = SmallMat::from_slice(n, chunk);
            if m.hermitian_defect() > 1e-12 * (1.0 + m.frobenius()) {
                return Err(Error::Parameter("metric matrix is not Hermitian"));
            }
            margin = margin.min(hermitian_min_eigenvalue(&m));
        }
        if !(margin > 0.0) {
            return Err(Error::NotPositive { margin });
        }
        Ok(MetricField { geom, data, margin })
    }

    /// Sample a matrix-valued function.
    pub fn from_fn(geom: TorusGeometry, mut f: impl FnMut(&[f64]) -> SmallMat) -> Result<Self> {
        let n = geom.n();
        let mut data = Vec::with_capacity(n * n * geom.nodes());
        for k in 0..geom.nodes() {
            let x = geom.coords(k);
            data.extend_from_slice(f(&x[..geom.axes()]).as_slice());
        }
        Self::new(geom, data)
    }

    /// Grid.
    #[inline]
    pub fn geometry(&self) -> TorusGeometry {
        self.geom
    }

    /// Complex dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.geom.n()
    }

    /// Smallest eigenvalue of `h` over all nodes.
    #[inline]
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Raw node-major matrices.
    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Matrix at one node.
    #[inline]
    pub fn matrix(&self, k: usize) -> SmallMat {
        let n = self.n();
        SmallMat::from_slice(n, &self.data[k * n * n..(k + 1) * n * n])
    }

    /// Unitary coframe data at one node.
    #[inline]
    pub fn frame(&self, k: usize) -> Frame {
        Frame::from_matrix(&self.matrix(k)).expect("metric field is positive")
    }

    /// `ω` as a `(1, 1)`-field.
    pub fn omega(&self) -> FormField {
        let mut f = FormField::from_data(self.geom, 1, 1, self.data.clone()).expect("shape");
        for z in f.data_mut() {
            *z *= C64::new(0.0, 1.0);
        }
        f
    }

    /// Metric of a real `(1, 1)`-field `γ = i Σ g_{jk̄} dz_j ∧ dz̄_k`.
    pub fn from_omega(omega: &FormField) -> Result<Self> {
        let g = hermitian_coefficients(omega)?;
        Self::new(omega.geometry(), g)
    }

    /// `λ ω` for a constant `λ > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Parameter("scale factor must be positive"));
        }
        Ok(MetricField {
            geom: self.geom,
            data: self.data.iter().map(|z| z * lambda).collect(),
            margin: self.margin * lambda,
        })
    }

    /// `λ ω` for a positive function `λ` given node-wise.
    pub fn scale_by(&self, lambda: &[f64]) -> Result<Self> {
        let n2 = self.n() * self.n();
        if lambda.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Parameter("conformal factor must be positive"));
        }
        let data = self
            .data
            .chunks(n2)
            .zip(lambda)
            .flat_map(|(c, &l)| c.iter().map(move |z| z * l))
            .collect();
        Self::new(self.geom, data)
    }

    /// `ω + t γ` for a real `(1, 1)`-field `γ`.
    pub fn perturbed(&self, t: f64, gamma: &FormField) -> Result<Self> {
        if gamma.geometry() != self.geom {
            return Err(Error::GeometryMismatch);
        }
        let g = hermitian_coefficients(gamma)?;
        let data = self.data.iter().zip(&g).map(|(h, g)| h + g * t).collect();
        Self::new(self.geom, data)
    }
}

/// Hermitian coefficient matrices `g` of a real `(1, 1)`-field
/// `γ = i Σ g_{jk̄} dz_j ∧ dz̄_k`, node-major; rejects non-real input.
pub fn hermitian_coefficients(gamma: &FormField) -> Result<Vec<C64>> {
    if gamma.bidegree() != (1, 1) {
        return Err(Error::Bidegree { expected: (1, 1), found: gamma.bidegree() });
    }
    let n = gamma.geometry().n();
    let scale = gamma.max_abs().max(f64::MIN_POSITIVE);
    let mut defect: f64 = 0.0;
    let g: Vec<C64> = gamma.data().iter().map(|z| z * C64::new(0.0, -1.0)).collect();
    for chunk in g.chunks(n * n) {
        for j in 0..n {
            for k in 0..n {
                defect = defect.max((chunk[j * n + k] - chunk[k * n + j].conj()).norm());
            }
        }
    }
    if defect > 1e-10 * scale {
        return Err(Error::NotReal { defect: defect / scale });
    }
    let mut g = g;
    for chunk in g.chunks_mut(n * n) {
        for j in 0..n {
            for k in j..n {
                let m = (chunk[j * n + k] + chunk[k * n + j].conj()) * 0.5;
                chunk[j * n + k] = m;
                chunk[k * n + j] = m.conj();
            }
        }
    }
    Ok(g)
}
