use core::cell::OnceCell;

use super::basis::{binom, below, rank, subset, wedge_sign};
use super::form::PointForm;
use crate::linalg::{cholesky, hermitian_min_eigenvalue, lower_inverse, SmallMat};
use crate::{Error, Result, C64, MAX_N};

const I: C64 = C64::new(0.0, 1.0);

/// Positive-definite Hermitian matrix `h`, read as `ω = i Σ h_{jk̄} dz_j ∧ dz̄_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix(SmallMat);

impl HermitianMatrix {
    /// Validate Hermitian symmetry (to round-off) and positive definiteness.
    pub fn new(m: SmallMat) -> Result<Self> {
        let n = m.dim();
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::Dimension(n));
        }
        let defect = m.hermitian_defect();
        if defect > 1e-12 * (1.0 + m.frobenius()) {
            return Err(Error::Parameter("matrix is not Hermitian"));
        }
        if cholesky(&m).is_none() {
            return Err(Error::NotPositive { margin: hermitian_min_eigenvalue(&m) });
        }
        Ok(HermitianMatrix(m))
    }

    /// Identity metric `ω = i Σ dz_j ∧ dz̄_j`.
    pub fn identity(n: usize) -> Self {
        HermitianMatrix(SmallMat::identity(n))
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.0.dim()
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &SmallMat {
        &self.0
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_min_eigenvalue(&self.0)
    }

    /// The `(1, 1)`-form `ω`.
    pub fn omega(&self) -> PointForm {
        omega_from_matrix(&self.0)
    }
}

pub(crate) fn omega_from_matrix(h: &SmallMat) -> PointForm {
    let n = h.dim();
    let mut f = PointForm::zero(n, 1, 1);
    f.coeffs_mut().copy_from_slice(h.as_slice());
    f.scale(I)
}

/// `ε_n` with `dV = ε_n φ^{1..n} ∧ φ̄^{1..n}` for `dV = ω^n / n!`.
pub fn volume_sign(n: usize) -> C64 {
    let ipow = match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => I,
        2 => C64::new(-1.0, 0.0),
        _ => -I,
    };
    if (n * (n.saturating_sub(1)) / 2) % 2 == 0 {
        ipow
    } else {
        -ipow
    }
}

/// Compound matrix of order `k`: entry `(I, K)` is the minor `det m[I, K]`,
/// rows and columns indexed by lexicographic `k`-subsets.
pub fn compound(m: &SmallMat, k: usize) -> SmallMat {
    let mut c = SmallMat::identity(1);
    for j in 1..=k {
        c = compound_step(m, &c, j);
    }
    c
}

// Order-`k` compound from the order-`(k - 1)` one, expanding each minor
// along its first row.
fn compound_step(m: &SmallMat, prev: &SmallMat, k: usize) -> SmallMat {
    let n = m.dim();
    if k == 1 {
        return *m;
    }
    let d = binom(n, k);
    let mut r = SmallMat::zeros(d);
    for a in 0..d {
        let rows = subset(n, k, a);
        let i0 = rows.trailing_zeros() as usize;
        let rest = rank(n, rows & !(1 << i0));
        for b in 0..d {
            let cols = subset(n, k, b);
            let mut s = C64::new(0.0, 0.0);
            for (pos, c) in super::basis::indices(cols).enumerate() {
                let x = m.get(i0, c);
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                let minor = prev.get(rest, rank(n, cols & !(1 << c)));
                if pos % 2 == 0 {
                    s += x * minor;
                } else {
                    s -= x * minor;
                }
            }
            r.set(a, b, s);
        }
    }
    r
}

/// Unitary coframe data of a metric: `h = A A^†` with `A` lower triangular,
/// `φ^a = Σ_j A_{ja} dz_j` and `dz_j = Σ_a C_{ja} φ^a`, `C = (A^{-1})^T`.
///
/// [`to_frame`](Frame::to_frame) rewrites coordinate coefficients relative to
/// `φ^I ∧ φ̄^J`, where `Λ`, `⋆` and `⟨·,·⟩` are the identity-metric
/// combinatorial operators.
#[derive(Clone, Debug)]
pub struct Frame {
    n: usize,
    h: SmallMat,
    a: SmallMat,
    c: SmallMat,
    det_h: f64,
    comp_a: [OnceCell<SmallMat>; MAX_N + 1],
    comp_c: [OnceCell<SmallMat>; MAX_N + 1],
}

impl Frame {
    /// Frame of a validated metric.
    pub fn new(h: &HermitianMatrix) -> Self {
        Self::from_matrix(h.matrix()).expect("validated metric")
    }

    /// Frame of a raw matrix; fails unless positive definite.
    pub fn from_matrix(h: &SmallMat) -> Result<Self> {
        let a = cholesky(h).ok_or_else(|| Error::NotPositive { margin: hermitian_min_eigenvalue(h) })?;
        let c = lower_inverse(&a).transpose();
        let mut det_h = 1.0;
        for j in 0..h.dim() {
            det_h *= a.get(j, j).re * a.get(j, j).re;
        }
        Ok(Frame {
            n: h.dim(),
            h: *h,
            a,
            c,
            det_h,
            comp_a: Default::default(),
            comp_c: Default::default(),
        })
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Metric matrix.
    pub fn matrix(&self) -> &SmallMat {
        &self.h
    }

    /// `det h`, the density of `dV_ω` against the flat volume form.
    pub fn det(&self) -> f64 {
        self.det_h
    }

    fn comp_a(&self, k: usize) -> &SmallMat {
        self.comp_a[k].get_or_init(|| match k {
            0 => SmallMat::identity(1),
            _ => compound_step(&self.a, self.comp_a(k - 1), k),
        })
    }

    fn comp_c(&self, k: usize) -> &SmallMat {
        self.comp_c[k].get_or_init(|| match k {
            0 => SmallMat::identity(1),
            _ => compound_step(&self.c, self.comp_c(k - 1), k),
        })
    }

    /// Coordinate coefficients → coefficients relative to `φ^I ∧ φ̄^J`.
    pub fn to_frame(&self, a: &PointForm) -> PointForm {
        let (n, p, q) = (self.n, a.p(), a.q());
        if a.coeffs().is_empty() {
            return *a;
        }
        let (dp, dq) = (binom(n, p), binom(n, q));
        let cp = self.comp_c(p);
        let cq = self.comp_c(q);
        // t[K, J] = Σ_I cp[I, K] a[I, J]
        let mut t = [C64::new(0.0, 0.0); super::MAX_COEFFS];
        let ac = a.coeffs();
        for i in 0..dp {
            for k in 0..dp {
                let w = cp.get(i, k);
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dq {
                    t[k * dq + j] += w * ac[i * dq + j];
                }
            }
        }
        // r[K, M] = Σ_J t[K, J] conj(cq[J, M])
        let mut r = PointForm::zero(n, p, q);
        let rc = r.coeffs_mut();
        for k in 0..dp {
            for j in 0..dq {
                let x = t[k * dq + j];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for m in 0..dq {
                    rc[k * dq + m] += x * cq.get(j, m).conj();
                }
            }
        }
        r
    }

    /// Inverse of [`to_frame`](Frame::to_frame).
    pub fn from_frame(&self, a: &PointForm) -> PointForm {
        let (n, p, q) = (self.n, a.p(), a.q());
        if a.coeffs().is_empty() {
            return *a;
        }
        let (dp, dq) = (binom(n, p), binom(n, q));
        let ap = self.comp_a(p);
        let aq = self.comp_a(q);
        let ac = a.coeffs();
        // t[K, J] = Σ_M a[K, M] conj(aq[J, M])
        let mut t = [C64::new(0.0, 0.0); super::MAX_COEFFS];
        for k in 0..dp {
            for m in 0..dq {
                let x = ac[k * dq + m];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dq {
                    t[k * dq + j] += x * aq.get(j, m).conj();
                }
            }
        }
        // r[I, J] = Σ_K ap[I, K] t[K, J]
        let mut r = PointForm::zero(n, p, q);
        let rc = r.coeffs_mut();
        for i in 0..dp {
            for k in 0..dp {
                let w = ap.get(i, k);
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dq {
                    rc[i * dq + j] += w * t[k * dq + j];
                }
            }
        }
        r
    }

    /// `ω` in coordinates.
    pub fn omega(&self) -> PointForm {
        omega_from_matrix(&self.h)
    }

    /// `L_ω a = ω ∧ a`.
    pub fn lefschetz(&self, a: &PointForm) -> PointForm {
        self.omega().wedge_unchecked(a)
    }

    /// `Λ_ω a`.
    pub fn lambda(&self, a: &PointForm) -> PointForm {
        self.from_frame(&lambda_on(&self.to_frame(a)))
    }

    /// `⋆_ω a`.
    pub fn star(&self, a: &PointForm) -> PointForm {
        self.from_frame(&star_on(&self.to_frame(a)))
    }

    /// `⟨a, b⟩_ω`, linear in `a`, antilinear in `b`.
    pub fn inner(&self, a: &PointForm, b: &PointForm) -> C64 {
        inner_on(&self.to_frame(a), &self.to_frame(b))
    }

    /// `|a|²_ω`.
    pub fn norm_sqr(&self, a: &PointForm) -> f64 {
        self.to_frame(a).coeffs().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Lefschetz decomposition for total degree `≤ 3`.
    pub fn decompose(&self, a: &PointForm) -> Result<Decomposition> {
        let d = decompose_on(&self.to_frame(a))?;
        Ok(Decomposition {
            prim: self.from_frame(&d.prim),
            quotient: d.quotient.map(|x| self.from_frame(&x)),
        })
    }

    /// `(b ∧ ·)^⋆ a`.
    pub fn wedge_adjoint(&self, b: &PointForm, a: &PointForm) -> PointForm {
        self.from_frame(&wedge_adjoint_on(&self.to_frame(b), &self.to_frame(a)))
    }

    /// The function `f` with `a = f dV_ω`, for an `(n, n)`-form `a`.
    pub fn top_density(&self, a: &PointForm) -> C64 {
        debug_assert_eq!(a.bidegree(), (self.n, self.n));
        a.coeffs()[0] / (volume_sign(self.n) * self.det_h)
    }

    /// `dV_ω` as an `(n, n)`-form.
    pub fn volume_form(&self) -> PointForm {
        let mut f = PointForm::zero(self.n, self.n, self.n);
        f.coeffs_mut()[0] = volume_sign(self.n) * self.det_h;
        f
    }
}

/// `Λ` relative to an orthonormal coframe: `-i Σ_a ι(ē_a) ι(e_a)`.
pub fn lambda_on(a: &PointForm) -> PointForm {
    let (n, p, q) = (a.n(), a.p(), a.q());
    if p == 0 || q == 0 {
        return PointForm::zero(n, p.saturating_sub(1), q.saturating_sub(1));
    }
    let mut r = PointForm::zero(n, p - 1, q - 1);
    let dq = binom(n, q - 1);
    let rc = r.coeffs_mut();
    for (i, j, x) in a.terms() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let mut common = i & j;
        while common != 0 {
            let k = common.trailing_zeros() as usize;
            common &= common - 1;
            // ι(∂_k) then ι(∂̄_k) on dz_I ∧ dz̄_J
            let e = below(i, k) + (p as u32 - 1) + below(j, k);
            let s = if e % 2 == 0 { 1.0 } else { -1.0 };
            rc[rank(n, i & !(1 << k)) * dq + rank(n, j & !(1 << k))] += x * (-I) * s;
        }
    }
    r
}

/// `ω = i Σ φ^a ∧ φ̄^a` relative to an orthonormal coframe.
pub fn omega_on(n: usize) -> PointForm {
    let mut f = PointForm::zero(n, 1, 1);
    for a in 0..n {
        f.coeffs_mut()[a * n + a] = I;
    }
    f
}

/// Pointwise inner product relative to an orthonormal coframe.
pub fn inner_on(a: &PointForm, b: &PointForm) -> C64 {
    debug_assert!(a.check_same(b).is_ok());
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x * y.conj()).sum()
}

/// `⋆` relative to an orthonormal coframe:
/// `⋆(φ^A ∧ φ̄^B) = (-1)^{pq} ε_n σ · φ^{B^c} ∧ φ̄^{A^c}` where
/// `(φ^B ∧ φ̄^A) ∧ (φ^{B^c} ∧ φ̄^{A^c}) = σ φ^{1..n} ∧ φ̄^{1..n}`.
pub fn star_on(a: &PointForm) -> PointForm {
    let (n, p, q) = (a.n(), a.p(), a.q());
    let full = ((1u16 << n) - 1) as u8;
    let mut r = PointForm::zero(n, n - q, n - p);
    let dq = binom(n, n - p);
    let eps = volume_sign(n) * if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
    #[allow(unused_mut)]
    let mut flip = 1.0;
    #[cfg(feature = "fault-injection")]
    if crate::faults::star_sign_flipped() {
        flip = -1.0;
    }
    let rc = r.coeffs_mut();
    for (ia, jb, x) in a.terms() {
        let sigma = wedge_sign(jb, ia, full & !jb, full & !ia).expect("complementary sets");
        rc[rank(n, full & !jb) * dq + rank(n, full & !ia)] += x * eps * sigma * flip;
    }
    r
}

/// `(b ∧ ·)^⋆ a` relative to an orthonormal coframe. Returns the zero form
/// when `a` has smaller bidegree than `b` in some component.
pub fn wedge_adjoint_on(b: &PointForm, a: &PointForm) -> PointForm {
    let n = a.n();
    if a.p() < b.p() || a.q() < b.q() {
        return PointForm::zero(n, a.p().saturating_sub(b.p()), a.q().saturating_sub(b.q()));
    }
    let (p, q) = (a.p() - b.p(), a.q() - b.q());
    let mut r = PointForm::zero(n, p, q);
    let dqa = binom(n, a.q());
    let dq = binom(n, q);
    let ac = a.coeffs();
    for (ib, jb, y) in b.terms() {
        if y == C64::new(0.0, 0.0) {
            continue;
        }
        let yc = y.conj();
        for k in 0..r.coeffs().len() {
            let (ic, jc) = (subset(n, p, k / dq), subset(n, q, k % dq));
            if let Some(s) = wedge_sign(ib, jb, ic, jc) {
                let x = ac[rank(n, ib | ic) * dqa + rank(n, jb | jc)];
                r.coeffs_mut()[k] += x * yc * s;
            }
        }
    }
    r
}

/// Primitive part and Lefschetz quotient of a form of degree `≤ 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    /// `Λ`-free part.
    pub prim: PointForm,
    /// `f` with `a = prim + f ω` (degree 2) or `θ` with `a = prim + ω ∧ θ`
    /// (degree 3); `None` when the form is automatically primitive.
    pub quotient: Option<PointForm>,
}

/// Lefschetz decomposition relative to an orthonormal coframe.
pub fn decompose_on(a: &PointForm) -> Result<Decomposition> {
    let (n, p, q) = (a.n(), a.p(), a.q());
    let k = p + q;
    if k > 3 {
        return Err(Error::DegreeUnsupported(k));
    }
    if p == 0 || q == 0 || k < 2 {
        return Ok(Decomposition { prim: *a, quotient: None });
    }
    let w = omega_on(n);
    if k == 2 {
        let f = lambda_on(a).scale(C64::new(1.0 / n as f64, 0.0));
        let prim = *a - w.scale(f.scalar_value());
        Ok(Decomposition { prim, quotient: Some(f) })
    } else {
        if n < 2 {
            return Ok(Decomposition { prim: *a, quotient: None });
        }
        let theta = lambda_on(a).scale(C64::new(1.0 / (n - 1) as f64, 0.0));
        let prim = *a - w.wedge_unchecked(&theta);
        Ok(Decomposition { prim, quotient: Some(theta) })
    }
}

/// `ω ∧ a`.
pub fn lefschetz(h: &HermitianMatrix, a: &PointForm) -> Result<PointForm> {
    h.omega().wedge(a)
}

/// `Λ_ω a`.
pub fn lambda(h: &HermitianMatrix, a: &PointForm) -> Result<PointForm> {
    check_dim(h, a)?;
    Ok(Frame::new(h).lambda(a))
}

/// `⟨a, b⟩_ω`.
pub fn inner(h: &HermitianMatrix, a: &PointForm, b: &PointForm) -> Result<C64> {
    check_dim(h, a)?;
    a.check_same(b)?;
    Ok(Frame::new(h).inner(a, b))
}

/// `⋆_ω a`, of bidegree `(n - q, n - p)`.
pub fn hodge_star(h: &HermitianMatrix, a: &PointForm) -> Result<PointForm> {
    check_dim(h, a)?;
    Ok(Frame::new(h).star(a))
}

/// Lefschetz decomposition (total degree `≤ 3`).
pub fn lefschetz_decompose(h: &HermitianMatrix, a: &PointForm) -> Result<Decomposition> {
    check_dim(h, a)?;
    Frame::new(h).decompose(a)
}

/// `(b ∧ ·)^⋆_ω a`.
pub fn wedge_adjoint(h: &HermitianMatrix, b: &PointForm, a: &PointForm) -> Result<PointForm> {
    check_dim(h, a)?;
    check_dim(h, b)?;
    Ok(Frame::new(h).wedge_adjoint(b, a))
}

/// `ω_m = ω^m / m!` (`ω_0 = 1`).
pub fn omega_power(h: &HermitianMatrix, m: usize) -> PointForm {
    let n = h.n();
    let w = h.omega();
    let mut r = PointForm::scalar(n, C64::new(1.0, 0.0));
    for k in 1..=m {
        r = w.wedge_unchecked(&r).scale(C64::new(1.0 / k as f64, 0.0));
    }
    r
}

fn check_dim(h: &HermitianMatrix, a: &PointForm) -> Result<()> {
    if h.n() != a.n() {
        return Err(Error::DimensionMismatch { left: h.n(), right: a.n() });
    }
    Ok(())
}
