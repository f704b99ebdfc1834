use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::basis::{binom, below, rank, subset, wedge_sign};
#[allow(unused_imports)]
use num_traits::Float;
use crate::{Error, Result, C64, MAX_N};

/// Largest coefficient count of a `(p, q)`-form for `n ≤ MAX_N`.
pub const MAX_COEFFS: usize = binom(MAX_N, MAX_N / 2) * binom(MAX_N, MAX_N / 2);

const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients of a `(p, q)`-form at one point.
///
/// Entry `rank(I)·C(n,q) + rank(J)` is the coefficient of `dz_I ∧ dz̄_J`, with
/// ranks lexicographic (see [`MultiIndexPair`](super::MultiIndexPair)). The
/// same layout is used for coefficients relative to an orthonormal coframe
/// `φ^I ∧ φ̄^J` (see [`Frame`](super::Frame)).
#[derive(Clone, Copy, Debug)]
pub struct PointForm {
    n: u8,
    p: u8,
    q: u8,
    len: u8,
    c: [C64; MAX_COEFFS],
}

impl PartialEq for PointForm {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.p == other.p && self.q == other.q && self.coeffs() == other.coeffs()
    }
}

impl PointForm {
    /// Zero form of bidegree `(p, q)`. Bidegrees with `p > n` or `q > n` give
    /// the (unique) zero form of an empty space.
    pub fn zero(n: usize, p: usize, q: usize) -> Self {
        assert!((1..=MAX_N).contains(&n), "complex dimension {n} outside 1..={MAX_N}");
        let len = binom(n, p) * binom(n, q);
        PointForm { n: n as u8, p: p as u8, q: q as u8, len: len as u8, c: [ZERO; MAX_COEFFS] }
    }

    /// Form with the given coefficient array.
    pub fn from_coeffs(n: usize, p: usize, q: usize, coeffs: &[C64]) -> Result<Self> {
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::Dimension(n));
        }
        let mut f = Self::zero(n, p, q);
        if coeffs.len() != f.len as usize {
            return Err(Error::Parameter("coefficient count does not match C(n,p)·C(n,q)"));
        }
        f.c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(f)
    }

    /// Constant function.
    pub fn scalar(n: usize, z: C64) -> Self {
        let mut f = Self::zero(n, 0, 0);
        f.c[0] = z;
        f
    }

    /// Coordinate monomial `dz_I ∧ dz̄_J` (bitmasks).
    pub fn monomial(n: usize, holo: u8, anti: u8) -> Self {
        let (p, q) = (holo.count_ones() as usize, anti.count_ones() as usize);
        let mut f = Self::zero(n, p, q);
        f.c[rank(n, holo) * binom(n, q) + rank(n, anti)] = C64::new(1.0, 0.0);
        f
    }

    /// The `k`-th basis monomial of bidegree `(p, q)`.
    pub fn basis(n: usize, p: usize, q: usize, k: usize) -> Self {
        let mut f = Self::zero(n, p, q);
        f.c[k] = C64::new(1.0, 0.0);
        f
    }

    /// `dz_j` (0-based `j`).
    pub fn dz(n: usize, j: usize) -> Self {
        Self::monomial(n, 1 << j, 0)
    }

    /// `dz̄_j` (0-based `j`).
    pub fn dzbar(n: usize, j: usize) -> Self {
        Self::monomial(n, 0, 1 << j)
    }

    /// Complex dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Holomorphic degree.
    #[inline]
    pub fn p(&self) -> usize {
        self.p as usize
    }

    /// Antiholomorphic degree.
    #[inline]
    pub fn q(&self) -> usize {
        self.q as usize
    }

    /// `(p, q)`.
    #[inline]
    pub fn bidegree(&self) -> (usize, usize) {
        (self.p as usize, self.q as usize)
    }

    /// Total degree `p + q`.
    #[inline]
    pub fn degree(&self) -> usize {
        (self.p + self.q) as usize
    }

    /// Coefficient array.
    #[inline]
    pub fn coeffs(&self) -> &[C64] {
        &self.c[..self.len as usize]
    }

    /// Mutable coefficient array.
    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.c[..self.len as usize]
    }

    /// Coefficient of `dz_I ∧ dz̄_J`.
    pub fn coeff(&self, holo: u8, anti: u8) -> C64 {
        let n = self.n();
        self.c[rank(n, holo) * binom(n, self.q()) + rank(n, anti)]
    }

    /// Iterate `(I, J, coefficient)` over all entries.
    pub fn terms(&self) -> impl Iterator<Item = (u8, u8, C64)> + '_ {
        let (n, p, q) = (self.n(), self.p(), self.q());
        let dq = binom(n, q);
        self.coeffs()
            .iter()
            .enumerate()
            .map(move |(k, &z)| (subset(n, p, k / dq), subset(n, q, k % dq), z))
    }

    /// Euclidean norm of the coefficient array (metric-free size measure).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub(crate) fn check_same(&self, other: &PointForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        if self.p != other.p || self.q != other.q {
            return Err(Error::Bidegree { expected: self.bidegree(), found: other.bidegree() });
        }
        Ok(())
    }

    /// Complex conjugate `ᾱ`, of bidegree `(q, p)`:
    /// `conj(c · dz_I∧dz̄_J) = (-1)^{pq} c̄ · dz_J∧dz̄_I`.
    pub fn conjugate(&self) -> PointForm {
        let (n, p, q) = (self.n(), self.p(), self.q());
        let mut r = PointForm::zero(n, q, p);
        let s = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        let dq = binom(n, q);
        let dp = binom(n, p);
        for a in 0..dp {
            for b in 0..dq {
                r.c[b * dp + a] = self.c[a * dq + b].conj() * s;
            }
        }
        r
    }

    /// Exterior product. Bidegrees beyond `n` yield the zero form of that
    /// bidegree.
    pub fn wedge(&self, other: &PointForm) -> Result<PointForm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(self.wedge_unchecked(other))
    }

    pub(crate) fn wedge_unchecked(&self, other: &PointForm) -> PointForm {
        let n = self.n();
        let (p, q) = (self.p() + other.p(), self.q() + other.q());
        let mut r = PointForm::zero(n, p, q);
        if r.len == 0 {
            return r;
        }
        let dq = binom(n, q);
        for (i1, j1, x) in self.terms() {
            if x == ZERO {
                continue;
            }
            for (i2, j2, y) in other.terms() {
                if y == ZERO {
                    continue;
                }
                if let Some(s) = wedge_sign(i1, j1, i2, j2) {
                    r.c[rank(n, i1 | i2) * dq + rank(n, j1 | j2)] += x * y * s;
                }
            }
        }
        r
    }

    /// Contraction by the coordinate vector `∂/∂z_j`.
    pub fn contract_z(&self, j: usize) -> PointForm {
        let (n, p, q) = (self.n(), self.p(), self.q());
        if p == 0 {
            return PointForm::zero(n, 0, q);
        }
        let mut r = PointForm::zero(n, p - 1, q);
        let dq = binom(n, q);
        for (i, jj, x) in self.terms() {
            if i & (1 << j) == 0 {
                continue;
            }
            let s = if below(i, j) % 2 == 0 { 1.0 } else { -1.0 };
            r.c[rank(n, i & !(1 << j)) * dq + rank(n, jj)] += x * s;
        }
        r
    }

    /// Contraction by the coordinate vector `∂/∂z̄_j`.
    pub fn contract_zbar(&self, j: usize) -> PointForm {
        let (n, p, q) = (self.n(), self.p(), self.q());
        if q == 0 {
            return PointForm::zero(n, p, 0);
        }
        let mut r = PointForm::zero(n, p, q - 1);
        let dq = binom(n, q - 1);
        for (i, jj, x) in self.terms() {
            if jj & (1 << j) == 0 {
                continue;
            }
            let s = if (p as u32 + below(jj, j)) % 2 == 0 { 1.0 } else { -1.0 };
            r.c[rank(n, i) * dq + rank(n, jj & !(1 << j))] += x * s;
        }
        r
    }

    /// Multiply by a complex scalar.
    pub fn scale(&self, z: C64) -> PointForm {
        let mut r = *self;
        for x in r.coeffs_mut() {
            *x *= z;
        }
        r
    }

    /// `self + z·other` (same bidegree).
    pub fn axpy(&mut self, z: C64, other: &PointForm) {
        debug_assert!(self.check_same(other).is_ok());
        for (x, y) in self.coeffs_mut().iter_mut().zip(other.coeffs()) {
            *x += z * y;
        }
    }

    /// The scalar value of a `(0, 0)`-form.
    pub fn scalar_value(&self) -> C64 {
        debug_assert_eq!(self.degree(), 0);
        self.c[0]
    }
}

impl Add for PointForm {
    type Output = PointForm;
    fn add(mut self, rhs: PointForm) -> PointForm {
        self += rhs;
        self
    }
}

impl AddAssign for PointForm {
    fn add_assign(&mut self, rhs: PointForm) {
        assert!(self.check_same(&rhs).is_ok(), "adding forms of different bidegree");
        for (x, y) in self.coeffs_mut().iter_mut().zip(rhs.coeffs()) {
            *x += y;
        }
    }
}

impl Sub for PointForm {
    type Output = PointForm;
    fn sub(mut self, rhs: PointForm) -> PointForm {
        self -= rhs;
        self
    }
}

impl SubAssign for PointForm {
    fn sub_assign(&mut self, rhs: PointForm) {
        assert!(self.check_same(&rhs).is_ok(), "subtracting forms of different bidegree");
        for (x, y) in self.coeffs_mut().iter_mut().zip(rhs.coeffs()) {
            *x -= y;
        }
    }
}

impl Neg for PointForm {
    type Output = PointForm;
    fn neg(self) -> PointForm {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<C64> for PointForm {
    type Output = PointForm;
    fn mul(self, z: C64) -> PointForm {
        self.scale(z)
    }
}

impl Mul<f64> for PointForm {
    type Output = PointForm;
    fn mul(self, t: f64) -> PointForm {
        self.scale(C64::new(t, 0.0))
    }
}

/// Exterior product `a ∧ b`.
pub fn wedge(a: &PointForm, b: &PointForm) -> Result<PointForm> {
    a.wedge(b)
}
