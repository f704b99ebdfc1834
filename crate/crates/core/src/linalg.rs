//! Small dense complex matrices (order ≤ 6) used pointwise: factorizations,
//! inverses, determinants and Hermitian eigenvalues.

use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

const CAP: usize = 36;

/// Square complex matrix of order at most 6, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMat {
    dim: usize,
    a: [C64; CAP],
}

impl SmallMat {
    /// Zero matrix of the given order.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim * dim <= CAP, "matrix order {dim} too large");
        SmallMat { dim, a: [C64::new(0.0, 0.0); CAP] }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major slice of length `dim²`.
    pub fn from_slice(dim: usize, v: &[C64]) -> Self {
        let mut m = Self::zeros(dim);
        m.a[..dim * dim].copy_from_slice(&v[..dim * dim]);
        m
    }

    /// Order of the matrix.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.a[..self.dim * self.dim]
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.dim + j]
    }

    /// Set entry `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.a[i * self.dim + j] = z;
    }

    /// Matrix product.
    pub fn mul(&self, other: &SmallMat) -> SmallMat {
        let n = self.dim;
        let mut r = SmallMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    r.a[i * n + j] += x * other.a[k * n + j];
                }
            }
        }
        r
    }

    /// Transpose.
    pub fn transpose(&self) -> SmallMat {
        let n = self.dim;
        let mut r = SmallMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                r.a[j * n + i] = self.a[i * n + j];
            }
        }
        r
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> SmallMat {
        let mut r = *self;
        for z in r.a[..self.dim * self.dim].iter_mut() {
            *z = z.conj();
        }
        r
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SmallMat {
        self.transpose().conj()
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, t: f64, other: &SmallMat) -> SmallMat {
        let mut r = *self;
        for (x, y) in r.a[..self.dim * self.dim].iter_mut().zip(other.as_slice()) {
            *x += y * t;
        }
        r
    }

    /// Scale every entry.
    pub fn scale(&self, t: C64) -> SmallMat {
        let mut r = *self;
        for x in r.a[..self.dim * self.dim].iter_mut() {
            *x *= t;
        }
        r
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Lower-triangular `A` with `h = A A^†`, or `None` if `h` is not positive definite.
pub fn cholesky(h: &SmallMat) -> Option<SmallMat> {
    let n = h.dim();
    let mut a = SmallMat::zeros(n);
    for j in 0..n {
        let mut d = h.get(j, j).re;
        for k in 0..j {
            d -= a.get(j, k).norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        a.set(j, j, C64::new(djj, 0.0));
        for i in (j + 1)..n {
            let mut s = h.get(i, j);
            for k in 0..j {
                s -= a.get(i, k) * a.get(j, k).conj();
            }
            a.set(i, j, s / djj);
        }
    }
    Some(a)
}

/// Inverse of an invertible lower-triangular matrix.
pub fn lower_inverse(a: &SmallMat) -> SmallMat {
    let n = a.dim();
    let mut x = SmallMat::zeros(n);
    for j in 0..n {
        x.set(j, j, a.get(j, j).inv());
        for i in (j + 1)..n {
            let mut s = C64::new(0.0, 0.0);
            for k in j..i {
                s += a.get(i, k) * x.get(k, j);
            }
            x.set(i, j, -s / a.get(i, i));
        }
    }
    x
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &SmallMat) -> C64 {
    let n = m.dim();
    let mut w = *m;
    let mut d = C64::new(1.0, 0.0);
    for c in 0..n {
        let mut piv = c;
        for r in (c + 1)..n {
            if w.get(r, c).norm_sqr() > w.get(piv, c).norm_sqr() {
                piv = r;
            }
        }
        let p = w.get(piv, c);
        if p == C64::new(0.0, 0.0) {
            return p;
        }
        if piv != c {
            for j in 0..n {
                let t = w.get(c, j);
                w.set(c, j, w.get(piv, j));
                w.set(piv, j, t);
            }
            d = -d;
        }
        d *= p;
        for r in (c + 1)..n {
            let f = w.get(r, c) / p;
            for j in c..n {
                let v = w.get(r, j) - f * w.get(c, j);
                w.set(r, j, v);
            }
        }
    }
    d
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(m: &SmallMat) -> Option<SmallMat> {
    let n = m.dim();
    let mut w = *m;
    let mut x = SmallMat::identity(n);
    for c in 0..n {
        let mut piv = c;
        for r in (c + 1)..n {
            if w.get(r, c).norm_sqr() > w.get(piv, c).norm_sqr() {
                piv = r;
            }
        }
        if w.get(piv, c) == C64::new(0.0, 0.0) {
            return None;
        }
        if piv != c {
            for j in 0..n {
                let t = w.get(c, j);
                w.set(c, j, w.get(piv, j));
                w.set(piv, j, t);
                let t = x.get(c, j);
                x.set(c, j, x.get(piv, j));
                x.set(piv, j, t);
            }
        }
        let p = w.get(c, c).inv();
        for j in 0..n {
            w.set(c, j, w.get(c, j) * p);
            x.set(c, j, x.get(c, j) * p);
        }
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = w.get(r, c);
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let v = w.get(r, j) - f * w.get(c, j);
                w.set(r, j, v);
                let v = x.get(r, j) - f * x.get(c, j);
                x.set(r, j, v);
            }
        }
    }
    Some(x)
}

/// Eigenvalues of a Hermitian matrix in ascending order (cyclic Jacobi).
pub fn hermitian_eigenvalues(h: &SmallMat) -> ([f64; 6], usize) {
    let n = h.dim();
    let mut a = *h;
    for _sweep in 0..50 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a.get(i, i).norm_sqr();
            for j in (i + 1)..n {
                off += a.get(i, j).norm_sqr();
            }
        }
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let beta = apq.norm();
                if beta == 0.0 {
                    continue;
                }
                let phase = apq / beta;
                let alpha = a.get(p, p).re;
                let gamma = a.get(q, q).re;
                let theta = 0.5 * (2.0 * beta).atan2(gamma - alpha);
                let (s, c) = theta.sin_cos();
                // J = D R with D = diag(1, conj(phase)) on (p, q).
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;
                // A <- A J (columns p, q).
                for r in 0..n {
                    let x = a.get(r, p);
                    let y = a.get(r, q);
                    a.set(r, p, x * jpp + y * jqp);
                    a.set(r, q, x * jpq + y * jqq);
                }
                // A <- J^† A (rows p, q).
                for col in 0..n {
                    let x = a.get(p, col);
                    let y = a.get(q, col);
                    a.set(p, col, jpp.conj() * x + jqp.conj() * y);
                    a.set(q, col, jpq.conj() * x + jqq.conj() * y);
                }
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
            }
        }
    }
    let mut ev = [0.0f64; 6];
    for (i, e) in ev.iter_mut().enumerate().take(n) {
        *e = a.get(i, i).re;
    }
    ev[..n].sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    (ev, n)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(h: &SmallMat) -> f64 {
    hermitian_eigenvalues(h).0[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> SmallMat {
        // Diagonally dominant Hermitian matrix.
        let v = [
            c(3.0, 0.0), c(0.2, 0.1), c(-0.3, 0.4),
            c(0.2, -0.1), c(2.0, 0.0), c(0.1, 0.0),
            c(-0.3, -0.4), c(0.1, 0.0), c(4.0, 0.0),
        ];
        SmallMat::from_slice(3, &v)
    }

    #[test]
    fn cholesky_reconstructs() {
        let h = sample();
        let a = cholesky(&h).unwrap();
        let r = a.mul(&a.adjoint());
        for (x, y) in r.as_slice().iter().zip(h.as_slice()) {
            assert!((x - y).norm() < 1e-14);
        }
        let ai = lower_inverse(&a);
        let id = a.mul(&ai);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id.get(i, j) - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut h = SmallMat::identity(2);
        h.set(0, 1, c(2.0, 0.0));
        h.set(1, 0, c(2.0, 0.0));
        assert!(cholesky(&h).is_none());
    }

    #[test]
    fn det_and_inverse_agree_with_cholesky() {
        let h = sample();
        let a = cholesky(&h).unwrap();
        let mut dd = C64::new(1.0, 0.0);
        for i in 0..3 {
            dd *= a.get(i, i) * a.get(i, i).conj();
        }
        assert!((det(&h) - dd).norm() < 1e-13);
        let hi = inverse(&h).unwrap();
        let id = h.mul(&hi);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id.get(i, j) - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobi_eigenvalues_match_trace_and_det() {
        let h = sample();
        let (ev, n) = hermitian_eigenvalues(&h);
        assert_eq!(n, 3);
        let tr: f64 = ev[..3].iter().sum();
        let pr: f64 = ev[..3].iter().product();
        assert!((tr - 9.0).abs() < 1e-12);
        assert!((pr - det(&h).re).abs() < 1e-11);
        // Known spectrum: diag(1, 2, 5) conjugated by a unitary.
        let mut d = SmallMat::zeros(2);
        d.set(0, 0, c(1.0, 0.0));
        d.set(1, 1, c(5.0, 0.0));
        let s = 1.0 / 2f64.sqrt();
        let u = SmallMat::from_slice(2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let m = u.mul(&d).mul(&u.adjoint());
        let (ev, _) = hermitian_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-13 && (ev[1] - 5.0).abs() < 1e-13);
    }
}
