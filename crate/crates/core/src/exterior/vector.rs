use super::form::PointForm;
use super::metric::{Frame, HermitianMatrix};
use crate::linalg::{inverse, SmallMat};
use crate::{Error, Result, C64, MAX_N};

/// Vector of type `(1, 0)`: `Σ_j v_j ∂/∂z_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorField10 {
    n: usize,
    v: [C64; MAX_N],
}

/// Vector of type `(0, 1)`: `Σ_j v_j ∂/∂z̄_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VectorField01 {
    n: usize,
    v: [C64; MAX_N],
}

macro_rules! vector_common {
    ($t:ident, $other:ident, $contract:ident) => {
        impl $t {
            /// Build from components.
            pub fn new(components: &[C64]) -> Result<Self> {
                let n = components.len();
                if !(1..=MAX_N).contains(&n) {
                    return Err(Error::Dimension(n));
                }
                let mut v = [C64::new(0.0, 0.0); MAX_N];
                v[..n].copy_from_slice(components);
                Ok($t { n, v })
            }

            /// Components.
            pub fn components(&self) -> &[C64] {
                &self.v[..self.n]
            }

            /// Complex conjugate vector.
            pub fn conjugate(&self) -> $other {
                let mut v = self.v;
                for z in v.iter_mut() {
                    *z = z.conj();
                }
                $other { n: self.n, v }
            }

            /// Interior product `self ⌟ a`.
            pub fn contract(&self, a: &PointForm) -> Result<PointForm> {
                if a.n() != self.n {
                    return Err(Error::DimensionMismatch { left: self.n, right: a.n() });
                }
                let mut r = a.$contract(0).scale(self.v[0]);
                for j in 1..self.n {
                    r.axpy(self.v[j], &a.$contract(j));
                }
                Ok(r)
            }
        }
    };
}

vector_common!(VectorField10, VectorField01, contract_z);
vector_common!(VectorField01, VectorField10, contract_zbar);

/// Interior product with a `(1, 0)`-vector.
pub fn contract(xi: &VectorField10, a: &PointForm) -> Result<PointForm> {
    xi.contract(a)
}

/// Interior product with a `(0, 1)`-vector.
pub fn contract_bar(xi: &VectorField01, a: &PointForm) -> Result<PointForm> {
    xi.contract(a)
}

fn check_bidegree(a: &PointForm, pq: (usize, usize)) -> Result<()> {
    if a.bidegree() != pq {
        return Err(Error::Bidegree { expected: pq, found: a.bidegree() });
    }
    Ok(())
}

/// `ξ_α` of type `(1, 0)` with `ξ_α ⌟ ω = i α`, for a `(0, 1)`-form `α`.
pub fn xi_of_01(h: &HermitianMatrix, alpha: &PointForm) -> Result<VectorField10> {
    xi_of_01_matrix(h.matrix(), alpha)
}

/// `ξ̄_α` of type `(0, 1)` with `ξ̄_α ⌟ ω = α`, for a `(1, 0)`-form `α`.
pub fn xi_bar_of_10(h: &HermitianMatrix, alpha: &PointForm) -> Result<VectorField01> {
    xi_bar_of_10_matrix(h.matrix(), alpha)
}

fn xi_of_01_matrix(h: &SmallMat, alpha: &PointForm) -> Result<VectorField10> {
    check_bidegree(alpha, (0, 1))?;
    // Σ_j u_j h_{jk} = α_k
    let hti = inverse(&h.transpose()).ok_or(Error::NotPositive { margin: 0.0 })?;
    let n = h.dim();
    let mut u = [C64::new(0.0, 0.0); MAX_N];
    for (j, uj) in u.iter_mut().enumerate().take(n) {
        for k in 0..n {
            *uj += hti.get(j, k) * alpha.coeffs()[k];
        }
    }
    VectorField10::new(&u[..n])
}

fn xi_bar_of_10_matrix(h: &SmallMat, alpha: &PointForm) -> Result<VectorField01> {
    check_bidegree(alpha, (1, 0))?;
    // -i Σ_k h_{jk} v_k = α_j
    let hi = inverse(h).ok_or(Error::NotPositive { margin: 0.0 })?;
    let n = h.dim();
    let mut v = [C64::new(0.0, 0.0); MAX_N];
    for (j, vj) in v.iter_mut().enumerate().take(n) {
        for k in 0..n {
            *vj += hi.get(j, k) * alpha.coeffs()[k] * C64::new(0.0, 1.0);
        }
    }
    VectorField01::new(&v[..n])
}

impl Frame {
    /// [`xi_of_01`] for this metric.
    pub fn xi_of_01(&self, alpha: &PointForm) -> Result<VectorField10> {
        xi_of_01_matrix(self.matrix(), alpha)
    }

    /// [`xi_bar_of_10`] for this metric.
    pub fn xi_bar_of_10(&self, alpha: &PointForm) -> Result<VectorField01> {
        xi_bar_of_10_matrix(self.matrix(), alpha)
    }
}
