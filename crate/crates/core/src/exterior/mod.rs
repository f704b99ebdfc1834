//! Pointwise complex exterior algebra on `Λ^{p,q}` of a Hermitian vector space.
//!
//! Forms are stored relative to the coordinate coframe `dz_I ∧ dz̄_J`. Metric
//! operations go through a [`Frame`]: the Cholesky factor `h = A A^†` gives the
//! unitary coframe `φ^a = Σ_j A_{ja} dz_j`, in which `{φ^I ∧ φ̄^J}` is declared
//! orthonormal, `ω = i Σ φ^a ∧ φ̄^a` and `dV_ω = ω^n / n!`.

mod basis;
mod form;
mod metric;
mod vector;

pub use basis::{binom, merge_sign, rank, subset, wedge_sign, MultiIndexPair};
pub use form::{wedge, PointForm, MAX_COEFFS};
pub use metric::{
    compound, decompose_on, hodge_star, inner, inner_on, lambda, lambda_on, lefschetz,
    lefschetz_decompose, omega_on, omega_power, star_on, volume_sign, wedge_adjoint,
    wedge_adjoint_on, Decomposition, Frame, HermitianMatrix,
};
pub use vector::{contract, contract_bar, xi_bar_of_10, xi_of_01, VectorField01, VectorField10};

