//! Numerical toolkit for locally conformally Kähler (lcK) energy functionals
//! on flat complex tori.
//!
//! The crate is `no_std` (with `alloc`) and splits into:
//!
//! * [`exterior`]: exact pointwise algebra on `Λ^{p,q}` of a Hermitian vector
//!   space (wedge, contraction, `L_ω`, `Λ_ω`, `⋆_ω`, Lefschetz decomposition);
//! * [`fields`]: grids of forms and metrics on `C^n / (2πZ)^{2n}` with spectral
//!   `∂`, `∂̄`, `d`, L² pairings and formal adjoints;
//! * [`lck`]: Lee forms, the functionals `L`, `𝓛`, `L̃_ρ` and metric
//!   classification;
//! * [`variation`]: analytic first variations, Euler–Lagrange residuals and the
//!   finite-difference oracle;
//! * [`flow`]: Armijo gradient descent over the Hermitian cone.
//!
//! Complex dimension is limited to `n ≤ 4` ([`MAX_N`]) so that every pointwise
//! form fits in a fixed inline buffer.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![warn(missing_docs)]

extern crate alloc;

mod error;
pub mod exterior;
pub mod fields;
pub mod flow;
pub mod lck;
pub mod linalg;
mod sum;
pub mod variation;

#[cfg(feature = "fault-injection")]
pub mod faults;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Largest supported complex dimension.
pub const MAX_N: usize = 4;
