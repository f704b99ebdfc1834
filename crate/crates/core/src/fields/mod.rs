//! Forms and metrics sampled on flat complex tori, with spectral calculus,
//! L² pairings and formal adjoints.

mod calculus;
mod field;
pub mod generators;
mod geometry;
mod integrate;

pub use calculus::{d, d_mixed, dbar, low_pass, partial};
pub use field::{hermitian_coefficients, FormField, MetricField, MixedField};
pub use geometry::{TorusGeometry, MAX_NODES};
pub use integrate::{
    adjoint_dbar, adjoint_partial, hodge_star_field, integrate_top, l2_inner, l2_norm, l2_norm_sqr,
    lambda_field, mixed_l2_norm,
};
