//! Sobolev norms of boundary data on spheres, extensions into balls, and the
//! jump-removal constructions built from them.
//!
//! `H^s` norms on a sphere of radius `R` use the weights
//! `(1 + l(l+1)/R²)^s` of `1 - Δ_S`. Any equivalent norm would do; this one
//! is diagonal in spherical harmonics.

mod ball;
mod layered;
mod sphere_fn;
mod surrogate;

pub use ball::{
    h2_bound_constant, orthocomplement_extension, trace_right_inverse_z1, BallFunction, BallMode,
    H2BoundConstant, RadialProfile,
};
pub use layered::{layered_decomposition, reassemble, HoleFilled, RadialPoly};
pub use sphere_fn::{boundary_sobolev_norm, SphereFunction};
pub use surrogate::{
    continuous_surrogate, jump_seminorm, PiecewiseFunction, PiecewiseTuple, Surrogate,
};
