//! Scalar special functions and sphere quadrature.
//!
//! Spherical harmonics are orthonormal on the unit sphere and carry the
//! Condon–Shortley phase. Coefficient vectors over `(l, m)` pairs are stored
//! flat, indexed by [`lm_index`].

mod bessel;
mod harmonics;
mod quadrature;

pub use bessel::{
    modified_bessel_ratio, modified_spherical_bessel_i, modified_spherical_bessel_i_array,
    spherical_bessel_j, spherical_bessel_j_array, spherical_bessel_j_derivative, ScaledValue,
};
pub use harmonics::{
    lm_count, lm_index, lm_pairs, spherical_harmonic, spherical_harmonic_gradient,
    spherical_harmonics_all,
};
pub use quadrature::{gauss_legendre, gauss_legendre_interval, SphereQuadrature};
