//! Augmented-plane-wave secular equations with boundary-discontinuity
//! certificates.
//!
//! The crate builds discontinuous piecewise bases on muffin-tin geometries
//! (plane waves between the spheres, matched partial-wave expansions inside
//! them), solves the resulting secular equation, and measures how far the
//! trial functions are from being continuous through `H^{3/2}` norms of
//! their boundary jumps. Those jump norms control how far a secular
//! eigenvalue can fall below the true eigenvalue, which is what the
//! [`certificate`] module packages up.
//!
//! Units: energies and lengths are such that the Hamiltonian is `-Δ + V`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod apw_basis;
pub mod certificate;
mod error;
pub mod experiments;
pub mod geometry;
pub mod orthonorm;
pub mod radial;
pub mod secular;
pub mod sobolev;
pub mod special_fn;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use apw_basis::{ApwFunction, BoundaryJump};
pub use certificate::{CProvenance, Certificate};
pub use geometry::{MuffinTinGeometry, Sphere, Vec3};
pub use radial::{RadialFunction, RadialPotential, RadialSolution};
pub use secular::{Eigenpairs, PotentialSpec, SecularSystem};
pub use sobolev::{BallFunction, SphereFunction};
