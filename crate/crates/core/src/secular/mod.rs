//! Overlap and Hamiltonian-form matrices of APW bases, the generalized
//! eigenproblem, root tracking for energy-dependent bases, and two reference
//! problems with known spectra.
//!
//! Inner products are conjugate-linear in the first slot:
//! `s_ij = ⟨u^i, u^j⟩`, `h_ij = Σ_α ⟨∇u^i, ∇u^j⟩_{Ω_α} + ⟨u^i, V u^j⟩_{Ω_α}`.
//! Gradients are taken region by region, so no boundary terms appear.

mod assemble;
mod reference;
mod scan;
mod solve;

pub use assemble::{apw_basis_at, assemble, interstitial_overlap, PotentialSpec, SecularSystem};
pub use reference::{
    empty_lattice_bands, interval_laplacian_demo, interval_ritz_values, BoundaryCondition,
};
pub use scan::{
    scan_nonlinear_secular, scan_nonlinear_secular_with_tol, ScanResult, SecularRoot, ROOT_TOL,
};
pub use solve::{generalized_eigenvalues, solve_generalized, Eigenpairs};

/// Radial Gauss–Legendre points used for in-sphere integrals.
pub const RADIAL_QUADRATURE_POINTS: usize = 400;
