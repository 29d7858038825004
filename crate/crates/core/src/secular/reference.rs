use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{generalized_eigenvalues, SecularSystem};
use crate::geometry::{MuffinTinGeometry, Vec3};
use crate::special_fn::gauss_legendre_interval;
use crate::{Error, Result};

/// Sorted `|k + G|²`, the spectrum of `-Δ` with Bloch vector `k` restricted
/// to the plane waves `G`.
pub fn empty_lattice_bands(
    k: &Vec3,
    g_list: &[Vec3],
    cell: &MuffinTinGeometry,
) -> Result<Vec<f64>> {
    let mut e = g_list
        .iter()
        .map(|g| cell.reciprocal_indices(g).map(|_| (k + g).norm_squared()))
        .collect::<Result<Vec<f64>>>()?;
    e.sort_by(f64::total_cmp);
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Form domain `H¹₀(0, π)`, basis `sin(jx)`, `j = 1..=n`.
    Dirichlet,
    /// Form domain `H¹(0, π)`, basis `cos(jx)`, `j = 0..n`.
    Neumann,
}

/// Ritz values of `q(u) = ∫_0^π |u'|²` over the span of `n` trial functions
/// given as `j ↦ (u_j(x), u_j'(x))`. Integrals by Gauss–Legendre quadrature.
pub fn interval_ritz_values<F>(n: usize, trial: F) -> Result<Vec<f64>>
where
    F: Fn(usize, f64) -> (f64, f64),
{
    let (x, w) = gauss_legendre_interval(4 * n + 64, 0.0, PI);
    let vals: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|j| x.iter().map(|&xi| trial(j, xi)).collect())
        .collect();
    let mut h = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (mut hij, mut sij) = (0.0, 0.0);
            for (q, wq) in w.iter().enumerate() {
                hij += wq * vals[i][q].1 * vals[j][q].1;
                sij += wq * vals[i][q].0 * vals[j][q].0;
            }
            h[(i, j)] = Complex64::new(hij, 0.0);
            s[(i, j)] = Complex64::new(sij, 0.0);
        }
    }
    generalized_eigenvalues(&SecularSystem::new(h, s)?)
}

/// Lowest Ritz value of `-d²/dx²` on `(0, π)` with a trigonometric basis of
/// `n_modes` functions lying in the form domain of `bc`.
pub fn interval_laplacian_demo(bc: BoundaryCondition, n_modes: usize) -> Result<f64> {
    if n_modes < 2 {
        return Err(Error::InvalidInput(
            "interval demo needs at least two modes".into(),
        ));
    }
    let values = match bc {
        BoundaryCondition::Dirichlet => interval_ritz_values(n_modes, |j, x| {
            let k = (j + 1) as f64;
            ((k * x).sin(), k * (k * x).cos())
        })?,
        BoundaryCondition::Neumann => interval_ritz_values(n_modes, |j, x| {
            let k = j as f64;
            ((k * x).cos(), -k * (k * x).sin())
        })?,
    };
    Ok(values[0])
}
