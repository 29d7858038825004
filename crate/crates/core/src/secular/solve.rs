use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::SecularSystem;
use crate::{Error, Result};

/// Solutions of `H c = Ẽ S c`, ascending, with `S`-orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Column `m` holds `c^m`.
    pub vectors: DMatrix<Complex64>,
}

/// Relative threshold below which the overlap counts as singular.
pub const OVERLAP_RTOL: f64 = 1e-10;

fn reduce(sys: &SecularSystem) -> Result<(Cholesky<Complex64, nalgebra::Dyn>, DMatrix<Complex64>)> {
    let n = sys.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty secular system".into()));
    }
    let se = SymmetricEigen::new(sys.s.clone());
    let largest = se
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let smallest = se.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(largest > 0.0) || smallest <= OVERLAP_RTOL * largest {
        return Err(Error::SingularOverlap {
            eigenvalue: smallest,
            largest,
        });
    }
    let chol = Cholesky::new(sys.s.clone()).ok_or(Error::SingularOverlap {
        eigenvalue: smallest,
        largest,
    })?;
    // L^{-1} H L^{-†}
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&sys.h)
        .expect("triangular factor is nonsingular");
    let c = l
        .solve_lower_triangular(&x.adjoint())
        .expect("triangular factor is nonsingular")
        .adjoint();
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    Ok((chol, c))
}

/// Generalized eigenpairs through the Cholesky factor of `S`.
pub fn solve_generalized(sys: &SecularSystem) -> Result<Eigenpairs> {
    let (chol, c) = reduce(sys)?;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(sys.dim(), sys.dim(), |r, k| eig.eigenvectors[(r, order[k])]);
    let vectors = chol
        .l()
        .adjoint()
        .solve_upper_triangular(&y)
        .expect("triangular factor is nonsingular");
    Ok(Eigenpairs { values, vectors })
}

/// Ascending generalized eigenvalues only.
pub fn generalized_eigenvalues(sys: &SecularSystem) -> Result<Vec<f64>> {
    let (_, c) = reduce(sys)?;
    let mut v: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}
