//! Schmidt orthonormalization of a nearly orthonormal family given through
//! its Gram matrix, with the explicit bound on `‖B - I‖_∞`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// `ε = G - I` for a Gram matrix `G_ij = ⟨Ψ^i, Ψ^j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPerturbation {
    pub eps: DMatrix<Complex64>,
    /// `‖ε‖₁`, the largest absolute column sum.
    pub norm1: f64,
    /// `max_i |ε_ii|`.
    pub eps_max: f64,
}

impl GramPerturbation {
    /// `2‖ε‖₁ + ε_max`.
    pub fn smallness(&self) -> f64 {
        2.0 * self.norm1 + self.eps_max
    }

    /// `(2‖ε‖₁ + ε_max) / (1 - 2‖ε‖₁ - ε_max)`, or `None` when the
    /// smallness condition `2‖ε‖₁ + ε_max < 1` fails.
    pub fn bound(&self) -> Option<f64> {
        let s = self.smallness();
        (s < 1.0).then(|| s / (1.0 - s))
    }
}

/// Largest absolute column sum.
pub fn norm_1(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest absolute row sum.
pub fn norm_inf(a: &DMatrix<Complex64>) -> f64 {
    a.row_iter()
        .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_square(gram: &DMatrix<Complex64>) -> Result<()> {
    if !gram.is_square() || gram.nrows() == 0 {
        return Err(Error::InvalidInput(
            "Gram matrix must be square and non-empty".into(),
        ));
    }
    Ok(())
}

pub fn gram_perturbation(gram: &DMatrix<Complex64>) -> Result<GramPerturbation> {
    check_square(gram)?;
    let n = gram.nrows();
    let eps = gram - DMatrix::<Complex64>::identity(n, n);
    let norm1 = norm_1(&eps);
    let eps_max = eps.diagonal().iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(GramPerturbation {
        eps,
        norm1,
        eps_max,
    })
}

/// Result of [`schmidt_matrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Schmidt {
    /// Lower triangular with positive diagonal; `B G B† = I`.
    pub b: DMatrix<Complex64>,
    pub perturbation: GramPerturbation,
    /// `‖B - I‖_∞`.
    pub deviation: f64,
    /// The bound, when the smallness condition holds.
    pub bound: Option<f64>,
    /// `deviation < bound` (or both zero, for `G = I`); `None` when no bound
    /// applies.
    pub bound_ok: Option<bool>,
}

/// Schmidt orthonormalization in Gram-matrix form.
///
/// Step `i` subtracts the projection of `Ψ^i` onto `span{Ψ^1..Ψ^{i-1}}`,
/// whose coefficients solve the leading `(i-1)×(i-1)` Gram system, then
/// scales by the inverse norm of what is left. The rows of `B` are the
/// coefficients of the orthonormal functions, so `Ψ̂ = B Ψ`.
pub fn schmidt_matrix(gram: &DMatrix<Complex64>) -> Result<Schmidt> {
    check_square(gram)?;
    let n = gram.nrows();
    let herm_err = (gram - gram.adjoint())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let scale = gram.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if herm_err > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "Gram matrix is not Hermitian (deviation {herm_err:e})"
        )));
    }
    let perturbation = gram_perturbation(gram)?;
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        // Ψ̃^i = Ψ^i - Σ_{j<i} x_j Ψ^j with Σ_j x_j G_jk = G_ik for k < i,
        // i.e. A_{i-1}ᵀ x = G_{i,<i}; by Hermiticity conj(x) = A_{i-1}^{-1} G_{<i,i}.
        let x: Vec<Complex64> = if i == 0 {
            Vec::new()
        } else {
            let a = gram.view((0, 0), (i, i)).into_owned();
            let rhs = gram.view((0, i), (i, 1)).into_owned();
            // every earlier pivot was positive, so this only fails by rounding
            let chol = a.cholesky().ok_or(Error::NotPositiveDefinite {
                index: i - 1,
                pivot: 0.0,
            })?;
            chol.solve(&rhs).iter().map(|v| v.conj()).collect()
        };
        // ‖Ψ̃^i‖² = G_ii - Σ_j x_j G_ji
        let mut norm2 = gram[(i, i)];
        for (j, xj) in x.iter().enumerate() {
            norm2 -= xj * gram[(j, i)];
        }
        let pivot = norm2.re;
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { index: i, pivot });
        }
        let f = 1.0 / pivot.sqrt();
        for (j, xj) in x.iter().enumerate() {
            b[(i, j)] = -xj * f;
        }
        b[(i, i)] = Complex64::new(f, 0.0);
    }
    let deviation = norm_inf(&(&b - DMatrix::<Complex64>::identity(n, n)));
    let bound = perturbation.bound();
    Ok(Schmidt {
        b,
        deviation,
        bound_ok: bound.map(|bd| deviation < bd || (deviation == 0.0 && bd == 0.0)),
        bound,
        perturbation,
    })
}
