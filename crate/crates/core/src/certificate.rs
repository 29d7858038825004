//! Jump penalties for secular eigenvalues of discontinuous bases.
//!
//! For `M` trial functions whose boundary jumps have `H^{3/2}` norms summing
//! to `s_i` per function, the `m`-th secular eigenvalue satisfies
//! `Ẽ_m >= E_m - C M^{5/2} Σ_i s_i` once `M Σ_i s_i` is small enough. The
//! constant `C` and the smallness threshold are not known in closed form;
//! certificates therefore carry `C` together with where it came from.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apw_basis::BoundaryJump;
use crate::experiments::{run_well_sweep, SweepRow, WELL_TOL};
use crate::radial::find_bound_state;
use crate::secular::Eigenpairs;
use crate::sobolev::boundary_sobolev_norm;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CProvenance {
    /// Least constant consistent with a reference computation.
    Fitted,
    UserSupplied,
}

/// `penalty = C M^{5/2} Σ s_i` and the smallness statistic `M Σ s_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    pub penalty: f64,
    pub smallness: f64,
}

pub fn penalty(m: usize, jump_sums: &[f64], c: f64) -> Result<Penalty> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    if let Some(s) = jump_sums.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "jump sums must be finite and >= 0, got {s}"
        )));
    }
    let total: f64 = jump_sums.iter().sum();
    Ok(Penalty {
        penalty: c * (m as f64).powf(2.5) * total,
        smallness: m as f64 * total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "tilde_E")]
    pub tilde_e: Vec<f64>,
    pub jump_sums: Vec<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_provenance")]
    pub c_provenance: CProvenance,
    pub penalty: f64,
    /// `M Σ s_i`, to be compared with the admissibility threshold.
    pub smallness_statistic: f64,
    /// `Ẽ_m + penalty`, an upper bound for `E_m` under the smallness
    /// condition.
    pub upper_bounds: Vec<f64>,
}

impl Certificate {
    pub fn new(
        tilde_e: Vec<f64>,
        jump_sums: Vec<f64>,
        c: f64,
        c_provenance: CProvenance,
    ) -> Result<Self> {
        let m = jump_sums.len();
        let p = penalty(m, &jump_sums, c)?;
        let upper_bounds = tilde_e.iter().map(|e| e + p.penalty).collect();
        Ok(Self {
            m,
            tilde_e,
            jump_sums,
            c,
            c_provenance,
            penalty: p.penalty,
            smallness_statistic: p.smallness,
            upper_bounds,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

/// Certificate for the first `m0` eigenfunctions `φ^m = Σ_i c_i^m u^i`.
///
/// `jumps[i]` holds the per-sphere jumps of basis function `u^i`, all
/// expanded to the same degree. The jumps of `φ^m` follow by linearity, and
/// only `φ^1..φ^{m0}` enter, so `M = m0`.
pub fn a_posteriori(
    eig: &Eigenpairs,
    jumps: &[Vec<BoundaryJump>],
    m0: usize,
    c: f64,
    c_provenance: CProvenance,
) -> Result<Certificate> {
    let n = eig.vectors.nrows();
    if jumps.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} jump sets for {n} basis functions",
            jumps.len()
        )));
    }
    if m0 == 0 || m0 > eig.vectors.ncols() || m0 > eig.values.len() {
        return Err(Error::InvalidInput(format!("m0 = {m0} out of range")));
    }
    let n_spheres = jumps.first().map_or(0, |j| j.len());
    if jumps.iter().any(|j| j.len() != n_spheres) {
        return Err(Error::InvalidInput(
            "basis functions see different numbers of spheres".into(),
        ));
    }
    let jump_sums = (0..m0)
        .map(|m| {
            let weights: Vec<Complex64> = eig.vectors.column(m).iter().copied().collect();
            (0..n_spheres)
                .map(|alpha| {
                    let per: Vec<&BoundaryJump> = jumps.iter().map(|j| &j[alpha]).collect();
                    let g = BoundaryJump::combine(&per, &weights);
                    boundary_sobolev_norm(&g.to_sphere_function(), 1.5)
                })
                .sum()
        })
        .collect();
    Certificate::new(eig.values[..m0].to_vec(), jump_sums, c, c_provenance)
}

/// Outcome of comparing two Hermitian matrices through Weyl's inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCheck {
    /// `max_i |λ_i(H) - λ_i(Ĥ)|`, eigenvalues ascending.
    pub max_gap: f64,
    /// `‖H - Ĥ‖₂`.
    pub norm2: f64,
    /// `√M ‖H - Ĥ‖_∞`.
    pub norm_inf_bound: f64,
    /// `min(norm2 - max_gap, norm_inf_bound - norm2)`.
    pub slack: f64,
    /// Both inequalities hold up to rounding.
    pub holds: bool,
}

fn sorted_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Checks `|Ẽ_i - Ê_i| <= ‖H - Ĥ‖₂ <= √M ‖H - Ĥ‖_∞` for all `i`.
///
/// Both sides are computed in floating point, so the comparison allows a
/// rounding margin of `64 ε_mach (‖H‖₂ + ‖Ĥ‖₂)`.
pub fn perturbation_chain_check(
    h: &DMatrix<Complex64>,
    h_hat: &DMatrix<Complex64>,
) -> Result<ChainCheck> {
    if !h.is_square() || h.shape() != h_hat.shape() || h.nrows() == 0 {
        return Err(Error::InvalidInput(
            "H and Ĥ must be square of equal size".into(),
        ));
    }
    let m = h.nrows();
    let herm = |a: &DMatrix<Complex64>| (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let (h, h_hat) = (herm(h), herm(h_hat));
    let e = sorted_eigenvalues(&h);
    let e_hat = sorted_eigenvalues(&h_hat);
    let max_gap = e
        .iter()
        .zip(&e_hat)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let diff = &h - &h_hat;
    let norm2 = SymmetricEigen::new(diff.clone())
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    let row_sum = diff
        .row_iter()
        .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let norm_inf_bound = (m as f64).sqrt() * row_sum;
    let spectral = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let margin = 64.0 * f64::EPSILON * (spectral(&e) + spectral(&e_hat));
    let slack = (norm2 - max_gap).min(norm_inf_bound - norm2);
    Ok(ChainCheck {
        max_gap,
        norm2,
        norm_inf_bound,
        slack,
        holds: max_gap <= norm2 + margin && norm2 <= norm_inf_bound + margin,
    })
}

/// Reference problem for [`verify_bound_empirical`].
#[derive(Debug, Clone, PartialEq)]
pub enum BoundProblem {
    /// The s-wave state of the spherical well `-V0` on `|x| < a`, with the
    /// sweep of discontinuous trial functions.
    Well { v0: f64, a: f64 },
    /// Precomputed `(jump_h32, Ẽ)` pairs for one eigenvalue, checked against
    /// `reference` when it is known.
    Custom {
        reference: Option<f64>,
        points: Vec<(f64, f64)>,
        m: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalBound {
    pub reference: f64,
    pub m: usize,
    /// Least `C` with `Ẽ >= E - C M^{5/2} ‖jump‖` at every point.
    pub c_fit: f64,
    /// `(jump_h32, Ẽ, E - Ẽ)` per point.
    pub points: Vec<(f64, f64, f64)>,
    /// Largest `(E - Ẽ) / ‖jump‖` over points with a nonzero jump.
    pub max_deficit_ratio: f64,
    /// The well sweep rows, for [`BoundProblem::Well`].
    pub sweep: Option<Vec<SweepRow>>,
}

pub fn verify_bound_empirical(problem: &BoundProblem, gammas: &[f64]) -> Result<EmpiricalBound> {
    let (reference, m, points, sweep) = match problem {
        BoundProblem::Well { v0, a } => {
            let e1 = find_bound_state(*v0, *a, WELL_TOL)?;
            let rows = run_well_sweep(*v0, *a, gammas)?;
            let pts = rows
                .iter()
                .map(|r| (r.jump_h32, r.tilde_e1))
                .collect::<Vec<_>>();
            (e1, 1, pts, Some(rows))
        }
        BoundProblem::Custom {
            reference,
            points,
            m,
        } => {
            let r = reference.ok_or_else(|| {
                Error::ReferenceUnavailable("no reference eigenvalue given".into())
            })?;
            (r, *m, points.clone(), None)
        }
    };
    let scale = (m as f64).powf(2.5);
    let mut c_fit: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut out = Vec::with_capacity(points.len());
    for &(jump, tilde) in &points {
        let deficit = reference - tilde;
        if jump > 0.0 {
            c_fit = c_fit.max(deficit / (scale * jump));
            max_ratio = max_ratio.max(deficit / jump);
        }
        out.push((jump, tilde, deficit));
    }
    Ok(EmpiricalBound {
        reference,
        m,
        c_fit,
        points: out,
        max_deficit_ratio: max_ratio,
        sweep,
    })
}
