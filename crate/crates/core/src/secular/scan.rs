use rayon::prelude::*;
use serde::Serialize;

use super::{generalized_eigenvalues, SecularSystem};
use crate::{Error, Result};

/// A root of `E ↦ det(H(E) - E S(E))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularRoot {
    pub energy: f64,
    /// Number of pencil eigenvalues crossing `E` at this root.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ScanResult {
    pub roots: Vec<SecularRoot>,
    /// Intervals excluded because a radial function vanishes at a sphere
    /// radius somewhere inside them.
    pub excluded: Vec<(f64, f64)>,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
struct Sample {
    energy: f64,
    /// `#{λ_i(E) < E}`; the sign of the determinant is `(-1)^count`.
    count: Option<usize>,
    radial: Vec<f64>,
}

impl Sample {
    fn pole(&self) -> bool {
        self.count.is_none()
    }
}

fn sample<F>(builder: &F, energy: f64) -> Result<Sample>
where
    F: Fn(f64) -> Result<SecularSystem> + Sync,
{
    match builder(energy) {
        Ok(sys) => {
            let ev = generalized_eigenvalues(&sys)?;
            Ok(Sample {
                energy,
                count: Some(ev.iter().filter(|&&l| l < energy).count()),
                radial: sys.boundary_radial,
            })
        }
        Err(Error::RadialNodeAtR { .. }) => Ok(Sample {
            energy,
            count: None,
            radial: Vec::new(),
        }),
        Err(e) => Err(e),
    }
}

fn radial_sign_change(a: &Sample, b: &Sample) -> bool {
    if a.pole() || b.pole() {
        return true;
    }
    a.radial.len() == b.radial.len() && a.radial.iter().zip(&b.radial).any(|(x, y)| x * y <= 0.0)
}

/// Default bisection width.
pub const ROOT_TOL: f64 = 1e-8;

/// [`scan_nonlinear_secular_with_tol`] with width [`ROOT_TOL`].
pub fn scan_nonlinear_secular<F>(builder: F, range: (f64, f64), n_scan: usize) -> Result<ScanResult>
where
    F: Fn(f64) -> Result<SecularSystem> + Sync,
{
    scan_nonlinear_secular_with_tol(builder, range, n_scan, ROOT_TOL)
}

/// Roots of `E ↦ det(H(E) - E S(E))` on `range`.
///
/// The determinant sign is tracked through `N(E) = #{λ_i(E) < E}`, the
/// number of generalized eigenvalues below `E`, which also sees roots of
/// even multiplicity. Grid cells where `N` changes are bisected down to
/// `tol`; cells where some `ρ_l(R)` changes sign are bisected too, and the
/// final sub-interval around the node is reported as excluded rather than
/// as a root.
pub fn scan_nonlinear_secular_with_tol<F>(
    builder: F,
    range: (f64, f64),
    n_scan: usize,
    tol: f64,
) -> Result<ScanResult>
where
    F: Fn(f64) -> Result<SecularSystem> + Sync,
{
    let (lo, hi) = range;
    if !(lo < hi) || n_scan < 1 || !(tol > 0.0) {
        return Err(Error::InvalidInput(
            "scan needs lo < hi, n_scan >= 1 and tol > 0".into(),
        ));
    }
    let grid: Vec<f64> = (0..=n_scan)
        .map(|i| lo + (hi - lo) * i as f64 / n_scan as f64)
        .collect();
    let samples: Vec<Sample> = grid
        .par_iter()
        .map(|&e| sample(&builder, e))
        .collect::<Result<_>>()?;
    let mut out = ScanResult {
        evaluations: samples.len(),
        ..Default::default()
    };
    for w in samples.windows(2) {
        refine(&builder, &w[0], &w[1], tol, &mut out)?;
    }
    merge_excluded(&mut out.excluded);
    Ok(out)
}

fn refine<F>(builder: &F, a: &Sample, b: &Sample, tol: f64, out: &mut ScanResult) -> Result<()>
where
    F: Fn(f64) -> Result<SecularSystem> + Sync,
{
    let node = radial_sign_change(a, b);
    if !node && a.count == b.count {
        return Ok(());
    }
    if b.energy - a.energy <= tol {
        if node {
            out.excluded.push((a.energy, b.energy));
        } else {
            let (ca, cb) = (a.count.unwrap(), b.count.unwrap());
            out.roots.push(SecularRoot {
                energy: 0.5 * (a.energy + b.energy),
                multiplicity: ca.abs_diff(cb),
            });
        }
        return Ok(());
    }
    let mid = sample(builder, 0.5 * (a.energy + b.energy))?;
    out.evaluations += 1;
    refine(builder, a, &mid, tol, out)?;
    refine(builder, &mid, b, tol, out)
}

fn merge_excluded(v: &mut Vec<(f64, f64)>) {
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for &(a, b) in v.iter() {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    *v = merged;
}
