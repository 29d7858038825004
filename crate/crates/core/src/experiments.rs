//! Scripted numerical studies: the discontinuous trial function for the
//! spherical well, APW convergence in `l_max`, and the interval example
//! showing why the form domain matters.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apw_basis::BoundaryJump;
use crate::certificate::{a_posteriori, CProvenance, Certificate};
use crate::geometry::{MuffinTinGeometry, Vec3};
use crate::radial::{find_bound_state, well_inner_norm, well_outer_norm, well_wavenumbers};
use crate::secular::{
    apw_basis_at, assemble, interval_laplacian_demo, interval_ritz_values,
    scan_nonlinear_secular_with_tol, solve_generalized, BoundaryCondition, PotentialSpec,
};
use crate::sobolev::boundary_sobolev_norm;
use crate::{Error, Result};

/// Bisection width used for the well's reference eigenvalue.
pub const WELL_TOL: f64 = 1e-13;

/// One point of the well sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Sweep parameter `Γ = √(4π) (χ_in(a) - χ_out(a))`.
    pub gamma: f64,
    #[serde(rename = "tilde_E1")]
    pub tilde_e1: f64,
    /// `H^{3/2}` norm of the jump of `u` on `|x| = a`. For a constant jump it
    /// equals the `L²` norm, `Γ / √(4π)`.
    pub jump_h32: f64,
    /// `E₁ - Ẽ₁`.
    pub deficit: f64,
}

/// Trial function `u = χ(r) / (√(4π) r)` with `χ = A sin(αr)` inside,
/// `C e^{-βr}` outside, `α, β` taken from the bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellTrial {
    pub amp_in: f64,
    pub amp_out: f64,
    /// Broken quadratic form `Σ_regions ∫ |∇u|² + V|u|²`.
    pub energy: f64,
}

/// Trial state with unit norm and `√(4π) (A sin αa - C e^{-βa}) = gamma`,
/// on the branch that increases `A` for `gamma > 0`. `gamma` may be
/// negative.
pub fn well_trial(v0: f64, a: f64, e1: f64, gamma: f64) -> Result<WellTrial> {
    let (alpha, beta) = well_wavenumbers(v0, e1);
    let ni = well_inner_norm(alpha, a);
    let no = well_outer_norm(beta, a);
    let s = (alpha * a).sin();
    let e = (-beta * a).exp();
    let d = gamma / (4.0 * PI).sqrt();
    // A² (Ni + s² No/e²) - 2 A s d No/e² + d² No/e² - 1 = 0, with C = (A s - d)/e
    let k = no / (e * e);
    let qa = ni + s * s * k;
    let qb = -2.0 * s * d * k;
    let qc = d * d * k - 1.0;
    let disc = qb * qb - 4.0 * qa * qc;
    if !(disc >= 0.0) {
        return Err(Error::NoRealSolution { gamma });
    }
    let amp_in = (-qb + disc.sqrt()) / (2.0 * qa);
    let amp_out = (amp_in * s - d) / e;
    let (chi_in, chi_out) = (amp_in * s, amp_out * e);
    let kinetic_in =
        amp_in * amp_in * alpha * alpha * (a / 2.0 + (2.0 * alpha * a).sin() / (4.0 * alpha));
    let kinetic_out = amp_out * amp_out * beta * beta * no;
    // ∫|∇(χ/r)|² r² dr = ∫χ'² ∓ χ²/r on each side of the interface
    let interface = (chi_out * chi_out - chi_in * chi_in) / a;
    let energy = kinetic_in - v0 * amp_in * amp_in * ni + kinetic_out + interface;
    Ok(WellTrial {
        amp_in,
        amp_out,
        energy,
    })
}

/// `[0, 0.3]` in steps of `0.01`.
pub fn default_sweep_grid() -> Vec<f64> {
    (0..=30).map(|i| i as f64 / 100.0).collect()
}

/// Ẽ₁ of the discontinuous trial function for each `gamma >= 0`.
pub fn run_well_sweep(v0: f64, a: f64, gammas: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "sweep amplitudes must be finite and >= 0, got {g}"
        )));
    }
    let e1 = find_bound_state(v0, a, WELL_TOL)?;
    gammas
        .par_iter()
        .map(|&gamma| {
            let t = well_trial(v0, a, e1, gamma)?;
            Ok(SweepRow {
                gamma,
                tilde_e1: t.energy,
                jump_h32: gamma / (4.0 * PI).sqrt(),
                deficit: e1 - t.energy,
            })
        })
        .collect()
}

/// `dẼ₁/dΓ` at `Γ = 0` by a central difference of width `h`.
pub fn well_sweep_slope(v0: f64, a: f64, h: f64) -> Result<f64> {
    let e1 = find_bound_state(v0, a, WELL_TOL)?;
    let plus = well_trial(v0, a, e1, h)?.energy;
    let minus = well_trial(v0, a, e1, -h)?.energy;
    Ok((plus - minus) / (2.0 * h))
}

/// Least-squares quadratic `c0 + c1 x + c2 x²`, returned as `[c0, c1, c2]`.
pub fn quadratic_fit(x: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidInput(
            "quadratic fit needs at least three points".into(),
        ));
    }
    let a = nalgebra::DMatrix::from_fn(x.len(), 3, |i, j| x[i].powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok([sol[0], sol[1], sol[2]])
}

/// Writes rows with header `gamma,tilde_E1,jump_h32,deficit`. Floats use
/// shortest round-trip formatting.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    wr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn read_sweep_csv<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(|e| Error::InvalidInput(e.to_string())))
        .collect()
}

/// Plot-ready `gamma,tilde_E1` pairs.
pub fn write_plot_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::InvalidInput(e.to_string());
    wr.write_record(["gamma", "tilde_E1"]).map_err(io)?;
    for r in rows {
        wr.write_record([r.gamma.to_string(), r.tilde_e1.to_string()])
            .map_err(io)?;
    }
    wr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Setup of an APW convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceSetup {
    pub geometry: Arc<MuffinTinGeometry>,
    pub potential: PotentialSpec,
    pub k: Vec3,
    pub g_count: usize,
    pub l_max_list: Vec<usize>,
    /// Energy window scanned for the lowest root.
    pub window: (f64, f64),
    pub n_scan: usize,
    /// Bisection width for the roots.
    pub root_tol: f64,
    /// Constant used in the certificates.
    pub c: f64,
    pub c_provenance: CProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub l_max: usize,
    /// Lowest secular root in the window, if any.
    pub lowest_root: Option<f64>,
    /// `Σ_α ‖jump_α‖_{H^{3/2}}` of the `S`-normalized root eigenvector.
    pub jump_h32_total: Option<f64>,
    pub certificate: Option<Certificate>,
    /// Secular evaluations spent by the scan.
    pub evaluations: usize,
}

/// Lowest root, jump norm of its eigenfunction and its one-function
/// certificate, for each `l_max`.
pub fn run_apw_convergence(setup: &ConvergenceSetup) -> Result<Vec<ConvergenceRow>> {
    let g = setup.geometry.shortest_g_vectors(&setup.k, setup.g_count);
    setup
        .l_max_list
        .iter()
        .map(|&l_max| {
            let build = |e: f64| {
                let basis = apw_basis_at(
                    &setup.geometry,
                    &setup.potential,
                    &setup.k,
                    &g,
                    e,
                    l_max,
                    crate::apw_basis::DEFAULT_RADIAL_GRID,
                )?;
                assemble(&basis, &setup.potential)
            };
            let scan =
                scan_nonlinear_secular_with_tol(build, setup.window, setup.n_scan, setup.root_tol)?;
            let Some(root) = scan.roots.first() else {
                return Ok(ConvergenceRow {
                    l_max,
                    lowest_root: None,
                    jump_h32_total: None,
                    certificate: None,
                    evaluations: scan.evaluations,
                });
            };
            let e = root.energy;
            let basis = apw_basis_at(
                &setup.geometry,
                &setup.potential,
                &setup.k,
                &g,
                e,
                l_max,
                crate::apw_basis::DEFAULT_RADIAL_GRID,
            )?;
            let sys = assemble(&basis, &setup.potential)?;
            let mut eig = solve_generalized(&sys)?;
            // the pencil eigenvalue that crosses E at the root
            let idx = eig
                .values
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            eig.values = vec![e];
            eig.vectors = eig.vectors.columns(idx, 1).into_owned();
            let jumps: Vec<Vec<BoundaryJump>> = basis.iter().map(|f| f.boundary_jumps()).collect();
            let cert = a_posteriori(&eig, &jumps, 1, setup.c, setup.c_provenance)?;
            Ok(ConvergenceRow {
                l_max,
                lowest_root: Some(e),
                jump_h32_total: Some(cert.jump_sums[0]),
                certificate: Some(cert),
                evaluations: scan.evaluations,
            })
        })
        .collect()
}

/// Lowest Ritz values of `-d²/dx²` on `(0, π)` in both form domains, and
/// the Rayleigh quotient of a constant, which lies outside the Dirichlet
/// form domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalDemo {
    pub dirichlet: f64,
    pub neumann: f64,
    pub constant_trial: f64,
    /// Whether the constant trial's quotient is at least the Dirichlet
    /// value; `false` means it is not an upper bound.
    pub constant_trial_is_upper_bound: bool,
}

pub fn run_interval_demo() -> Result<IntervalDemo> {
    let dirichlet = interval_laplacian_demo(BoundaryCondition::Dirichlet, 8)?;
    let neumann = interval_laplacian_demo(BoundaryCondition::Neumann, 8)?;
    let constant_trial = interval_ritz_values(1, |_, _| (1.0, 0.0))?[0];
    Ok(IntervalDemo {
        dirichlet,
        neumann,
        constant_trial,
        constant_trial_is_upper_bound: constant_trial >= dirichlet,
    })
}

/// `Σ_α ‖g_α‖_{H^{3/2}}` over a set of per-sphere jumps.
pub fn total_jump_h32(jumps: &[BoundaryJump]) -> f64 {
    jumps
        .iter()
        .map(|j| boundary_sobolev_norm(&j.to_sphere_function(), 1.5))
        .sum()
}
