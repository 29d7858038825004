use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RADIAL_QUADRATURE_POINTS;
use crate::apw_basis::{ApwFunction, RadialSet};
use crate::geometry::{MuffinTinGeometry, Vec3};
use crate::radial::RadialPotential;
use crate::special_fn::{gauss_legendre_interval, lm_index, spherical_bessel_j};
use crate::{Error, Result};

/// Muffin-tin potential: a constant between the spheres and a radial
/// profile inside each sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub interstitial: f64,
    pub spheres: Vec<RadialPotential>,
}

impl PotentialSpec {
    pub fn zero(n_spheres: usize) -> Self {
        Self {
            interstitial: 0.0,
            spheres: vec![RadialPotential::zero(); n_spheres],
        }
    }

    /// `V + c` in every region.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            interstitial: self.interstitial + c,
            spheres: self.spheres.iter().map(|p| p.shifted(c)).collect(),
        }
    }

    pub fn validate(&self, geom: &MuffinTinGeometry) -> Result<()> {
        if self.spheres.len() != geom.spheres().len() {
            return Err(Error::InvalidInput(format!(
                "potential lists {} spheres, geometry has {}",
                self.spheres.len(),
                geom.spheres().len()
            )));
        }
        if !self.interstitial.is_finite() {
            return Err(Error::InvalidInput(
                "interstitial potential must be finite".into(),
            ));
        }
        self.spheres.iter().try_for_each(|p| p.validate())
    }

    pub fn minimum(&self) -> f64 {
        self.spheres
            .iter()
            .map(|p| p.minimum())
            .fold(self.interstitial, f64::min)
    }
}

/// APW basis `{v_G : G in g_list}` at energy `E`, all spheres matched with
/// radial functions of `pot` up to `l_max`.
pub fn apw_basis_at(
    geom: &Arc<MuffinTinGeometry>,
    pot: &PotentialSpec,
    k: &Vec3,
    g_list: &[Vec3],
    energy: f64,
    l_max: usize,
    n_grid: usize,
) -> Result<Vec<ApwFunction>> {
    pot.validate(geom)?;
    let radial: Vec<Arc<RadialSet>> = geom
        .spheres()
        .iter()
        .zip(&pot.spheres)
        .map(|(s, p)| RadialSet::build(p, energy, s.radius, l_max, n_grid).map(Arc::new))
        .collect::<Result<_>>()?;
    g_list
        .iter()
        .map(|g| ApwFunction::new(Arc::clone(geom), &radial, *k, *g, l_max))
        .collect()
}

/// Hermitian pair `(H, S)` of the secular equation `det(H - E S) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularSystem {
    pub h: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
    /// Energy the basis was built at, for energy-dependent bases.
    pub energy: Option<f64>,
    /// `ρ_l(R)` for every sphere and `l`; a sign change between two
    /// energies signals a radial node in between.
    pub boundary_radial: Vec<f64>,
}

impl SecularSystem {
    /// Wraps two matrices, replacing each by its Hermitian part.
    pub fn new(h: DMatrix<Complex64>, s: DMatrix<Complex64>) -> Result<Self> {
        if !h.is_square() || h.shape() != s.shape() {
            return Err(Error::InvalidInput(
                "H and S must be square and of equal size".into(),
            ));
        }
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let s = (&s + s.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self {
            h,
            s,
            energy: None,
            boundary_radial: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// `{"m": M, "h": [[re, im], ...], "s": [...]}`, matrices row-major.
    pub fn to_json(&self) -> serde_json::Value {
        let flat = |a: &DMatrix<Complex64>| -> Vec<[f64; 2]> {
            let mut v = Vec::with_capacity(a.len());
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    v.push([a[(i, j)].re, a[(i, j)].im]);
                }
            }
            v
        };
        serde_json::json!({
            "m": self.dim(),
            "energy": self.energy,
            "h": flat(&self.h),
            "s": flat(&self.s),
        })
    }
}

/// `∫_{Ω_1} e^{iΔ·x} dx` for a reciprocal lattice vector `Δ`: the cell
/// integral minus the sphere integrals
/// `e^{iΔ·x̄} 4π R² j_1(|Δ|R) / |Δ|`.
pub fn interstitial_overlap(
    geom: &MuffinTinGeometry,
    delta: &Vec3,
    delta_is_zero: bool,
) -> Complex64 {
    let mut v = Complex64::new(if delta_is_zero { geom.volume() } else { 0.0 }, 0.0);
    let d = delta.norm();
    for s in geom.spheres() {
        let ball = if delta_is_zero || d * s.radius < 1e-300 {
            4.0 * PI * s.radius.powi(3) / 3.0
        } else {
            4.0 * PI * s.radius * s.radius * spherical_bessel_j(1, d * s.radius) / d
        };
        v -= Complex64::from_polar(ball, delta.dot(&s.center));
    }
    v
}

/// Per-`l` radial integrals `(∫ρ_a ρ_b r², ∫(ρ_a'ρ_b' r² + l(l+1) ρ_a ρ_b), ∫V ρ_a ρ_b r²)`.
fn radial_integrals(
    a: &RadialSet,
    b: &RadialSet,
    pot: &RadialPotential,
    l_max: usize,
) -> Vec<[f64; 3]> {
    let (nodes, weights) = gauss_legendre_interval(RADIAL_QUADRATURE_POINTS, 0.0, a.radius);
    let mut out = vec![[0.0; 3]; l_max + 1];
    for (&r, &w) in nodes.iter().zip(&weights) {
        let vr = pot.value_at(r);
        let ra = a.rho_all(r);
        let rb = if std::ptr::eq(a, b) {
            ra.clone()
        } else {
            b.rho_all(r)
        };
        let r2 = r * r;
        for (l, o) in out.iter_mut().enumerate() {
            let ll = (l * (l + 1)) as f64;
            let ((pa, da), (pb, db)) = (ra[l], rb[l]);
            o[0] += w * pa * pb * r2;
            o[1] += w * (da * db * r2 + ll * pa * pb);
            o[2] += w * vr * pa * pb * r2;
        }
    }
    out
}

/// Largest `l_max` the assembly accepts.
pub const MAX_L: usize = 100;
/// Largest `M² (l_max+1)²` the assembly accepts.
pub const MAX_WORK: f64 = 2e8;

/// Assembles `(H, S)` for an APW basis sharing one Bloch vector `k`.
pub fn assemble(basis: &[ApwFunction], pot: &PotentialSpec) -> Result<SecularSystem> {
    let Some(first) = basis.first() else {
        return Err(Error::InvalidInput("empty basis".into()));
    };
    let geom = &first.geometry;
    pot.validate(geom)?;
    let m = basis.len();
    for f in basis {
        if (f.k - first.k).norm() > 1e-12 * (1.0 + first.k.norm()) {
            return Err(Error::IncompatibleBasis(format!(
                "Bloch vectors differ: {:?} vs {:?}",
                f.k.as_slice(),
                first.k.as_slice()
            )));
        }
        if !Arc::ptr_eq(&f.geometry, geom) && *f.geometry != **geom {
            return Err(Error::IncompatibleBasis(
                "basis functions live on different geometries".into(),
            ));
        }
    }
    let l_max = basis.iter().map(|f| f.l_max).max().unwrap_or(0);
    if l_max > MAX_L {
        return Err(Error::QuadratureBudgetExceeded(format!(
            "l_max = {l_max} exceeds {MAX_L}"
        )));
    }
    let work = (m * m) as f64 * ((l_max + 1) * (l_max + 1)) as f64;
    if work > MAX_WORK {
        return Err(Error::QuadratureBudgetExceeded(format!(
            "M² (l_max+1)² = {work:.3e} exceeds {MAX_WORK:.0e}"
        )));
    }

    let n_spheres = geom.spheres().len();
    // distinct radial sets per sphere, and each function's index into them
    let mut sets: Vec<Vec<Arc<RadialSet>>> = vec![Vec::new(); n_spheres];
    let mut set_of: Vec<Vec<usize>> = vec![Vec::with_capacity(n_spheres); m];
    for (i, f) in basis.iter().enumerate() {
        for (alpha, aug) in f.spheres.iter().enumerate() {
            let pos = match sets[alpha]
                .iter()
                .position(|s| Arc::ptr_eq(s, &aug.radial) || **s == *aug.radial)
            {
                Some(p) => p,
                None => {
                    sets[alpha].push(Arc::clone(&aug.radial));
                    sets[alpha].len() - 1
                }
            };
            set_of[i].push(pos);
        }
    }
    // integrals[alpha][a][b][l]
    let integrals: Vec<Vec<Vec<Vec<[f64; 3]>>>> = (0..n_spheres)
        .map(|alpha| {
            let s = &sets[alpha];
            (0..s.len())
                .map(|a| {
                    (0..s.len())
                        .map(|b| {
                            let lm = s[a].l_max().min(s[b].l_max()).min(l_max);
                            radial_integrals(&s[a], &s[b], &pot.spheres[alpha], lm)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let g_idx: Vec<[i64; 3]> = basis
        .iter()
        .map(|f| geom.reciprocal_indices(&f.g))
        .collect::<Result<_>>()?;
    let q: Vec<Vec3> = basis.iter().map(|f| f.q()).collect();
    let phases: Vec<Vec<Complex64>> = q
        .iter()
        .map(|qi| {
            geom.spheres()
                .iter()
                .map(|s| Complex64::from_polar(1.0, qi.dot(&s.center)))
                .collect()
        })
        .collect();

    let rows: Vec<Vec<(Complex64, Complex64)>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i..m)
                .map(|j| {
                    let delta = q[j] - q[i];
                    let ov = interstitial_overlap(geom, &delta, g_idx[i] == g_idx[j]);
                    let mut s_ij = ov;
                    let mut h_ij = ov * (q[i].dot(&q[j]) + pot.interstitial);
                    for alpha in 0..n_spheres {
                        let (fi, fj) = (&basis[i], &basis[j]);
                        let table = &integrals[alpha][set_of[i][alpha]][set_of[j][alpha]];
                        let lm = fi.l_max.min(fj.l_max).min(table.len() - 1);
                        let ph = phases[i][alpha].conj() * phases[j][alpha];
                        let (ci, cj) = (&fi.spheres[alpha].coeffs, &fj.spheres[alpha].coeffs);
                        let (mut so, mut ho) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                        for (l, t) in table.iter().enumerate().take(lm + 1) {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for mm in -(l as i64)..=l as i64 {
                                let k = lm_index(l, mm);
                                acc += ci[k].conj() * cj[k];
                            }
                            so += acc * t[0];
                            ho += acc * (t[1] + t[2]);
                        }
                        s_ij += ph * so;
                        h_ij += ph * ho;
                    }
                    (h_ij, s_ij)
                })
                .collect()
        })
        .collect();

    let mut h = DMatrix::zeros(m, m);
    let mut s = DMatrix::zeros(m, m);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, (hv, sv)) in row.into_iter().enumerate() {
            let j = i + off;
            if i == j {
                h[(i, i)] = Complex64::new(hv.re, 0.0);
                s[(i, i)] = Complex64::new(sv.re, 0.0);
            } else {
                h[(i, j)] = hv;
                s[(i, j)] = sv;
                h[(j, i)] = hv.conj();
                s[(j, i)] = sv.conj();
            }
        }
    }
    let boundary_radial = first
        .spheres
        .iter()
        .flat_map(|aug| aug.radial.boundary_values())
        .collect();
    Ok(SecularSystem {
        h,
        s,
        energy: Some(first.energy),
        boundary_radial,
    })
}
