//! Augmented plane waves: `e^{i(k+G)·x}` between the spheres, a matched
//! partial-wave expansion inside each sphere.
//!
//! Inside sphere `α` a basis function reads
//! `e^{iq·x̄_α} Σ_{l<=l_max} Σ_m A_lm ρ_l(r) Y_lm(ω)` with `q = k + G` and
//! `ρ_l = χ_l / r` the regular radial solution. The coefficients `A_lm` make
//! the `l <= l_max` part of the trace agree with the plane wave, so the jump
//! across the sphere is exactly the Rayleigh tail `l > l_max`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::geometry::{angles, MuffinTinGeometry, Sphere, Vec3};
use crate::radial::{RadialFunction, RadialPotential};
use crate::sobolev::SphereFunction;
use crate::special_fn::{
    lm_count, lm_index, modified_spherical_bessel_i_array, spherical_bessel_j_array,
    spherical_harmonic_gradient, spherical_harmonics_all,
};
use crate::{Error, Result};

/// Headroom added to `l_max` when jumps are evaluated without an explicit
/// cutoff.
pub const DEFAULT_L_EVAL_MARGIN: usize = 34;

/// Default number of Numerov steps for tabulated potentials.
pub const DEFAULT_RADIAL_GRID: usize = 2000;

fn i_pow(l: usize) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `4π i^l j_l(|q|R) conj(Y_lm(q̂))`, i.e. the trace coefficients of
/// `e^{iq·(x - center)}` on the sphere `|x - center| = R`.
fn rayleigh_unphased(q: &Vec3, radius: f64, l_eval: usize) -> Vec<Complex64> {
    let (theta, phi) = angles(q);
    let j = spherical_bessel_j_array(l_eval, q.norm() * radius);
    let y = spherical_harmonics_all(l_eval, theta, phi);
    let mut c = vec![Complex64::new(0.0, 0.0); lm_count(l_eval)];
    for l in 0..=l_eval {
        let pre = i_pow(l) * (4.0 * PI * j[l]);
        for m in -(l as i64)..=l as i64 {
            let k = lm_index(l, m);
            c[k] = pre * y[k].conj();
        }
    }
    c
}

/// Coefficients `c_lm` with `e^{iq·x} = Σ c_lm Y_lm(ω)` on the sphere
/// `x = center + R ω`, for `l <= l_eval`.
pub fn rayleigh_coefficients(
    q: &Vec3,
    center: &Vec3,
    radius: f64,
    l_eval: usize,
) -> Vec<Complex64> {
    let phase = Complex64::from_polar(1.0, q.dot(center));
    let mut c = rayleigh_unphased(q, radius, l_eval);
    for v in c.iter_mut() {
        *v *= phase;
    }
    c
}

/// `Σ_{l > l_eval} Σ_m |c_lm|² = 4π Σ_{l > l_eval} (2l+1) j_l(|q|R)²`.
pub fn rayleigh_tail_mass(q_norm: f64, radius: f64, l_eval: usize) -> f64 {
    let x = q_norm * radius;
    let top = l_eval + 60 + x as usize;
    let j = spherical_bessel_j_array(top, x);
    4.0 * PI
        * ((l_eval + 1)..=top)
            .map(|l| (2 * l + 1) as f64 * j[l] * j[l])
            .sum::<f64>()
}

/// Radial functions `ρ_0, ..., ρ_{l_max}` of one sphere at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSet {
    pub energy: f64,
    pub radius: f64,
    pub functions: Vec<RadialFunction>,
}

impl RadialSet {
    /// Fails with [`Error::RadialNodeAtR`] if some `ρ_l` vanishes at `R`.
    pub fn build(
        pot: &RadialPotential,
        energy: f64,
        radius: f64,
        l_max: usize,
        n_grid: usize,
    ) -> Result<Self> {
        if let Some(v) = pot.constant_value() {
            return Self::build_constant(v, energy, radius, l_max);
        }
        let functions = (0..=l_max)
            .map(|l| RadialFunction::build(pot, l, energy, radius, n_grid))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            energy,
            radius,
            functions,
        })
    }

    /// Closed-form set for `V ≡ v`, with the same node test as
    /// [`RadialFunction::build`] done for all `l` at once.
    fn build_constant(v: f64, energy: f64, radius: f64, l_max: usize) -> Result<Self> {
        const SAMPLES: usize = 256;
        let mut chi_max = vec![0.0f64; l_max + 1];
        for i in 1..=SAMPLES {
            let r = radius * i as f64 / SAMPLES as f64;
            for (m, (rho, _)) in chi_max
                .iter_mut()
                .zip(constant_rho_all(l_max, energy - v, r))
            {
                *m = m.max((rho * r).abs());
            }
        }
        let at_r = constant_rho_all(l_max, energy - v, radius);
        for l in 0..=l_max {
            if (at_r[l].0 * radius).abs() < 1e-12 * chi_max[l] {
                return Err(Error::RadialNodeAtR { l, energy });
            }
        }
        let functions = (0..=l_max)
            .map(|l| RadialFunction::Constant {
                l,
                energy,
                potential: v,
                radius,
            })
            .collect();
        Ok(Self {
            energy,
            radius,
            functions,
        })
    }

    pub fn l_max(&self) -> usize {
        self.functions.len() - 1
    }

    /// `(ρ_l(r), ρ_l'(r))` for every `l`, sharing one Bessel recurrence
    /// when the potential is constant.
    pub fn rho_all(&self, r: f64) -> Vec<(f64, f64)> {
        if let Some(RadialFunction::Constant {
            energy, potential, ..
        }) = self.functions.first()
        {
            if self.functions.iter().all(
                |f| matches!(f, RadialFunction::Constant { potential: p, .. } if p == potential),
            ) {
                return constant_rho_all(self.l_max(), energy - potential, r);
            }
        }
        self.functions
            .iter()
            .map(|f| f.rho_with_derivative(r))
            .collect()
    }

    /// `ρ_l(R)` for every `l`.
    pub fn boundary_values(&self) -> Vec<f64> {
        self.functions.iter().map(|f| f.at_boundary().0).collect()
    }
}

/// Closed-form radial functions of a constant potential with
/// `κ² = E - V`, matching [`RadialFunction::rho_with_derivative`].
fn constant_rho_all(l_max: usize, k2: f64, r: f64) -> Vec<(f64, f64)> {
    let deriv = |v: &[f64], l: usize, sign: f64| {
        if l == 0 {
            sign * v[1]
        } else {
            (l as f64 * v[l - 1] + sign * (l + 1) as f64 * v[l + 1]) / (2 * l + 1) as f64
        }
    };
    if k2 > 0.0 {
        let k = k2.sqrt();
        let j = spherical_bessel_j_array(l_max + 1, k * r);
        (0..=l_max)
            .map(|l| (j[l], k * deriv(&j, l, -1.0)))
            .collect()
    } else if k2 < 0.0 {
        let k = (-k2).sqrt();
        let (iv, log_scale) = modified_spherical_bessel_i_array(l_max + 1, k * r);
        let s = log_scale.exp();
        (0..=l_max)
            .map(|l| (iv[l] * s, k * deriv(&iv, l, 1.0) * s))
            .collect()
    } else {
        (0..=l_max)
            .map(|l| match l {
                0 => (1.0, 0.0),
                _ => (r.powi(l as i32), l as f64 * r.powi(l as i32 - 1)),
            })
            .collect()
    }
}

/// Matching coefficients `A_lm = 4π i^l j_l(|q|R) conj(Y_lm(q̂)) / ρ_l(R)`
/// for `l <= l_max`. The phase `e^{iq·x̄}` is not included.
pub fn apw_matching_coefficients(
    q: &Vec3,
    radius: f64,
    radial: &RadialSet,
    l_max: usize,
) -> Result<Vec<Complex64>> {
    if l_max > radial.l_max() {
        return Err(Error::InvalidInput(format!(
            "radial set covers l <= {} but l_max = {l_max} was requested",
            radial.l_max()
        )));
    }
    let mut a = rayleigh_unphased(q, radius, l_max);
    for l in 0..=l_max {
        let rho_r = radial.functions[l].at_boundary().0;
        if rho_r == 0.0 || !rho_r.is_finite() {
            return Err(Error::RadialNodeAtR {
                l,
                energy: radial.energy,
            });
        }
        for m in -(l as i64)..=l as i64 {
            a[lm_index(l, m)] /= rho_r;
        }
    }
    Ok(a)
}

/// The augmentation of one basis function inside one sphere.
#[derive(Debug, Clone)]
pub struct Augmentation {
    /// `A_lm`, without the `e^{iq·x̄}` phase.
    pub coeffs: Vec<Complex64>,
    pub radial: Arc<RadialSet>,
}

/// One APW basis function `v_G` on a muffin-tin cell.
#[derive(Debug, Clone)]
pub struct ApwFunction {
    pub k: Vec3,
    pub g: Vec3,
    /// Energy the radial functions were built at.
    pub energy: f64,
    pub l_max: usize,
    pub geometry: Arc<MuffinTinGeometry>,
    /// One entry per sphere of the geometry.
    pub spheres: Vec<Augmentation>,
}

impl ApwFunction {
    /// Matches `e^{i(k+G)·x}` to the given radial sets (one per sphere).
    pub fn new(
        geometry: Arc<MuffinTinGeometry>,
        radial: &[Arc<RadialSet>],
        k: Vec3,
        g: Vec3,
        l_max: usize,
    ) -> Result<Self> {
        if radial.len() != geometry.spheres().len() {
            return Err(Error::InvalidInput(format!(
                "{} radial sets for {} spheres",
                radial.len(),
                geometry.spheres().len()
            )));
        }
        geometry.reciprocal_indices(&g)?;
        let q = k + g;
        let mut energy = None;
        let mut spheres = Vec::with_capacity(radial.len());
        for (s, set) in geometry.spheres().iter().zip(radial) {
            if (set.radius - s.radius).abs() > 1e-12 * s.radius {
                return Err(Error::InvalidInput(
                    "radial set built for a different sphere radius".into(),
                ));
            }
            match energy {
                None => energy = Some(set.energy),
                Some(e) if e != set.energy => {
                    return Err(Error::InvalidInput(
                        "radial sets built at different energies".into(),
                    ))
                }
                _ => {}
            }
            spheres.push(Augmentation {
                coeffs: apw_matching_coefficients(&q, s.radius, set, l_max)?,
                radial: Arc::clone(set),
            });
        }
        Ok(Self {
            k,
            g,
            energy: energy.unwrap_or(f64::NAN),
            l_max,
            geometry,
            spheres,
        })
    }

    pub fn q(&self) -> Vec3 {
        self.k + self.g
    }

    fn sphere(&self, alpha: usize) -> &Sphere {
        &self.geometry.spheres()[alpha]
    }

    fn phase(&self, alpha: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.q().dot(&self.sphere(alpha).center))
    }

    /// Plane-wave branch `e^{iq·x}`, valid everywhere as a formula.
    pub fn exterior_value(&self, x: &Vec3) -> Complex64 {
        Complex64::from_polar(1.0, self.q().dot(x))
    }

    /// Truncated matched expansion inside sphere `alpha`, as a formula in `x`.
    pub fn interior_value(&self, alpha: usize, x: &Vec3) -> Complex64 {
        let d = x - self.sphere(alpha).center;
        let r = d.norm();
        let (theta, phi) = angles(&d);
        let aug = &self.spheres[alpha];
        let y = spherical_harmonics_all(self.l_max, theta, phi);
        let rho_all = aug.radial.rho_all(r);
        let mut sum = Complex64::new(0.0, 0.0);
        for l in 0..=self.l_max {
            let rho = rho_all[l].0;
            let mut part = Complex64::new(0.0, 0.0);
            for m in -(l as i64)..=l as i64 {
                let k = lm_index(l, m);
                part += aug.coeffs[k] * y[k];
            }
            sum += part * rho;
        }
        sum * self.phase(alpha)
    }

    /// Gradient of the interior expansion; undefined on the polar axis of the
    /// sphere (measure zero).
    pub fn interior_gradient(&self, alpha: usize, x: &Vec3) -> [Complex64; 3] {
        let d = x - self.sphere(alpha).center;
        let r = d.norm();
        let (theta, phi) = angles(&d);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let e_r = [st * cp, st * sp, ct];
        let e_t = [ct * cp, ct * sp, -st];
        let e_p = [-sp, cp, 0.0];
        let aug = &self.spheres[alpha];
        let y = spherical_harmonics_all(self.l_max, theta, phi);
        let (mut g_r, mut g_t, mut g_p) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let rho_all = aug.radial.rho_all(r);
        for l in 0..=self.l_max {
            let (rho, drho) = rho_all[l];
            for m in -(l as i64)..=l as i64 {
                let k = lm_index(l, m);
                let c = aug.coeffs[k];
                g_r += c * y[k] * drho;
                if l > 0 {
                    let (dt, dp) = spherical_harmonic_gradient(l, m, theta, phi);
                    g_t += c * dt * (rho / r);
                    g_p += c * dp * (rho / r);
                }
            }
        }
        let ph = self.phase(alpha);
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            out[i] = (g_r * e_r[i] + g_t * e_t[i] + g_p * e_p[i]) * ph;
        }
        out
    }

    pub fn exterior_gradient(&self, x: &Vec3) -> [Complex64; 3] {
        let v = self.exterior_value(x);
        let q = self.q();
        [
            v * Complex64::new(0.0, q[0]),
            v * Complex64::new(0.0, q[1]),
            v * Complex64::new(0.0, q[2]),
        ]
    }

    /// Jump `exterior trace - interior trace` on sphere `alpha`, expanded up
    /// to `l_eval`.
    pub fn boundary_jump(&self, alpha: usize, l_eval: usize) -> BoundaryJump {
        let s = self.sphere(alpha);
        let q = self.q();
        let mut g = rayleigh_coefficients(&q, &s.center, s.radius, l_eval);
        let ph = self.phase(alpha);
        let aug = &self.spheres[alpha];
        for l in 0..=self.l_max.min(l_eval) {
            let rho_r = aug.radial.functions[l].at_boundary().0;
            for m in -(l as i64)..=l as i64 {
                let k = lm_index(l, m);
                g[k] -= aug.coeffs[k] * rho_r * ph;
            }
        }
        BoundaryJump {
            sphere: alpha,
            radius: s.radius,
            coeffs: g,
            tail_mass: rayleigh_tail_mass(q.norm(), s.radius, l_eval.max(self.l_max)),
        }
    }

    /// Jumps on every sphere with the default `l_eval = l_max + 34`.
    pub fn boundary_jumps(&self) -> Vec<BoundaryJump> {
        (0..self.spheres.len())
            .map(|a| self.boundary_jump(a, self.l_max + DEFAULT_L_EVAL_MARGIN))
            .collect()
    }
}

/// Evaluates `f` at a point of the closed cell: the interior expansion on
/// closed spheres, the plane wave elsewhere.
pub fn evaluate_apw(f: &ApwFunction, x: &Vec3) -> Result<Complex64> {
    if !f.geometry.in_closed_cell(x) {
        return Err(Error::OutOfCell {
            x: x[0],
            y: x[1],
            z: x[2],
        });
    }
    Ok(match f.geometry.sphere_containing(x) {
        Some(a) => f.interior_value(a, x),
        None => f.exterior_value(x),
    })
}

/// Spherical-harmonic coefficients of the trace difference on one sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryJump {
    pub sphere: usize,
    pub radius: f64,
    /// `g_lm` indexed by [`lm_index`], `l <= l_eval`.
    pub coeffs: Vec<Complex64>,
    /// `Σ_{l > l_eval} Σ_m |g_lm|²` for the Rayleigh tail that was cut off.
    pub tail_mass: f64,
}

impl BoundaryJump {
    pub fn l_eval(&self) -> usize {
        (self.coeffs.len() as f64).sqrt() as usize - 1
    }

    pub fn to_sphere_function(&self) -> SphereFunction {
        SphereFunction::new(self.radius, self.coeffs.clone())
    }

    /// `Σ_i w_i g^i`, for jumps on the same sphere. Tail masses combine
    /// through the triangle inequality.
    pub fn combine(jumps: &[&BoundaryJump], weights: &[Complex64]) -> BoundaryJump {
        assert_eq!(jumps.len(), weights.len());
        assert!(!jumps.is_empty());
        let n = jumps[0].coeffs.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        let mut tail = 0.0;
        for (j, w) in jumps.iter().zip(weights) {
            assert_eq!(j.coeffs.len(), n, "jumps expanded to different l_eval");
            assert_eq!(j.sphere, jumps[0].sphere);
            for (c, g) in coeffs.iter_mut().zip(&j.coeffs) {
                *c += w * g;
            }
            tail += w.norm() * j.tail_mass.sqrt();
        }
        BoundaryJump {
            sphere: jumps[0].sphere,
            radius: jumps[0].radius,
            coeffs,
            tail_mass: tail * tail,
        }
    }
}
