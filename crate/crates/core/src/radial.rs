//! Radial Schrödinger equation inside muffin-tin spheres, and the bound state
//! of a single spherical square well.
//!
//! Radial functions follow the `u(x) = r^{-1} χ(r) Y_lm` convention: `χ`
//! solves `-χ'' + [l(l+1)/r² + V(r)] χ = E χ` and is regular, `χ ~ r^{l+1}`.
//! Consumers that multiply spherical harmonics use `ρ(r) = χ(r)/r`, which is
//! smooth at the origin.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::special_fn::{
    modified_spherical_bessel_i_array, spherical_bessel_j, spherical_bessel_j_derivative,
};
use crate::{Error, Result};

/// Spherically symmetric potential inside one sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialPotential {
    /// `V(r) = -depth` throughout the sphere. A negative depth is a barrier.
    ConstantWell { depth: f64 },
    /// Piecewise-linear profile through `(radii[i], values[i])`, held
    /// constant outside the tabulated range.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

impl RadialPotential {
    pub fn zero() -> Self {
        RadialPotential::ConstantWell { depth: 0.0 }
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let pot = RadialPotential::Tabulated { radii, values };
        pot.validate()?;
        Ok(pot)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RadialPotential::ConstantWell { depth } if !depth.is_finite() => {
                Err(Error::InvalidInput("well depth must be finite".into()))
            }
            RadialPotential::ConstantWell { .. } => Ok(()),
            RadialPotential::Tabulated { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() {
                    return Err(Error::InvalidInput(
                        "tabulated potential needs equally many radii and values".into(),
                    ));
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
                    return Err(Error::InvalidInput(
                        "tabulated potential grid must be positive and strictly increasing".into(),
                    ));
                }
                if values.iter().chain(radii).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput(
                        "tabulated potential must be finite".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn value_at(&self, r: f64) -> f64 {
        match self {
            RadialPotential::ConstantWell { depth } => -depth,
            RadialPotential::Tabulated { radii, values } => {
                if r <= radii[0] {
                    return values[0];
                }
                let last = radii.len() - 1;
                if r >= radii[last] {
                    return values[last];
                }
                let i = radii.partition_point(|&x| x <= r) - 1;
                let t = (r - radii[i]) / (radii[i + 1] - radii[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    /// `V + c`.
    pub fn shifted(&self, c: f64) -> Self {
        match self {
            RadialPotential::ConstantWell { depth } => {
                RadialPotential::ConstantWell { depth: depth - c }
            }
            RadialPotential::Tabulated { radii, values } => RadialPotential::Tabulated {
                radii: radii.clone(),
                values: values.iter().map(|v| v + c).collect(),
            },
        }
    }

    pub fn minimum(&self) -> f64 {
        match self {
            RadialPotential::ConstantWell { depth } => -depth,
            RadialPotential::Tabulated { values, .. } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// The constant value, when the potential is constant.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            RadialPotential::ConstantWell { depth } => Some(-depth),
            RadialPotential::Tabulated { values, .. } => {
                let first = values[0];
                values.iter().all(|v| *v == first).then_some(first)
            }
        }
    }
}

/// Regular radial solution `χ_l(r, E)` on a uniform grid over `(0, R]`,
/// scaled so that `max |χ| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub l: usize,
    pub energy: f64,
    pub radius: f64,
    /// `r_i = i h`, `i = 1..=n`.
    pub grid: Vec<f64>,
    pub chi: Vec<f64>,
    pub chi_at_r: f64,
    pub dchi_at_r: f64,
    /// `χ(r) ≈ origin_coeffs[0] r^{l+1} (1 + c_1 r² + c_2 r⁴ + c_3 r⁶)` near 0.
    origin_coeffs: [f64; 4],
}

fn origin_series(l: usize, eps: f64) -> [f64; 3] {
    let mut c = [0.0; 3];
    let mut prev = 1.0;
    for (k, ck) in c.iter_mut().enumerate() {
        let k = k + 1;
        prev *= -eps / ((2 * k) as f64 * (2 * l + 2 * k + 1) as f64);
        *ck = prev;
    }
    c
}

fn eval_series(c: &[f64; 3], r: f64) -> f64 {
    let r2 = r * r;
    1.0 + r2 * (c[0] + r2 * (c[1] + r2 * c[2]))
}

/// Numerov integration of the regular radial solution.
pub fn integrate_radial(
    pot: &RadialPotential,
    l: usize,
    energy: f64,
    radius: f64,
    n_grid: usize,
) -> Result<RadialSolution> {
    if n_grid < 100 {
        return Err(Error::InvalidInput(format!(
            "n_grid must be at least 100, got {n_grid}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if !energy.is_finite() {
        return Err(Error::InvalidInput("energy must be finite".into()));
    }
    pot.validate()?;

    let h = radius / n_grid as f64;
    let ll = (l * (l + 1)) as f64;
    let grid: Vec<f64> = (1..=n_grid).map(|i| i as f64 * h).collect();
    let f = |r: f64| ll / (r * r) + pot.value_at(r) - energy;

    let series = origin_series(l, energy - pot.value_at(0.0));
    // chi_i / h^{l+1}; the common factor is dropped because only the shape matters
    let mut chi = vec![0.0; n_grid];
    chi[0] = eval_series(&series, h);
    if n_grid > 1 {
        chi[1] = 2f64.powi(l as i32 + 1) * eval_series(&series, 2.0 * h);
    }
    let h2 = h * h / 12.0;
    let mut w_prev = (1.0 - h2 * f(grid[0])) * chi[0];
    let mut w_cur = (1.0 - h2 * f(grid[1])) * chi[1];
    for i in 1..n_grid - 1 {
        let fi = f(grid[i]);
        let w_next = 2.0 * w_cur - w_prev + h * h * fi * chi[i];
        chi[i + 1] = w_next / (1.0 - h2 * f(grid[i + 1]));
        w_prev = w_cur;
        w_cur = w_next;
        if chi[i + 1].abs() > 1e200 {
            for v in chi[..=i + 1].iter_mut() {
                *v *= 1e-200;
            }
            w_prev *= 1e-200;
            w_cur *= 1e-200;
        }
    }

    let max = chi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in chi.iter_mut() {
        *v /= max;
    }
    // leading coefficient a0 with chi(h) = a0 h^{l+1} series(h), after all rescaling
    let a0 = if chi[0] == 0.0 {
        0.0
    } else {
        let c0 = chi[0] / eval_series(&series, h);
        c0.signum() * (c0.abs().ln() - (l + 1) as f64 * h.ln()).exp()
    };

    let n = n_grid - 1;
    let chi_at_r = chi[n];
    let dchi_at_r = if n_grid >= 5 {
        (25.0 * chi[n] - 48.0 * chi[n - 1] + 36.0 * chi[n - 2] - 16.0 * chi[n - 3]
            + 3.0 * chi[n - 4])
            / (12.0 * h)
    } else {
        (chi[n] - chi[n - 1]) / h
    };

    if chi_at_r.abs() < 1e-12 {
        return Err(Error::NodeAtBoundary { l, value: chi_at_r });
    }

    Ok(RadialSolution {
        l,
        energy,
        radius,
        grid,
        chi,
        chi_at_r,
        dchi_at_r,
        origin_coeffs: [a0, series[0], series[1], series[2]],
    })
}

impl RadialSolution {
    fn step(&self) -> f64 {
        self.grid[0]
    }

    fn origin_chi(&self, r: f64) -> (f64, f64) {
        let [a0, c1, c2, c3] = self.origin_coeffs;
        let lp1 = (self.l + 1) as i32;
        let r2 = r * r;
        let s = 1.0 + r2 * (c1 + r2 * (c2 + r2 * c3));
        let ds = r * (2.0 * c1 + r2 * (4.0 * c2 + r2 * 6.0 * c3));
        let p = r.powi(lp1);
        (a0 * p * s, a0 * (lp1 as f64 * r.powi(lp1 - 1) * s + p * ds))
    }

    /// `χ(r)` and `χ'(r)` by four-point Lagrange interpolation of the grid.
    pub fn chi_with_derivative(&self, r: f64) -> (f64, f64) {
        let h = self.step();
        let n = self.chi.len();
        if r <= 2.0 * h {
            return self.origin_chi(r);
        }
        // value at grid index k (k = 0 is the origin)
        let at = |k: usize| if k == 0 { 0.0 } else { self.chi[k - 1] };
        let t = r / h;
        let mut base = t.floor() as isize - 1;
        base = base.clamp(0, n as isize - 3);
        let base = base as usize;
        let xs = [
            base as f64,
            base as f64 + 1.0,
            base as f64 + 2.0,
            base as f64 + 3.0,
        ];
        let ys = [at(base), at(base + 1), at(base + 2), at(base + 3)];
        let mut val = 0.0;
        let mut der = 0.0;
        for j in 0..4 {
            let mut lj = 1.0;
            let mut dlj = 0.0;
            for m in 0..4 {
                if m == j {
                    continue;
                }
                let denom = xs[j] - xs[m];
                let mut prod = 1.0 / denom;
                for q in 0..4 {
                    if q != j && q != m {
                        prod *= (t - xs[q]) / (xs[j] - xs[q]);
                    }
                }
                dlj += prod;
                lj *= (t - xs[m]) / denom;
            }
            val += ys[j] * lj;
            der += ys[j] * dlj;
        }
        (val, der / h)
    }

    /// `ρ(r) = χ(r)/r` and `ρ'(r)`.
    pub fn rho_with_derivative(&self, r: f64) -> (f64, f64) {
        if r <= 2.0 * self.step() {
            let [a0, c1, c2, c3] = self.origin_coeffs;
            let l = self.l as i32;
            let r2 = r * r;
            let s = 1.0 + r2 * (c1 + r2 * (c2 + r2 * c3));
            let ds = r * (2.0 * c1 + r2 * (4.0 * c2 + r2 * 6.0 * c3));
            let p = if l == 0 { 1.0 } else { r.powi(l) };
            let dp = if l == 0 {
                0.0
            } else {
                l as f64 * r.powi(l - 1)
            };
            return (a0 * p * s, a0 * (dp * s + p * ds));
        }
        let (c, dc) = self.chi_with_derivative(r);
        (c / r, (dc - c / r) / r)
    }
}

/// Radial part `ρ_l(r)` used inside a sphere, either tabulated by Numerov
/// integration or in closed form for a constant potential.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    Numerov(RadialSolution),
    /// `ρ = j_l(κ r)` for `E > V`, `i_l(κ r)` for `E < V`, `r^l` for `E = V`.
    Constant {
        l: usize,
        energy: f64,
        potential: f64,
        radius: f64,
    },
}

impl RadialFunction {
    /// Builds the radial function of angular momentum `l` at energy `E`.
    ///
    /// Constant potentials use the closed form; tabulated ones are integrated
    /// with `n_grid` Numerov steps. A node at the sphere radius is reported as
    /// [`Error::RadialNodeAtR`].
    pub fn build(
        pot: &RadialPotential,
        l: usize,
        energy: f64,
        radius: f64,
        n_grid: usize,
    ) -> Result<Self> {
        let f = match pot.constant_value() {
            Some(v) => RadialFunction::Constant {
                l,
                energy,
                potential: v,
                radius,
            },
            None => match integrate_radial(pot, l, energy, radius, n_grid) {
                Ok(sol) => RadialFunction::Numerov(sol),
                Err(Error::NodeAtBoundary { l, .. }) => {
                    return Err(Error::RadialNodeAtR { l, energy })
                }
                Err(e) => return Err(e),
            },
        };
        if let RadialFunction::Constant { .. } = f {
            let (rho_r, _) = f.rho_with_derivative(radius);
            let chi_r = (rho_r * radius).abs();
            let chi_max = (1..=256)
                .map(|i| {
                    let r = radius * i as f64 / 256.0;
                    (f.rho_with_derivative(r).0 * r).abs()
                })
                .fold(0.0f64, f64::max);
            if chi_r < 1e-12 * chi_max {
                return Err(Error::RadialNodeAtR { l, energy });
            }
        }
        Ok(f)
    }

    pub fn l(&self) -> usize {
        match self {
            RadialFunction::Numerov(s) => s.l,
            RadialFunction::Constant { l, .. } => *l,
        }
    }

    pub fn energy(&self) -> f64 {
        match self {
            RadialFunction::Numerov(s) => s.energy,
            RadialFunction::Constant { energy, .. } => *energy,
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            RadialFunction::Numerov(s) => s.radius,
            RadialFunction::Constant { radius, .. } => *radius,
        }
    }

    pub fn rho_with_derivative(&self, r: f64) -> (f64, f64) {
        match self {
            RadialFunction::Numerov(s) => s.rho_with_derivative(r),
            RadialFunction::Constant {
                l,
                energy,
                potential,
                ..
            } => {
                let l = *l;
                let k2 = energy - potential;
                if k2 > 0.0 {
                    let k = k2.sqrt();
                    (
                        spherical_bessel_j(l, k * r),
                        k * spherical_bessel_j_derivative(l, k * r),
                    )
                } else if k2 < 0.0 {
                    let k = (-k2).sqrt();
                    let x = k * r;
                    let (iv, log_scale) = modified_spherical_bessel_i_array(l + 1, x);
                    let s = log_scale.exp();
                    let val = iv[l] * s;
                    let der = if l == 0 {
                        iv[1] * s
                    } else {
                        (l as f64 * iv[l - 1] + (l + 1) as f64 * iv[l + 1]) / (2 * l + 1) as f64 * s
                    };
                    (val, k * der)
                } else if l == 0 {
                    (1.0, 0.0)
                } else {
                    (r.powi(l as i32), l as f64 * r.powi(l as i32 - 1))
                }
            }
        }
    }

    pub fn rho(&self, r: f64) -> f64 {
        self.rho_with_derivative(r).0
    }

    /// `(ρ(R), ρ'(R))`.
    pub fn at_boundary(&self) -> (f64, f64) {
        match self {
            RadialFunction::Numerov(s) => {
                let r = s.radius;
                (s.chi_at_r / r, (s.dchi_at_r - s.chi_at_r / r) / r)
            }
            RadialFunction::Constant { radius, .. } => self.rho_with_derivative(*radius),
        }
    }
}

pub(crate) fn well_wavenumbers(v0: f64, energy: f64) -> (f64, f64) {
    ((v0 - energy.abs()).sqrt(), energy.abs().sqrt())
}

/// Wronskian of `sin(α r)` and `e^{-β r}` at `r = a`:
/// `W(E) = -e^{-βa} (β sin αa + α cos αa)`, zero exactly at s-wave bound
/// states of the well `V = -V0` on `|x| < a`.
pub fn well_matching_residual(v0: f64, a: f64, energy: f64) -> Result<f64> {
    if !(energy > -v0 && energy < 0.0) {
        return Err(Error::DomainError {
            energy,
            lower: -v0,
            upper: 0.0,
        });
    }
    let (alpha, beta) = well_wavenumbers(v0, energy);
    let (s, c) = (alpha * a).sin_cos();
    Ok(-(-beta * a).exp() * (beta * s + alpha * c))
}

const BRACKET_SAMPLES: usize = 1000;

/// The s-wave bound state of the spherical well, found by a 1000-sample
/// bracket scan followed by bisection to `|ΔE| < tol`.
///
/// Requires `V0 a² <= 9π²/4`, where at most one bound state exists.
pub fn find_bound_state(v0: f64, a: f64, tol: f64) -> Result<f64> {
    if !(v0 > 0.0 && a > 0.0 && tol > 0.0) {
        return Err(Error::InvalidInput("V0, a and tol must be positive".into()));
    }
    if v0 * a * a > 9.0 * PI * PI / 4.0 {
        return Err(Error::InvalidInput(format!(
            "V0 a^2 = {} exceeds 9 pi^2/4: more than one s-wave bound state",
            v0 * a * a
        )));
    }
    let eps = 1e-9 * v0;
    let lower = -v0 + eps;
    let upper = -eps;
    let energies: Vec<f64> = (0..BRACKET_SAMPLES)
        .map(|i| lower + (upper - lower) * i as f64 / (BRACKET_SAMPLES - 1) as f64)
        .collect();
    let w = |e: f64| well_matching_residual(v0, a, e).expect("scan stays inside the well");
    let mut bracket = None;
    let mut prev = w(energies[0]);
    for pair in energies.windows(2) {
        let cur = w(pair[1]);
        if prev == 0.0 {
            return Ok(pair[0]);
        }
        if prev.signum() != cur.signum() {
            bracket = Some((pair[0], pair[1], prev));
            break;
        }
        prev = cur;
    }
    let (mut lo, mut hi, mut w_lo) = bracket.ok_or(Error::NoBracket {
        lower,
        upper,
        samples: BRACKET_SAMPLES,
    })?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let wm = w(mid);
        if wm == 0.0 {
            return Ok(mid);
        }
        if wm.signum() == w_lo.signum() {
            lo = mid;
            w_lo = wm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Amplitudes `(A, C)` of `χ = A sin(αr)` inside and `C e^{-βr}` outside,
/// continuous at `a` and normalized by `∫₀^∞ χ² dr = 1`.
pub fn normalize_well_state(v0: f64, a: f64, energy: f64) -> Result<(f64, f64)> {
    let (alpha, beta) = well_wavenumbers(v0, energy);
    if !(energy > -v0 && energy < 0.0) {
        return Err(Error::DomainError {
            energy,
            lower: -v0,
            upper: 0.0,
        });
    }
    let inner = well_inner_norm(alpha, a);
    let outer = well_outer_norm(beta, a);
    let s = (alpha * a).sin();
    let e = (-beta * a).exp();
    let amp_in = 1.0 / (inner + (s / e).powi(2) * outer).sqrt();
    Ok((amp_in, amp_in * s / e))
}

/// `∫₀^a sin²(αr) dr`.
pub(crate) fn well_inner_norm(alpha: f64, a: f64) -> f64 {
    a / 2.0 - (2.0 * alpha * a).sin() / (4.0 * alpha)
}

/// `∫_a^∞ e^{-2βr} dr`.
pub(crate) fn well_outer_norm(beta: f64, a: f64) -> f64 {
    (-2.0 * beta * a).exp() / (2.0 * beta)
}
