use std::collections::BTreeMap;

use num_complex::Complex64;

use super::sphere_fn::{mode_h32_norm, SphereFunction};
use crate::geometry::{angles, Vec3};
use crate::special_fn::{
    gauss_legendre_interval, lm_index, lm_pairs, modified_spherical_bessel_i_array,
    spherical_harmonic_gradient, spherical_harmonics_all,
};
use crate::{Error, Result};

/// Radial profile `f(r)` of one `(l, m)` mode of a [`BallFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// `c1 (r/R)^l + c2 (r/R)^{l+2}`.
    PowerPair { c1: Complex64, c2: Complex64 },
    /// `amplitude · i_l(r) / i_l(R)`, a solution of `-Δu + u = 0`.
    ModifiedBessel { amplitude: Complex64 },
}

/// `i_0..i_{l_max+1}` at `r` and `i_0..i_{l_max}` at `R`, shared by all
/// modified-Bessel modes evaluated at one radius.
struct BesselTable {
    num: Vec<f64>,
    den: Vec<f64>,
    /// `exp(log_scale(r) - log_scale(R))`.
    rescale: f64,
}

impl BesselTable {
    fn new(l_max: usize, r: f64, big_r: f64) -> Self {
        let (num, ln) = modified_spherical_bessel_i_array(l_max + 1, r);
        let (den, ld) = modified_spherical_bessel_i_array(l_max, big_r);
        Self {
            num,
            den,
            rescale: (ln - ld).exp(),
        }
    }

    /// `(i_l(r)/i_l(R), i_l'(r)/i_l(R))`.
    fn ratio_with_derivative(&self, l: usize) -> (f64, f64) {
        let num = &self.num;
        if self.den[l] == 0.0 {
            return (0.0, 0.0);
        }
        let s = self.rescale / self.den[l];
        let der = if l == 0 {
            num[1]
        } else {
            (l as f64 * num[l - 1] + (l + 1) as f64 * num[l + 1]) / (2 * l + 1) as f64
        };
        (num[l] * s, der * s)
    }
}

impl RadialProfile {
    /// `(f, f', f'')` at `r > 0` for degree `l` on a ball of radius `big_r`.
    pub fn eval(&self, l: usize, r: f64, big_r: f64) -> [Complex64; 3] {
        let table = matches!(self, RadialProfile::ModifiedBessel { .. })
            .then(|| BesselTable::new(l, r, big_r));
        self.eval_with(l, r, big_r, table.as_ref())
    }

    fn eval_with(
        &self,
        l: usize,
        r: f64,
        big_r: f64,
        table: Option<&BesselTable>,
    ) -> [Complex64; 3] {
        match *self {
            RadialProfile::PowerPair { c1, c2 } => {
                let t = r / big_r;
                let lf = l as f64;
                let p = |k: f64, d: u32| -> f64 {
                    // d-th derivative of (r/R)^k
                    match d {
                        0 => t.powf(k),
                        1 => {
                            if k == 0.0 {
                                0.0
                            } else {
                                k * t.powf(k - 1.0) / big_r
                            }
                        }
                        _ => {
                            if k < 2.0 {
                                0.0
                            } else {
                                k * (k - 1.0) * t.powf(k - 2.0) / (big_r * big_r)
                            }
                        }
                    }
                };
                [
                    c1 * p(lf, 0) + c2 * p(lf + 2.0, 0),
                    c1 * p(lf, 1) + c2 * p(lf + 2.0, 1),
                    c1 * p(lf, 2) + c2 * p(lf + 2.0, 2),
                ]
            }
            RadialProfile::ModifiedBessel { amplitude } => {
                let (f, df) = table
                    .expect("Bessel table for a Bessel mode")
                    .ratio_with_derivative(l);
                let ll = (l * (l + 1)) as f64;
                // radial part of Δu = u
                let d2 = if r > 0.0 {
                    f * (1.0 + ll / (r * r)) - 2.0 * df / r
                } else {
                    0.0
                };
                [amplitude * f, amplitude * df, amplitude * d2]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMode {
    pub l: usize,
    pub m: i64,
    pub profile: RadialProfile,
}

/// Function on a ball of radius `R` centered at the origin,
/// `u(r, ω) = Σ f_lm(r) Y_lm(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallFunction {
    pub radius: f64,
    pub modes: Vec<BallMode>,
}

impl BallFunction {
    pub fn zero(radius: f64) -> Self {
        Self {
            radius,
            modes: Vec::new(),
        }
    }

    /// Concatenation of the mode lists (the sum of the two functions).
    pub fn add(&self, other: &Self) -> Self {
        assert!((self.radius - other.radius).abs() <= 1e-12 * self.radius);
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        Self {
            radius: self.radius,
            modes,
        }
    }

    pub fn l_max(&self) -> usize {
        self.modes.iter().map(|m| m.l).max().unwrap_or(0)
    }

    /// `(f, f', f'')` summed per `(l, m)` at radius `r`.
    fn grouped(&self, r: f64) -> BTreeMap<usize, (usize, i64, [Complex64; 3])> {
        let mut out: BTreeMap<usize, (usize, i64, [Complex64; 3])> = BTreeMap::new();
        let bessel_l = self
            .modes
            .iter()
            .filter(|md| matches!(md.profile, RadialProfile::ModifiedBessel { .. }))
            .map(|md| md.l)
            .max();
        let table = bessel_l.map(|l| BesselTable::new(l, r, self.radius));
        for md in &self.modes {
            let v = md.profile.eval_with(md.l, r, self.radius, table.as_ref());
            let e = out.entry(lm_index(md.l, md.m)).or_insert((
                md.l,
                md.m,
                [Complex64::new(0.0, 0.0); 3],
            ));
            for i in 0..3 {
                e.2[i] += v[i];
            }
        }
        out
    }

    /// Value at a point given relative to the center.
    pub fn value(&self, x: &Vec3) -> Complex64 {
        let r = x.norm();
        let (theta, phi) = angles(x);
        let y = spherical_harmonics_all(self.l_max(), theta, phi);
        self.grouped(r)
            .iter()
            .map(|(k, (_, _, f))| f[0] * y[*k])
            .sum()
    }

    /// Gradient at a point given relative to the center (off the polar axis).
    pub fn gradient(&self, x: &Vec3) -> [Complex64; 3] {
        let r = x.norm();
        let (theta, phi) = angles(x);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let e_r = [st * cp, st * sp, ct];
        let e_t = [ct * cp, ct * sp, -st];
        let e_p = [-sp, cp, 0.0];
        let zero = Complex64::new(0.0, 0.0);
        let (mut g_r, mut g_t, mut g_p) = (zero, zero, zero);
        let y = spherical_harmonics_all(self.l_max(), theta, phi);
        for (k, (l, m, f)) in self.grouped(r) {
            g_r += f[1] * y[k];
            if l > 0 {
                let (dt, dp) = spherical_harmonic_gradient(l, m, theta, phi);
                g_t += f[0] / r * dt;
                g_p += f[0] / r * dp;
            }
        }
        let mut out = [zero; 3];
        for i in 0..3 {
            out[i] = g_r * e_r[i] + g_t * e_t[i] + g_p * e_p[i];
        }
        out
    }

    /// Boundary value `u|_{r=R}` up to degree `l_eval`.
    pub fn trace(&self, l_eval: usize) -> SphereFunction {
        self.trace_component(l_eval, 0, 1.0)
    }

    /// Derivative along the inward normal, `-∂_r u` at `r = R`.
    pub fn inward_normal_trace(&self, l_eval: usize) -> SphereFunction {
        self.trace_component(l_eval, 1, -1.0)
    }

    fn trace_component(&self, l_eval: usize, which: usize, sign: f64) -> SphereFunction {
        let mut g = SphereFunction::zeros(self.radius, l_eval);
        for (k, (l, _, f)) in self.grouped(self.radius) {
            if l <= l_eval {
                g.coeffs[k] = f[which] * sign;
            }
        }
        g
    }

    /// `‖u‖_{H²}` on the ball: `L²` norm of `u`, `∇u` and the full Hessian.
    pub fn h2_norm(&self) -> f64 {
        self.sobolev_norm_squared(2).sqrt()
    }

    /// `‖u‖_{H¹}`.
    pub fn h1_norm(&self) -> f64 {
        self.sobolev_norm_squared(1).sqrt()
    }

    fn sobolev_norm_squared(&self, order: usize) -> f64 {
        let n = (2 * self.l_max() + 40).max(64);
        let (nodes, weights) = gauss_legendre_interval(n, 0.0, self.radius);
        let mut total = 0.0;
        for (&r, &w) in nodes.iter().zip(&weights) {
            for (l, _, f) in self.grouped(r).values() {
                total += w * r * r * mode_density(*l, r, f, order);
            }
        }
        total
    }
}

/// Angular integral over the sphere of radius `r` (divided by `r²`) of
/// `|u|² + |∇u|² (+ |D²u|²)` for `u = f(r) Y_lm`.
fn mode_density(l: usize, r: f64, f: &[Complex64; 3], order: usize) -> f64 {
    let ll = (l * (l + 1)) as f64;
    let [f0, f1, f2] = *f;
    let mut d = f0.norm_sqr();
    if order >= 1 {
        d += f1.norm_sqr() + ll * f0.norm_sqr() / (r * r);
    }
    if order >= 2 {
        // radial-radial, mixed and tangential blocks of the Hessian of f Y
        let dfr = f1 / r - f0 / (r * r);
        d +=
            f2.norm_sqr() + 2.0 * ll * dfr.norm_sqr() + ll * (ll - 1.0) * f0.norm_sqr() / r.powi(4)
                - 2.0 * ll * (f0.conj() * f1).re / r.powi(3)
                + 2.0 * f1.norm_sqr() / (r * r);
    }
    d
}

/// The solution of `-Δu + u = 0` on the ball with trace `g`:
/// `u = Σ g_lm i_l(r)/i_l(R) Y_lm`.
pub fn orthocomplement_extension(g: &SphereFunction) -> BallFunction {
    let modes = lm_pairs(g.l_eval())
        .zip(&g.coeffs)
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|((l, m), c)| BallMode {
            l,
            m,
            profile: RadialProfile::ModifiedBessel { amplitude: *c },
        })
        .collect();
    BallFunction {
        radius: g.radius,
        modes,
    }
}

/// Right inverse of `T₁ u = (u|_∂B, ∂_ν u|_∂B)` with `ν` the inward normal.
///
/// Each mode gets the profile `c1 (r/R)^l + c2 (r/R)^{l+2}` with value `g0_lm`
/// and inward derivative `g1_lm` at `r = R`.
pub fn trace_right_inverse_z1(g0: &SphereFunction, g1: &SphereFunction) -> Result<BallFunction> {
    if (g0.radius - g1.radius).abs() > 1e-12 * g0.radius {
        return Err(Error::InvalidInput(
            "value and normal-derivative data on different spheres".into(),
        ));
    }
    let radius = g0.radius;
    let l_eval = g0.l_eval().max(g1.l_eval());
    let zero = Complex64::new(0.0, 0.0);
    let mut modes = Vec::new();
    for (l, m) in lm_pairs(l_eval) {
        let k = lm_index(l, m);
        let v = g0.coeffs.get(k).copied().unwrap_or(zero);
        let d = g1.coeffs.get(k).copied().unwrap_or(zero);
        if v == zero && d == zero {
            continue;
        }
        // f(R) = c1 + c2, -f'(R) = -(l c1 + (l+2) c2) / R
        let c2 = (-d * radius - v * l as f64) / 2.0;
        let c1 = v - c2;
        modes.push(BallMode {
            l,
            m,
            profile: RadialProfile::PowerPair { c1, c2 },
        });
    }
    Ok(BallFunction { radius, modes })
}

/// Per-degree ratios `‖E Y_lm‖_{H²(B)} / ‖Y_lm‖_{H^{3/2}(∂B)}` for the
/// extension `E` of [`orthocomplement_extension`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct H2BoundConstant {
    pub max: f64,
    pub argmax_l: usize,
    pub per_l: Vec<f64>,
}

/// Numerical best constant in `‖u‖_{H²} <= C ‖u|_∂B‖_{H^{3/2}}` over single
/// modes `l <= l_eval`. The ratio does not depend on `m`.
pub fn h2_bound_constant(radius: f64, l_eval: usize) -> Result<H2BoundConstant> {
    if l_eval > 100 {
        return Err(Error::InvalidInput(
            "h2_bound_constant supports l_eval <= 100".into(),
        ));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let per_l: Vec<f64> = (0..=l_eval)
        .map(|l| {
            let u = BallFunction {
                radius,
                modes: vec![BallMode {
                    l,
                    m: 0,
                    profile: RadialProfile::ModifiedBessel {
                        amplitude: Complex64::new(1.0, 0.0),
                    },
                }],
            };
            u.h2_norm() / mode_h32_norm(radius, l)
        })
        .collect();
    let (argmax_l, max) = per_l
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (l, v)| if v > acc.1 { (l, v) } else { acc });
    Ok(H2BoundConstant {
        max,
        argmax_l,
        per_l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single(l: usize, m: i64, profile: RadialProfile) -> BallFunction {
        BallFunction {
            radius: 1.0,
            modes: vec![BallMode { l, m, profile }],
        }
    }

    #[test]
    fn hessian_density_on_polynomials() {
        // u = |x|² = sqrt(4π) r² Y_00: Hessian 2I, so ∫|D²u|² = 12 · 4π/3 on the unit ball
        let u = single(
            0,
            0,
            RadialProfile::PowerPair {
                c1: Complex64::new(0.0, 0.0),
                c2: Complex64::new((4.0 * PI).sqrt(), 0.0),
            },
        );
        let h2 = u.h2_norm().powi(2);
        // ∫ r^4 + ∫ 4 r² + 12 over the ball
        let expect = 4.0 * PI * (1.0 / 7.0 + 4.0 / 5.0) + 12.0 * 4.0 * PI / 3.0;
        assert!((h2 - expect).abs() < 1e-12, "{h2} vs {expect}");
    }

    #[test]
    fn linear_function_has_no_hessian() {
        // r Y_1m is linear in x
        let u = single(
            1,
            1,
            RadialProfile::PowerPair {
                c1: Complex64::new(1.0, 0.0),
                c2: Complex64::new(0.0, 0.0),
            },
        );
        let h1 = u.h1_norm().powi(2);
        let h2 = u.h2_norm().powi(2);
        assert!((h2 - h1).abs() < 1e-12);
    }

    #[test]
    fn constant_trace_extension() {
        let c = Complex64::new(0.7, 0.0);
        let g = SphereFunction::new(2.0, vec![c * (4.0 * PI).sqrt()]);
        let u = orthocomplement_extension(&g);
        let r: f64 = 0.8;
        let expect = c.re * (2.0 / r) * r.sinh() / 2f64.sinh();
        let got = u.value(&Vec3::new(0.0, r, 0.0));
        assert!((got.re - expect).abs() < 1e-13);
    }

    #[test]
    fn z1_of_constant_is_constant() {
        let c = Complex64::new(1.5, -0.5);
        let g0 = SphereFunction::new(1.0, vec![c]);
        let g1 = SphereFunction::zeros(1.0, 0);
        let u = trace_right_inverse_z1(&g0, &g1).unwrap();
        match u.modes[0].profile {
            RadialProfile::PowerPair { c1, c2 } => {
                assert_eq!(c1, c);
                assert_eq!(c2, Complex64::new(0.0, 0.0));
            }
            _ => panic!(),
        }
    }
}
