use num_complex::Complex64;

use super::ball::{orthocomplement_extension, BallFunction};
use super::sphere_fn::{boundary_sobolev_norm, SphereFunction};
use crate::apw_basis::{rayleigh_coefficients, ApwFunction};
use crate::geometry::{Sphere, Vec3};

/// A tuple of region-wise functions on a cell whose only internal
/// boundaries are spheres.
pub trait PiecewiseFunction {
    fn spheres(&self) -> Vec<Sphere>;

    /// Exterior minus interior trace on sphere `alpha`, degrees `<= l_eval`.
    fn jump(&self, alpha: usize, l_eval: usize) -> SphereFunction;
}

impl PiecewiseFunction for ApwFunction {
    fn spheres(&self) -> Vec<Sphere> {
        self.geometry.spheres().to_vec()
    }

    fn jump(&self, alpha: usize, l_eval: usize) -> SphereFunction {
        self.boundary_jump(alpha, l_eval).to_sphere_function()
    }
}

/// Region-wise data built from plane waves and ball functions: the
/// interstitial part is `Σ c e^{iq·x}`, the part inside sphere `α` is its own
/// plane-wave sum plus a [`BallFunction`] centered on the sphere.
#[derive(Debug, Clone)]
pub struct PiecewiseTuple {
    pub spheres: Vec<Sphere>,
    pub exterior: Vec<(Complex64, Vec3)>,
    pub interior_waves: Vec<Vec<(Complex64, Vec3)>>,
    pub interior_ball: Vec<BallFunction>,
}

impl PiecewiseTuple {
    /// Restriction of the single function `Σ c e^{iq·x}` to every region.
    pub fn restricted(spheres: Vec<Sphere>, waves: Vec<(Complex64, Vec3)>) -> Self {
        let n = spheres.len();
        Self {
            interior_ball: spheres
                .iter()
                .map(|s| BallFunction::zero(s.radius))
                .collect(),
            interior_waves: vec![waves.clone(); n],
            exterior: waves,
            spheres,
        }
    }

    fn wave_trace(s: &Sphere, waves: &[(Complex64, Vec3)], l_eval: usize) -> SphereFunction {
        let mut g = SphereFunction::zeros(s.radius, l_eval);
        for (c, q) in waves {
            let t = rayleigh_coefficients(q, &s.center, s.radius, l_eval);
            for (gi, ti) in g.coeffs.iter_mut().zip(&t) {
                *gi += c * ti;
            }
        }
        g
    }
}

impl PiecewiseFunction for PiecewiseTuple {
    fn spheres(&self) -> Vec<Sphere> {
        self.spheres.clone()
    }

    fn jump(&self, alpha: usize, l_eval: usize) -> SphereFunction {
        let s = &self.spheres[alpha];
        let outside = Self::wave_trace(s, &self.exterior, l_eval);
        let inside = Self::wave_trace(s, &self.interior_waves[alpha], l_eval)
            .add(&self.interior_ball[alpha].trace(l_eval));
        outside.sub(&inside)
    }
}

/// `Σ_α ‖jump_α‖_{H^{3/2}}`, each sphere boundary counted once.
pub fn jump_seminorm<P: PiecewiseFunction + ?Sized>(u: &P, l_eval: usize) -> f64 {
    (0..u.spheres().len())
        .map(|a| boundary_sobolev_norm(&u.jump(a, l_eval), 1.5))
        .sum()
}

/// A zero-jump modification of a piecewise function.
#[derive(Debug, Clone)]
pub struct Surrogate {
    /// Added to the interior of each sphere; zero outside.
    pub corrections: Vec<BallFunction>,
    /// Jumps after correction (zero up to rounding).
    pub residual_jumps: Vec<SphereFunction>,
    /// `‖Φ‖` in the broken `H²` norm, an upper bound for the distance of the
    /// input to the jump-free functions.
    pub dist_upper: f64,
}

/// Removes every sphere jump by adding the `(-Δ+1)`-harmonic extension of
/// the jump inside the sphere.
pub fn continuous_surrogate<P: PiecewiseFunction + ?Sized>(u: &P, l_eval: usize) -> Surrogate {
    let spheres = u.spheres();
    let mut corrections = Vec::with_capacity(spheres.len());
    let mut residual_jumps = Vec::with_capacity(spheres.len());
    let mut dist2 = 0.0;
    for alpha in 0..spheres.len() {
        let g = u.jump(alpha, l_eval);
        let phi = orthocomplement_extension(&g);
        dist2 += phi.h2_norm().powi(2);
        residual_jumps.push(g.sub(&phi.trace(l_eval)));
        corrections.push(phi);
    }
    Surrogate {
        corrections,
        residual_jumps,
        dist_upper: dist2.sqrt(),
    }
}
