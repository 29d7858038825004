//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;
use std::sync::Arc;

use apw_core::geometry::{MuffinTinGeometry, Sphere, Vec3};
use apw_core::radial::RadialPotential;
use apw_core::secular::PotentialSpec;
use apw_core::Complex64;
use nalgebra::DMatrix;

/// Cubic cell of side `2π` with one sphere of radius 2.
pub fn one_sphere_cell() -> Arc<MuffinTinGeometry> {
    let s = Sphere::new(Vec3::new(PI, PI, PI), 2.0);
    Arc::new(MuffinTinGeometry::cubic(2.0 * PI, vec![s]).expect("valid cell"))
}

pub fn well_potential(depth: f64) -> PotentialSpec {
    PotentialSpec {
        interstitial: 0.0,
        spheres: vec![RadialPotential::ConstantWell { depth }],
    }
}

/// Hermitian `I + ε` with `2‖ε‖₁ + ε_max` close to `0.5`, deterministic in `m`.
pub fn near_identity_gram(m: usize) -> DMatrix<Complex64> {
    let scale = 0.2 / m as f64;
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            Complex64::new(1.0 + 0.1 * ((i + 1) as f64).sin(), 0.0)
        } else {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let v = Complex64::new((a + 2.0 * b).cos(), (a * b + 1.0).sin()) * scale;
            if i < j {
                v
            } else {
                v.conj()
            }
        }
    })
}
