use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special_fn::{lm_count, lm_pairs, spherical_harmonics_all, SphereQuadrature};
use crate::{Error, Result};

/// Function on a sphere of radius `R`, `g(ω) = Σ g_lm Y_lm(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFunction {
    pub radius: f64,
    /// Indexed by [`crate::special_fn::lm_index`].
    pub coeffs: Vec<Complex64>,
}

impl SphereFunction {
    /// Pads `coeffs` with zeros up to the next complete degree.
    pub fn new(radius: f64, mut coeffs: Vec<Complex64>) -> Self {
        let mut l = 0;
        while lm_count(l) < coeffs.len() {
            l += 1;
        }
        coeffs.resize(lm_count(l), Complex64::new(0.0, 0.0));
        Self { radius, coeffs }
    }

    pub fn zeros(radius: f64, l_eval: usize) -> Self {
        Self {
            radius,
            coeffs: vec![Complex64::new(0.0, 0.0); lm_count(l_eval)],
        }
    }

    pub fn l_eval(&self) -> usize {
        (self.coeffs.len() as f64).sqrt().round() as usize - 1
    }

    /// `g(θ, φ)`.
    pub fn value(&self, theta: f64, phi: f64) -> Complex64 {
        let y = spherical_harmonics_all(self.l_eval(), theta, phi);
        self.coeffs.iter().zip(&y).map(|(c, y)| c * y).sum()
    }

    /// Projection of `f(θ, φ)` onto degrees `l <= l_eval` by quadrature of
    /// order `2 l_eval` (exact for band-limited `f` of degree `<= l_eval`).
    pub fn project<F: FnMut(f64, f64) -> Complex64>(radius: f64, l_eval: usize, f: F) -> Self {
        let q = SphereQuadrature::new((2 * l_eval).max(1));
        Self {
            radius,
            coeffs: q.project(l_eval, f),
        }
    }

    fn aligned(&self, other: &Self) -> (Vec<Complex64>, Vec<Complex64>) {
        assert!(
            (self.radius - other.radius).abs() <= 1e-12 * self.radius.abs().max(other.radius.abs()),
            "sphere functions live on different spheres"
        );
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut a = self.coeffs.clone();
        let mut b = other.coeffs.clone();
        a.resize(n, Complex64::new(0.0, 0.0));
        b.resize(n, Complex64::new(0.0, 0.0));
        (a, b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self {
            radius: self.radius,
            coeffs: a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self {
            radius: self.radius,
            coeffs: a.iter().zip(&b).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            radius: self.radius,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// `[(l, m, re, im), ...]`.
    pub fn to_json(&self) -> String {
        let rows: Vec<(usize, i64, f64, f64)> = lm_pairs(self.l_eval())
            .zip(&self.coeffs)
            .map(|((l, m), c)| (l, m, c.re, c.im))
            .collect();
        serde_json::to_string(&SphereFunctionJson {
            radius: self.radius,
            coefficients: rows,
        })
        .expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SphereFunctionJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("sphere function JSON: {e}")))?;
        let l_eval = raw.coefficients.iter().map(|r| r.0).max().unwrap_or(0);
        let mut out = Self::zeros(raw.radius, l_eval);
        for (l, m, re, im) in raw.coefficients {
            if m.unsigned_abs() as usize > l {
                return Err(Error::InvalidInput(format!(
                    "coefficient (l, m) = ({l}, {m}) has |m| > l"
                )));
            }
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "coefficient ({l}, {m}) is not finite"
                )));
            }
            out.coeffs[crate::special_fn::lm_index(l, m)] = Complex64::new(re, im);
        }
        if !(raw.radius > 0.0 && raw.radius.is_finite()) {
            return Err(Error::InvalidInput("sphere radius must be positive".into()));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereFunctionJson {
    radius: f64,
    coefficients: Vec<(usize, i64, f64, f64)>,
}

/// `H^s` norm on the sphere of radius `R`,
/// `(R² Σ_lm (1 + l(l+1)/R²)^s |g_lm|²)^{1/2}`.
///
/// The weights are the eigenvalues of `1 - Δ_S` on the sphere of radius `R`;
/// at `s = 0` this is the surface `L²` norm.
pub fn boundary_sobolev_norm(g: &SphereFunction, s: f64) -> f64 {
    assert!((0.0..=3.0).contains(&s), "Sobolev order must lie in [0, 3]");
    let r2 = g.radius * g.radius;
    let sum: f64 = lm_pairs(g.l_eval())
        .zip(&g.coeffs)
        .map(|((l, _), c)| (1.0 + (l * (l + 1)) as f64 / r2).powf(s) * c.norm_sqr())
        .sum();
    (r2 * sum).sqrt()
}

/// `H^{3/2}` norm of one degree-`l` mode with unit coefficient.
pub(crate) fn mode_h32_norm(radius: f64, l: usize) -> f64 {
    radius * (1.0 + (l * (l + 1)) as f64 / (radius * radius)).powf(0.75)
}
