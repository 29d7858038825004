use num_complex::Complex64;
use std::f64::consts::PI;

use super::harmonics::{lm_count, spherical_harmonics_all};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` times the
/// trapezoid rule in `φ`.
///
/// Integrates `Y_lm conj(Y_l'm')` exactly for `l, l' <= order`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub order: usize,
    /// `(θ, φ)` in radians.
    pub nodes: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(order: usize) -> Self {
        assert!(
            (1..=100).contains(&order),
            "sphere quadrature order must be in 1..=100"
        );
        let n_theta = order + 1;
        let n_phi = 2 * order + 1;
        let (x, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = xi.acos();
            for j in 0..n_phi {
                nodes.push((theta, j as f64 * dphi));
                weights.push(wi * dphi);
            }
        }
        Self {
            order,
            nodes,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Unit vector of node `i`.
    pub fn direction(&self, i: usize) -> [f64; 3] {
        let (t, p) = self.nodes[i];
        [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
    }

    pub fn integrate<F: FnMut(f64, f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&(t, p), w)| f(t, p) * *w)
            .sum()
    }

    /// Coefficients `∫ f conj(Y_lm) dω` for `l <= lmax`.
    pub fn project<F: FnMut(f64, f64) -> Complex64>(
        &self,
        lmax: usize,
        mut f: F,
    ) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); lm_count(lmax)];
        for (&(t, p), w) in self.nodes.iter().zip(&self.weights) {
            let v = f(t, p) * *w;
            let y = spherical_harmonics_all(lmax, t, p);
            for (o, yi) in out.iter_mut().zip(&y) {
                *o += v * yi.conj();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::spherical_harmonic;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        for k in 0..12 {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            let expect = if k % 2 == 1 {
                0.0
            } else {
                2.0 / (k as f64 + 1.0)
            };
            assert!((got - expect).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn weights_sum_to_sphere_area() {
        let q = SphereQuadrature::new(4);
        let total: f64 = q.weights.iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        let one = q.integrate(|_, _| Complex64::new(1.0, 0.0));
        assert!((one.re - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn orthonormality_examples() {
        let q = SphereQuadrature::new(10);
        let v = q.integrate(|t, p| {
            spherical_harmonic(3, 3, t, p) * spherical_harmonic(3, 3, t, p).conj()
        });
        assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        let v = q.integrate(|t, p| {
            spherical_harmonic(2, 1, t, p) * spherical_harmonic(1, 1, t, p).conj()
        });
        assert!(v.norm() < 1e-12);
    }
}
