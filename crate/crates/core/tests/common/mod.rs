#![allow(dead_code)]

use apw_core::orthonorm::{norm_1, GramPerturbation};
use apw_core::Complex64;
use nalgebra::DMatrix;
use rand::Rng;

/// Hermitian `ε` rescaled so that `2‖ε‖₁ + ε_max = target`.
pub fn random_gram_perturbation<R: Rng>(rng: &mut R, m: usize, target: f64) -> DMatrix<Complex64> {
    let mut eps = DMatrix::<Complex64>::zeros(m, m);
    for i in 0..m {
        eps[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            eps[(i, j)] = v;
            eps[(j, i)] = v.conj();
        }
    }
    let p = GramPerturbation {
        norm1: norm_1(&eps),
        eps_max: eps.diagonal().iter().map(|v| v.norm()).fold(0.0, f64::max),
        eps: eps.clone(),
    };
    eps * Complex64::new(target / p.smallness(), 0.0)
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}
