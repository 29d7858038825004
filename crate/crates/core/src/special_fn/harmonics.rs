use num_complex::Complex64;
use std::f64::consts::PI;

/// Flat index of `(l, m)`: `l^2 + l + m`.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Number of `(l, m)` pairs with `l <= lmax`.
#[inline]
pub fn lm_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

/// All `(l, m)` pairs with `l <= lmax` in flat-index order.
pub fn lm_pairs(lmax: usize) -> impl Iterator<Item = (usize, i64)> {
    (0..=lmax).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
}

/// Orthonormalized associated Legendre functions `N_lm P_l^m(cos θ)` for
/// `0 <= m <= l <= lmax`, Condon–Shortley phase included. Index `lm_index(l, m)`.
fn normalized_legendre(lmax: usize, theta: f64) -> Vec<f64> {
    let (s, x) = theta.sin_cos();
    let mut p = vec![0.0; lm_count(lmax)];
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        p[lm_index(m, m as i64)] = pmm;
        if m == lmax {
            break;
        }
        let mut prev2 = pmm;
        let mut prev1 = x * ((2 * m + 3) as f64).sqrt() * pmm;
        p[lm_index(m + 1, m as i64)] = prev1;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            let cur = a * (x * prev1 - b * prev2);
            p[lm_index(l, m as i64)] = cur;
            prev2 = prev1;
            prev1 = cur;
        }
    }
    p
}

/// `Y_lm(θ, φ)` for all `l <= lmax`, indexed by [`lm_index`].
pub fn spherical_harmonics_all(lmax: usize, theta: f64, phi: f64) -> Vec<Complex64> {
    let p = normalized_legendre(lmax, theta);
    let mut y = vec![Complex64::new(0.0, 0.0); lm_count(lmax)];
    for l in 0..=lmax {
        for m in 0..=l as i64 {
            let v = Complex64::from_polar(p[lm_index(l, m)], m as f64 * phi);
            y[lm_index(l, m)] = v;
            if m > 0 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                y[lm_index(l, -m)] = v.conj() * sign;
            }
        }
    }
    y
}

/// Orthonormal complex spherical harmonic `Y_lm(θ, φ)`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    assert!(
        m.unsigned_abs() as usize <= l,
        "spherical_harmonic: |m| > l"
    );
    let p = normalized_legendre(l, theta);
    let v = Complex64::from_polar(p[lm_index(l, m.abs())], m.abs() as f64 * phi);
    if m >= 0 {
        v
    } else if m % 2 == 0 {
        v.conj()
    } else {
        -v.conj()
    }
}

/// Angular gradient components `(∂_θ Y_lm, (1/sin θ) ∂_φ Y_lm)`.
///
/// Uses `∂_θ Y_lm = m cot θ Y_lm + sqrt((l-m)(l+m+1)) e^{-iφ} Y_{l,m+1}`.
/// Undefined on the poles.
pub fn spherical_harmonic_gradient(
    l: usize,
    m: i64,
    theta: f64,
    phi: f64,
) -> (Complex64, Complex64) {
    let (s, c) = theta.sin_cos();
    let y = spherical_harmonic(l, m, theta, phi);
    let mf = m as f64;
    let mut d_theta = y * (mf * c / s);
    if m < l as i64 {
        let lf = l as f64;
        let up = spherical_harmonic(l, m + 1, theta, phi);
        d_theta += up * Complex64::from_polar(((lf - mf) * (lf + mf + 1.0)).sqrt(), -phi);
    }
    let d_phi = y * Complex64::new(0.0, mf / s);
    (d_theta, d_phi)
}
