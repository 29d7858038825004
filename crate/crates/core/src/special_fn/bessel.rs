// Spherical Bessel functions of integer order.
//
// Both j_l and i_l are computed by downward (Miller) recurrence for x > 1,
// normalized against the closed forms of the lowest orders, and by their
// power series for x <= 1.

const SERIES_CUTOFF: f64 = 1.0;
const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;
/// Above this argument `i_l` is reported with an explicit `e^x` factor.
const SCALED_ABOVE: f64 = 30.0;

/// `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> f64 {
        if self.log_scale == 0.0 {
            self.mantissa
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

fn miller_start(lmax: usize, x: f64) -> usize {
    let top = (lmax as f64).max(x.ceil());
    top as usize + 50 + (4.0 * x.sqrt()).ceil() as usize
}

/// Runs `f_{n-1} = (2n+1)/x f_n + sign * f_{n+1}` downward from a large
/// starting order and returns `f_0..=f_lmax` up to a common factor.
fn downward(lmax: usize, x: f64, sign: f64) -> Vec<f64> {
    let start = miller_start(lmax, x);
    let mut out = vec![0.0; lmax + 1];
    let mut above = 0.0;
    let mut cur = 1e-30;
    for n in (1..=start).rev() {
        let below = (2 * n + 1) as f64 / x * cur + sign * above;
        above = cur;
        cur = below;
        if n - 1 <= lmax {
            out[n - 1] = cur;
        }
        if n <= lmax {
            out[n] = above;
        }
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            for v in out.iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    out
}

/// Power series `x^l/(2l+1)!! * sum_k (sign x^2/2)^k / (k! (2l+3)...(2l+2k+1))`.
fn series(l: usize, x: f64, sign: f64) -> f64 {
    let mut prefactor = 1.0;
    for k in 1..=l {
        prefactor *= x / (2 * k + 1) as f64;
    }
    if prefactor == 0.0 {
        return 0.0;
    }
    let half_x2 = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= sign * half_x2 / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    prefactor * sum
}

/// `j_0(x), ..., j_lmax(x)` for `x >= 0`.
pub fn spherical_bessel_j_array(lmax: usize, x: f64) -> Vec<f64> {
    assert!(
        x >= 0.0 && x.is_finite(),
        "spherical_bessel_j: x must be finite and nonnegative"
    );
    if x <= SERIES_CUTOFF {
        return (0..=lmax).map(|l| series(l, x, -1.0)).collect();
    }
    let lm = lmax.max(1);
    let mut f = downward(lm, x, -1.0);
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let scale = if j0.abs() >= j1.abs() {
        j0 / f[0]
    } else {
        j1 / f[1]
    };
    for v in f.iter_mut() {
        *v *= scale;
    }
    f.truncate(lmax + 1);
    f
}

/// Spherical Bessel function of the first kind `j_l(x)`.
pub fn spherical_bessel_j(l: usize, x: f64) -> f64 {
    if x <= SERIES_CUTOFF {
        return series(l, x, -1.0);
    }
    spherical_bessel_j_array(l, x)[l]
}

/// `d/dx j_l(x)`.
pub fn spherical_bessel_j_derivative(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 1 { 1.0 / 3.0 } else { 0.0 };
    }
    let j = spherical_bessel_j_array(l + 1, x);
    if l == 0 {
        -j[1]
    } else {
        // (l j_{l-1} - (l+1) j_{l+1}) / (2l+1) avoids the 1/x division near 0
        (l as f64 * j[l - 1] - (l + 1) as f64 * j[l + 1]) / (2 * l + 1) as f64
    }
}

/// Mantissas of `i_0(x), ..., i_lmax(x)` sharing one `log_scale`.
///
/// The log scale is `x` when `x > 30` and zero otherwise.
pub fn modified_spherical_bessel_i_array(lmax: usize, x: f64) -> (Vec<f64>, f64) {
    assert!(
        x >= 0.0 && x.is_finite(),
        "modified_spherical_bessel_i: x must be finite and nonnegative"
    );
    if x <= SERIES_CUTOFF {
        return ((0..=lmax).map(|l| series(l, x, 1.0)).collect(), 0.0);
    }
    let mut f = downward(lmax, x, 1.0);
    // e^{-x} i_0(x) = (1 - e^{-2x}) / (2x)
    let (i0, log_scale) = if x > SCALED_ABOVE {
        (-(-2.0 * x).exp_m1() / (2.0 * x), x)
    } else {
        (x.sinh() / x, 0.0)
    };
    let scale = i0 / f[0];
    for v in f.iter_mut() {
        *v *= scale;
    }
    (f, log_scale)
}

/// Modified spherical Bessel function of the first kind `i_l(x)`, regular
/// at the origin, with an `e^x` factor split off for `x > 30`.
pub fn modified_spherical_bessel_i(l: usize, x: f64) -> ScaledValue {
    let (m, log_scale) = modified_spherical_bessel_i_array(l, x);
    ScaledValue {
        mantissa: m[l],
        log_scale,
    }
}

/// `i_l(r) / i_l(big_r)` without overflow.
pub fn modified_bessel_ratio(l: usize, r: f64, big_r: f64) -> f64 {
    let num = modified_spherical_bessel_i(l, r);
    let den = modified_spherical_bessel_i(l, big_r);
    if num.mantissa == 0.0 {
        return 0.0;
    }
    num.mantissa / den.mantissa * (num.log_scale - den.log_scale).exp()
}
