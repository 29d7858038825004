use apw_core::radial::*;
use apw_core::Error;
use std::f64::consts::PI;

#[test]
fn well_residual_vanishes_at_reported_eigenvalue() {
    let w = well_matching_residual(1.0, PI, -0.457591).unwrap();
    assert!(w.abs() < 1e-4, "W = {w}");
}

#[test]
fn well_residual_has_no_root_near_bottom() {
    let deep = well_matching_residual(1.0, PI, -0.999).unwrap();
    let mid = well_matching_residual(1.0, PI, -0.9).unwrap();
    assert!(deep != 0.0);
    assert_eq!(deep.signum(), mid.signum());
}

#[test]
fn exactly_one_sign_change_in_single_state_regime() {
    let n = 5000;
    let mut changes = 0;
    let mut prev = well_matching_residual(1.0, PI, -0.99).unwrap();
    for i in 1..=n {
        let e = -0.99 + 0.98 * i as f64 / n as f64;
        let cur = well_matching_residual(1.0, PI, e).unwrap();
        if cur.signum() != prev.signum() {
            changes += 1;
        }
        prev = cur;
    }
    assert_eq!(changes, 1);
}

#[test]
fn bound_state_of_reference_well() {
    let e = find_bound_state(1.0, PI, 1e-8).unwrap();
    assert!((e + 0.457591).abs() < 1e-5, "E = {e}");
}

#[test]
fn threshold_well_has_no_bound_state() {
    // V0 a² = π²/4 exactly: a zero-energy resonance, not a bound state.
    // A dense scan of the residual agrees that nothing changes sign.
    let mut prev = well_matching_residual(1.0, PI / 2.0, -1.0 + 1e-9).unwrap();
    for i in 1..20000 {
        let e = -1.0 + 1e-9 + (1.0 - 2e-9) * i as f64 / 20000.0;
        let cur = well_matching_residual(1.0, PI / 2.0, e).unwrap();
        assert_eq!(cur.signum(), prev.signum());
        prev = cur;
    }
    assert!(matches!(
        find_bound_state(1.0, PI / 2.0, 1e-8),
        Err(Error::NoBracket { .. })
    ));
}

#[test]
fn rescaled_well_scales_energy() {
    // r -> r/2 maps (V0, a) = (1, π) onto (4, π/2) with E -> 4E
    let e1 = find_bound_state(1.0, PI, 1e-12).unwrap();
    let e4 = find_bound_state(4.0, PI / 2.0, 1e-12).unwrap();
    assert!((e4 - 4.0 * e1).abs() < 1e-9);
}

#[test]
fn too_deep_well_is_rejected() {
    assert!(matches!(
        find_bound_state(4.0, PI, 1e-8),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn normalization_constants() {
    let (v0, a) = (1.0, PI);
    let e = find_bound_state(v0, a, 1e-13).unwrap();
    let (amp_in, amp_out) = normalize_well_state(v0, a, e).unwrap();
    assert!((amp_in - 0.657960).abs() < 1e-4, "A = {amp_in}");
    assert!((amp_out - 4.05791).abs() < 1e-4, "C = {amp_out}");

    let alpha = (v0 + e).sqrt();
    let beta = (-e).sqrt();
    let cont = amp_in * (alpha * a).sin() - amp_out * (-beta * a).exp();
    assert!(cont.abs() < 1e-10);
    let norm = amp_in.powi(2) * (a / 2.0 - (2.0 * alpha * a).sin() / (4.0 * alpha))
        + amp_out.powi(2) * (-2.0 * beta * a).exp() / (2.0 * beta);
    assert!((norm - 1.0).abs() < 1e-10);

    // the tabulated value also passes continuity within the stated tolerance
    let (a2, c2) = normalize_well_state(v0, a, -0.457591).unwrap();
    let alpha2 = (v0 - 0.457591f64).sqrt();
    let beta2 = 0.457591f64.sqrt();
    assert!((a2 * (alpha2 * a).sin() - c2 * (-beta2 * a).exp()).abs() < 1e-5);
}

#[test]
fn bracket_density_does_not_move_the_root() {
    // an independent bisection on a coarser bracket
    let w = |e: f64| well_matching_residual(1.0, PI, e).unwrap();
    let (mut lo, mut hi) = (-0.9, -0.1);
    assert!(w(lo).signum() != w(hi).signum());
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if w(mid).signum() == w(lo).signum() {
            lo = mid
        } else {
            hi = mid
        }
    }
    let e = find_bound_state(1.0, PI, 1e-10).unwrap();
    assert!((e - 0.5 * (lo + hi)).abs() < 2e-10);
}

#[test]
fn numerov_log_derivative_agrees_with_bound_state() {
    let e = find_bound_state(1.0, PI, 1e-13).unwrap();
    let sol = integrate_radial(
        &RadialPotential::ConstantWell { depth: 1.0 },
        0,
        e,
        PI,
        4000,
    )
    .unwrap();
    let beta = (-e).sqrt();
    assert!((sol.dchi_at_r / sol.chi_at_r + beta).abs() < 1e-9);
}

#[test]
fn numerov_converges_at_fourth_order() {
    let (v0, e, r_big): (f64, f64, f64) = (2.0, -0.5, 2.0);
    let k = (v0 + e).sqrt();
    let err = |n: usize| {
        let sol =
            integrate_radial(&RadialPotential::ConstantWell { depth: v0 }, 0, e, r_big, n).unwrap();
        // grid point at R/2 is exact for even n
        let mid = sol.chi[n / 2 - 1];
        (mid / sol.chi_at_r - (k * r_big / 2.0).sin() / (k * r_big).sin()).abs()
    };
    // Numerov started from the exact origin series, so the error is pure O(h^4)
    let e1 = err(100);
    let e2 = err(200);
    let ratio = e1 / e2;
    assert!(
        ratio > 13.0 && ratio < 19.0,
        "ratio {ratio} ({e1:e}, {e2:e})"
    );
}

#[test]
fn tabulated_profile_reproduces_constant_well() {
    let radii: Vec<f64> = (1..=50).map(|i| i as f64 * 0.04).collect();
    let values = vec![-1.5; 50];
    let tab = RadialPotential::tabulated(radii, values).unwrap();
    let sol_tab = integrate_radial(&tab, 1, 0.3, 2.0, 2000).unwrap();
    let sol_const = integrate_radial(
        &RadialPotential::ConstantWell { depth: 1.5 },
        1,
        0.3,
        2.0,
        2000,
    )
    .unwrap();
    for (a, b) in sol_tab.chi.iter().zip(&sol_const.chi) {
        assert!((a - b).abs() < 1e-14);
    }
}
