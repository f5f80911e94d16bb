use pcf_hopf::curvature::{bismut_ricci, soliton_residual};
use pcf_hopf::soliton::{check_asymptotics, kappa_inverse, profile_ode_rhs, solve_profile};
use pcf_hopf::{SolitonProfile, SurfaceParams64};
use proptest::prelude::*;

/// Classical RK4 for `k' = f(k)` from `k(0) = 1/2`, sampled at multiples of `h`
/// in the direction of `sign`.
fn rk4_branch(params: &SurfaceParams64, h: f64, steps: usize, sign: f64) -> Vec<f64> {
    let f = |k: f64| sign * profile_ode_rhs(params, k);
    let mut k = 0.5;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(k);
    for _ in 0..steps {
        let s1 = f(k);
        let s2 = f(k + 0.5 * h * s1);
        let s3 = f(k + 0.5 * h * s2);
        let s4 = f(k + h * s3);
        k += h / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
        out.push(k);
    }
    out
}

fn max_deviation_from_rk4(a: f64, b: f64, length: f64) -> f64 {
    let params = SurfaceParams64::from_log_moduli(a, b).unwrap();
    let profile = SolitonProfile::new(params);
    let h = 1e-3;
    let steps = (length / h).round() as usize;
    let mut worst = 0.0f64;
    for sign in [1.0, -1.0] {
        let branch = rk4_branch(&params, h, steps, sign);
        for (i, &k) in branch.iter().enumerate().step_by(50) {
            let x = sign * h * i as f64;
            worst = worst.max((profile.kappa(x).unwrap() - k).abs());
        }
    }
    worst
}

#[test]
fn closed_form_matches_integrated_ode() {
    for (a, b) in [(-2.0, -1.0), (-1.0, -2.0), (-0.3, -1.7), (-1.0, -1.0)] {
        let dev = max_deviation_from_rk4(a, b, 30.0);
        assert!(dev < 1e-9, "(a, b) = ({a}, {b}): deviation {dev:e}");
    }
}

#[test]
fn soliton_solves_the_reduced_system() {
    let params = SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap();
    let grid: Vec<f64> = (0..=600).map(|i| -30.0 + 0.1 * i as f64).collect();
    let (profile, jets) = solve_profile(&params, &grid).unwrap();
    assert!(soliton_residual(&profile, params.mu, &grid).unwrap() < 1e-10);
    let mid = grid.iter().position(|&x| x == 0.0).unwrap();
    assert_eq!(jets[mid].v, 0.5);
}

#[test]
fn equal_moduli_profile_is_the_logistic() {
    let params = SurfaceParams64::from_log_moduli(-1.0, -1.0).unwrap();
    let grid: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
    let (profile, jets) = solve_profile(&params, &grid).unwrap();
    for (&x, j) in grid.iter().zip(&jets) {
        assert!((j.v - 1.0 / (1.0 + (-x).exp())).abs() < 1e-15);
        assert!(bismut_ricci(&profile, x).unwrap().max_abs() < 1e-13);
    }
}

#[test]
fn asymptotic_slopes() {
    let params = SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap();
    let profile = SolitonProfile::new(params);
    let report = check_asymptotics(&profile, &params, 30.0, 1e-6);
    assert!(report.all_pass(), "{report:#?}");
    assert!(report.item("1b").unwrap().value.abs() < 1e-10);
    assert!(report.item("2b").unwrap().value.abs() < 1e-10);
}

#[test]
fn single_precision_profile_tracks_double() {
    let p64 = SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap();
    let p32 = pcf_hopf::SurfaceParams32::from_log_moduli(-2.0, -1.0).unwrap();
    let (s64, s32) = (SolitonProfile::new(p64), SolitonProfile::new(p32));
    for i in -20..=20 {
        let x = i as f64 * 0.5;
        let k64 = s64.kappa(x).unwrap();
        let k32 = s32.kappa(x as f32).unwrap() as f64;
        assert!((k64 - k32).abs() < 1e-6 * k64.max(1e-3), "x = {x}");
    }
}

fn moduli() -> impl Strategy<Value = (f64, f64)> {
    (-3.0f64..-0.1, -3.0f64..-0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_is_a_monotone_front((a, b) in moduli(), x in -25.0f64..25.0, dx in 1e-3f64..2.0) {
        let s = SolitonProfile::new(SurfaceParams64::from_log_moduli(a, b).unwrap());
        let k0 = s.kappa(x).unwrap();
        let k1 = s.kappa(x + dx).unwrap();
        prop_assert!(k0 > 0.0 && k1 < 1.0);
        prop_assert!(k1 > k0);
        prop_assert_eq!(s.kappa(0.0).unwrap(), 0.5);
    }

    #[test]
    fn inverse_round_trips((a, b) in moduli(), x in -15.0f64..15.0) {
        let s = SolitonProfile::new(SurfaceParams64::from_log_moduli(a, b).unwrap());
        let k = s.kappa(x).unwrap();
        let back = kappa_inverse(&s, k).unwrap();
        // dx/dk blows up near 0 and 1, so compare in x scaled by k(1 - k).
        prop_assert!((back - x).abs() * k * (1.0 - k) < 1e-12);
    }

    #[test]
    fn residual_vanishes_for_all_moduli((a, b) in moduli()) {
        let params = SurfaceParams64::from_log_moduli(a, b).unwrap();
        let s = SolitonProfile::new(params);
        let grid: Vec<f64> = (0..=60).map(|i| -15.0 + 0.5 * i as f64).collect();
        prop_assert!(soliton_residual(&s, params.mu, &grid).unwrap() < 1e-10);
    }

    // The left tail relaxes like e^{(a/b) x}, so x = -30 is only asymptotic
    // when a/b is not small.
    #[test]
    fn tail_slopes_match_the_ends(b in -3.0f64..-0.1, c in 0.7f64..3.0) {
        let a = c * b;
        let params = SurfaceParams64::from_log_moduli(a, b).unwrap();
        let s = SolitonProfile::new(params);
        let report = check_asymptotics(&s, &params, 30.0, 1e-6);
        prop_assert!(report.item("1b").unwrap().pass);
        if !params.equal_moduli() {
            prop_assert!(report.item("2b").unwrap().pass);
        }
    }
}
