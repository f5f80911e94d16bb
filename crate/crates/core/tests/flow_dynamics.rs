use pcf_hopf::flow::{
    comparison_envelope, run_flow, shift_distance, step, BumpPerturbed, FlowControls, FlowState, Shifted, TimeScheme,
};
use pcf_hopf::scalar::sigmoid;
use pcf_hopf::{SolitonProfile, SurfaceParams64};
use proptest::prelude::*;

fn setup() -> (SurfaceParams64, SolitonProfile<f64>) {
    let p = SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap();
    (p, SolitonProfile::new(p))
}

fn fixed(dt: f64, scheme: TimeScheme) -> FlowControls<f64> {
    FlowControls { dt0: dt, dt_max: dt, growth: 1.0, scheme, record_interval: 1.0, ..FlowControls::default() }
}

fn traveling_wave_error(nodes: usize, dt: f64, scheme: TimeScheme) -> f64 {
    let (p, sol) = setup();
    let s = FlowState::from_logit(p, 40.0, nodes, &sol).unwrap();
    let run = run_flow(s, &sol, 1.0, &fixed(dt, scheme)).unwrap();
    let t = run.state.t;
    run.state
        .grid()
        .iter()
        .zip(&run.state.theta)
        .map(|(&x, &th)| (sigmoid(th) - sol.kappa(x + p.mu * t).unwrap()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn soliton_travels_rigidly() {
    let coarse = traveling_wave_error(2001, 0.02, TimeScheme::Bdf2);
    let fine = traveling_wave_error(4001, 0.01, TimeScheme::Bdf2);
    assert!(fine < 1e-4, "{fine:e}");
    assert!(coarse / fine > 3.0, "{coarse:e} / {fine:e}");
}

#[test]
fn first_order_schemes_converge_at_first_order() {
    for scheme in [TimeScheme::Conservative, TimeScheme::Logit] {
        let coarse = traveling_wave_error(1001, 0.04, scheme);
        let fine = traveling_wave_error(2001, 0.02, scheme);
        let ratio = coarse / fine;
        assert!((1.7..2.5).contains(&ratio), "{scheme:?}: {coarse:e} / {fine:e}");
    }
}

#[test]
fn mass_moves_by_the_boundary_flux() {
    // With Neumann slopes a/b and 1, the trapezoidal integral of k grows at
    // rate 1 - a/b exactly for the conservative schemes.
    let (p, sol) = setup();
    let bump = BumpPerturbed { soliton: sol, amplitude: 1.2, center: -1.0, width: 2.0 };
    let s0 = FlowState::from_logit(p, 20.0, 801, &bump).unwrap();
    let mass = |s: &FlowState<f64>| {
        let k = s.k();
        let h = s.spacing();
        h * (k.iter().sum::<f64>() - 0.5 * (k[0] + k[k.len() - 1]))
    };
    for scheme in [TimeScheme::Conservative, TimeScheme::Bdf2] {
        let c = FlowControls { scheme, ..FlowControls::default() };
        let run = run_flow(s0.clone(), &sol, 3.0, &c).unwrap();
        let gained = mass(&run.state) - mass(&s0);
        assert!((gained - 3.0 * (1.0 - p.c_k)).abs() < 1e-9, "{scheme:?}: {gained}");
    }
}

#[test]
fn translate_keeps_its_offset() {
    let (p, sol) = setup();
    let s = FlowState::from_logit(p, 30.0, 1501, &Shifted { soliton: sol, delta: 1.5 }).unwrap();
    let (lo, hi) = comparison_envelope(&s, &sol);
    assert!((hi - 1.5).abs() < 1e-9 && (lo + 1.5).abs() < 1e-9, "{lo} {hi}");
    let c = FlowControls { dt_max: 0.05, ..FlowControls::default() };
    let run = run_flow(s, &sol, 2.0, &c).unwrap();
    let (shift, err) = shift_distance(&run.state, &sol).unwrap();
    assert!((shift - (1.5 + p.mu * 2.0)).abs() < 1e-3, "{shift}");
    assert!(err < 1e-4, "{err:e}");
}

#[test]
fn bump_relaxes_onto_the_front() {
    let (p, sol) = setup();
    let bump = BumpPerturbed { soliton: sol, amplitude: -1.5, center: 0.0, width: 3.0 };
    let s = FlowState::from_logit(p, 40.0, 2001, &bump).unwrap();
    let c = FlowControls { record_interval: 0.1, target: Some(1e-3), ..FlowControls::default() };
    let run = run_flow(s, &sol, 20.0, &c).unwrap();
    assert!(run.reached_target);
    assert!(run.envelope_increase() <= 1e-6);
    let first = run.records.first().unwrap().aligned_sup_error;
    let last = run.records.last().unwrap().aligned_sup_error;
    assert!(last < 1e-3 && first > 1e-2, "{first} {last}");
}

#[test]
fn rejects_data_with_wrong_tails() {
    let (p, sol) = setup();
    let flat = BumpPerturbed { soliton: sol, amplitude: 0.0, center: 0.0, width: 1.0 };
    let mut s = FlowState::from_logit(p, 20.0, 401, &flat).unwrap();
    s.theta[0] += 0.5;
    assert!(run_flow(s, &sol, 1.0, &FlowControls::default()).is_err());
}

#[test]
fn front_leaving_the_window_is_reported() {
    let (p, sol) = setup();
    let s = FlowState::from_logit(p, 6.0, 241, &sol).unwrap();
    assert!(run_flow(s, &sol, 10.0, &FlowControls::default()).is_err());
}

#[test]
fn single_precision_flow_runs() {
    let p = pcf_hopf::SurfaceParams32::from_log_moduli(-2.0, -1.0).unwrap();
    let sol = SolitonProfile::new(p);
    let s = FlowState::from_logit(p, 20.0, 401, &sol).unwrap();
    let c = FlowControls { newton_tol: 1e-5, ..FlowControls::default() };
    let run = run_flow(s, &sol, 1.0, &c).unwrap();
    assert!(run.records.last().unwrap().aligned_sup_error < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn envelope_never_grows(amp in -2.5f64..2.5, center in -4.0f64..4.0, width in 0.8f64..4.0) {
        let (p, sol) = setup();
        let bump = BumpPerturbed { soliton: sol, amplitude: amp, center, width };
        let s = FlowState::from_logit(p, 30.0, 601, &bump).unwrap();
        let c = FlowControls { record_interval: 0.1, target: Some(5e-3), ..FlowControls::default() };
        let run = run_flow(s, &sol, 3.0, &c).unwrap();
        prop_assert!(run.envelope_increase() <= 1e-6, "{:e}", run.envelope_increase());
    }

    #[test]
    fn implicit_step_keeps_k_in_the_unit_interval(amp in -6.0f64..6.0, width in 0.3f64..3.0, dt in 1e-3f64..1.0) {
        let (p, sol) = setup();
        let bump = BumpPerturbed { soliton: sol, amplitude: amp, center: 0.0, width };
        let s = FlowState::from_logit(p, 15.0, 301, &bump).unwrap();
        let next = step(&s, dt, &FlowControls::default()).unwrap();
        prop_assert!(next.k().iter().all(|&k| k > 0.0 && k < 1.0));
        prop_assert!(next.theta.iter().all(|t| t.is_finite()));
    }
}
