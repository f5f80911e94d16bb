use num_complex::Complex;
use pcf_hopf::curvature::{bismut_ricci, bismut_ricci_oracle, chern_ricci, lie_derivative_y};
use pcf_hopf::geometry::{is_pluriclosed, metric_z};
use pcf_hopf::{Diagonal, FnLogit, FnProfile, Jet, MetricProfile, ProfileJets, SolitonProfile, SurfaceParams64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

fn errors(profile: &impl MetricProfile<f64>, x: f64) -> [f64; 3] {
    let exact = bismut_ricci(profile, x).unwrap();
    STEPS.map(|h| (bismut_ricci_oracle(profile, x, h).unwrap().0 - exact.0).max_abs())
}

fn orders(e: [f64; 3]) -> [f64; 2] {
    [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()]
}

/// Sum of a few random sinusoids, a smooth bounded perturbation.
struct RandomProfile {
    modes: Vec<[f64; 4]>,
}

impl RandomProfile {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..3)
            .map(|_| {
                [
                    rng.gen_range(0.3..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                    rng.gen_range(0.3..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ]
            })
            .collect();
        Self { modes }
    }
}

impl MetricProfile<f64> for RandomProfile {
    fn jets(&self, x: f64) -> ProfileJets<f64> {
        let x = Jet::variable(x);
        let mut k = Jet::constant(1.4);
        let mut n = Jet::constant(0.1);
        let mut m = Jet::zero();
        for (i, &[w1, p1, w2, p2]) in self.modes.iter().enumerate() {
            let s = 1.0 / (i as f64 + 2.0);
            k = k + (x * w1).shift(p1).sin() * (0.2 * s);
            n = n + (x * w2).shift(p2).cos() * (0.15 * s);
            m = m + (x * w1).shift(p2).sin() * (0.1 * s);
        }
        ProfileJets { k, n, m, p: Jet::one() }
    }
}

#[test]
fn closed_form_agrees_with_oracle_at_second_order() {
    let sol = SolitonProfile::new(SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap());
    let sol2 = SolitonProfile::new(SurfaceParams64::from_log_moduli(-0.5, -2.5).unwrap());
    let trig = FnProfile::new(|x: Jet<f64>| ProfileJets {
        k: (x * 0.7).tanh() * 0.4 + 1.3,
        n: (x * 0.5).sin() * 0.3,
        m: (x * 0.8).cos() * 0.2,
        p: Jet::one(),
    });
    let wobble = Diagonal(FnLogit::new(|x: Jet<f64>| x + x.sin() * 0.3));
    let random = RandomProfile::new(7);

    let profiles: Vec<(&str, &dyn MetricProfile<f64>)> =
        vec![("soliton", &sol), ("soliton-2", &sol2), ("trig", &trig), ("diagonal", &wobble), ("random", &random)];
    for (name, p) in profiles {
        for x in [-1.3, 0.4, 2.1] {
            let e = errors(&p, x);
            for q in orders(e) {
                assert!((1.8..=2.2).contains(&q), "{name} at {x}: errors {e:?} order {q}");
            }
        }
    }
}

#[test]
fn soliton_curvature_is_a_lie_derivative() {
    let params = SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap();
    let s = SolitonProfile::new(params);
    for i in -20..=20 {
        let x = 0.5 * i as f64;
        let rho = bismut_ricci(&s, x).unwrap().0;
        let lie = lie_derivative_y(&s, x).scale(Complex::new(params.mu, 0.0));
        assert!((rho - lie).max_abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn chern_and_bismut_differ_off_kahler() {
    // The two Ricci forms agree on (1, 1̄) only when the torsion term vanishes.
    let s = SolitonProfile::new(SurfaceParams64::from_log_moduli(-2.0, -1.0).unwrap());
    let b = bismut_ricci(&s, 0.3).unwrap().0;
    let c = chern_ricci(&s, 0.3).unwrap().0;
    assert!((b[(0, 0)] - c[(0, 0)]).norm() > 1e-3);
    assert!(c[(0, 1)].norm() == 0.0 && b[(0, 1)].norm() > 1e-3);
}

#[test]
fn z_chart_metric_is_invariant_under_the_deck_transformation() {
    let params = SurfaceParams64::from_polar((-2.0f64).exp(), 0.7, (-1.0f64).exp(), -1.1).unwrap();
    let s = SolitonProfile::new(params);
    let (alpha, beta) = (Complex::from_polar((-2.0f64).exp(), 0.7), Complex::from_polar((-1.0f64).exp(), -1.1));
    let z1 = Complex::new(0.3, -0.4);
    let z2 = Complex::new(-0.2, 0.5);
    let g = metric_z(&s, &params, z1, z2).unwrap();
    let h = metric_z(&s, &params, alpha * z1, beta * z2).unwrap();
    // Pullback under (αz1, βz2): g(z) = diag(α, β)ᵀ h(γz) diag(ᾱ, β̄).
    for i in 0..2 {
        for j in 0..2 {
            let s = [alpha, beta];
            let pulled = s[i] * h[(i, j)] * s[j].conj();
            assert!((pulled - g[(i, j)]).norm() < 1e-12 * g.max_abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_converges_for_random_profiles(seed in 0u64..10_000, x in -3.0f64..3.0) {
        let p = RandomProfile::new(seed);
        let e = errors(&p, x);
        // Skip points where the third derivative, and with it the leading
        // error term, happens to vanish.
        prop_assume!(e[2] > 1e-11);
        let q = orders(e);
        prop_assert!(q[1] > 1.7 && q[1] < 2.3, "errors {:?}", e);
    }

    #[test]
    fn bismut_form_is_hermitian(seed in 0u64..10_000, x in -5.0f64..5.0) {
        let p = RandomProfile::new(seed);
        let rho = bismut_ricci(&p, x).unwrap().0;
        prop_assert!((rho - rho.adjoint()).max_abs() == 0.0);
        prop_assert_eq!(rho[(1, 1)], Complex::new(0.0, 0.0));
    }

    #[test]
    fn normalized_profiles_are_pluriclosed(seed in 0u64..10_000) {
        let p = RandomProfile::new(seed);
        let grid: Vec<f64> = (0..50).map(|i| -5.0 + 0.2 * i as f64).collect();
        prop_assert!(is_pluriclosed(&p, &grid, 0.0).0);
    }
}
