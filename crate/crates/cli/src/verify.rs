//! The `verify` report: curvature oracle, even- and odd-type identities, Φ.

use std::io::Write;

use anyhow::Result;
use num_complex::Complex;
use pcf_hopf::curvature::{bismut_ricci, bismut_ricci_oracle};
use pcf_hopf::gkforms::{
    ddbar_log_phi, frobenius_residual_perturbed, isotropy_residual, odd_type_residual, phi_identity_residual,
    phi_solve, projection_identity, real_part_residual,
};
use pcf_hopf::io::{write_verify_csv, VerifyRow};
use pcf_hopf::{Diagonal, FnLogit, FnProfile, Jet, MetricProfile, ProfileJets, SolitonProfile, SurfaceParams64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{create, ddbar_step, random_point, PHI_IDENTITY_TOL, PSH_TOL};
use crate::config::RunConfig;

/// Independent streams of one seed, so adding samples to one suite leaves the
/// others unchanged.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const ORACLE_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
const ORDER_RANGE: (f64, f64) = (1.8, 2.2);
const PHI_POINTS: usize = 100;
const PSH_POINTS: usize = 50;
const CLOSED_FORM_TOL: f64 = 1e-10;

/// Sum of random sinusoids around a positive definite constant metric.
pub struct RandomProfile {
    modes: [[f64; 4]; 3],
}

impl RandomProfile {
    pub fn new(rng: &mut impl Rng) -> Self {
        let mut modes = [[0.0; 4]; 3];
        for m in &mut modes {
            *m = [
                rng.gen_range(0.3..1.5),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.3..1.5),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];
        }
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

/// Empirical orders of the oracle error, tracked on the entry with the
/// largest error at the coarsest step.
pub fn oracle_orders(profile: &impl MetricProfile<f64>, x: f64) -> Result<[f64; 2]> {
    let exact = bismut_ricci(profile, x)?.0;
    let mut errs = Vec::with_capacity(3);
    for h in ORACLE_STEPS {
        errs.push(bismut_ricci_oracle(profile, x, h)?.0 - exact);
    }
    let mut entry = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if errs[0][(i, j)].norm() > errs[0][entry].norm() {
                entry = (i, j);
            }
        }
    }
    let e: Vec<f64> = errs.iter().map(|m| m[entry].norm()).collect();
    Ok([(e[0] / e[1]).log2(), (e[1] / e[2]).log2()])
}

fn row(check: &str, point: String, residual: f64, pass: bool) -> VerifyRow<f64> {
    VerifyRow { check: check.into(), point, residual, pass }
}

fn at(name: &str, x: f64) -> String {
    format!("{name} x={x:.16e}")
}

fn curvature_rows(params: &SurfaceParams64, seed: u64, rows: &mut Vec<VerifyRow<f64>>) -> Result<()> {
    let mut r = rng(seed, 0);
    let soliton = SolitonProfile::new(*params);
    let trig = FnProfile::new(|x: Jet<f64>| ProfileJets {
        k: (x * 0.7).tanh() * 0.4 + 1.3,
        n: (x * 0.5).sin() * 0.3,
        m: (x * 0.8).cos() * 0.2,
        p: Jet::one(),
    });
    let wobble = Diagonal(FnLogit::new(|x: Jet<f64>| x + x.sin() * 0.3));
    let random_a = RandomProfile::new(&mut r);
    let random_b = RandomProfile::new(&mut r);
    let profiles: [(&str, &dyn MetricProfile<f64>); 5] = [
        ("soliton", &soliton),
        ("trig", &trig),
        ("diagonal", &wobble),
        ("random-a", &random_a),
        ("random-b", &random_b),
    ];
    for (name, p) in profiles {
        for x in [-1.3, 0.4, 2.1] {
            let orders = oracle_orders(&p, x)?;
            for (q, pair) in orders.iter().zip(["1e-2/5e-3", "5e-3/2.5e-3"]) {
                let pass = (ORDER_RANGE.0..=ORDER_RANGE.1).contains(q);
                rows.push(row("curvature_order", format!("{} h={pair}", at(name, x)), (q - 2.0).abs(), pass));
            }
        }
    }
    Ok(())
}

fn even_rows(cfg: &RunConfig, params: &SurfaceParams64, xs: &[f64], rows: &mut Vec<VerifyRow<f64>>) -> Result<()> {
    let s = SolitonProfile::new(*params);
    let mut lambda0 = None;
    for &x in xs {
        let f = frobenius_residual_perturbed(&s, params, x, cfg.perturb)?;
        rows.push(row("frobenius", at("soliton", x), f, f < cfg.tol));
        let iso = isotropy_residual(&s, params, x)?;
        rows.push(row("isotropy", at("soliton", x), iso, iso < cfg.tol));
        let re = real_part_residual(&s, params, x)?;
        rows.push(row("real_part", at("soliton", x), re, re < cfg.tol));
        let fit = projection_identity(&s, params, x)?;
        let proj = fit.residual.max(fit.fit_residual);
        rows.push(row("projection", at("soliton", x), proj, proj < cfg.tol));
        let l0 = *lambda0.get_or_insert(fit.lambda);
        let dl = (fit.lambda - l0).abs();
        rows.push(row("lambda_constant", at("soliton", x), dl, dl < cfg.tol));
    }
    Ok(())
}

fn odd_rows(cfg: &RunConfig, params: &SurfaceParams64, xs: &[f64], rows: &mut Vec<VerifyRow<f64>>) -> Result<()> {
    let s = SolitonProfile::new(*params);
    let wobble = Diagonal(FnLogit::new(|x: Jet<f64>| x * 0.8 + (x * 0.6).sin() * 0.4));
    let steep = Diagonal(FnLogit::new(|x: Jet<f64>| x * 2.5 - 1.0));
    let bent = FnProfile::new(|x: Jet<f64>| {
        let k = (x * 0.3).tanh() * 0.45 + 0.5;
        ProfileJets { k, n: k, m: Jet::zero(), p: Jet::one() }
    });
    let profiles: [(&str, &dyn MetricProfile<f64>); 4] =
        [("soliton", &s), ("wobble", &wobble), ("steep", &steep), ("tanh", &bent)];
    for (name, p) in profiles {
        for &x in xs {
            let r = odd_type_residual(&p, params, x)?;
            rows.push(row("odd_type", at(name, x), r, r < cfg.tol));
        }
    }
    Ok(())
}

fn phi_rows(params: &SurfaceParams64, seed: u64, rows: &mut Vec<VerifyRow<f64>>) -> Result<()> {
    let label = |z1: Complex<f64>, z2: Complex<f64>| {
        format!("z=({:.16e}{:+.16e}i, {:.16e}{:+.16e}i)", z1.re, z1.im, z2.re, z2.im)
    };
    let mut r = rng(seed, 2);
    for _ in 0..PHI_POINTS {
        let (z1, z2) = random_point(&mut r);
        let res = phi_identity_residual(z1, z2, params, phi_solve(z1, z2, params)?).abs();
        rows.push(row("phi_identity", label(z1, z2), res, res < PHI_IDENTITY_TOL));
    }

    let zero = Complex::new(0.0, 0.0);
    let s = params.a + params.b;
    for radius in [0.25, 1.0, 4.0] {
        let z = Complex::from_polar(radius, 0.7);
        let on_first = phi_solve(z, zero, params)?;
        let want = radius.powf(s / params.a);
        let rel = (on_first - want).abs() / want;
        rows.push(row("phi_axis", label(z, zero), rel, rel < CLOSED_FORM_TOL));
        let on_second = phi_solve(zero, z, params)?;
        let want = radius.powf(s / params.b);
        let rel = (on_second - want).abs() / want;
        rows.push(row("phi_axis", label(zero, z), rel, rel < CLOSED_FORM_TOL));
    }

    let equal = SurfaceParams64::from_log_moduli(params.a, params.a)?;
    for _ in 0..10 {
        let (z1, z2) = random_point(&mut r);
        let norm2 = z1.norm_sqr() + z2.norm_sqr();
        let rel = (phi_solve(z1, z2, &equal)? - norm2).abs() / norm2;
        rows.push(row("phi_equal_moduli", label(z1, z2), rel, rel < CLOSED_FORM_TOL));
    }

    for _ in 0..PSH_POINTS {
        let (z1, z2) = random_point(&mut r);
        let [lo, hi] = ddbar_log_phi(z1, z2, params, ddbar_step(z1, z2))?.hermitian_eigenvalues();
        rows.push(row("phi_psh", label(z1, z2), (-lo).max(0.0), lo >= -PSH_TOL && hi > 0.0));
    }
    Ok(())
}

pub fn report(cfg: &RunConfig) -> Result<Vec<VerifyRow<f64>>> {
    let params = cfg.params()?;
    let mut sample_rng = rng(cfg.seed, 1);
    let xs: Vec<f64> = (0..cfg.samples).map(|_| sample_rng.gen_range(-10.0..10.0)).collect();
    let mut rows = Vec::new();
    curvature_rows(&params, cfg.seed, &mut rows)?;
    even_rows(cfg, &params, &xs, &mut rows)?;
    odd_rows(cfg, &params, &xs, &mut rows)?;
    phi_rows(&params, cfg.seed, &mut rows)?;
    Ok(rows)
}

pub fn verify(cfg: &RunConfig) -> Result<bool> {
    let rows = report(cfg)?;
    let mut w = create(&cfg.out, "report.csv")?;
    write_verify_csv(&mut w, &rows)?;
    w.flush()?;
    let mut checks: Vec<&str> = Vec::new();
    for r in &rows {
        if !checks.contains(&r.check.as_str()) {
            checks.push(&r.check);
        }
    }
    for c in &checks {
        let (n, failed) =
            rows.iter().filter(|r| r.check == *c).fold((0, 0), |(n, f), r| (n + 1, f + usize::from(!r.pass)));
        let worst = rows.iter().filter(|r| r.check == *c).map(|r| r.residual).fold(0.0, f64::max);
        println!("{c:<18} {n:>4} rows  {failed:>3} failed  worst residual {worst:.3e}");
    }
    let pass = rows.iter().all(|r| r.pass);
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}
