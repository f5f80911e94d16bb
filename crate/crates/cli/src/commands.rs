use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex;
use pcf_hopf::curvature::soliton_residual;
use pcf_hopf::flow::{run_flow, uniform_grid, BumpPerturbed, FlowState, TabulatedLogit};
use pcf_hopf::gkforms::{ddbar_log_phi, phi_identity_residual, phi_solve};
use pcf_hopf::io::{
    write_asymptotics_csv, write_snapshot_csv, write_soliton_csv, write_summary_csv, write_trajectory_csv,
};
use pcf_hopf::scalar::logit;
use pcf_hopf::soliton::{check_logit_asymptotics, solve_profile};
use pcf_hopf::{Error, LogitProfile, SolitonProfile};
use rand::Rng;

use crate::config::RunConfig;

/// Bad input rather than a failed computation; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Tolerance on the tail slopes of the soliton and of initial data.
const ASYMPTOTICS_TOL: f64 = 1e-6;
const INITIAL_SLOPE_TOL: f64 = 1e-3;

/// Default half-widths. Past `x ≈ 36` the normalized metric has
/// `1 - k` below the rounding unit and the curvature residual is not
/// representable in double precision.
pub const SOLITON_LENGTH: f64 = 30.0;
pub const FLOW_LENGTH: f64 = 40.0;

pub fn soliton(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.params()?;
    let length = cfg.length_or(SOLITON_LENGTH);
    let grid = uniform_grid(length, cfg.nodes)?;
    let (profile, jets) = solve_profile(&params, &grid)?;
    let mut w = create(&cfg.out, "soliton.csv")?;
    write_soliton_csv(&mut w, &grid, &jets)?;
    w.flush()?;

    let report = check_logit_asymptotics(&profile, &params, length, ASYMPTOTICS_TOL);
    let mut w = create(&cfg.out, "asymptotics.csv")?;
    write_asymptotics_csv(&mut w, &report)?;
    w.flush()?;

    let residual = match soliton_residual(&profile, params.mu, &grid) {
        Ok(r) => r,
        Err(e @ Error::DegenerateMetric { .. }) => {
            return Err(UsageError(format!("{e}; the metric is not representable this far out, use a smaller L")).into())
        }
        Err(e) => return Err(e.into()),
    };
    let mut w = create(&cfg.out, "soliton_residual.csv")?;
    write_summary_csv(
        &mut w,
        &[
            ("soliton_residual", residual),
            ("tolerance", cfg.tol),
            ("mu", params.mu),
            ("c_k", params.c_k),
            ("kappa_at_zero", profile.kappa(0.0)?),
        ],
    )?;
    w.flush()?;

    let pass = residual < cfg.tol;
    println!("soliton: mu = {:.6}, residual {residual:.3e} (tol {:.1e})", params.mu, cfg.tol);
    for item in report.items.iter().filter(|i| !i.pass) {
        println!("  asymptotics {} not satisfied: {} = {:.3e}", item.label, item.description, item.value);
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

/// Reads `x` and `theta` (or `k`) columns.
fn read_initial_csv(path: &Path) -> Result<TabulatedLogit<f64>> {
    let usage = |m: String| anyhow::Error::new(UsageError(m));
    let mut reader = csv::Reader::from_path(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let x_col = col("x").ok_or_else(|| usage(format!("{}: missing column x", path.display())))?;
    let (v_col, is_k) = match (col("theta"), col("k")) {
        (Some(c), _) => (c, false),
        (None, Some(c)) => (c, true),
        _ => return Err(usage(format!("{}: need a theta or k column", path.display()))),
    };
    let (mut xs, mut values) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |c: usize| -> Result<f64> {
            record
                .get(c)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| usage(format!("{}: bad number on data row {}", path.display(), line + 1)))
        };
        let x = parse(x_col)?;
        let v = parse(v_col)?;
        if is_k && !(v > 0.0 && v < 1.0) {
            return Err(usage(format!("{}: k = {v} outside (0, 1) at x = {x}", path.display())));
        }
        xs.push(x);
        values.push(if is_k { logit(v) } else { v });
    }
    TabulatedLogit::new(xs, values).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn flow(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.params()?;
    let soliton = SolitonProfile::new(params);
    let bump = BumpPerturbed { soliton, amplitude: cfg.bump_amplitude, center: cfg.bump_center, width: cfg.bump_width };
    let table;
    let initial: &dyn LogitProfile<f64> = match cfg.initial.as_str() {
        "soliton" => &soliton,
        "bump" => &bump,
        path => {
            table = read_initial_csv(Path::new(path))?;
            &table
        }
    };

    let length = cfg.length_or(FLOW_LENGTH);
    let report = check_logit_asymptotics(&initial, &params, length, INITIAL_SLOPE_TOL);
    if !report.all_pass() {
        let failing: Vec<String> = report
            .items
            .iter()
            .filter(|i| !i.pass)
            .map(|i| format!("{} ({} = {:.3e})", i.label, i.description, i.value))
            .collect();
        return Err(UsageError(format!("initial data fails the asymptotics report: {}", failing.join(", "))).into());
    }

    let state = FlowState::from_logit(params, length, cfg.nodes, &initial)?;
    let run = match run_flow(state, &soliton, cfg.t_end, &cfg.controls()?) {
        Ok(run) => run,
        Err(e @ Error::InvalidInitialData(_)) => return Err(UsageError(e.to_string()).into()),
        Err(e) => return Err(e.into()),
    };

    let mut w = create(&cfg.out, "trajectory.csv")?;
    write_trajectory_csv(&mut w, &run.records)?;
    w.flush()?;
    let mut w = create(&cfg.out, "snapshot.csv")?;
    write_snapshot_csv(&mut w, &run.state)?;
    w.flush()?;

    let increase = run.envelope_increase().max(0.0);
    let monotone = increase <= cfg.envelope_tol;
    let last = run.records.last().expect("the initial record is always present");
    let target_ok = cfg.target == 0.0 || run.reached_target;
    println!(
        "flow: t = {:.4}, {} steps, aligned error {:.3e}, envelope {:.3e} (largest increase {increase:.3e})",
        last.t,
        run.steps,
        last.aligned_sup_error,
        last.envelope_max()
    );
    if !monotone {
        println!("  envelope grew by more than {:.1e}", cfg.envelope_tol);
    }
    if !target_ok {
        println!("  aligned error did not reach {:.1e}", cfg.target);
    }
    let pass = monotone && target_ok;
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(pass)
}

/// A point of `C^2 \ {0}` with log-uniform radius in `[e^-3, e^3]` and both
/// coordinates nonzero.
pub(crate) fn random_point(rng: &mut impl Rng) -> (Complex<f64>, Complex<f64>) {
    let radius = rng.gen_range(-3.0f64..3.0).exp();
    let split = rng.gen_range(0.05f64..0.95);
    let a1 = rng.gen_range(0.0..std::f64::consts::TAU);
    let a2 = rng.gen_range(0.0..std::f64::consts::TAU);
    (Complex::from_polar(radius * split.sqrt(), a1), Complex::from_polar(radius * (1.0 - split).sqrt(), a2))
}

pub(crate) const PHI_IDENTITY_TOL: f64 = 1e-12;
pub(crate) const PSH_TOL: f64 = 1e-6;

/// Finite-difference step for `i∂∂̄ log Φ`, relative to `|z|`.
pub(crate) fn ddbar_step(z1: Complex<f64>, z2: Complex<f64>) -> f64 {
    1e-3 * (z1.norm_sqr() + z2.norm_sqr()).sqrt()
}

pub fn phi(cfg: &RunConfig) -> Result<bool> {
    let params = cfg.params()?;
    let mut rng = crate::verify::rng(cfg.seed, 3);
    let mut w = create(&cfg.out, "phi.csv")?;
    writeln!(w, "z1_re,z1_im,z2_re,z2_im,phi,identity_residual,eig_min,eig_max,pass")?;
    let mut all = true;
    for _ in 0..cfg.samples {
        let (z1, z2) = random_point(&mut rng);
        let value = phi_solve(z1, z2, &params)?;
        let residual = phi_identity_residual(z1, z2, &params, value);
        let [lo, hi] = ddbar_log_phi(z1, z2, &params, ddbar_step(z1, z2))?.hermitian_eigenvalues();
        let pass = residual.abs() < PHI_IDENTITY_TOL && lo >= -PSH_TOL && hi > 0.0;
        all &= pass;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{value:.16e},{residual:.16e},{lo:.16e},{hi:.16e},{pass}",
            z1.re, z1.im, z2.re, z2.im
        )?;
    }
    w.flush()?;
    println!("phi: {} points, {}", cfg.samples, if all { "PASS" } else { "FAIL" });
    Ok(all)
}
