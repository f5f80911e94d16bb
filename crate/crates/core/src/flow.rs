//! The reduced pluriclosed flow `k_t = (k_x / (k (1 - k)))_x` on a truncated
//! line, stepped in the logit `θ = log(k / (1 - k))`.
//!
//! Since `k_x / (k (1 - k)) = θ_x`, the equation is `k_t = θ_xx`, or
//! `θ_t = θ_xx / (k (1 - k))`. Neumann data `θ_x(-L) = a/b`, `θ_x(L) = 1`
//! pins the soliton's asymptotic slopes. Each implicit step solves a
//! tridiagonal Newton system on all nodes, with ghost values
//! `θ_{-1} = θ_1 - 2h a/b` and `θ_N = θ_{N-2} + 2h`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{LogitProfile, MetricProfile, SurfaceParams};
use crate::jet::Jet;
use crate::linalg::solve_tridiagonal;
use crate::scalar::{from_usize, lit, logit, sigmoid, Real};
use crate::soliton::SolitonProfile;

/// Time discretization of one implicit step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TimeScheme {
    /// Backward Euler on `k_t = θ_xx`: `(σ(θ) - σ(θⁿ)) / dt = δ²θ / h²`.
    /// The discrete mass moves by exactly the boundary flux, so fronts travel
    /// at the exact speed.
    Conservative,
    /// Backward Euler on `θ_t = θ_xx / (k (1 - k))`.
    Logit,
    /// Variable-step second-order backward differences on `k_t = θ_xx`,
    /// started by a short conservative Euler step. Steps whose ratio to the
    /// previous one would break zero-stability are split in half. Conserves
    /// the discrete mass like [`TimeScheme::Conservative`].
    #[default]
    Bdf2,
}

/// Stepping and recording parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowControls<T> {
    pub dt0: T,
    pub dt_max: T,
    /// Factor applied to `dt` after an easy Newton solve; 1 keeps `dt` fixed.
    pub growth: T,
    pub newton_tol: T,
    pub max_newton: usize,
    /// How many times a step may be split in half after a Newton failure.
    pub max_retries: usize,
    pub scheme: TimeScheme,
    /// Diagnostics are recorded at multiples of this interval and at the end.
    pub record_interval: T,
    /// Stop once the aligned error drops below this value.
    pub target: Option<T>,
}

impl<T: Real> Default for FlowControls<T> {
    fn default() -> Self {
        Self {
            dt0: lit(1e-2),
            dt_max: lit(0.25),
            growth: lit(1.2),
            newton_tol: lit(1e-12),
            max_newton: 30,
            max_retries: 12,
            scheme: TimeScheme::Bdf2,
            record_interval: lit(0.5),
            target: None,
        }
    }
}

/// Nodal logit values on a uniform grid over `[-L, L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState<T> {
    pub params: SurfaceParams<T>,
    length: T,
    grid: Vec<T>,
    pub theta: Vec<T>,
    pub t: T,
    pub last_dt: T,
    pub newton_iters: usize,
    /// How many times the last step was halved after a Newton failure.
    pub retries: usize,
    /// `θ` at the previous time level, kept for two-step schemes.
    previous_theta: Option<Vec<T>>,
}

/// A symmetric uniform grid over `[-L, L]` with `nodes` points; the middle
/// node is exactly 0 when `nodes` is odd.
pub fn uniform_grid<T: Real>(length: T, nodes: usize) -> Result<Vec<T>> {
    if nodes < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {nodes}")));
    }
    if !(length > T::zero() && length.is_finite()) {
        return Err(Error::InvalidGrid(format!("half-width must be positive, got {length}")));
    }
    let denom = from_usize::<T>(nodes - 1);
    Ok((0..nodes)
        .map(|i| {
            let num = from_usize::<T>(2 * i) - denom;
            length * num / denom
        })
        .collect())
}

impl<T: Real> FlowState<T> {
    /// Samples a logit profile on the grid.
    pub fn from_logit(
        params: SurfaceParams<T>,
        length: T,
        nodes: usize,
        initial: &impl LogitProfile<T>,
    ) -> Result<Self> {
        let grid = uniform_grid(length, nodes)?;
        let theta = grid.iter().map(|&x| initial.theta(x).v).collect();
        Self::from_values(params, length, theta)
    }

    /// Samples a diagonal metric profile (`k = n`, `m = 0`, `p = 1`).
    pub fn from_metric(
        params: SurfaceParams<T>,
        length: T,
        nodes: usize,
        initial: &impl MetricProfile<T>,
    ) -> Result<Self> {
        let grid = uniform_grid(length, nodes)?;
        let mut theta = Vec::with_capacity(nodes);
        for &x in &grid {
            let j = initial.jets(x);
            if j.n.v != j.k.v || j.m.v != T::zero() || j.p.v != T::one() {
                return Err(Error::InvalidInitialData(format!("not of the form k = n, m = 0, p = 1 at x = {x}")));
            }
            if !(j.k.v > T::zero() && j.k.v < T::one()) {
                return Err(Error::InvalidInitialData(format!(
                    "k = {} outside (0, 1) at x = {x}; supply a logit profile",
                    j.k.v
                )));
            }
            theta.push(logit(j.k.v));
        }
        Self::from_values(params, length, theta)
    }

    pub fn from_values(params: SurfaceParams<T>, length: T, theta: Vec<T>) -> Result<Self> {
        let grid = uniform_grid(length, theta.len())?;
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInitialData(format!("non-finite θ at node {i}")));
        }
        Ok(Self {
            params,
            length,
            grid,
            theta,
            t: T::zero(),
            last_dt: T::zero(),
            newton_iters: 0,
            retries: 0,
            previous_theta: None,
        })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn spacing(&self) -> T {
        self.grid[1] - self.grid[0]
    }

    pub fn k(&self) -> Vec<T> {
        self.theta.iter().map(|&t| sigmoid(t)).collect()
    }

    /// Imposed Neumann slopes `(θ_x(-L), θ_x(L))`.
    pub fn boundary_slopes(&self) -> (T, T) {
        (self.params.c_k, T::one())
    }

    /// One-sided boundary slopes of the current data.
    pub fn measured_slopes(&self) -> (T, T) {
        let h = self.spacing();
        let n = self.nodes();
        ((self.theta[1] - self.theta[0]) / h, (self.theta[n - 1] - self.theta[n - 2]) / h)
    }
}

/// `σ(a) - σ(b)` without cancellation in the upper tail.
fn sigmoid_diff<T: Real>(a: T, b: T) -> T {
    if a > T::zero() && b > T::zero() {
        sigmoid(-b) - sigmoid(-a)
    } else {
        sigmoid(a) - sigmoid(b)
    }
}

/// `k (1 - k)` from the logit.
fn weight<T: Real>(theta: T) -> T {
    sigmoid(theta) * sigmoid(-theta)
}

/// Discrete `k_t = (k_x / (k (1 - k)))_x = θ_xx` at the interior nodes.
pub fn flow_rhs<T: Real>(state: &FlowState<T>) -> Vec<T> {
    let h = state.spacing();
    let th = &state.theta;
    (1..th.len() - 1).map(|i| ((th[i + 1] - th[i]) - (th[i] - th[i - 1])) / (h * h)).collect()
}

/// Discrete `θ_t = θ_xx / (k (1 - k))` at the interior nodes.
pub fn logit_rate<T: Real>(state: &FlowState<T>) -> Vec<T> {
    flow_rhs(state).into_iter().zip(&state.theta[1..]).map(|(r, &th)| r / weight(th)).collect()
}

/// `max |Δk / (h k_mid (1 - k_mid)) - Δθ / h|` over cells, with `k_mid` the
/// logistic of the midpoint logit: the two discrete fluxes agree to `O(h²)`.
pub fn flux_discrepancy<T: Real>(state: &FlowState<T>) -> T {
    let h = state.spacing();
    let th = &state.theta;
    let mut worst = T::zero();
    for i in 0..th.len() - 1 {
        let mid = (th[i] + th[i + 1]) * lit(0.5);
        let k_flux = sigmoid_diff(th[i + 1], th[i]) / (h * weight(mid));
        let t_flux = (th[i + 1] - th[i]) / h;
        worst = worst.max((k_flux - t_flux).abs());
    }
    worst
}

/// `h² δ²θ` terms with ghost nodes, i.e. `θ_{i+1} - 2θ_i + θ_{i-1}`.
fn laplacian<T: Real>(theta: &[T], h: T, slopes: (T, T), out: &mut [T]) {
    let n = theta.len();
    let two = lit::<T>(2.0);
    out[0] = two * (theta[1] - theta[0]) - two * h * slopes.0;
    for i in 1..n - 1 {
        out[i] = (theta[i + 1] - theta[i]) - (theta[i] - theta[i - 1]);
    }
    out[n - 1] = two * (theta[n - 2] - theta[n - 1]) + two * h * slopes.1;
}

/// One implicit solve from `theta_n` over `dt`; returns the new logit values
/// and the Newton iteration count.
fn implicit_solve<T: Real>(
    state: &FlowState<T>,
    theta_n: &[T],
    history: Option<(&[T], T)>,
    dt: T,
    controls: &FlowControls<T>,
) -> Result<(Vec<T>, usize)> {
    let n = theta_n.len();
    let h = state.spacing();
    let h2 = h * h;
    let slopes = state.boundary_slopes();
    let mut theta = theta_n.to_vec();
    let mut lap = vec![T::zero(); n];
    let mut res = vec![T::zero(); n];
    let mut diag = vec![T::zero(); n];
    let mut lower = vec![-T::one(); n];
    let mut upper = vec![-T::one(); n];
    upper[0] = lit(-2.0);
    lower[n - 1] = lit(-2.0);
    let two = lit::<T>(2.0);

    let mut last = T::infinity();
    for iter in 0..=controls.max_newton {
        laplacian(&theta, h, slopes, &mut lap);
        let mut worst = T::zero();
        for i in 0..n {
            let w = weight(theta[i]);
            let (r, d) = match (controls.scheme, history) {
                (TimeScheme::Logit, _) => {
                    let dth = theta[i] - theta_n[i];
                    let dw = w * (T::one() - two * sigmoid(theta[i]));
                    (h2 * w * dth / dt, h2 * (w + dw * dth) / dt)
                }
                (TimeScheme::Bdf2, Some((prev, omega))) => {
                    // With ω = dt / dt_prev:
                    // (1+2ω)/(1+ω) (k - kⁿ) - ω²/(1+ω) (kⁿ - kⁿ⁻¹) = dt θ_xx.
                    let ca = (T::one() + two * omega) / (T::one() + omega);
                    let cb = omega * omega / (T::one() + omega);
                    let dk = sigmoid_diff(theta[i], theta_n[i]);
                    let dk_prev = sigmoid_diff(theta_n[i], prev[i]);
                    (h2 * (ca * dk - cb * dk_prev) / dt, h2 * ca * w / dt)
                }
                _ => (h2 * sigmoid_diff(theta[i], theta_n[i]) / dt, h2 * w / dt),
            };
            res[i] = r - lap[i];
            diag[i] = d + two;
            worst = worst.max(res[i].abs());
        }
        if !worst.is_finite() {
            return Err(Error::NewtonDivergence { iterations: iter, residual: f64::INFINITY });
        }
        if worst < controls.newton_tol {
            return Ok((theta, iter));
        }
        if iter == controls.max_newton || (iter > 8 && worst > last) {
            return Err(Error::NewtonDivergence { iterations: iter, residual: worst.to_f64().unwrap_or(f64::NAN) });
        }
        last = worst;
        for r in res.iter_mut() {
            *r = -*r;
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut res)
            .ok_or(Error::NewtonDivergence { iterations: iter, residual: worst.to_f64().unwrap_or(f64::NAN) })?;
        for (t, d) in theta.iter_mut().zip(&res) {
            *t = *t + *d;
        }
    }
    unreachable!("loop returns on its last iteration")
}

fn step_inner<T: Real>(state: &FlowState<T>, dt: T, controls: &FlowControls<T>, depth: usize) -> Result<FlowState<T>> {
    if controls.scheme == TimeScheme::Bdf2 {
        match &state.previous_theta {
            // Start with one Euler step of dt/8, then BDF2 over dt/8, dt/4, dt/2,
            // so the first-order start contributes little.
            None => {
                let eighth = dt * lit(0.125);
                let mut s = single_step(state, eighth, None, controls, depth)?;
                let mut iters = s.newton_iters;
                let mut retries = s.retries;
                for h in [eighth, dt * lit(0.25), dt * lit(0.5)] {
                    s = step_inner(&s, h, controls, depth)?;
                    iters = iters.max(s.newton_iters);
                    retries += s.retries;
                }
                return Ok(FlowState { newton_iters: iters, retries, ..s });
            }
            // Variable-step BDF2 is zero-stable for step ratios below 1 + √2.
            Some(_) if dt / state.last_dt >= T::one() + lit::<T>(2.0).sqrt() => {
                let half = dt * lit(0.5);
                let mid = step_inner(state, half, controls, depth)?;
                let end = step_inner(&mid, half, controls, depth)?;
                return Ok(FlowState {
                    newton_iters: mid.newton_iters.max(end.newton_iters),
                    retries: mid.retries + end.retries,
                    ..end
                });
            }
            Some(prev) => {
                let omega = dt / state.last_dt;
                return single_step(state, dt, Some((prev.as_slice(), omega)), controls, depth);
            }
        }
    }
    single_step(state, dt, None, controls, depth)
}

fn single_step<T: Real>(
    state: &FlowState<T>,
    dt: T,
    history: Option<(&[T], T)>,
    controls: &FlowControls<T>,
    depth: usize,
) -> Result<FlowState<T>> {
    match implicit_solve(state, &state.theta, history, dt, controls) {
        Ok((theta, iters)) => {
            let previous_theta = (controls.scheme == TimeScheme::Bdf2).then(|| state.theta.clone());
            Ok(FlowState {
                theta,
                t: state.t + dt,
                last_dt: dt,
                newton_iters: iters,
                retries: 0,
                previous_theta,
                ..state.clone()
            })
        }
        Err(e @ Error::NewtonDivergence { .. }) => {
            if depth >= controls.max_retries {
                return Err(e);
            }
            let half = dt * lit(0.5);
            if !(half > T::epsilon() * T::one().max(state.t.abs())) {
                return Err(Error::StepUnderflow(half.to_f64().unwrap_or(0.0)));
            }
            let mid = step_inner(state, half, controls, depth + 1)?;
            let end = step_inner(&mid, half, controls, depth + 1)?;
            Ok(FlowState {
                newton_iters: mid.newton_iters.max(end.newton_iters),
                retries: 1 + mid.retries + end.retries,
                ..end
            })
        }
        Err(e) => Err(e),
    }
}

/// Advances the state by `dt`, possibly in several sub-steps. A Newton
/// failure splits the step into two halves, recursively, at most
/// `controls.max_retries` deep, and is counted in `retries`; `last_dt` is the
/// final sub-step.
pub fn step<T: Real>(state: &FlowState<T>, dt: T, controls: &FlowControls<T>) -> Result<FlowState<T>> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::StepUnderflow(dt.to_f64().unwrap_or(f64::NAN)));
    }
    let next = step_inner(state, dt, controls, 0)?;
    if next.theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NewtonDivergence { iterations: next.newton_iters, residual: f64::NAN });
    }
    Ok(next)
}

/// Monitored quantities at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowDiagnostics<T> {
    pub t: T,
    /// `(C_low, C_high)` with `Φ = κ⁻¹(k) - (x + μt)` between `-C_low` and `C_high`.
    pub envelope: (T, T),
    pub shift: T,
    pub aligned_sup_error: T,
    pub torsion_norm: T,
}

impl<T: Real> FlowDiagnostics<T> {
    pub fn envelope_max(&self) -> T {
        self.envelope.0.max(self.envelope.1)
    }
}

/// `(C_low, C_high) = (-inf Φ, sup Φ)` over the nodes.
pub fn comparison_envelope<T: Real>(state: &FlowState<T>, soliton: &SolitonProfile<T>) -> (T, T) {
    let drift = soliton.params().mu * state.t;
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for (&x, &th) in state.grid.iter().zip(&state.theta) {
        let phi = soliton.x_of_theta(th) - (x + drift);
        lo = lo.min(phi);
        hi = hi.max(phi);
    }
    (-lo, hi)
}

fn aligned_error<T: Real>(state: &FlowState<T>, soliton: &SolitonProfile<T>, s: T) -> Result<T> {
    let mut worst = T::zero();
    for (&x, &th) in state.grid.iter().zip(&state.theta) {
        let target = soliton.theta_at(x + s)?;
        worst = worst.max(sigmoid_diff(th, target).abs());
    }
    Ok(worst)
}

/// `argmin_s sup_x |k(x) - κ(x + s)|` by golden-section search, with the
/// attained value.
pub fn shift_distance<T: Real>(state: &FlowState<T>, soliton: &SolitonProfile<T>) -> Result<(T, T)> {
    let (c_low, c_high) = comparison_envelope(state, soliton);
    let drift = soliton.params().mu * state.t;
    let one = T::one();
    let mut lo = drift - c_low - one;
    let mut hi = drift + c_high + one;
    let ratio = (lit::<T>(5.0).sqrt() - one) * lit(0.5);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = aligned_error(state, soliton, x1)?;
    let mut f2 = aligned_error(state, soliton, x2)?;
    let tol = lit::<T>(1e-10).max(T::epsilon() * lit(1e3));
    while hi - lo > tol * one.max(lo.abs().max(hi.abs())) {
        match f1.partial_cmp(&f2) {
            Some(Ordering::Greater) => {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = aligned_error(state, soliton, x2)?;
            }
            _ => {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = aligned_error(state, soliton, x1)?;
            }
        }
    }
    let s = (lo + hi) * lit(0.5);
    Ok((s, aligned_error(state, soliton, s)?))
}

/// `sup_x |k(x, t) - κ(x)|`, the coefficient size of the torsion potential.
pub fn torsion_potential_norm<T: Real>(state: &FlowState<T>, soliton: &SolitonProfile<T>) -> Result<T> {
    aligned_error(state, soliton, T::zero())
}

pub fn diagnose<T: Real>(state: &FlowState<T>, soliton: &SolitonProfile<T>) -> Result<FlowDiagnostics<T>> {
    let envelope = comparison_envelope(state, soliton);
    let (shift, aligned_sup_error) = shift_distance(state, soliton)?;
    Ok(FlowDiagnostics {
        t: state.t,
        envelope,
        shift,
        aligned_sup_error,
        torsion_norm: torsion_potential_norm(state, soliton)?,
    })
}

/// Checks the Neumann slopes of initial data against the soliton's
/// asymptotic slopes.
pub fn validate_initial<T: Real>(state: &FlowState<T>, tol: T) -> Result<()> {
    let (left, right) = state.measured_slopes();
    let (want_l, want_r) = state.boundary_slopes();
    if !((left - want_l).abs() <= tol) {
        return Err(Error::InvalidInitialData(format!("θ_x(-L) = {left}, expected a/b = {want_l}")));
    }
    if !((right - want_r).abs() <= tol) {
        return Err(Error::InvalidInitialData(format!("θ_x(L) = {right}, expected 1")));
    }
    Ok(())
}

/// A recorded run.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRun<T> {
    pub records: Vec<FlowDiagnostics<T>>,
    pub state: FlowState<T>,
    pub steps: usize,
    pub reached_target: bool,
}

impl<T: Real> FlowRun<T> {
    /// Largest increase of `max(C_low, C_high)` between consecutive records.
    pub fn envelope_increase(&self) -> T {
        self.records.windows(2).map(|w| w[1].envelope_max() - w[0].envelope_max()).fold(T::neg_infinity(), T::max)
    }
}

/// Evolves `initial` to time `t_end`, recording diagnostics every
/// `controls.record_interval` and stopping early at `controls.target`.
pub fn run_flow<T: Real>(
    initial: FlowState<T>,
    soliton: &SolitonProfile<T>,
    t_end: T,
    controls: &FlowControls<T>,
) -> Result<FlowRun<T>> {
    validate_initial(&initial, lit(1e-3))?;
    if !(controls.record_interval > T::zero()) {
        return Err(Error::InvalidInitialData("record interval must be positive".into()));
    }
    let mut state = initial;
    let mut records = vec![diagnose(&state, soliton)?];
    let hit = |d: &FlowDiagnostics<T>| controls.target.is_some_and(|g| d.aligned_sup_error < g);
    if hit(&records[0]) {
        return Ok(FlowRun { records, state, steps: 0, reached_target: true });
    }
    let start = state.t;
    let mut dt = controls.dt0;
    let mut steps = 0;
    let mut next_record = 1usize;
    let slack = lit::<T>(1e-12);
    while state.t < t_end - slack * T::one().max(t_end.abs()) {
        let record_at = (start + controls.record_interval * from_usize(next_record)).min(t_end);
        // Land on record times without leaving a sliver of a step.
        let remaining = record_at - state.t;
        let dt_here = if remaining <= dt {
            remaining
        } else if remaining < dt + dt {
            remaining * lit(0.5)
        } else {
            dt
        };
        let next = step(&state, dt_here, controls)?;
        steps += 1;
        state = next;
        if state.retries > 0 {
            dt = dt_here * lit(0.5);
        } else if state.newton_iters <= 3 && dt_here == dt {
            dt = (dt * controls.growth).min(controls.dt_max);
        }
        if (state.t - record_at).abs() <= slack * T::one().max(record_at.abs()) {
            state.t = record_at;
            let d = diagnose(&state, soliton)?;
            records.push(d);
            next_record += 1;
            // The front sits near x = -shift; keep it well inside the window.
            if d.shift.abs() > state.length * lit(0.75) {
                return Err(Error::InvalidGrid(format!(
                    "front at x = {} at t = {} is too close to the window edge; increase L or reduce T",
                    -d.shift, d.t
                )));
            }
            if hit(&d) {
                return Ok(FlowRun { records, state, steps, reached_target: true });
            }
        }
    }
    Ok(FlowRun { records, state, steps, reached_target: false })
}

/// `θ_κ(x) + A exp(-((x - c) / w)²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpPerturbed<T> {
    pub soliton: SolitonProfile<T>,
    pub amplitude: T,
    pub center: T,
    pub width: T,
}

impl<T: Real> LogitProfile<T> for BumpPerturbed<T> {
    fn theta(&self, x: T) -> Jet<T> {
        let s = (Jet::variable(x) - self.center) / self.width;
        self.soliton.theta(x) + (-(s * s)).exp() * self.amplitude
    }
}

/// `θ_κ(x + δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shifted<T> {
    pub soliton: SolitonProfile<T>,
    pub delta: T,
}

impl<T: Real> LogitProfile<T> for Shifted<T> {
    fn theta(&self, x: T) -> Jet<T> {
        self.soliton.theta(x + self.delta)
    }
}

/// Piecewise-linear logit data, extended linearly past both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedLogit<T> {
    xs: Vec<T>,
    thetas: Vec<T>,
}

impl<T: Real> TabulatedLogit<T> {
    pub fn new(xs: Vec<T>, thetas: Vec<T>) -> Result<Self> {
        if xs.len() != thetas.len() || xs.len() < 2 {
            return Err(Error::InvalidInitialData("need at least two (x, θ) rows".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInitialData("x column must increase strictly".into()));
        }
        if thetas.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInitialData("non-finite θ".into()));
        }
        Ok(Self { xs, thetas })
    }
}

impl<T: Real> LogitProfile<T> for TabulatedLogit<T> {
    fn theta(&self, x: T) -> Jet<T> {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (t0, t1) = (self.thetas[i - 1], self.thetas[i]);
        let slope = (t1 - t0) / (x1 - x0);
        Jet::new(t0 + slope * (x - x0), slope, T::zero())
    }
}
