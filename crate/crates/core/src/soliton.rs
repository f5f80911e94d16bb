//! The steady soliton profile `κ`.
//!
//! `κ: R → (0, 1)` solves `κ' = κ (1 - κ) (μ κ + c_k)` with `c_k = a/b`,
//! `μ = 1 - a/b`. For `a ≠ b` the ODE integrates in closed form to
//!
//! ```text
//! x + gauge = -log(1 - k) + ((a - b)/a) log|a/(a - b) - k| + (b/a) log k,
//! ```
//!
//! which is inverted numerically. For `a = b` the profile is the logistic
//! `1 / (1 + C e^{-x})`. The inversion runs in the logit `θ = log(k/(1-k))`,
//! where `dx/dθ = 1/(μ k + c_k)` is bounded above and below, so Newton with a
//! bisection safeguard converges from any start and `κ` keeps full relative
//! accuracy in both tails.

use crate::error::{Error, Result};
use crate::geometry::{LogitProfile, MetricProfile, ProfileJets, SurfaceParams};
use crate::jet::Jet;
use crate::scalar::{lit, logit, sigmoid, softplus, Real};

/// Right-hand side `k (1 - k) (μ k + c_k)` of the profile ODE.
pub fn profile_ode_rhs<T: Real>(params: &SurfaceParams<T>, k: T) -> T {
    k * (T::one() - k) * (params.mu * k + params.c_k)
}

/// `d/dk` of [`profile_ode_rhs`].
pub fn profile_ode_rhs_dk<T: Real>(params: &SurfaceParams<T>, k: T) -> T {
    let one = T::one();
    (one - k - k) * (params.mu * k + params.c_k) + params.mu * k * (one - k)
}

/// The logistic profile `1 / (1 + C e^{-x})`, `C > 0`.
pub fn logistic_profile<T: Real>(c: T, x: T) -> Result<T> {
    if !(c > T::zero()) {
        return Err(Error::ParameterOutOfRange(format!("logistic constant C = {c} must be positive")));
    }
    Ok(sigmoid(x - c.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape<T> {
    /// `|α| = |β|`.
    Logistic,
    /// Closed form with pole `k* = a/(a - b)` outside `[0, 1]`.
    Implicit { k_star: T, pole_weight: T, ratio: T },
}

/// Closed-form `x(k)` before the gauge is subtracted.
fn shape_for<T: Real>(params: &SurfaceParams<T>) -> Shape<T> {
    if params.equal_moduli() {
        Shape::Logistic
    } else {
        let (a, b) = (params.a, params.b);
        Shape::Implicit { k_star: a / (a - b), pole_weight: (a - b) / a, ratio: b / a }
    }
}

/// `log|k* - σ(θ)|`, written so that no cancellation occurs for `k*` outside `[0, 1]`.
fn log_pole_distance<T: Real>(k_star: T, theta: T) -> T {
    if k_star > T::one() {
        ((k_star - T::one()) + sigmoid(-theta)).ln()
    } else {
        (sigmoid(theta) - k_star).ln()
    }
}

fn ungauged_x_of_theta<T: Real>(shape: &Shape<T>, theta: T) -> T {
    match *shape {
        Shape::Logistic => theta,
        Shape::Implicit { k_star, pole_weight, ratio } => {
            softplus(theta) + pole_weight * log_pole_distance(k_star, theta) - ratio * softplus(-theta)
        }
    }
}

/// Closed-form `x(k)` for `a ≠ b` with the gauge constant subtracted.
pub fn implicit_x<T: Real>(params: &SurfaceParams<T>, k: T, gauge: T) -> Result<T> {
    if !(k > T::zero() && k < T::one()) {
        return Err(Error::Domain(k.to_f64().unwrap_or(f64::NAN)));
    }
    match shape_for(params) {
        Shape::Logistic => Err(Error::EqualModuli),
        Shape::Implicit { k_star, pole_weight, ratio } => {
            let pole = (k_star - k).abs();
            debug_assert!(pole > T::zero());
            Ok(-(T::one() - k).ln() + pole_weight * pole.ln() + ratio * k.ln() - gauge)
        }
    }
}

/// The soliton profile for given surface parameters and gauge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolitonProfile<T> {
    params: SurfaceParams<T>,
    gauge: T,
    shape: Shape<T>,
}

impl<T: Real> SolitonProfile<T> {
    /// The profile normalized by `κ(0) = 1/2`.
    pub fn new(params: SurfaceParams<T>) -> Self {
        let shape = shape_for(&params);
        let gauge = ungauged_x_of_theta(&shape, T::zero());
        Self { params, gauge, shape }
    }

    /// The profile whose closed form reads `x = F(k) - gauge`.
    pub fn with_gauge(params: SurfaceParams<T>, gauge: T) -> Self {
        Self { params, gauge, shape: shape_for(&params) }
    }

    pub fn params(&self) -> &SurfaceParams<T> {
        &self.params
    }

    pub fn gauge(&self) -> T {
        self.gauge
    }

    pub fn is_logistic(&self) -> bool {
        matches!(self.shape, Shape::Logistic)
    }

    /// `x` as a function of the logit `θ`.
    pub fn x_of_theta(&self, theta: T) -> T {
        ungauged_x_of_theta(&self.shape, theta) - self.gauge
    }

    /// `dx/dθ = 1 / (μ k + c_k)`.
    pub fn dx_dtheta(&self, theta: T) -> T {
        (self.params.mu * sigmoid(theta) + self.params.c_k).recip()
    }

    /// The logit `θ = log(κ / (1 - κ))` at `x`.
    pub fn theta_at(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(Error::RootBracket(format!("non-finite target x = {x}")));
        }
        if let Shape::Logistic = self.shape {
            return Ok(x + self.gauge);
        }
        // The slope dx/dθ lies between min(1, 1/c) and max(1, 1/c).
        let c = self.params.c_k;
        let slope_min = T::one().min(c.recip());
        let g0 = self.x_of_theta(T::zero()) - x;
        let reach = g0.abs() / slope_min + T::one();
        let (mut lo, mut hi) = (-reach, reach);
        if !(self.x_of_theta(lo) <= x && self.x_of_theta(hi) >= x) {
            return Err(Error::RootBracket(format!("no bracket for x = {x}")));
        }
        let tol = T::epsilon() * lit(4.0);
        let mut theta = -g0 / self.dx_dtheta(T::zero());
        if !(theta > lo && theta < hi) {
            theta = (lo + hi) * lit(0.5);
        }
        for _ in 0..200 {
            let g = self.x_of_theta(theta) - x;
            if g == T::zero() {
                return Ok(theta);
            }
            if g < T::zero() {
                lo = theta;
            } else {
                hi = theta;
            }
            let mut next = theta - g / self.dx_dtheta(theta);
            if !(next > lo && next < hi) {
                next = (lo + hi) * lit(0.5);
            }
            let step = (next - theta).abs();
            theta = next;
            if step <= tol * T::one().max(theta.abs()) || hi - lo <= tol * T::one().max(theta.abs()) {
                return Ok(theta);
            }
        }
        Err(Error::RootBracket(format!("no convergence for x = {x}")))
    }

    /// `κ(x)`.
    pub fn kappa(&self, x: T) -> Result<T> {
        Ok(sigmoid(self.theta_at(x)?))
    }

    /// `(κ, κ', κ'')` at `x`, derivatives from the ODE.
    ///
    /// `κ'` is formed from the rounded value of `1 - κ`, so that ratios such as
    /// `κ' / (1 - κ)` and `κ' / V` stay consistent when `κ` is within a few
    /// ulps of 1.
    pub fn jet(&self, x: T) -> Result<Jet<T>> {
        let k = self.kappa(x)?;
        Ok(self.jet_from_value(k))
    }

    fn jet_from_value(&self, k: T) -> Jet<T> {
        let d1 = profile_ode_rhs(&self.params, k);
        let d2 = profile_ode_rhs_dk(&self.params, k) * d1;
        Jet::new(k, d1, d2)
    }

    /// `(θ, θ', θ'')` at `x`: `θ' = μ κ + c_k`, `θ'' = μ κ'`.
    pub fn theta_jet(&self, x: T) -> Result<Jet<T>> {
        let theta = self.theta_at(x)?;
        let k = sigmoid(theta);
        let kd = k * sigmoid(-theta) * (self.params.mu * k + self.params.c_k);
        Ok(Jet::new(theta, self.params.mu * k + self.params.c_k, self.params.mu * kd))
    }

    /// `κ^{-1}` from a logit value, exact in both tails.
    pub fn inverse_from_theta(&self, theta: T) -> T {
        self.x_of_theta(theta)
    }

    /// Evaluates the jets on a grid.
    pub fn tabulate(&self, grid: &[T]) -> Result<Vec<Jet<T>>> {
        grid.iter().map(|&x| self.jet(x)).collect()
    }
}

impl<T: Real> MetricProfile<T> for SolitonProfile<T> {
    fn jets(&self, x: T) -> ProfileJets<T> {
        let k = self.jet(x).unwrap_or_else(|_| Jet::new(T::nan(), T::nan(), T::nan()));
        ProfileJets { k, n: k, m: Jet::zero(), p: Jet::one() }
    }
}

impl<T: Real> LogitProfile<T> for SolitonProfile<T> {
    fn theta(&self, x: T) -> Jet<T> {
        self.theta_jet(x).unwrap_or_else(|_| Jet::new(T::nan(), T::nan(), T::nan()))
    }
}

/// Builds the profile for `params` (logistic with `C = 1` when `a = b`) and
/// evaluates its jets on the grid.
pub fn solve_profile<T: Real>(params: &SurfaceParams<T>, grid: &[T]) -> Result<(SolitonProfile<T>, Vec<Jet<T>>)> {
    let profile = SolitonProfile::new(*params);
    let jets = profile.tabulate(grid)?;
    Ok((profile, jets))
}

/// The unique `x` with `κ(x) = k`.
pub fn kappa_inverse<T: Real>(profile: &SolitonProfile<T>, k: T) -> Result<T> {
    if !(k > T::zero() && k < T::one()) {
        return Err(Error::Domain(k.to_f64().unwrap_or(f64::NAN)));
    }
    match profile.shape {
        Shape::Logistic => Ok(logit(k) - profile.gauge),
        Shape::Implicit { .. } => implicit_x(&profile.params, k, profile.gauge),
    }
}

/// Squared radius `r2^2` at which the soliton takes the value `k` on the circle
/// `|z1| = r1`, in the gauge-free normalization
/// `r2^2 = r1^{2b/a} (1 - k) |a/(a-b) - k|^{-(a-b)/a} k^{-b/a}`.
pub fn extension_r2<T: Real>(params: &SurfaceParams<T>, r1: T, k: T) -> Result<T> {
    if !(r1 > T::zero()) {
        return Err(Error::ParameterOutOfRange(format!("r1 = {r1} must be positive")));
    }
    if !(k > T::zero() && k < T::one()) {
        return Err(Error::Domain(k.to_f64().unwrap_or(f64::NAN)));
    }
    match shape_for(params) {
        Shape::Logistic => Err(Error::EqualModuli),
        Shape::Implicit { k_star, pole_weight, ratio } => {
            Ok(r1.powf(ratio + ratio) * (T::one() - k) * (k_star - k).abs().powf(-pole_weight) * k.powf(-ratio))
        }
    }
}

/// One entry of an [`AsymptoticsReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsItem<T> {
    /// Item label, `1a`..`1d` at `+L` and `2a`..`2d` at `-L`.
    pub label: &'static str,
    pub description: &'static str,
    pub x: T,
    pub value: T,
    pub pass: bool,
}

/// Numerical check of the tail behaviour required for a metric to extend
/// across the two elliptic curves.
///
/// Positivity items pass when the value is finite and positive; derivative
/// items pass when `|value| < tol`; the big-O ratio items pass when the ratio
/// at `±L` does not exceed the ratio at `±L/2` by more than `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsReport<T> {
    pub length: T,
    pub tol: T,
    pub items: Vec<AsymptoticsItem<T>>,
}

impl<T: Real> AsymptoticsReport<T> {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    pub fn item(&self, label: &str) -> Option<&AsymptoticsItem<T>> {
        self.items.iter().find(|i| i.label == label)
    }
}

/// Tail quantities at one point: at `+x` they are `(k-2n+1, (log(k-2n+1))',
/// k-n, m)`, at `-x` they are `(k, (log k)', k-n, m)`.
type TailValues<T> = (T, T, T, T);

fn assemble<T: Real>(
    params: &SurfaceParams<T>,
    length: T,
    tol: T,
    plus: impl Fn(T) -> TailValues<T>,
    minus: impl Fn(T) -> TailValues<T>,
) -> AsymptoticsReport<T> {
    let half = lit::<T>(0.5);
    let c = params.c_k;
    let positive = |v: T| v.is_finite() && v > T::zero();
    let small = |v: T| v.is_finite() && v.abs() < tol;
    let bounded = |far: T, near: T| far.is_finite() && far.abs() <= near.abs() + tol;

    let xp = length;
    let xm = -length;
    let wp = |x: T| (-x * half).exp();
    let wm = |x: T| (c * half * x).exp();
    let (q, dlog_q, kn_p, m_p) = plus(xp);
    let (_, _, kn_p_near, m_p_near) = plus(xp * half);
    let (k, dlog_k, kn_m, m_m) = minus(xm);
    let (_, _, kn_m_near, m_m_near) = minus(xm * half);
    let (kn_p, m_p) = (kn_p / wp(xp), m_p / wp(xp));
    let (kn_p_near, m_p_near) = (kn_p_near / wp(xp * half), m_p_near / wp(xp * half));
    let (kn_m, m_m) = (kn_m / wm(xm), m_m / wm(xm));
    let (kn_m_near, m_m_near) = (kn_m_near / wm(xm * half), m_m_near / wm(xm * half));

    let a1 = q * xp.exp();
    let b1 = dlog_q + T::one();
    let a2 = k * (-c * xm).exp();
    let b2 = dlog_k - c;
    let items = vec![
        AsymptoticsItem { label: "1a", description: "(k-2n+1) e^x > 0", x: xp, value: a1, pass: positive(a1) },
        AsymptoticsItem { label: "1b", description: "(log(k-2n+1))' + 1", x: xp, value: b1, pass: small(b1) },
        AsymptoticsItem {
            label: "1c",
            description: "(k-n) / e^(-x/2)",
            x: xp,
            value: kn_p,
            pass: bounded(kn_p, kn_p_near),
        },
        AsymptoticsItem { label: "1d", description: "m / e^(-x/2)", x: xp, value: m_p, pass: bounded(m_p, m_p_near) },
        AsymptoticsItem { label: "2a", description: "k e^(-(a/b)x) > 0", x: xm, value: a2, pass: positive(a2) },
        AsymptoticsItem { label: "2b", description: "(log k)' - a/b", x: xm, value: b2, pass: small(b2) },
        AsymptoticsItem {
            label: "2c",
            description: "(k-n) / e^((a/2b)x)",
            x: xm,
            value: kn_m,
            pass: bounded(kn_m, kn_m_near),
        },
        AsymptoticsItem {
            label: "2d",
            description: "m / e^((a/2b)x)",
            x: xm,
            value: m_m,
            pass: bounded(m_m, m_m_near),
        },
    ];
    AsymptoticsReport { length, tol, items }
}

pub fn check_asymptotics<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    length: T,
    tol: T,
) -> AsymptoticsReport<T> {
    let two = lit::<T>(2.0);
    let plus = |x: T| {
        let j = profile.jets(x);
        let q = j.k - j.n * two + T::one();
        (q.v, q.d1 / q.v, j.k.v - j.n.v, j.m.v)
    };
    let minus = |x: T| {
        let j = profile.jets(x);
        (j.k.v, j.k.d1 / j.k.v, j.k.v - j.n.v, j.m.v)
    };
    assemble(params, length, tol, plus, minus)
}

/// [`check_asymptotics`] for a diagonal metric given by its logit. Here
/// `k - 2n + 1 = σ(-θ)` and `k = σ(θ)` are formed without cancellation, so
/// the report stays meaningful where `k` rounds to 0 or 1.
pub fn check_logit_asymptotics<T: Real>(
    profile: &impl LogitProfile<T>,
    params: &SurfaceParams<T>,
    length: T,
    tol: T,
) -> AsymptoticsReport<T> {
    let plus = |x: T| {
        let th = profile.theta(x);
        (sigmoid(-th.v), -th.d1 * sigmoid(th.v), T::zero(), T::zero())
    };
    let minus = |x: T| {
        let th = profile.theta(x);
        (sigmoid(th.v), th.d1 * sigmoid(-th.v), T::zero(), T::zero())
    };
    assemble(params, length, tol, plus, minus)
}
