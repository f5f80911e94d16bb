//! Hopf-surface parameters, coordinate charts and the invariant metric ansatz.
//!
//! Three charts are used on the open torus `(C*)^2`:
//!
//! * `z = (z1, z2)`, the linear coordinates on `C^2 \ {0}`;
//! * `w = (log z1, log z2)`, logarithmic coordinates;
//! * `u = ((b/a) w1 - w2, w2)`, adapted to the generator of the deck group.
//!
//! Invariant tensors depend only on `x = u1 + conj(u1) = (b/a) log|z1|^2 - log|z2|^2`.
//! Hermitian matrices are stored as `g_{i j̄}`, i.e. `ω = i Σ g_{i j̄} dζ_i ∧ dζ̄_j`,
//! and change chart by `g' = Bᵀ g B̄` where `dζ = B dζ'`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jet::{jet_from_values, Jet};
use crate::linalg::Mat2;
use crate::scalar::{lit, Real};

/// Parameters of the diagonal Hopf surface `C^2 \ {0} / (z1, z2) ~ (α z1, β z2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceParams<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
    /// `Re log α`.
    pub a: T,
    /// `Re log β`.
    pub b: T,
    /// Soliton drift `1 - a/b`.
    pub mu: T,
    /// Integration constant `a/b`.
    pub c_k: T,
}

impl<T: Real> SurfaceParams<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        for (name, z) in [("alpha", alpha), ("beta", beta)] {
            let r = z.norm();
            if !(r > T::zero() && r < T::one()) {
                return Err(Error::ParameterOutOfRange(format!("|{name}| = {r} is not in (0, 1)")));
            }
        }
        let a = alpha.norm().ln();
        let b = beta.norm().ln();
        let c_k = a / b;
        Ok(Self { alpha, beta, a, b, mu: T::one() - c_k, c_k })
    }

    /// Builds parameters from modulus/argument pairs.
    pub fn from_polar(alpha_mod: T, alpha_arg: T, beta_mod: T, beta_arg: T) -> Result<Self> {
        Self::new(Complex::from_polar(alpha_mod, alpha_arg), Complex::from_polar(beta_mod, beta_arg))
    }

    /// Parameters with real `α = e^a`, `β = e^b`.
    pub fn from_log_moduli(a: T, b: T) -> Result<Self> {
        Self::new(Complex::new(a.exp(), T::zero()), Complex::new(b.exp(), T::zero()))
    }

    /// `b/a`, the slope relating `w1` to `u1`.
    pub fn ratio(&self) -> T {
        self.b / self.a
    }

    /// Whether `|α| = |β|` up to rounding, the stationary case `μ = 0`.
    pub fn equal_moduli(&self) -> bool {
        (self.a - self.b).abs() <= T::epsilon() * lit(16.0) * self.a.abs()
    }

    /// The generator `Z = a ∂/∂x1 + b ∂/∂x2` of the deck action, as its components.
    pub fn generator(&self) -> (T, T) {
        (self.a, self.b)
    }

    /// The invariant variable `x = (b/a) log|z1|^2 - log|z2|^2`.
    pub fn invariant_x(&self, z1: Complex<T>, z2: Complex<T>) -> Result<T> {
        if z1.norm_sqr() == T::zero() || z2.norm_sqr() == T::zero() {
            return Err(Error::ChartDomain);
        }
        Ok(self.ratio() * z1.norm_sqr().ln() - z2.norm_sqr().ln())
    }

    /// Jacobian `B` with `du = B dz`.
    pub fn u_from_z_jacobian(&self, z1: Complex<T>, z2: Complex<T>) -> Result<Mat2<T>> {
        if z1.norm_sqr() == T::zero() || z2.norm_sqr() == T::zero() {
            return Err(Error::ChartDomain);
        }
        let zero = Complex::new(T::zero(), T::zero());
        let inv2 = z2.inv();
        Ok(Mat2::new([[z1.inv().scale(self.ratio()), -inv2], [zero, inv2]]))
    }

    /// Jacobian `C` with `du = C dw`.
    pub fn u_from_w_jacobian(&self) -> Mat2<T> {
        Mat2::from_real([[self.ratio(), -T::one()], [T::zero(), T::one()]])
    }
}

/// Jets of the four profile functions of an invariant Hermitian metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJets<T> {
    pub k: Jet<T>,
    pub n: Jet<T>,
    pub m: Jet<T>,
    pub p: Jet<T>,
}

impl<T: Real> ProfileJets<T> {
    /// `V = k p - n^2 - m^2` as a jet. The value is formed with fused
    /// multiply-adds so that `V` keeps its relative accuracy when it is much
    /// smaller than `k`.
    pub fn volume(&self) -> Jet<T> {
        let (k, n, m, p) = (self.k, self.n, self.m, self.p);
        let mut v = k * p - n * n - m * m;
        v.v = (-m.v).mul_add(m.v, (-n.v).mul_add(n.v, k.v * p.v));
        v
    }

    /// Whether the jets describe a `p ≡ 1` profile.
    pub fn is_normalized(&self) -> bool {
        let eps = T::epsilon() * lit(8.0);
        (self.p.v - T::one()).abs() <= eps && self.p.d1.abs() <= eps && self.p.d2.abs() <= eps
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                p: self.p.v.to_f64().unwrap_or(f64::NAN),
                dp: self.p.d1.to_f64().unwrap_or(f64::NAN),
            })
        }
    }
}

/// An invariant Hermitian metric, given by its profile functions of `x`.
pub trait MetricProfile<T: Real> {
    fn jets(&self, x: T) -> ProfileJets<T>;
}

impl<T: Real, P: MetricProfile<T> + ?Sized> MetricProfile<T> for &P {
    fn jets(&self, x: T) -> ProfileJets<T> {
        (**self).jets(x)
    }
}

/// A profile written as jet expressions in `x`; derivatives come out exact.
pub struct FnProfile<F> {
    f: F,
}

impl<F> FnProfile<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<T: Real, F: Fn(Jet<T>) -> ProfileJets<T>> MetricProfile<T> for FnProfile<F> {
    fn jets(&self, x: T) -> ProfileJets<T> {
        (self.f)(Jet::variable(x))
    }
}

/// A profile known only through values; derivatives by central differences.
pub struct FdProfile<T, F> {
    f: F,
    h: T,
}

impl<T: Real, F: Fn(T) -> [T; 4]> FdProfile<T, F> {
    /// `f(x)` returns `[k, n, m, p]`.
    pub fn new(f: F, h: T) -> Self {
        Self { f, h }
    }
}

impl<T: Real, F: Fn(T) -> [T; 4]> MetricProfile<T> for FdProfile<T, F> {
    fn jets(&self, x: T) -> ProfileJets<T> {
        let c = |i: usize| jet_from_values(|t| (self.f)(t)[i], x, self.h);
        ProfileJets { k: c(0), n: c(1), m: c(2), p: c(3) }
    }
}

/// Constant profile functions.
#[derive(Clone, Copy, Debug)]
pub struct ConstantProfile<T> {
    pub k: T,
    pub n: T,
    pub m: T,
    pub p: T,
}

impl<T: Real> MetricProfile<T> for ConstantProfile<T> {
    fn jets(&self, _x: T) -> ProfileJets<T> {
        ProfileJets {
            k: Jet::constant(self.k),
            n: Jet::constant(self.n),
            m: Jet::constant(self.m),
            p: Jet::constant(self.p),
        }
    }
}

/// A diagonal profile described by its logit `θ = log(k / (1 - k))`.
///
/// Metrics of this kind have `k = n`, `m = 0`, `p = 1`; in the `z` chart they
/// are `diag((b/a)^2 k / |z1|^2, (1 - k) / |z2|^2)`.
pub trait LogitProfile<T: Real> {
    fn theta(&self, x: T) -> Jet<T>;
}

impl<T: Real, P: LogitProfile<T> + ?Sized> LogitProfile<T> for &P {
    fn theta(&self, x: T) -> Jet<T> {
        (**self).theta(x)
    }
}

/// A logit profile given as a jet expression.
pub struct FnLogit<F> {
    f: F,
}

impl<F> FnLogit<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<T: Real, F: Fn(Jet<T>) -> Jet<T>> LogitProfile<T> for FnLogit<F> {
    fn theta(&self, x: T) -> Jet<T> {
        (self.f)(Jet::variable(x))
    }
}

/// Views a logit profile as a metric profile with `k = n = σ(θ)`, `m = 0`, `p = 1`.
pub struct Diagonal<P>(pub P);

impl<T: Real, P: LogitProfile<T>> MetricProfile<T> for Diagonal<P> {
    fn jets(&self, x: T) -> ProfileJets<T> {
        let k = self.0.theta(x).sigmoid();
        ProfileJets { k, n: k, m: Jet::zero(), p: Jet::one() }
    }
}

fn check_positive<T: Real>(j: &ProfileJets<T>, x: T) -> Result<T> {
    let xf = x.to_f64().unwrap_or(f64::NAN);
    if !(j.k.v > T::zero()) {
        return Err(Error::NonPositiveMetric { x: xf, what: "k <= 0" });
    }
    let v = j.volume().v;
    if !(v > T::zero()) {
        return Err(Error::NonPositiveMetric { x: xf, what: "V <= 0" });
    }
    Ok(v)
}

/// The metric in the `u` chart: `[[k, n + i m], [n - i m, p]]`.
pub fn metric_u<T: Real>(profile: &impl MetricProfile<T>, x: T) -> Result<Mat2<T>> {
    let j = profile.jets(x);
    check_positive(&j, x)?;
    Ok(Mat2::hermitian(j.k.v, Complex::new(j.n.v, j.m.v), j.p.v))
}

/// The metric in the logarithmic `w` chart, the pullback of [`metric_u`].
pub fn metric_w<T: Real>(profile: &impl MetricProfile<T>, params: &SurfaceParams<T>, x: T) -> Result<Mat2<T>> {
    let gu = metric_u(profile, x)?;
    let c = params.u_from_w_jacobian();
    Ok(c.transpose() * gu * c.conj())
}

/// The metric in the linear `z` chart at `(z1, z2)`, both nonzero.
pub fn metric_z<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    z1: Complex<T>,
    z2: Complex<T>,
) -> Result<Mat2<T>> {
    let x = params.invariant_x(z1, z2)?;
    let gu = metric_u(profile, x)?;
    let b = params.u_from_z_jacobian(z1, z2)?;
    Ok(b.transpose() * gu * b.conj())
}

/// `V = det g_u = k p - n^2 - m^2`.
pub fn volume_v<T: Real>(profile: &impl MetricProfile<T>, x: T) -> T {
    profile.jets(x).volume().v
}

/// Pluriclosed test for an invariant metric: the norm `p` of the Killing
/// direction must be constant. Returns the flag and `sup |p'|` over the grid.
pub fn is_pluriclosed<T: Real>(profile: &impl MetricProfile<T>, grid: &[T], tol: T) -> (bool, T) {
    let residual = grid.iter().fold(T::zero(), |acc, &x| acc.max(profile.jets(x).p.d1.abs()));
    (residual <= tol, residual)
}

/// Largest discrepancy between the derivative channels of the jets and central
/// differences of the value channel with step `h`.
pub fn jet_consistency<T: Real>(profile: &impl MetricProfile<T>, x: T, h: T) -> T {
    let value = |t: T, i: usize| {
        let j = profile.jets(t);
        [j.k, j.n, j.m, j.p][i].v
    };
    let exact = profile.jets(x);
    let exact = [exact.k, exact.n, exact.m, exact.p];
    (0..4).fold(T::zero(), |acc, i| {
        let fd = jet_from_values(|t| value(t, i), x, h);
        acc.max((fd.d1 - exact[i].d1).abs()).max((fd.d2 - exact[i].d2).abs())
    })
}
