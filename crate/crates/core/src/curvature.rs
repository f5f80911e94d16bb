//! Bismut–Ricci curvature of invariant pluriclosed metrics.
//!
//! All forms are returned as Hermitian coefficient matrices `c` in the
//! `i du_i ∧ dū_j` basis of the `u` chart. Profiles must be normalized to
//! `p ≡ 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{MetricProfile, ProfileJets};
use crate::jet::Jet;
use crate::linalg::Mat2;
use crate::scalar::{lit, Real};

/// Coefficients of a real (1,1)-form in the `i du_i ∧ dū_j` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RicciForm<T>(pub Mat2<T>);

impl<T: Real> RicciForm<T> {
    pub fn matrix(&self) -> &Mat2<T> {
        &self.0
    }

    pub fn max_abs(&self) -> T {
        self.0.max_abs()
    }
}

/// The pair of torsion one-forms whose `∂`- and `∂̄`-derivatives assemble the
/// Bismut–Ricci form.
///
/// `dbar` holds the `dū1, dū2` coefficients of `(i/2) ∂̄ log V + ∂*ω`;
/// `d` holds the `du1, du2` coefficients of `-(i/2) ∂ log V + ∂̄*ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionForms<T> {
    pub dbar: [Complex<T>; 2],
    pub d: [Complex<T>; 2],
}

fn normalized_jets<T: Real>(profile: &impl MetricProfile<T>, x: T) -> Result<(ProfileJets<T>, Jet<T>)> {
    let j = profile.jets(x);
    j.require_normalized()?;
    let v = j.volume();
    if !(v.v > T::zero()) {
        return Err(Error::DegenerateMetric {
            x: x.to_f64().unwrap_or(f64::NAN),
            volume: v.v.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((j, v))
}

/// `(f' / V)'` from jets of `f` and `V`.
fn flux_derivative<T: Real>(f: Jet<T>, v: Jet<T>) -> T {
    f.d2 / v.v - f.d1 * v.d1 / (v.v * v.v)
}

/// Closed-form `ρ_B^{1,1} = -[[(k'/V)', ((n' + i m')/V)'], [((n' - i m')/V)', 0]]`.
pub fn bismut_ricci<T: Real>(profile: &impl MetricProfile<T>, x: T) -> Result<RicciForm<T>> {
    let (j, v) = normalized_jets(profile, x)?;
    let kk = flux_derivative(j.k, v);
    let nn = flux_derivative(j.n, v);
    let mm = flux_derivative(j.m, v);
    let zero = Complex::new(T::zero(), T::zero());
    Ok(RicciForm(Mat2::new([[Complex::new(-kk, T::zero()), Complex::new(-nn, -mm)], [Complex::new(-nn, mm), zero]])))
}

/// Chern–Ricci form `-i ∂∂̄ log V`: only the `(1, 1̄)` entry `-(log V)''` survives.
pub fn chern_ricci<T: Real>(profile: &impl MetricProfile<T>, x: T) -> Result<RicciForm<T>> {
    let (_, v) = normalized_jets(profile, x)?;
    let q = v.d1 / v.v;
    let log_v_dd = v.d2 / v.v - q * q;
    let mut m = Mat2::zero();
    m[(0, 0)] = Complex::new(-log_v_dd, T::zero());
    Ok(RicciForm(m))
}

/// Torsion one-forms at `x`, using first derivatives of the profile only.
pub fn torsion_one_forms<T: Real>(profile: &impl MetricProfile<T>, x: T) -> Result<TorsionForms<T>> {
    let (j, v) = normalized_jets(profile, x)?;
    let vv = v.v;
    let half = lit::<T>(0.5);
    let real = (j.n.d1 * j.m.v - j.m.d1 * j.n.v) / vv;
    let k_term = half * j.k.d1 / vv;
    let nm = Complex::new(j.n.d1, j.m.d1).unscale(vv);
    let i = Complex::new(T::zero(), T::one());
    Ok(TorsionForms { dbar: [Complex::new(real, k_term), i * nm], d: [Complex::new(real, -k_term), -i * nm.conj()] })
}

/// Finite-difference assembly of `ρ_B^{1,1} = -∂A - ∂̄B` from the torsion
/// one-forms `A`, `B` of [`torsion_one_forms`], differentiated by central
/// differences with step `h`. Independent of the second-derivative channel
/// of the profile jets.
pub fn bismut_ricci_oracle<T: Real>(profile: &impl MetricProfile<T>, x: T, h: T) -> Result<RicciForm<T>> {
    if !(h > T::zero()) {
        return Err(Error::StepTooLarge);
    }
    let probe = |t: T| {
        let j = profile.jets(t);
        j.volume().v > T::zero()
    };
    if !(probe(x - h) && probe(x) && probe(x + h)) {
        return Err(Error::StepTooLarge);
    }
    let plus = torsion_one_forms(profile, x + h)?;
    let minus = torsion_one_forms(profile, x - h)?;
    let inv = (h + h).recip();
    let da = |i: usize| (plus.dbar[i] - minus.dbar[i]).scale(inv);
    let db = |i: usize| (plus.d[i] - minus.d[i]).scale(inv);
    let i = Complex::new(T::zero(), T::one());
    let zero = Complex::new(T::zero(), T::zero());
    Ok(RicciForm(Mat2::new([[i * (da(0) - db(0)), i * da(1)], [-i * db(1), zero]])))
}

/// The Lie derivative of the metric along the drift field, normalized so that
/// the soliton equation reads `bismut_ricci = μ · lie_derivative_y`, i.e.
/// `(k'/V)' = μ k'` and likewise for `n`, `m`.
pub fn lie_derivative_y<T: Real>(profile: &impl MetricProfile<T>, x: T) -> Mat2<T> {
    let j = profile.jets(x);
    let zero = Complex::new(T::zero(), T::zero());
    Mat2::new([
        [Complex::new(-j.k.d1, T::zero()), Complex::new(-j.n.d1, -j.m.d1)],
        [Complex::new(-j.n.d1, j.m.d1), zero],
    ])
}

/// `sup` over the grid of the soliton-system residuals
/// `(k'/V)' - μ k'`, `(n'/V)' - μ n'`, `(m'/V)' - μ m'`.
pub fn soliton_residual<T: Real>(profile: &impl MetricProfile<T>, mu: T, grid: &[T]) -> Result<T> {
    let mut worst = T::zero();
    for &x in grid {
        let (j, v) = normalized_jets(profile, x)?;
        for f in [j.k, j.n, j.m] {
            let r = (flux_derivative(f, v) - mu * f.d1).abs();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}
