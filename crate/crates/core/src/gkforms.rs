//! Invariant complex differential forms on the logarithmic chart and the
//! generalized Kähler checks built on them.
//!
//! Forms live on the basis `e0 = dw1`, `e1 = dw̄1`, `e2 = dw2`, `e3 = dw̄2`.
//! A monomial is a bitmask over these four covectors taken in increasing
//! order, so antisymmetry is canonical. Coefficients are complex jets in the
//! invariant variable `x = (b/a)(w1 + w̄1) - (w2 + w̄2)`, hence
//! `dx = (b/a)(e0 + e1) - (e2 + e3)` and `d(c e_I) = c' dx ∧ e_I`.
//!
//! The twisted differential is `d^c = i (∂̄ - ∂)` for every complex structure.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{metric_w, MetricProfile, SurfaceParams};
use crate::jet::Jet;
use crate::linalg::Mat2;
use crate::scalar::{lit, Real};

/// Index of `dw1`, `dw̄1`, `dw2`, `dw̄2` in the basis.
pub const DW1: usize = 0;
pub const DW1_BAR: usize = 1;
pub const DW2: usize = 2;
pub const DW2_BAR: usize = 3;

const MONOMIALS: usize = 16;
const FULL_ORDER: u8 = 2;

/// A complex coefficient with up to two `x`-derivatives. `order` counts how
/// many derivative channels are meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffJet<T> {
    pub v: Complex<T>,
    pub d1: Complex<T>,
    pub d2: Complex<T>,
    pub order: u8,
}

impl<T: Real> CoeffJet<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { v: z, d1: z, d2: z, order: FULL_ORDER }
    }

    pub fn constant(v: Complex<T>) -> Self {
        Self { v, ..Self::zero() }
    }

    pub fn real(j: Jet<T>) -> Self {
        let c = |t: T| Complex::new(t, T::zero());
        Self { v: c(j.v), d1: c(j.d1), d2: c(j.d2), order: FULL_ORDER }
    }

    pub fn is_zero(&self) -> bool {
        let z = Complex::new(T::zero(), T::zero());
        self.v == z && self.d1 == z && self.d2 == z
    }

    pub fn conj(self) -> Self {
        Self { v: self.v.conj(), d1: self.d1.conj(), d2: self.d2.conj(), order: self.order }
    }

    pub fn scale(self, s: Complex<T>) -> Self {
        Self { v: self.v * s, d1: self.d1 * s, d2: self.d2 * s, order: self.order }
    }

    /// The derivative jet, one order shorter.
    fn derivative(self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if self.order == 0 {
            return Err(Error::JetExhausted);
        }
        let z = Complex::new(T::zero(), T::zero());
        Ok(Self { v: self.d1, d1: self.d2, d2: z, order: self.order - 1 })
    }
}

impl<T: Real> Add for CoeffJet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2, order: self.order.min(o.order) }
    }
}

impl<T: Real> Neg for CoeffJet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d1: -self.d1, d2: -self.d2, order: self.order }
    }
}

impl<T: Real> Sub for CoeffJet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Mul for CoeffJet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = lit::<T>(2.0);
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + (self.d1 * o.d1).scale(two) + self.v * o.d2,
            order: self.order.min(o.order),
        }
    }
}

/// Which covectors are of type (1,0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexStructure {
    /// The standard structure: `dw1`, `dw2` are (1,0).
    I,
    /// The `z2`-orientation-reversed structure: `dw1`, `dw̄2` are (1,0).
    J,
}

impl ComplexStructure {
    fn is_holomorphic(self, index: usize) -> bool {
        match self {
            ComplexStructure::I => index == DW1 || index == DW2,
            ComplexStructure::J => index == DW1 || index == DW2_BAR,
        }
    }
}

fn degree(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// Sign of `e_I ∧ e_J` relative to the sorted monomial `e_{I ∪ J}`.
fn wedge_sign(left: usize, right: usize) -> i32 {
    let mut swaps = 0;
    for i in 0..4 {
        if left & (1 << i) != 0 {
            // Right factors with a smaller index must pass over e_i.
            swaps += (right & ((1 << i) - 1)).count_ones();
        }
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A differential form on the `w` chart with coefficients depending on `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantForm<T> {
    /// `b/a`, fixing `dx` in the basis.
    ratio: T,
    coeffs: [CoeffJet<T>; MONOMIALS],
}

impl<T: Real> InvariantForm<T> {
    pub fn zero(ratio: T) -> Self {
        Self { ratio, coeffs: [CoeffJet::zero(); MONOMIALS] }
    }

    pub fn for_params(params: &SurfaceParams<T>) -> Self {
        Self::zero(params.ratio())
    }

    /// A 0-form.
    pub fn function(ratio: T, c: CoeffJet<T>) -> Self {
        let mut f = Self::zero(ratio);
        f.coeffs[0] = c;
        f
    }

    /// `c · e_{indices[0]} ∧ e_{indices[1]} ∧ ...`, reordered into canonical form.
    pub fn monomial(ratio: T, indices: &[usize], c: CoeffJet<T>) -> Self {
        let mut out = Self::function(ratio, c);
        for &i in indices {
            assert!(i < 4, "basis index {i} out of range");
            out = out.wedge(&Self::basis(ratio, i)).expect("degree stays at most 4");
        }
        out
    }

    /// The 1-form `e_index`.
    pub fn basis(ratio: T, index: usize) -> Self {
        let mut f = Self::zero(ratio);
        f.coeffs[1 << index] = CoeffJet::constant(Complex::new(T::one(), T::zero()));
        f
    }

    /// `dx = (b/a)(dw1 + dw̄1) - (dw2 + dw̄2)`.
    pub fn dx(ratio: T) -> Self {
        let mut f = Self::zero(ratio);
        for (i, c) in Self::dx_components(ratio).into_iter().enumerate() {
            f.coeffs[1 << i] = CoeffJet::constant(Complex::new(c, T::zero()));
        }
        f
    }

    fn dx_components(ratio: T) -> [T; 4] {
        [ratio, ratio, -T::one(), -T::one()]
    }

    pub fn ratio(&self) -> T {
        self.ratio
    }

    /// Coefficient of the sorted monomial with the given basis indices.
    pub fn coefficient(&self, indices: &[usize]) -> CoeffJet<T> {
        let mask = indices.iter().fold(0usize, |m, &i| m | (1 << i));
        self.coeffs[mask]
    }

    pub fn coefficient_mask(&self, mask: usize) -> CoeffJet<T> {
        self.coeffs[mask]
    }

    /// Monomials with a nonzero coefficient, as `(mask, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &CoeffJet<T>)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.terms().map(|(m, _)| degree(m)).max().unwrap_or(0)
    }

    /// Largest coefficient modulus (value channel).
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc.max(c.v.norm()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = c.scale(s);
        }
        out
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Multiplies by a function of `x`.
    pub fn mul_function(&self, f: CoeffJet<T>) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            if !c.is_zero() {
                *c = *c * f;
            }
        }
        out
    }

    /// Graded exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let total = self.degree() + other.degree();
        if total > 4 {
            return Err(Error::DegreeOverflow(total));
        }
        let mut out = Self::zero(self.ratio);
        for (l, cl) in self.terms() {
            for (r, cr) in other.terms() {
                if l & r != 0 {
                    continue;
                }
                let prod = *cl * *cr;
                let signed = if wedge_sign(l, r) > 0 { prod } else { -prod };
                out.coeffs[l | r] = out.coeffs[l | r] + signed;
            }
        }
        Ok(out)
    }

    /// Complex conjugation: coefficients conjugated, `dw_i ↔ dw̄_i`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.ratio);
        for (mask, c) in self.terms() {
            let indices: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).map(|i| i ^ 1).collect();
            let mut f = Self::function(self.ratio, c.conj());
            for i in indices {
                f = f.wedge(&Self::basis(self.ratio, i)).expect("degree preserved");
            }
            out = out + f;
        }
        out
    }

    /// `(self + conj self) / 2`.
    pub fn real_part(&self) -> Self {
        (self.clone() + self.conj()).scale_real(lit(0.5))
    }

    /// `(self - conj self) / 2i`.
    pub fn imag_part(&self) -> Self {
        (self.clone() - self.conj()).scale(Complex::new(T::zero(), lit(-0.5)))
    }

    /// Keeps the monomials of bidegree `(p, q)` for the given structure.
    pub fn pq_project(&self, p: usize, q: usize, structure: ComplexStructure) -> Self {
        let mut out = Self::zero(self.ratio);
        for (mask, c) in self.terms() {
            let holo = (0..4).filter(|&i| mask & (1 << i) != 0 && structure.is_holomorphic(i)).count();
            if holo == p && degree(mask) - holo == q {
                out.coeffs[mask] = *c;
            }
        }
        out
    }

    fn differentiate(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let dx = Self::dx_components(self.ratio);
        let mut out = Self::zero(self.ratio);
        for (mask, c) in self.terms() {
            let dc = c.derivative()?;
            for (i, &w) in dx.iter().enumerate() {
                if !keep(i) || mask & (1 << i) != 0 {
                    continue;
                }
                let term = dc.scale(Complex::new(w, T::zero()));
                let signed = if wedge_sign(1 << i, mask) > 0 { term } else { -term };
                out.coeffs[mask | (1 << i)] = out.coeffs[mask | (1 << i)] + signed;
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<Self> {
        self.differentiate(|_| true)
    }

    /// `∂` for the given structure.
    pub fn partial(&self, structure: ComplexStructure) -> Result<Self> {
        self.differentiate(|i| structure.is_holomorphic(i))
    }

    /// `∂̄` for the given structure.
    pub fn partial_bar(&self, structure: ComplexStructure) -> Result<Self> {
        self.differentiate(|i| !structure.is_holomorphic(i))
    }

    /// `d^c = i (∂̄ - ∂)`.
    pub fn d_c(&self, structure: ComplexStructure) -> Result<Self> {
        let diff = self.partial_bar(structure)? - self.partial(structure)?;
        Ok(diff.scale(Complex::new(T::zero(), T::one())))
    }
}

impl<T: Real> Add for InvariantForm<T> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (c, oc) in self.coeffs.iter_mut().zip(o.coeffs.iter()) {
            if !oc.is_zero() {
                *c = *c + *oc;
            }
        }
        self
    }
}

impl<T: Real> Sub for InvariantForm<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for InvariantForm<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

/// Graded exterior product; see [`InvariantForm::wedge`].
pub fn wedge<T: Real>(f: &InvariantForm<T>, g: &InvariantForm<T>) -> Result<InvariantForm<T>> {
    f.wedge(g)
}

/// Exterior derivative; see [`InvariantForm::d`].
pub fn exterior_d<T: Real>(f: &InvariantForm<T>) -> Result<InvariantForm<T>> {
    f.d()
}

/// `π^{p,q}` with respect to the standard structure.
pub fn pq_project<T: Real>(f: &InvariantForm<T>, p: usize, q: usize) -> InvariantForm<T> {
    f.pq_project(p, q, ComplexStructure::I)
}

/// `Ω₊ = φ1 ∧ φ2` together with its factors.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaPlus<T> {
    pub omega: InvariantForm<T>,
    pub phi1: InvariantForm<T>,
    pub phi2: InvariantForm<T>,
}

fn real_jet<T: Real>(j: Jet<T>) -> CoeffJet<T> {
    CoeffJet::real(j)
}

/// `φ1 = dw1 - (a/b)(1 + ε k) dw̄2`, `φ2 = (b/a) k dw̄1 + (1 - k) dw2`.
///
/// `ε = 0` is the even-type structure; a nonzero `ε` gives a non-integrable
/// distribution used as a negative control.
pub fn omega_plus_perturbed<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
    epsilon: T,
) -> Result<OmegaPlus<T>> {
    let k = profile.jets(x).k;
    if !(k.v > T::zero() && k.v < T::one()) {
        return Err(Error::Domain(k.v.to_f64().unwrap_or(f64::NAN)));
    }
    let r = params.ratio();
    let e = |i: usize| InvariantForm::basis(r, i);
    let tilt = Jet::one() + k * epsilon;
    let phi1 = e(DW1) + e(DW2_BAR).mul_function(real_jet(-tilt / r));
    let phi2 = e(DW1_BAR).mul_function(real_jet(k * r)) + e(DW2).mul_function(real_jet(-k + T::one()));
    let omega = phi1.wedge(&phi2)?;
    Ok(OmegaPlus { omega, phi1, phi2 })
}

/// The holomorphic volume form of the even-type second complex structure.
pub fn omega_plus<T: Real>(profile: &impl MetricProfile<T>, params: &SurfaceParams<T>, x: T) -> Result<OmegaPlus<T>> {
    omega_plus_perturbed(profile, params, x, T::zero())
}

/// `Ω₋ = dw1 ∧ dw2`.
pub fn omega_minus<T: Real>(params: &SurfaceParams<T>) -> InvariantForm<T> {
    InvariantForm::monomial(params.ratio(), &[DW1, DW2], CoeffJet::constant(Complex::new(T::one(), T::zero())))
}

fn frobenius_of<T: Real>(op: &OmegaPlus<T>) -> Result<T> {
    let mut worst = T::zero();
    for phi in [&op.phi1, &op.phi2] {
        let top = phi.d()?.wedge(&op.omega)?;
        worst = worst.max(top.max_abs());
    }
    Ok(worst)
}

/// `max_i |dφ_i ∧ φ1 ∧ φ2|`.
pub fn frobenius_residual<T: Real>(profile: &impl MetricProfile<T>, params: &SurfaceParams<T>, x: T) -> Result<T> {
    frobenius_of(&omega_plus(profile, params, x)?)
}

/// Frobenius residual of the `ε`-tilted distribution.
pub fn frobenius_residual_perturbed<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
    epsilon: T,
) -> Result<T> {
    frobenius_of(&omega_plus_perturbed(profile, params, x, epsilon)?)
}

/// The complex-bilinear pairing induced by `g` on covectors of the `w` chart.
fn covector_pairing<T: Real>(gw: &Mat2<T>) -> Result<[[Complex<T>; 4]; 4]> {
    let inv = gw.inverse().ok_or(Error::DegenerateMetric { x: f64::NAN, volume: 0.0 })?;
    let z = Complex::new(T::zero(), T::zero());
    let mut k = [[z; 4]; 4];
    for l in 0..2 {
        for j in 0..2 {
            // g^{-1}(dw_l, dw̄_j) = (g^{-1})_{j l}
            k[2 * l][2 * j + 1] = inv[(j, l)];
            k[2 * j + 1][2 * l] = inv[(j, l)];
        }
    }
    Ok(k)
}

fn one_form_vector<T: Real>(f: &InvariantForm<T>) -> [Complex<T>; 4] {
    let mut v = [Complex::new(T::zero(), T::zero()); 4];
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = f.coefficient_mask(1 << i).v;
    }
    v
}

/// `max_{i,j} |g(φ_i, φ_j)|` with the metric from `metric_profile` and the
/// `φ`'s from `phi_profile`.
pub fn isotropy_residual_between<T: Real>(
    metric_profile: &impl MetricProfile<T>,
    phi_profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
) -> Result<T> {
    let gw = metric_w(metric_profile, params, x)?;
    let pairing = covector_pairing(&gw)?;
    let op = omega_plus(phi_profile, params, x)?;
    let phis = [one_form_vector(&op.phi1), one_form_vector(&op.phi2)];
    let mut worst = T::zero();
    for a in &phis {
        for b in &phis {
            let mut s = Complex::new(T::zero(), T::zero());
            for i in 0..4 {
                for j in 0..4 {
                    s = s + a[i] * pairing[i][j] * b[j];
                }
            }
            worst = worst.max(s.norm());
        }
    }
    Ok(worst)
}

/// `max_{i,j} |g(φ_i, φ_j)|`: vanishes exactly when `g` is `J`-Hermitian.
pub fn isotropy_residual<T: Real>(profile: &impl MetricProfile<T>, params: &SurfaceParams<T>, x: T) -> Result<T> {
    isotropy_residual_between(profile, profile, params, x)
}

/// `max |Re Ω₊ - Re Ω₋|` over coefficients.
pub fn real_part_residual<T: Real>(profile: &impl MetricProfile<T>, params: &SurfaceParams<T>, x: T) -> Result<T> {
    let op = omega_plus(profile, params, x)?;
    Ok((op.omega.real_part() - omega_minus(params).real_part()).max_abs())
}

/// The Kähler form `i Σ g_{i j̄} dw_i ∧ dw̄_j` of the `w`-chart metric, with
/// jet coefficients.
pub fn kahler_form_w<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
) -> Result<InvariantForm<T>> {
    metric_w(profile, params, x)?;
    let (a, b) = w_metric_jets(profile, params, x);
    let r = params.ratio();
    let i = Complex::new(T::zero(), T::one());
    let mut omega = InvariantForm::zero(r);
    for (row, entries) in [(0usize, [a[0], a[1]]), (1usize, [b[0], b[1]])] {
        for (col, c) in entries.into_iter().enumerate() {
            let term = InvariantForm::monomial(r, &[2 * row, 2 * col + 1], c.scale(i));
            omega = omega + term;
        }
    }
    Ok(omega)
}

/// Rows of `g_w = Cᵀ g_u C` as coefficient jets.
fn w_metric_jets<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
) -> ([CoeffJet<T>; 2], [CoeffJet<T>; 2]) {
    let j = profile.jets(x);
    let r = params.ratio();
    let two = lit::<T>(2.0);
    let g11 = real_jet(j.k * (r * r));
    let re = real_jet((j.n - j.k) * r);
    let im = real_jet(j.m * r).scale(Complex::new(T::zero(), T::one()));
    let g22 = real_jet(j.k - j.n * two + j.p);
    ([g11, re + im], [re - im, g22])
}

/// Result of comparing `-π^{1,1} Im Ω₊` with the metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionFit<T> {
    /// Distance to `i((b/a) k dw1∧dw̄1 + (a/b)(1-k) dw2∧dw̄2)`.
    pub residual: T,
    /// Least-squares `λ` with `-π^{1,1} Im Ω₊ ≈ λ ω_w`.
    pub lambda: T,
    /// Residual of that fit.
    pub fit_residual: T,
}

pub fn projection_identity<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
) -> Result<ProjectionFit<T>> {
    let op = omega_plus(profile, params, x)?;
    let projected = -op.omega.imag_part().pq_project(1, 1, ComplexStructure::I);
    let k = profile.jets(x).k;
    let r = params.ratio();
    let i = Complex::new(T::zero(), T::one());
    let target = InvariantForm::monomial(r, &[DW1, DW1_BAR], real_jet(k * r).scale(i))
        + InvariantForm::monomial(r, &[DW2, DW2_BAR], real_jet((-k + T::one()) / r).scale(i));
    let residual = (projected.clone() - target).max_abs();

    let omega = kahler_form_w(profile, params, x)?;
    let mut num = T::zero();
    let mut den = T::zero();
    for mask in 0..MONOMIALS {
        let p = projected.coefficient_mask(mask).v;
        let w = omega.coefficient_mask(mask).v;
        num = num + (p * w.conj()).re;
        den = den + w.norm_sqr();
    }
    let lambda = if den > T::zero() { num / den } else { T::zero() };
    let fit_residual = (projected - omega.scale_real(lambda)).max_abs();
    Ok(ProjectionFit { residual, lambda, fit_residual })
}

/// The Kähler forms of `g` for `I` and for the orientation-reversed `J`.
pub fn odd_type_kahler_forms<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
) -> Result<(InvariantForm<T>, InvariantForm<T>)> {
    let j = profile.jets(x);
    let scale = T::one().max(j.k.v.abs());
    let tol = T::epsilon() * lit(64.0) * scale;
    let gap = j.n - j.k;
    if gap.v.abs() > tol || gap.d1.abs() > tol || gap.d2.abs() > tol {
        return Err(Error::AnsatzViolation(format!("n - k = {} at x = {x}", gap.v)));
    }
    if j.m.v.abs() > tol || j.m.d1.abs() > tol || j.m.d2.abs() > tol {
        return Err(Error::AnsatzViolation(format!("m = {} at x = {x}", j.m.v)));
    }
    metric_w(profile, params, x)?;
    let (row1, row2) = w_metric_jets(profile, params, x);
    let r = params.ratio();
    let i = Complex::new(T::zero(), T::one());
    let first = InvariantForm::monomial(r, &[DW1, DW1_BAR], row1[0].scale(i));
    let second = InvariantForm::monomial(r, &[DW2, DW2_BAR], row2[1].scale(i));
    Ok((first.clone() + second.clone(), first - second))
}

/// Torsion three-forms `H_I = d^c_I ω_I` and `H_J = d^c_J ω_J`.
pub fn odd_type_torsion<T: Real>(
    profile: &impl MetricProfile<T>,
    params: &SurfaceParams<T>,
    x: T,
) -> Result<(InvariantForm<T>, InvariantForm<T>)> {
    let (omega_i, omega_j) = odd_type_kahler_forms(profile, params, x)?;
    Ok((omega_i.d_c(ComplexStructure::I)?, omega_j.d_c(ComplexStructure::J)?))
}

/// `max |d^c_I ω_I + d^c_J ω_J|`.
pub fn odd_type_residual<T: Real>(profile: &impl MetricProfile<T>, params: &SurfaceParams<T>, x: T) -> Result<T> {
    let (hi, hj) = odd_type_torsion(profile, params, x)?;
    Ok((hi + hj).max_abs())
}

fn phi_exponents<T: Real>(params: &SurfaceParams<T>) -> (T, T) {
    let s = params.a + params.b;
    (lit::<T>(2.0) * params.a / s, lit::<T>(2.0) * params.b / s)
}

/// `|z1|^2 Φ^{-2a/(a+b)} + |z2|^2 Φ^{-2b/(a+b)} - 1`.
pub fn phi_identity_residual<T: Real>(z1: Complex<T>, z2: Complex<T>, params: &SurfaceParams<T>, phi: T) -> T {
    let (p1, p2) = phi_exponents(params);
    let t = phi.ln();
    z1.norm_sqr() * (-p1 * t).exp() + z2.norm_sqr() * (-p2 * t).exp() - T::one()
}

/// The positive root `Φ` of `|z1|^2 Φ^{-2a/(a+b)} + |z2|^2 Φ^{-2b/(a+b)} = 1`.
pub fn phi_solve<T: Real>(z1: Complex<T>, z2: Complex<T>, params: &SurfaceParams<T>) -> Result<T> {
    let (p1, p2) = phi_exponents(params);
    let s1 = z1.norm_sqr();
    let s2 = z2.norm_sqr();
    if s1 == T::zero() && s2 == T::zero() {
        return Err(Error::OriginExcluded);
    }
    if s2 == T::zero() {
        return Ok((s1.ln() / p1).exp());
    }
    if s1 == T::zero() {
        return Ok((s2.ln() / p2).exp());
    }
    // Work in t = log Φ; f is strictly decreasing, each term alone gives a
    // lower bound and each term at 1/2 gives an upper bound.
    let t1 = s1.ln() / p1;
    let t2 = s2.ln() / p2;
    let ln2 = T::LN_2();
    let mut lo = t1.max(t2);
    let mut hi = (t1 + ln2 / p1).max(t2 + ln2 / p2);
    let f = |t: T| {
        let e1 = s1 * (-p1 * t).exp();
        let e2 = s2 * (-p2 * t).exp();
        (e1 + e2 - T::one(), -p1 * e1 - p2 * e2)
    };
    let mut t = (lo + hi) * lit(0.5);
    let tol = T::epsilon() * lit(4.0);
    for _ in 0..200 {
        let (g, dg) = f(t);
        if g == T::zero() {
            break;
        }
        if g > T::zero() {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - g / dg;
        if !(next > lo && next < hi) {
            next = (lo + hi) * lit(0.5);
        }
        let step = (next - t).abs();
        t = next;
        if step <= tol * T::one().max(t.abs()) || hi - lo <= tol * T::one().max(t.abs()) {
            break;
        }
    }
    Ok(t.exp())
}

/// `log Φ(z0 + d) − log Φ(z0)` for a displacement `d`, solved directly for the
/// increment so that its rounding error scales with the increment rather than
/// with `log Φ`. `t0` is `log Φ(z0)`.
fn log_phi_increment<T: Real>(z0: [Complex<T>; 2], d: [Complex<T>; 2], t0: T, p: [T; 2]) -> T {
    // Each term is s_i e^{-p_i (t0 + δ)} minus its value at δ = 0. With
    // s_i(z0) > 0 it is w (e^{l - p δ} - 1) with l = log(s_i / s_i(z0));
    // on an axis it is w e^{-p δ}.
    let terms: [(T, T, T, bool); 2] = core::array::from_fn(|i| {
        let s0 = z0[i].norm_sqr();
        let scale = (-p[i] * t0).exp();
        if s0 > T::zero() {
            let rho = (lit::<T>(2.0) * (z0[i].conj() * d[i]).re + d[i].norm_sqr()) / s0;
            (s0 * scale, rho.ln_1p(), p[i], true)
        } else {
            (d[i].norm_sqr() * scale, T::zero(), p[i], false)
        }
    });
    let g = |delta: T| {
        terms.iter().fold((T::zero(), T::zero()), |(v, dv), &(w, l, pi, relative)| {
            let e = w * (l - pi * delta).exp();
            let value = if relative { w * (l - pi * delta).exp_m1() } else { e };
            (v + value, dv - pi * e)
        })
    };
    // g is strictly decreasing; grow a bracket around the root.
    let (mut lo, mut hi) = (T::zero(), T::zero());
    let mut width = T::one();
    if g(T::zero()).0 > T::zero() {
        while g(hi).0 > T::zero() {
            lo = hi;
            hi = hi + width;
            width = width + width;
        }
    } else {
        while g(lo).0 < T::zero() {
            hi = lo;
            lo = lo - width;
            width = width + width;
        }
    }
    let mut t = T::zero();
    if !(t >= lo && t <= hi) {
        t = (lo + hi) * lit(0.5);
    }
    let tol = T::epsilon() * lit(4.0);
    for _ in 0..200 {
        let (v, dv) = g(t);
        if v == T::zero() {
            break;
        }
        if v > T::zero() {
            lo = t;
        } else {
            hi = t;
        }
        let mut next = t - v / dv;
        if !(next > lo && next < hi) {
            next = (lo + hi) * lit(0.5);
        }
        let step = (next - t).abs();
        t = next;
        if step <= tol * t.abs() || hi - lo <= tol * t.abs() {
            break;
        }
    }
    t
}

/// Finite-difference `i∂∂̄ log Φ` at `(z1, z2)`: the Hermitian matrix
/// `∂² log Φ / ∂z_i ∂z̄_j`. The real Hessian is Richardson-extrapolated from
/// central differences with steps `h` and `2h`, so the error is `O(h⁴)`;
/// `h ≈ 1e-3 |z|` is a good choice. Stencil values are increments of `log Φ`
/// relative to the centre, which keeps the rounding error far below the
/// truncation error.
pub fn ddbar_log_phi<T: Real>(z1: Complex<T>, z2: Complex<T>, params: &SurfaceParams<T>, h: T) -> Result<Mat2<T>> {
    let radius = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
    if !(h > T::zero()) || radius <= lit::<T>(4.0) * h {
        return Err(Error::StencilCrossesOrigin);
    }
    let t0 = phi_solve(z1, z2, params)?.ln();
    let (p1, p2) = phi_exponents(params);
    let eval = |shift: [T; 4]| -> Result<T> {
        let d = [Complex::new(shift[0], shift[1]), Complex::new(shift[2], shift[3])];
        Ok(log_phi_increment([z1, z2], d, t0, [p1, p2]))
    };
    let f0 = T::zero();
    let central = |h: T| -> Result<[[T; 4]; 4]> {
        let at = |i: usize, si: T, j: usize, sj: T| {
            let mut v = [T::zero(); 4];
            v[i] = si;
            v[j] = v[j] + sj;
            eval(v)
        };
        let h2 = h * h;
        let mut hess = [[T::zero(); 4]; 4];
        #[allow(clippy::needless_range_loop)]
        for i in 0..4 {
            hess[i][i] = (at(i, h, i, T::zero())? - lit::<T>(2.0) * f0 + at(i, -h, i, T::zero())?) / h2;
            for j in (i + 1)..4 {
                let v =
                    (at(i, h, j, h)? - at(i, h, j, -h)? - at(i, -h, j, h)? + at(i, -h, j, -h)?) / (lit::<T>(4.0) * h2);
                hess[i][j] = v;
                hess[j][i] = v;
            }
        }
        Ok(hess)
    };
    let fine = central(h)?;
    let coarse = central(h + h)?;
    let mut hess = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            hess[i][j] = (lit::<T>(4.0) * fine[i][j] - coarse[i][j]) / lit::<T>(3.0);
        }
    }
    // Real coordinates (x1, y1, x2, y2); ∂_{z_i} ∂_{z̄_j} = (1/4)(∂x_i - i∂y_i)(∂x_j + i∂y_j).
    let q = lit::<T>(0.25);
    let entry = |a: usize, b: usize| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        Complex::new((hess[xa][xb] + hess[ya][yb]) * q, (hess[xa][yb] - hess[ya][xb]) * q)
    };
    let h11 = entry(0, 0).re;
    let h22 = entry(1, 1).re;
    Ok(Mat2::hermitian(h11, entry(0, 1), h22))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConstantProfile, FnProfile, ProfileJets};
    use crate::soliton::SolitonProfile;

    fn params(a: f64, b: f64) -> SurfaceParams<f64> {
        SurfaceParams::from_log_moduli(a, b).unwrap()
    }

    fn one() -> CoeffJet<f64> {
        CoeffJet::constant(Complex::new(1.0, 0.0))
    }

    #[test]
    fn wedge_basics() {
        let r = 0.5;
        let e = |i| InvariantForm::<f64>::basis(r, i);
        assert_eq!(e(DW1).wedge(&e(DW1)).unwrap().max_abs(), 0.0);
        let lhs = e(DW1).wedge(&e(DW2)).unwrap();
        let rhs = e(DW2).wedge(&e(DW1)).unwrap();
        assert_eq!(lhs, -rhs);

        let k = Jet::new(0.3, 0.7, -0.2);
        let f = e(DW1_BAR).mul_function(CoeffJet::real(k)).wedge(&e(DW2)).unwrap();
        let c = f.coefficient(&[DW1_BAR, DW2]);
        assert_eq!(c.v.re, 0.3);
        assert_eq!(c.d1.re, 0.7);

        let top = InvariantForm::monomial(r, &[0, 1, 2, 3], one());
        assert!(matches!(top.wedge(&e(DW1)), Err(Error::DegreeOverflow(5))));
    }

    #[test]
    fn exterior_derivative_of_function() {
        let p = params(-2.0, -1.0);
        let r = p.ratio();
        let k = CoeffJet::real(Jet::new(0.4, 0.3, 0.1));
        let f = InvariantForm::function(r, k);
        let df = f.d().unwrap();
        let expect = InvariantForm::dx(r).mul_function(CoeffJet::real(Jet::new(0.3, 0.1, 0.0)));
        assert!((df.clone() - expect).max_abs() < 1e-16);
        assert!(df.d().unwrap().max_abs() < 1e-16);

        let c = InvariantForm::monomial(r, &[DW2], one());
        assert_eq!(c.d().unwrap().max_abs(), 0.0);

        let g = InvariantForm::basis(r, DW2).mul_function(k);
        assert!(g.d().unwrap().d().unwrap().max_abs() < 1e-16);
        let once = f.d().unwrap();
        let twice_exhausted = InvariantForm::function(r, once.coefficient(&[DW1])).d().unwrap().d();
        assert!(matches!(twice_exhausted, Err(Error::JetExhausted)));
    }

    #[test]
    fn projection_examples() {
        let r = 1.0;
        let a = InvariantForm::monomial(r, &[DW1, DW2_BAR], one());
        assert_eq!(pq_project(&a, 2, 0).max_abs(), 0.0);
        let b = InvariantForm::monomial(r, &[DW1, DW1_BAR], one()) + InvariantForm::monomial(r, &[DW1, DW2], one());
        let p = pq_project(&b, 1, 1);
        assert_eq!(p, InvariantForm::monomial(r, &[DW1, DW1_BAR], one()));
    }

    #[test]
    fn omega_plus_at_symmetric_point() {
        let p = params(-1.0, -1.0);
        let c = ConstantProfile { k: 0.5, n: 0.5, m: 0.0, p: 1.0 };
        let op = omega_plus(&c, &p, 0.0).unwrap();
        assert_eq!(op.phi2.coefficient(&[DW1_BAR]).v.re, 0.5);
        assert_eq!(op.phi2.coefficient(&[DW2]).v.re, 0.5);
        let masks: Vec<usize> = op.omega.terms().map(|(m, _)| m).collect();
        let expected = [0b0011, 0b0101, 0b1010, 0b1100];
        assert_eq!(masks, expected);
    }

    #[test]
    fn frobenius_holds_for_any_dw1bar_dw2_coefficients() {
        // The distribution spanned by dw1 - (a/b) dw̄2 and f dw̄1 + g dw2 is
        // involutive for every pair of functions of x, so replacing (1-k) by
        // (1-k^2) keeps the residual at zero.
        let p = params(-2.0, -1.0);
        let r = p.ratio();
        let k = Jet::new(0.3, 0.21, 0.05);
        let e = |i| InvariantForm::<f64>::basis(r, i);
        let phi1 = e(DW1) + e(DW2_BAR).scale_real(-1.0 / r);
        let phi2 = e(DW1_BAR).mul_function(CoeffJet::real(k * r)) + e(DW2).mul_function(CoeffJet::real(-(k * k) + 1.0));
        let omega = phi1.wedge(&phi2).unwrap();
        let res = phi2.d().unwrap().wedge(&omega).unwrap().max_abs();
        assert!(res < 1e-15);

        let s = SolitonProfile::new(p);
        assert!(frobenius_residual_perturbed(&s, &p, 0.3, 0.1).unwrap() > 1e-3);
        let flat = ConstantProfile { k: 0.4, n: 0.4, m: 0.0, p: 1.0 };
        assert_eq!(frobenius_residual(&flat, &p, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn isotropy_at_symmetric_point_and_counterexample() {
        let p = params(-1.0, -1.0);
        let c = ConstantProfile { k: 0.5, n: 0.5, m: 0.0, p: 1.0 };
        assert!(isotropy_residual(&c, &p, 0.0).unwrap() < 1e-15);

        let q = params(-2.0, -1.0);
        let s = SolitonProfile::new(q);
        let other = FnProfile::new(|x: Jet<f64>| {
            let k = (x * 0.7 + 0.3).sigmoid();
            ProfileJets { k, n: k, m: Jet::zero(), p: Jet::one() }
        });
        assert!(isotropy_residual_between(&other, &s, &q, 0.4).unwrap() > 1e-3);
    }

    #[test]
    fn odd_type_for_constant_and_rejects_off_diagonal() {
        let p = params(-2.0, -1.0);
        let c = ConstantProfile { k: 0.3, n: 0.3, m: 0.0, p: 1.0 };
        let (hi, hj) = odd_type_torsion(&c, &p, 0.0).unwrap();
        assert_eq!(hi.max_abs(), 0.0);
        assert_eq!(hj.max_abs(), 0.0);
        let bad = ConstantProfile { k: 0.3, n: 0.1, m: 0.0, p: 1.0 };
        assert!(matches!(odd_type_residual(&bad, &p, 0.0), Err(Error::AnsatzViolation(_))));
    }

    #[test]
    fn phi_closed_forms() {
        let p = params(-2.0, -1.0);
        let z1 = Complex::new(0.6, -0.3);
        let zero = Complex::new(0.0, 0.0);
        let phi = phi_solve(z1, zero, &p).unwrap();
        let expect = z1.norm().powf((p.a + p.b) / p.a);
        assert!((phi - expect).abs() < 1e-14);
        assert_eq!(phi_solve(zero, zero, &p), Err(Error::OriginExcluded));

        let e = params(-1.0, -1.0);
        let z2 = Complex::new(0.2, 0.9);
        let phi = phi_solve(z1, z2, &e).unwrap();
        assert!((phi - (z1.norm_sqr() + z2.norm_sqr())).abs() < 1e-14);
        assert!(phi_identity_residual(z1, z2, &e, phi).abs() < 1e-15);
    }

    #[test]
    fn ddbar_rejects_stencil_through_origin() {
        let p = params(-2.0, -1.0);
        let tiny = Complex::new(1e-5, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert_eq!(ddbar_log_phi(tiny, zero, &p, 1e-4), Err(Error::StencilCrossesOrigin));
    }
}
