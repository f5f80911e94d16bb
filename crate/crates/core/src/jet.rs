//! Second-order jets: a value together with its first two derivatives in the
//! invariant variable `x`.
//!
//! Arithmetic follows the truncated Taylor rules, so a profile written as an
//! expression in [`Jet::variable`] carries exact first and second derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet<T> {
    pub fn new(v: T, d1: T, d2: T) -> Self {
        Self { v, d1, d2 }
    }

    pub fn constant(v: T) -> Self {
        Self::new(v, T::zero(), T::zero())
    }

    /// The identity jet at `x`.
    pub fn variable(x: T) -> Self {
        Self::new(x, T::one(), T::zero())
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    pub fn chain(self, f: T, df: T, d2f: T) -> Self {
        Self::new(f, df * self.d1, d2f * self.d1 * self.d1 + df * self.d2)
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.v * s, self.d1 * s, self.d2 * s)
    }

    pub fn shift(self, s: T) -> Self {
        Self::new(self.v + s, self.d1, self.d2)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = self.v.recip();
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn recip(self) -> Self {
        let r = self.v.recip();
        self.chain(r, -r * r, lit::<T>(2.0) * r * r * r)
    }

    pub fn powi(self, n: i32) -> Self {
        let nt = T::from_i32(n).unwrap();
        let nm1 = T::from_i32(n - 1).unwrap();
        self.chain(self.v.powi(n), nt * self.v.powi(n - 1), nt * nm1 * self.v.powi(n - 2))
    }

    pub fn tanh(self) -> Self {
        let t = self.v.tanh();
        let s2 = T::one() - t * t;
        self.chain(t, s2, lit::<T>(-2.0) * t * s2)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    /// Logistic `1 / (1 + e^{-v})`. Derivatives are written as `s (1 - s)`
    /// with the rounded complement, so `s' / (s (1 - s))` is exactly 1 even
    /// where `s` rounds towards 1.
    pub fn sigmoid(self) -> Self {
        let s = crate::scalar::sigmoid(self.v);
        let sc = T::one() - s;
        let ds = s * sc;
        self.chain(s, ds, ds * (sc - s))
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::one() + T::one();
        Self::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + two * self.d1 * o.d1 + self.v * o.d2)
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> Add<T> for Jet<T> {
    type Output = Self;
    fn add(self, s: T) -> Self {
        self.shift(s)
    }
}

impl<T: Real> Sub<T> for Jet<T> {
    type Output = Self;
    fn sub(self, s: T) -> Self {
        self.shift(-s)
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Div<T> for Jet<T> {
    type Output = Self;
    fn div(self, s: T) -> Self {
        self.scale(s.recip())
    }
}

/// Builds a jet from a value-only function by central differences with step `h`.
pub fn jet_from_values<T: Real>(f: impl Fn(T) -> T, x: T, h: T) -> Jet<T> {
    let two = lit::<T>(2.0);
    let fp = f(x + h);
    let f0 = f(x);
    let fm = f(x - h);
    Jet::new(f0, (fp - fm) / (two * h), (fp - two * f0 + fm) / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::variable(0.7f64);
        let f = x * x * x;
        assert!((f.d1 - 3.0 * 0.49).abs() < 1e-14);
        assert!((f.d2 - 6.0 * 0.7).abs() < 1e-14);
        let q = Jet::one() / x;
        assert!((q.d1 + 1.0 / 0.49).abs() < 1e-13);
        assert!((q.d2 - 2.0 / 0.343).abs() < 1e-12);
    }

    #[test]
    fn sigmoid_matches_logistic_ode() {
        for &x in &[-40.0f64, -3.0, 0.0, 2.5, 40.0] {
            let k = Jet::variable(x).sigmoid();
            let rhs = k.v * (1.0 - k.v);
            assert!((k.d1 - rhs).abs() <= 1e-15 * (1.0 + rhs));
            assert!((k.d2 - rhs * (1.0 - 2.0 * k.v)).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn chain_rule_agrees_with_finite_differences(x in -2.0f64..2.0) {
            let f = |t: Jet<f64>| (t.sin() * t.exp() + t.tanh()).ln_shifted();
            let j = f(Jet::variable(x));
            let fd = jet_from_values(|t| f(Jet::constant(t)).v, x, 1e-4);
            prop_assert!((j.d1 - fd.d1).abs() < 1e-6);
            prop_assert!((j.d2 - fd.d2).abs() < 1e-5);
        }
    }

    trait LnShifted {
        fn ln_shifted(self) -> Self;
    }
    impl LnShifted for Jet<f64> {
        fn ln_shifted(self) -> Self {
            (self + 10.0).ln()
        }
    }
}
