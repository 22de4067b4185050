//! Truncated Taylor arithmetic in one variable.
//!
//! Integrands are written once, generic over [`Scalar`], and evaluated either
//! on plain `f64` (fast path) or on a [`Jet`] whose nilpotent part tracks the
//! dependence on the evaluation point `s`. Integrating a jet-valued integrand
//! yields the operator value together with its exact `s`-derivatives.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// Numeric type an integrand can be evaluated on.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(v: f64) -> Self;
    fn value(self) -> f64;
    /// Composes with a function `g` given `d[k] = g^(k)(self.value())`.
    ///
    /// Missing trailing entries of `d` are treated as zero.
    fn compose(self, d: &[f64]) -> Self;
    /// Writes the components (value first) into `out`.
    fn write(self, out: &mut [f64]);
    /// Number of components written by [`Scalar::write`].
    const WIDTH: usize;
}

impl Scalar for f64 {
    const WIDTH: usize = 1;

    #[inline]
    fn constant(v: f64) -> Self {
        v
    }

    #[inline]
    fn value(self) -> f64 {
        self
    }

    #[inline]
    fn compose(self, d: &[f64]) -> Self {
        d[0]
    }

    #[inline]
    fn write(self, out: &mut [f64]) {
        out[0] = self;
    }
}

/// Taylor coefficients `c[k] = f^(k)(s) / k!` truncated after order `N - 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    pub c: [f64; N],
}

impl<const N: usize> Jet<N> {
    /// The independent variable at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    /// Builds a jet from derivatives `d[k] = f^(k)`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut c = [0.0; N];
        let mut fact = 1.0;
        for (k, ck) in c.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *ck = d[k] / fact;
        }
        Self { c }
    }

    /// The `k`-th derivative carried by the jet.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        self.c[k] * fact
    }

    pub fn derivatives(&self) -> [f64; N] {
        let mut out = [0.0; N];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.derivative(k);
        }
        out
    }
}

impl<const N: usize> Scalar for Jet<N> {
    const WIDTH: usize = N;

    fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Self { c }
    }

    fn value(self) -> f64 {
        self.c[0]
    }

    fn compose(self, d: &[f64]) -> Self {
        // Horner on sum_k d[k]/k! h^k with h the nilpotent part.
        let mut h = self;
        h.c[0] = 0.0;
        let mut fact = [1.0; N];
        for k in 1..N {
            fact[k] = fact[k - 1] * k as f64;
        }
        let at = |k: usize| d.get(k).copied().unwrap_or(0.0);
        let mut acc = Self::constant(at(N - 1) / fact[N - 1]);
        for k in (0..N - 1).rev() {
            acc = acc * h + at(k) / fact[k];
        }
        acc
    }

    fn write(self, out: &mut [f64]) {
        out[..N].copy_from_slice(&self.derivatives());
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for k in 0..N {
            self.c[k] += rhs.c[k];
        }
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for k in 0..N {
            self.c[k] -= rhs.c[k];
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * rhs.c[k - j];
            }
        }
        Self { c }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let mut q = [0.0; N];
        for k in 0..N {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * q[k - j];
            }
            q[k] = acc / rhs.c[0];
        }
        Self { c: q }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for k in 0..N {
            self.c[k] = -self.c[k];
        }
        self
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for k in 0..N {
            self.c[k] *= rhs;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(mut self, rhs: f64) -> Self {
        for k in 0..N {
            self.c[k] /= rhs;
        }
        self
    }
}
