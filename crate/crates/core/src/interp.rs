//! Hermite tables on a uniform window with algebraic tails.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::kernels::Curve;

/// Interpolation order of a [`HermiteTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HermiteOrder {
    /// Value and first derivative per node.
    Cubic,
    /// Value, first and second derivative per node.
    Quintic,
}

/// `f(s) = v (s / s_e)^(-p)` beyond the window edge `s_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTail {
    pub edge: f64,
    pub value: f64,
    pub exponent: f64,
}

impl PowerTail {
    /// Matches value and slope at the edge when that gives a decaying power
    /// inside `[min_exp, max_exp]`; otherwise falls back to `fallback`.
    pub fn fit(edge: f64, value: f64, slope: f64, fallback: f64) -> Self {
        const MIN_EXP: f64 = 0.5;
        const MAX_EXP: f64 = 12.0;
        let p = if value != 0.0 { -edge * slope / value } else { f64::NAN };
        let exponent = if p.is_finite() && p > 0.0 {
            p.clamp(MIN_EXP, MAX_EXP)
        } else {
            fallback
        };
        Self { edge, value, exponent }
    }

    pub fn derivs(&self, s: f64) -> [f64; 4] {
        let p = self.exponent;
        let f = self.value * (s / self.edge).powf(-p);
        [
            f,
            -p * f / s,
            p * (p + 1.0) * f / (s * s),
            -p * (p + 1.0) * (p + 2.0) * f / (s * s * s),
        ]
    }
}

/// Piecewise Hermite interpolant of a decaying function.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteTable {
    lo: f64,
    hi: f64,
    step: f64,
    order: HermiteOrder,
    /// `[f, f', f'']` per node; `f''` unused for cubic tables.
    data: Vec<[f64; 3]>,
    left: PowerTail,
    right: PowerTail,
}

fn quintic<S: Scalar>(t: S, h: f64, a: &[f64; 3], b: &[f64; 3]) -> S {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = -(t3 * 10.0) + t4 * 15.0 - t5 * 6.0 + 1.0;
    let h1 = t - t3 * 6.0 + t4 * 8.0 - t5 * 3.0;
    let h2 = (t2 - t3 * 3.0 + t4 * 3.0 - t5) * 0.5;
    let h5 = t3 * 10.0 - t4 * 15.0 + t5 * 6.0;
    let h4 = -(t3 * 4.0) + t4 * 7.0 - t5 * 3.0;
    let h3 = (t3 - t4 * 2.0 + t5) * 0.5;
    h0 * a[0] + h1 * (h * a[1]) + h2 * (h * h * a[2]) + h5 * b[0] + h4 * (h * b[1]) + h3 * (h * h * b[2])
}

fn cubic<S: Scalar>(t: S, h: f64, a: &[f64; 3], b: &[f64; 3]) -> S {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = t3 * 2.0 - t2 * 3.0 + 1.0;
    let h10 = t3 - t2 * 2.0 + t;
    let h01 = -(t3 * 2.0) + t2 * 3.0;
    let h11 = t3 - t2;
    h00 * a[0] + h10 * (h * a[1]) + h01 * b[0] + h11 * (h * b[1])
}

impl HermiteTable {
    /// Builds a table from samples at `n = data.len()` uniform nodes on
    /// `[lo, hi]`. Tails fall back to the exponent `fallback` when the edge
    /// data does not determine a decaying power.
    pub fn new(lo: f64, hi: f64, data: Vec<[f64; 3]>, order: HermiteOrder, fallback: f64) -> Result<Self> {
        if data.len() < 2 {
            return Err(Error::EmptyGrid);
        }
        if !(hi > lo) || lo >= 0.0 || hi <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "window",
                value: hi - lo,
                reason: "window must straddle the origin",
            });
        }
        let n = data.len();
        let step = (hi - lo) / (n - 1) as f64;
        let first = data[0];
        let last = data[n - 1];
        Ok(Self {
            lo,
            hi,
            step,
            order,
            left: PowerTail::fit(lo, first[0], first[1], fallback),
            right: PowerTail::fit(hi, last[0], last[1], fallback),
            data,
        })
    }

    /// Identically zero table.
    pub fn zero(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, alloc::vec![[0.0; 3]; 2], HermiteOrder::Cubic, 1.0).expect("valid window")
    }

    /// Uniform nodes of a window with `n` points.
    pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let step = (hi - lo) / (n - 1) as f64;
        (0..n)
            .map(|k| if k + 1 == n { hi } else { lo + step * k as f64 })
            .collect()
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn tails(&self) -> (PowerTail, PowerTail) {
        (self.left, self.right)
    }

    /// `[f, f', f'', f''']` at `s`.
    pub fn derivs(&self, s: f64) -> [f64; 4] {
        if s < self.lo {
            return self.left.derivs(s);
        }
        if s > self.hi {
            return self.right.derivs(s);
        }
        let n = self.data.len();
        let u = (s - self.lo) / self.step;
        let k = (u.floor() as usize).min(n - 2);
        let t = Jet::<4>::variable(u - k as f64);
        let (a, b) = (&self.data[k], &self.data[k + 1]);
        let p = match self.order {
            HermiteOrder::Quintic => quintic(t, self.step, a, b),
            HermiteOrder::Cubic => cubic(t, self.step, a, b),
        };
        let d = p.derivatives();
        let h = self.step;
        [d[0], d[1] / h, d[2] / (h * h), d[3] / (h * h * h)]
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivs(s)[0]
    }
}

impl Curve for HermiteTable {
    fn derivs(&self, s: f64, _t: f64) -> [f64; 4] {
        HermiteTable::derivs(self, s)
    }

    fn slope(&self) -> f64 {
        0.0
    }
}
