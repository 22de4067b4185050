//! Kernel algebra: `K`, `sigma`, difference quotients, the speed ladder, the
//! second-order coefficient, weight kernels and their far-field norms.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::profiles::{ProfileFunction, SamplingGrid};

/// `K(x) = 1 / (1 + x^2)` on any scalar.
#[inline]
pub fn kernel<S: Scalar>(x: S) -> S {
    S::constant(1.0) / (x * x + 1.0)
}

/// `K`, `K'`, `K''` at `x`.
pub fn kernel_k(x: f64) -> [f64; 3] {
    let q = 1.0 + x * x;
    [1.0 / q, -2.0 * x / (q * q), (6.0 * x * x - 2.0) / (q * q * q)]
}

/// `K'(x)` on any scalar.
#[inline]
pub fn kernel_prime<S: Scalar>(x: S) -> S {
    let q = x * x + 1.0;
    x * -2.0 / (q * q)
}

/// `sigma(a) = (1 - a^2) / (1 + a^2)^2`.
pub fn sigma(a: f64) -> f64 {
    let q = 1.0 + a * a;
    (1.0 - a * a) / (q * q)
}

/// A curve `s -> z(s, t)` with exact `s`-derivatives up to order 3.
pub trait Curve: Sync {
    /// `[z, dz/ds, d2z/ds2, d3z/ds3]` at `(s, t)`.
    fn derivs(&self, s: f64, t: f64) -> [f64; 4];

    /// Common asymptotic slope at both ends.
    fn slope(&self) -> f64;

    /// The `shift`-th `s`-derivative on a scalar or jet argument.
    fn eval<S: Scalar>(&self, x: S, t: f64, shift: usize) -> S
    where
        Self: Sized,
    {
        let d = self.derivs(x.value(), t);
        x.compose(&d[shift..])
    }
}

/// `beta s + profile(s)`, constant in time.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileCurve {
    pub beta: f64,
    pub profile: ProfileFunction,
}

impl Curve for ProfileCurve {
    fn derivs(&self, s: f64, _t: f64) -> [f64; 4] {
        let mut d = self.profile.derivs(s);
        d[0] += self.beta * s;
        d[1] += self.beta;
        d
    }

    fn slope(&self) -> f64 {
        self.beta
    }
}

impl Curve for ProfileFunction {
    fn derivs(&self, s: f64, _t: f64) -> [f64; 4] {
        ProfileFunction::derivs(self, s)
    }

    fn slope(&self) -> f64 {
        self.asymptotic_slope()
    }
}

/// Below this `|xi|` difference quotients switch to their Taylor form.
pub const QUOTIENT_TAYLOR_RADIUS: f64 = 1e-4;

/// `(z(s) - z(s - xi)) / xi`, with limit `dz/ds` at `xi = 0`.
pub fn difference_quotient<C: Curve, S: Scalar>(curve: &C, s: S, xi: S, t: f64) -> S {
    if xi.value().abs() < QUOTIENT_TAYLOR_RADIUS {
        let d1 = curve.eval(s, t, 1);
        let d2 = curve.eval(s, t, 2);
        let d3 = curve.eval(s, t, 3);
        d1 - xi * d2 * 0.5 + xi * xi * d3 / 6.0
    } else {
        (curve.eval(s, t, 0) - curve.eval(s - xi, t, 0)) / xi
    }
}

/// Scalar convenience form of [`difference_quotient`].
pub fn difference_quotient_z<C: Curve>(curve: &C, s: f64, xi: f64, t: f64) -> f64 {
    difference_quotient(curve, s, xi, t)
}

/// Convention for the second-order curvature coefficient.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CbarConvention {
    /// `(1 / 8N^2) sum_{i,j} |c_i - c_j|`.
    Literal,
    /// Twice the literal sum, `(2N + 1) / (3N) c`.
    #[default]
    Doubled,
}

/// Whether the mixing speed stays bounded below or decays at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SpeedMode {
    PositiveInf,
    Vanishing,
}

/// Validated problem parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingConfig {
    pub layers: usize,
    pub alpha: f64,
    pub beta: f64,
    pub horizon: f64,
    /// Decaying part of the initial interface.
    pub profile: ProfileFunction,
    /// Mixing speed `c(s)`.
    pub speed: ProfileFunction,
    pub c_min: f64,
    pub c_max: f64,
    pub mode: SpeedMode,
    pub convention: CbarConvention,
}

fn gate(msg: alloc::string::String) -> Error {
    Error::ConfigGate(msg)
}

/// Raw problem parameters before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingParams {
    pub layers: usize,
    pub alpha: f64,
    pub beta: f64,
    pub horizon: f64,
    pub profile: ProfileFunction,
    pub speed: ProfileFunction,
    pub convention: CbarConvention,
}

impl MixingConfig {
    /// Checks every hypothesis on `grid`, including `c_max < (2N - 1)/N`,
    /// and caches the speed bounds.
    ///
    /// In the vanishing mode `c_min` is the largest constant with
    /// `c(s) >= c_min / (1 + |s|^(2 alpha / 3))` on the grid.
    pub fn new(params: MixingParams, grid: &SamplingGrid) -> Result<Self> {
        Self::build(params, grid, true)
    }

    /// As [`MixingConfig::new`] without the layer bound on `c_max`; enough
    /// for velocity expansions, not for subsolutions.
    pub fn unbounded(params: MixingParams, grid: &SamplingGrid) -> Result<Self> {
        Self::build(params, grid, false)
    }

    /// Whether `c_max < (2N - 1)/N`.
    pub fn admits_subsolution(&self) -> bool {
        self.c_max < (2 * self.layers - 1) as f64 / self.layers as f64
    }

    fn build(params: MixingParams, grid: &SamplingGrid, bounded: bool) -> Result<Self> {
        use alloc::format;
        let MixingParams {
            layers,
            alpha,
            beta,
            horizon,
            profile,
            speed,
            convention,
        } = params;
        if layers < 1 {
            return Err(gate("layer count must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(gate(format!("alpha = {alpha} outside (0, 1)")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(gate(format!("horizon T = {horizon} must be positive")));
        }
        if !beta.is_finite() {
            return Err(gate("slope beta must be finite".into()));
        }
        if !profile.is_decaying(alpha) {
            return Err(gate(format!(
                "interface profile decays like |s|^-{} which is slower than |s|^-(1+alpha)",
                profile.decay_exponent()
            )));
        }
        let speed_decay = speed.decay_exponent();
        if speed_decay < 0.0 {
            return Err(gate("mixing speed must stay bounded".into()));
        }
        let xs = grid.abscissae();
        let mut c_lo = f64::INFINITY;
        let mut c_hi = 0.0f64;
        for &s in &xs {
            let c = speed.value(s);
            if !(c > 0.0) {
                return Err(gate(format!("mixing speed c({s}) = {c} is not positive")));
            }
            c_lo = c_lo.min(c);
            c_hi = c_hi.max(c);
        }
        let limit = (2 * layers - 1) as f64 / layers as f64;
        if bounded && !(c_hi < limit) {
            return Err(gate(format!(
                "c_max = {c_hi} is not below (2N-1)/N = {limit} for N = {layers}"
            )));
        }
        let mode = if speed_decay > 0.0 {
            SpeedMode::Vanishing
        } else {
            SpeedMode::PositiveInf
        };
        let c_min = match mode {
            SpeedMode::PositiveInf => {
                let (l, r) = speed.limits();
                if !(l > 0.0 && r > 0.0) {
                    return Err(gate("mixing speed must have positive limits at infinity".into()));
                }
                c_lo.min(l).min(r)
            }
            SpeedMode::Vanishing => {
                if beta != 0.0 {
                    return Err(gate(format!("vanishing mixing speed requires beta = 0, got {beta}")));
                }
                let q = 2.0 * alpha / 3.0;
                if speed_decay > q + 1e-12 {
                    return Err(gate(format!(
                        "mixing speed decays like |s|^-{speed_decay}, faster than |s|^-{q}"
                    )));
                }
                xs.iter()
                    .map(|&s| speed.value(s) * (1.0 + s.abs().powf(q)))
                    .fold(f64::INFINITY, f64::min)
            }
        };
        Ok(Self {
            layers,
            alpha,
            beta,
            horizon,
            profile,
            speed,
            c_min,
            c_max: c_hi,
            mode,
            convention,
        })
    }

    /// The initial interface `beta s + profile(s)`.
    pub fn initial_curve(&self) -> ProfileCurve {
        ProfileCurve {
            beta: self.beta,
            profile: self.profile.clone(),
        }
    }

    /// Interface indices `-N..=-1, 1..=N` in ascending order.
    pub fn indices(&self) -> Vec<i32> {
        let n = self.layers as i32;
        (-n..=n).filter(|&i| i != 0).collect()
    }

    pub fn check_index(&self, i: i32) -> Result<()> {
        if i == 0 || i.unsigned_abs() as usize > self.layers {
            Err(Error::InvalidIndex {
                index: i,
                layers: self.layers,
            })
        } else {
            Ok(())
        }
    }

    /// `sign(i) (2|i| - 1) / (2N - 1)`.
    pub fn ladder_factor(&self, i: i32) -> f64 {
        let n = self.layers as f64;
        let a = i.unsigned_abs() as f64;
        (i.signum() as f64) * (2.0 * a - 1.0) / (2.0 * n - 1.0)
    }
}

/// `c_i(s) = sign(i) (2|i| - 1) / (2N - 1) c(s)`.
pub fn speed_ladder(config: &MixingConfig, i: i32, s: f64) -> Result<f64> {
    config.check_index(i)?;
    Ok(config.ladder_factor(i) * config.speed.value(s))
}

/// The coefficient of `t sigma(z0') z0''` in the averaged velocity.
///
/// The literal value is the brute-force double sum; the doubled value is
/// twice that.
pub fn effective_cbar(config: &MixingConfig, s: f64, convention: CbarConvention) -> f64 {
    cbar_factor(config, convention) * config.speed.value(s)
}

/// [`effective_cbar`] per unit speed.
pub fn cbar_factor(config: &MixingConfig, convention: CbarConvention) -> f64 {
    let idx = config.indices();
    let mut sum = 0.0;
    for &i in &idx {
        for &j in &idx {
            sum += (config.ladder_factor(i) - config.ladder_factor(j)).abs();
        }
    }
    let n = config.layers as f64;
    let literal = sum / (8.0 * n * n);
    match convention {
        CbarConvention::Literal => literal,
        CbarConvention::Doubled => 2.0 * literal,
    }
}

/// `(2N + 1) / (3N)`, the doubled coefficient per unit speed.
pub fn cbar_closed_form(layers: usize) -> f64 {
    let n = layers as f64;
    (2.0 * n + 1.0) / (3.0 * n)
}

/// Smallest `N` with `(2N - 1)/N > c_max`.
pub fn minimal_layers(c_max: f64) -> Result<usize> {
    if !(c_max > 0.0 && c_max < 2.0) {
        return Err(Error::InvalidParameter {
            name: "c_max",
            value: c_max,
            reason: "must lie in (0, 2)",
        });
    }
    let mut n = 1usize;
    while !((2 * n - 1) as f64 > c_max * n as f64) {
        n += 1;
    }
    Ok(n)
}

/// An evaluable weight `Phi(xi, s)` with a limit at `|xi| -> infinity`.
pub trait WeightKernel: Sync {
    /// `Phi` on scalars or jets; only one of the two arguments carries a
    /// nilpotent part at a time.
    fn eval<S: Scalar>(&self, xi: S, s: S) -> S;

    fn far_field(&self, s: f64) -> f64;

    fn value(&self, xi: f64, s: f64) -> f64 {
        self.eval(xi, s)
    }

    fn d_xi(&self, xi: f64, s: f64) -> f64 {
        self.eval(Jet::<2>::variable(xi), Jet::<2>::constant(s)).derivative(1)
    }
}

/// `Phi = v` everywhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantWeight(pub f64);

impl WeightKernel for ConstantWeight {
    fn eval<S: Scalar>(&self, _xi: S, _s: S) -> S {
        S::constant(self.0)
    }

    fn far_field(&self, _s: f64) -> f64 {
        self.0
    }
}

/// `factor K(Z)` for a single curve at time `t`; `factor = 2` is the sharp kernel.
pub struct InterfaceKernel<'a, C: Curve> {
    pub curve: &'a C,
    pub t: f64,
    pub factor: f64,
}

impl<C: Curve> WeightKernel for InterfaceKernel<'_, C> {
    fn eval<S: Scalar>(&self, xi: S, s: S) -> S {
        kernel(difference_quotient(self.curve, s, xi, self.t)) * self.factor
    }

    fn far_field(&self, _s: f64) -> f64 {
        let b = self.curve.slope();
        self.factor / (1.0 + b * b)
    }
}

/// `Phi(xi, s, t) = 2 K(Z)`, the sharp-interface weight.
pub fn phi_sharp<C: Curve>(curve: &C, xi: f64, s: f64, t: f64) -> f64 {
    2.0 * kernel(difference_quotient(curve, s, xi, t))
}

/// `Psi_0 = 2 K'(Z_0) Z_1`, the time derivative of the sharp weight at 0.
pub struct Psi0Kernel<'a, C0: Curve, C1: Curve> {
    pub initial: &'a C0,
    pub velocity: &'a C1,
}

impl<C0: Curve, C1: Curve> WeightKernel for Psi0Kernel<'_, C0, C1> {
    fn eval<S: Scalar>(&self, xi: S, s: S) -> S {
        let z0 = difference_quotient(self.initial, s, xi, 0.0);
        let z1 = difference_quotient(self.velocity, s, xi, 0.0);
        kernel_prime(z0) * z1 * 2.0
    }

    fn far_field(&self, _s: f64) -> f64 {
        0.0
    }
}

pub fn psi0<C0: Curve, C1: Curve>(initial: &C0, velocity: &C1, xi: f64, s: f64) -> f64 {
    Psi0Kernel { initial, velocity }.value(xi, s)
}

/// A curve shifted by `c_i(s) t`: `z^(i)(s, t) = z(s, t) + c_i(s) t`.
pub struct LadderCurve<'a, C: Curve> {
    pub config: &'a MixingConfig,
    pub curve: &'a C,
    pub index: i32,
}

impl<C: Curve> Curve for LadderCurve<'_, C> {
    fn derivs(&self, s: f64, t: f64) -> [f64; 4] {
        let mut d = self.curve.derivs(s, t);
        let c = self.config.speed.derivs(s);
        let f = self.config.ladder_factor(self.index) * t;
        for k in 0..4 {
            d[k] += f * c[k];
        }
        d
    }

    fn slope(&self) -> f64 {
        self.curve.slope() + self.config.ladder_factor(self.index) * self.config.speed.asymptotic_slope()
    }
}

/// `Phi_ij = xi^2 / (xi^2 + (z^(i)(s) - z^(j)(s - xi))^2)`.
pub struct LadderKernel<'a, C: Curve> {
    pub config: &'a MixingConfig,
    pub curve: &'a C,
    pub i: i32,
    pub j: i32,
    pub t: f64,
}

impl<C: Curve> LadderKernel<'_, C> {
    fn offset<S: Scalar>(&self, s: S) -> S {
        let ci = self.config.speed.eval(s, 0) * self.config.ladder_factor(self.i);
        let cj = self.config.speed.eval(s, 0) * self.config.ladder_factor(self.j);
        (ci - cj) * self.t
    }
}

impl<C: Curve> WeightKernel for LadderKernel<'_, C> {
    fn eval<S: Scalar>(&self, xi: S, s: S) -> S {
        let zj = LadderCurve {
            config: self.config,
            curve: self.curve,
            index: self.j,
        };
        let off = self.offset(s);
        let x = xi.value();
        if x == 0.0 {
            if self.i == self.j || self.t == 0.0 {
                return kernel(zj.eval(s, self.t, 1));
            }
            return S::constant(0.0);
        }
        if x.abs() <= 1.0 {
            kernel(difference_quotient(&zj, s, xi, self.t) + off / xi)
        } else {
            let zi = LadderCurve {
                config: self.config,
                curve: self.curve,
                index: self.i,
            };
            let d = zi.eval(s, self.t, 0) - zj.eval(s - xi, self.t, 0);
            xi * xi / (xi * xi + d * d)
        }
    }

    fn far_field(&self, _s: f64) -> f64 {
        let b = self.curve.slope();
        1.0 / (1.0 + b * b)
    }
}

/// Scalar `Phi_ij(xi, s, t)`.
pub fn phi_ij<C: Curve>(config: &MixingConfig, curve: &C, i: i32, j: i32, xi: f64, s: f64, t: f64) -> Result<f64> {
    config.check_index(i)?;
    config.check_index(j)?;
    Ok(LadderKernel { config, curve, i, j, t }.value(xi, s))
}

/// Offset kernels `K(Z + c/xi) - K(Z)` (one-sided) or
/// `K(Z + c/xi) + K(Z - c/xi) - 2K(Z)` (symmetric), with `c = scale * offset(s)`.
pub struct OffsetKernel<'a, C: Curve> {
    pub curve: &'a C,
    pub offset: &'a ProfileFunction,
    pub scale: f64,
    pub symmetric: bool,
}

impl<C: Curve> WeightKernel for OffsetKernel<'_, C> {
    fn eval<S: Scalar>(&self, xi: S, s: S) -> S {
        if xi.value() == 0.0 {
            return if self.symmetric {
                kernel(self.curve.eval(s, 0.0, 1)) * -2.0
            } else {
                -kernel(self.curve.eval(s, 0.0, 1))
            };
        }
        let z = difference_quotient(self.curve, s, xi, 0.0);
        let c = self.offset.eval(s, 0) * self.scale / xi;
        if self.symmetric {
            kernel(z + c) + kernel(z - c) - kernel(z) * 2.0
        } else {
            kernel(z + c) - kernel(z)
        }
    }

    fn far_field(&self, _s: f64) -> f64 {
        0.0
    }
}

/// `(Phi_inf, xi (Phi - Phi_inf), xi dPhi/dxi - Phi)` at `(xi, s)`.
pub fn farfield_decomposition<W: WeightKernel>(phi: &W, xi: f64, s: f64) -> (f64, f64, f64) {
    let inf = phi.far_field(s);
    let v = phi.value(xi, s);
    (inf, xi * (v - inf), xi * phi.d_xi(xi, s) - v)
}

/// Default `xi` samples for weight norms: dyadic inside `|xi| <= 1`, a
/// geometric ladder outside.
pub fn default_xi_samples() -> Vec<f64> {
    let mut v = Vec::new();
    for j in 0..=16 {
        let x = 0.5f64.powi(j);
        v.push(x);
        v.push(-x);
    }
    for j in 1..=40 {
        let x = 2f64.powf(0.5 * j as f64);
        v.push(x);
        v.push(-x);
    }
    v
}

/// `s`-derivative of order `k` of `Phi` and of its far-field pieces.
fn s_derivative<W: WeightKernel>(phi: &W, xi: f64, s: f64, k: usize) -> f64 {
    phi.eval(Jet::<3>::constant(xi), Jet::<3>::variable(s)).derivative(k)
}

fn far_pieces<W: WeightKernel>(phi: &W, xi: f64, s: f64, k: usize) -> (f64, f64) {
    let v = s_derivative(phi, xi, s, k);
    let inf = if k == 0 { phi.far_field(s) } else { 0.0 };
    let bar = xi * (v - inf);
    let dxi = if k == 0 {
        phi.d_xi(xi, s)
    } else {
        let h = 1e-4 * xi.abs();
        (s_derivative(phi, xi + h, s, k) - s_derivative(phi, xi - h, s, k)) / (2.0 * h)
    };
    (bar, xi * dxi - v)
}

/// Grid estimate of the weight norm of order `k <= 2`.
///
/// The near-field sup `|Phi|` and the far-field sup `|bar Phi| + |tilde Phi|`
/// are combined by maximum. Sup terms run over `grid x xi_samples`; Hölder
/// quotients use the given shifts along `s` and along `xi` separately.
pub fn w_norm_estimate<W: WeightKernel>(
    phi: &W,
    k: usize,
    alpha: f64,
    grid: &SamplingGrid,
    xi_samples: &[f64],
    shifts: &[f64],
) -> Result<f64> {
    if k > 2 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "weight norm order must be <= 2",
        });
    }
    let xs = grid.abscissae();
    if xs.is_empty() || xi_samples.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for &h in shifts {
        if !(h != 0.0 && h.abs() <= 1.0) {
            return Err(Error::InvalidShift(h));
        }
    }
    let mut sup_near = [0.0f64; 3];
    let mut sup_far = [0.0f64; 3];
    let mut holder = 0.0f64;
    let mut holder_far = 0.0f64;
    for &xi in xi_samples {
        let far = xi.abs() > 1.0;
        let mut far_holder_here = 0.0f64;
        for &s in &xs {
            for j in 0..=k {
                if far {
                    let (b, t) = far_pieces(phi, xi, s, j);
                    sup_far[j] = sup_far[j].max(b.abs() + t.abs());
                } else {
                    sup_near[j] = sup_near[j].max(s_derivative(phi, xi, s, j).abs());
                }
            }
            let base = s_derivative(phi, xi, s, k);
            for &h in shifts {
                let a = h.abs().powf(alpha);
                for d in [h, -h] {
                    holder = holder.max((s_derivative(phi, xi, s - d, k) - base).abs() / a);
                    let xi2 = xi - d;
                    if xi2 != 0.0 && (xi2.abs() > 1.0) == far {
                        holder = holder.max((s_derivative(phi, xi2, s, k) - base).abs() / a);
                    }
                }
            }
            if far {
                let (b0, t0) = far_pieces(phi, xi, s, k);
                for &h in shifts {
                    let a = h.abs().powf(alpha);
                    let (b1, t1) = far_pieces(phi, xi, s - h, k);
                    far_holder_here = far_holder_here.max(((b1 - b0).abs() + (t1 - t0).abs()) / a);
                }
            }
        }
        holder_far = holder_far.max(far_holder_here);
    }
    let zero_order: f64 = (0..=k).map(|j| sup_near[j].max(sup_far[j])).fold(0.0, f64::max);
    if k == 0 {
        Ok(zero_order)
    } else {
        Ok(zero_order + holder + holder_far)
    }
}
