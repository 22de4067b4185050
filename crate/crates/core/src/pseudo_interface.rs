//! The corrected mid-curve `z = z0 + t z1 + t^2/2 z2 + psi_1 f_1 + psi_2 f_2`,
//! the ODE for `psi`, and the layered density.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::{HermiteOrder, HermiteTable};
use crate::jet::Jet;
use crate::kernels::{
    cbar_factor, sigma, CbarConvention, Curve, InterfaceKernel, MixingConfig, ProfileCurve, Psi0Kernel, SpeedMode,
};
use crate::operators::{t_phi, t_phi_derivs, VelocityContext};
use crate::profiles::{ProfileFunction, SamplingGrid};
use crate::quadrature::QuadSpec;

/// Uniform window for tabulated corrections.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TableSpec {
    pub half_width: f64,
    pub points: usize,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self {
            half_width: 40.0,
            points: 2001,
        }
    }
}

impl TableSpec {
    pub fn nodes(&self) -> Vec<f64> {
        HermiteTable::nodes(-self.half_width, self.half_width, self.points)
    }
}

/// Settings of the `psi` integration.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PsiSpec {
    /// Nodes for the half-line integrals; the point count must be `4k + 1`.
    pub grid: SamplingGrid,
    pub initial_steps: usize,
    pub max_steps: usize,
    /// Relative change of `psi(T)` accepted between successive halvings.
    pub tolerance: f64,
}

impl Default for PsiSpec {
    fn default() -> Self {
        Self {
            grid: SamplingGrid {
                half_width: 40.0,
                points: 401,
                grading: 1.0,
            },
            initial_steps: 2,
            max_steps: 512,
            tolerance: 1e-6,
        }
    }
}

fn table_from<F>(spec: &TableSpec, order: HermiteOrder, fallback: f64, f: F) -> Result<HermiteTable>
where
    F: Fn(f64) -> Result<[f64; 3]> + Sync + Send,
{
    let nodes = spec.nodes();
    let data = crate::par_map(&nodes, |&s| f(s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    HermiteTable::new(-spec.half_width, spec.half_width, data, order, fallback)
}

/// `z1 = T_{Phi0} z0~` with `Phi0 = 2K(Z0)`, tabulated with two derivatives.
pub fn build_z1(config: &MixingConfig, spec: &TableSpec, quad: &QuadSpec) -> Result<HermiteTable> {
    let z0 = config.initial_curve();
    let phi = InterfaceKernel {
        curve: &z0,
        t: 0.0,
        factor: 2.0,
    };
    table_from(spec, HermiteOrder::Quintic, 1.0 + config.alpha, |s| {
        t_phi_derivs::<3, _, _>(&phi, &config.profile, 0.0, s, quad)
    })
}

/// `z2 = T_{Phi0} z1 + T_{Psi0} z0~ + cbar sigma(z0') z0''`.
///
/// Only values are integrated; node derivatives come from fourth-order differences,
/// since `z1` itself is only piecewise smooth.
pub fn build_z2(
    config: &MixingConfig,
    z1: &HermiteTable,
    convention: CbarConvention,
    spec: &TableSpec,
    quad: &QuadSpec,
) -> Result<HermiteTable> {
    let z0 = config.initial_curve();
    let phi = InterfaceKernel {
        curve: &z0,
        t: 0.0,
        factor: 2.0,
    };
    let psi = Psi0Kernel {
        initial: &z0,
        velocity: z1,
    };
    let factor = cbar_factor(config, convention);
    let nodes = spec.nodes();
    let values = crate::par_map(&nodes, |&s| {
        let a = t_phi(&phi, z1, 0.0, s, quad)?.value;
        let b = t_phi(&psi, &config.profile, 0.0, s, quad)?.value;
        let d = z0.derivs(s, 0.0);
        Ok(a + b + config.speed.value(s) * factor * sigma(d[1]) * d[2])
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let h = nodes[1] - nodes[0];
    let slopes: Vec<f64> = (0..values.len()).map(|k| slope_at(&values, k, h)).collect();
    let data = (0..values.len())
        .map(|k| [values[k], slopes[k], slope_at(&slopes, k, h)])
        .collect();
    HermiteTable::new(
        -spec.half_width,
        spec.half_width,
        data,
        HermiteOrder::Quintic,
        1.0 + config.alpha,
    )
}

/// Fourth-order finite-difference slope of uniform samples.
fn slope_at(v: &[f64], k: usize, h: f64) -> f64 {
    let n = v.len();
    if n < 5 {
        return if k + 1 < n {
            (v[k + 1] - v[k]) / h
        } else {
            (v[k] - v[k - 1]) / h
        };
    }
    if k >= 2 && k + 2 < n {
        (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / (12.0 * h)
    } else if k < 2 {
        let w = &v[k..k + 5];
        (-25.0 * w[0] + 48.0 * w[1] - 36.0 * w[2] + 16.0 * w[3] - 3.0 * w[4]) / (12.0 * h)
    } else {
        let w = &v[k - 4..=k];
        (25.0 * w[4] - 48.0 * w[3] + 36.0 * w[2] - 16.0 * w[1] + 3.0 * w[0]) / (12.0 * h)
    }
}

/// The time-independent pieces of the pseudo-interface.
#[derive(Clone, Debug)]
pub struct Corrections {
    pub initial: ProfileCurve,
    pub first: HermiteTable,
    pub second: HermiteTable,
    /// `f_1` on `(-2, -1)` and `f_2` on `(1, 2)`, each of unit mass.
    pub bumps: [ProfileFunction; 2],
}

impl Corrections {
    pub fn build(config: &MixingConfig, spec: &TableSpec, quad: &QuadSpec) -> Result<Self> {
        let first = build_z1(config, spec, quad)?;
        let second = build_z2(config, &first, config.convention, spec, quad)?;
        Ok(Self {
            initial: config.initial_curve(),
            first,
            second,
            bumps: default_bumps(),
        })
    }

    /// `[z, z_s, z_ss, z_sss]` for fixed `psi`.
    fn derivs(&self, s: f64, t: f64, psi: [f64; 2]) -> [f64; 4] {
        let mut d = self.initial.derivs(s, 0.0);
        let a = self.first.derivs(s);
        let b = self.second.derivs(s);
        let f1 = self.bumps[0].derivs(s);
        let f2 = self.bumps[1].derivs(s);
        for k in 0..4 {
            d[k] += t * a[k] + 0.5 * t * t * b[k] + psi[0] * f1[k] + psi[1] * f2[k];
        }
        d
    }
}

pub fn default_bumps() -> [ProfileFunction; 2] {
    [
        ProfileFunction::normalized_compact_bump(-2.0, -1.0),
        ProfileFunction::normalized_compact_bump(1.0, 2.0),
    ]
}

/// The pseudo-interface with `psi` frozen at given values.
pub struct FrozenInterface<'a> {
    pub parts: &'a Corrections,
    pub psi: [f64; 2],
}

impl Curve for FrozenInterface<'_> {
    fn derivs(&self, s: f64, t: f64) -> [f64; 4] {
        self.parts.derivs(s, t, self.psi)
    }

    fn slope(&self) -> f64 {
        self.parts.initial.beta
    }
}

/// Dense `psi` trajectory: nodes with values and rates, cubic Hermite between.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiTrajectory {
    pub times: Vec<f64>,
    pub psi: Vec<[f64; 2]>,
    pub rate: Vec<[f64; 2]>,
}

impl PsiTrajectory {
    pub fn zero(horizon: f64) -> Self {
        Self {
            times: alloc::vec![0.0, horizon],
            psi: alloc::vec![[0.0; 2]; 2],
            rate: alloc::vec![[0.0; 2]; 2],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.psi.iter().chain(&self.rate).all(|p| p[0] == 0.0 && p[1] == 0.0)
    }

    /// `(psi, psi', psi'')` at `t`, clamped to the stored range.
    pub fn eval(&self, t: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let n = self.times.len();
        let t = t.clamp(self.times[0], self.times[n - 1]);
        let k = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        };
        let h = self.times[k + 1] - self.times[k];
        let u = Jet::<3>::variable((t - self.times[k]) / h);
        let mut out = ([0.0; 2], [0.0; 2], [0.0; 2]);
        for c in 0..2 {
            let (a, b) = (self.psi[k][c], self.psi[k + 1][c]);
            let (da, db) = (self.rate[k][c] * h, self.rate[k + 1][c] * h);
            let u2 = u * u;
            let u3 = u2 * u;
            let p = (u3 * 2.0 - u2 * 3.0 + 1.0) * a
                + (u3 - u2 * 2.0 + u) * da
                + (-(u3 * 2.0) + u2 * 3.0) * b
                + (u3 - u2) * db;
            out.0[c] = p.derivative(0);
            out.1[c] = p.derivative(1) / h;
            out.2[c] = p.derivative(2) / (h * h);
        }
        out
    }
}

/// Which quantity [`PseudoInterface::z_eval`] returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    Value,
    Ds,
    Dt,
    Dtt,
}

/// The full pseudo-interface `z(s, t)` on `[0, T]`.
#[derive(Clone, Debug)]
pub struct PseudoInterface {
    pub config: MixingConfig,
    pub parts: Corrections,
    pub trajectory: PsiTrajectory,
}

impl PseudoInterface {
    /// Builds the corrections and, with vanishing speed, integrates `psi`.
    pub fn build(config: &MixingConfig, table: &TableSpec, psi: &PsiSpec, quad: &QuadSpec) -> Result<Self> {
        let parts = Corrections::build(config, table, quad)?;
        let trajectory = match config.mode {
            SpeedMode::PositiveInf => PsiTrajectory::zero(config.horizon),
            SpeedMode::Vanishing => {
                let ctx = PsiContext::new(config, &parts, psi.grid.clone(), quad.clone())?;
                solve_psi(&ctx, psi)?.trajectory
            }
        };
        Ok(Self {
            config: config.clone(),
            parts,
            trajectory,
        })
    }

    pub fn z_eval(&self, s: f64, t: f64, which: Derivative) -> Result<f64> {
        if !(t >= 0.0 && t <= self.config.horizon) {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: self.config.horizon,
            });
        }
        let (_, dp, ddp) = self.trajectory.eval(t);
        let f = [self.parts.bumps[0].value(s), self.parts.bumps[1].value(s)];
        Ok(match which {
            Derivative::Value => self.derivs(s, t)[0],
            Derivative::Ds => self.derivs(s, t)[1],
            Derivative::Dt => self.parts.first.value(s) + t * self.parts.second.value(s) + dp[0] * f[0] + dp[1] * f[1],
            Derivative::Dtt => self.parts.second.value(s) + ddp[0] * f[0] + ddp[1] * f[1],
        })
    }

    /// `d_t z` without range checks.
    pub fn time_derivative(&self, s: f64, t: f64) -> f64 {
        let (_, dp, _) = self.trajectory.eval(t);
        self.parts.first.value(s)
            + t * self.parts.second.value(s)
            + dp[0] * self.parts.bumps[0].value(s)
            + dp[1] * self.parts.bumps[1].value(s)
    }

    /// `z^(i) = z + c_i t`.
    pub fn ladder_interface(&self, i: i32, s: f64, t: f64) -> Result<f64> {
        self.config.check_index(i)?;
        Ok(self.derivs(s, t)[0] + self.config.ladder_factor(i) * self.config.speed.value(s) * t)
    }

    pub fn classify_point(&self, x: [f64; 2], t: f64) -> RegionLabel {
        classify_point(&self.config, self, x, t)
    }

    pub fn density_rho(&self, x: [f64; 2], t: f64) -> f64 {
        density_of(self.classify_point(x, t), self.config.layers)
    }
}

impl Curve for PseudoInterface {
    fn derivs(&self, s: f64, t: f64) -> [f64; 4] {
        self.parts.derivs(s, t, self.trajectory.eval(t).0)
    }

    fn slope(&self) -> f64 {
        self.parts.initial.beta
    }
}

/// Region of a point relative to the layered interfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionLabel {
    /// Above the outermost interface.
    Upper,
    /// Below the outermost interface.
    Lower,
    /// Open layer `i` in `-(N-1)..=N-1`, with density `i/N`.
    Layer(i32),
    /// Exactly on interface `i`.
    Interface(i32),
}

/// Labels `x` by strict comparison with the interfaces `z + c_i t`.
///
/// At `t = 0` the mixing zone is empty and the sign of `x2 - z0(x1)` decides.
pub fn classify_point<C: Curve>(config: &MixingConfig, curve: &C, x: [f64; 2], t: f64) -> RegionLabel {
    let h = x[1] - curve.derivs(x[0], t)[0];
    let n = config.layers as i32;
    let ct = config.speed.value(x[0]) * t;
    if t == 0.0 || ct == 0.0 {
        return if h > 0.0 {
            RegionLabel::Upper
        } else if h < 0.0 {
            RegionLabel::Lower
        } else {
            RegionLabel::Layer(0)
        };
    }
    let level = |i: i32| config.ladder_factor(i) * ct;
    if h > level(n) {
        return RegionLabel::Upper;
    }
    if h < level(-n) {
        return RegionLabel::Lower;
    }
    for i in config.indices() {
        if h == level(i) {
            return RegionLabel::Interface(i);
        }
    }
    if h.abs() < level(1) {
        return RegionLabel::Layer(0);
    }
    for i in 1..n {
        if h > level(i) && h < level(i + 1) {
            return RegionLabel::Layer(i);
        }
        if h < level(-i) && h > level(-i - 1) {
            return RegionLabel::Layer(-i);
        }
    }
    RegionLabel::Layer(0)
}

/// Density of a label; interfaces take the value of the layer above.
pub fn density_of(label: RegionLabel, layers: usize) -> f64 {
    let n = layers as f64;
    match label {
        RegionLabel::Upper => 1.0,
        RegionLabel::Lower => -1.0,
        RegionLabel::Layer(i) => i as f64 / n,
        RegionLabel::Interface(i) if i > 0 => i as f64 / n,
        RegionLabel::Interface(i) => (i + 1) as f64 / n,
    }
}

pub fn density_rho<C: Curve>(config: &MixingConfig, curve: &C, x: [f64; 2], t: f64) -> f64 {
    density_of(classify_point(config, curve, x, t), config.layers)
}

/// Data for the right side of the `psi` ODE.
pub struct PsiContext<'a> {
    pub config: &'a MixingConfig,
    pub parts: &'a Corrections,
    pub grid: SamplingGrid,
    pub quad: QuadSpec,
}

impl<'a> PsiContext<'a> {
    pub fn new(config: &'a MixingConfig, parts: &'a Corrections, grid: SamplingGrid, quad: QuadSpec) -> Result<Self> {
        if grid.grading != 1.0 || (grid.points - 1) % 4 != 0 {
            return Err(Error::InvalidParameter {
                name: "points",
                value: grid.points as f64,
                reason: "half-line integrals need a uniform grid with 4k + 1 points",
            });
        }
        Ok(Self {
            config,
            parts,
            grid,
            quad,
        })
    }
}

/// Composite Simpson weights over `m` intervals (even) of width `h`.
fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len() - 1;
    let mut acc = values[0] + values[m];
    for (k, v) in values.iter().enumerate().take(m).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Integral of a power tail `v (s_e / s)^p` beyond the edge, when the last
/// samples support one.
fn tail(edge: f64, v: f64, inner: f64) -> f64 {
    if v == 0.0 || inner == 0.0 || v.signum() != inner.signum() {
        return 0.0;
    }
    let p = (inner / v).ln() / 2f64.ln();
    if p > 1.05 {
        v * edge / (p - 1.0)
    } else {
        0.0
    }
}

/// `h_k(t, psi) = int_{I_k} [(1/2N) sum_i u^(i) - z1 - t z2] ds` over
/// `I_1 = (-inf, 0)` and `I_2 = (0, inf)`.
pub fn psi_rhs(ctx: &PsiContext<'_>, t: f64, psi: [f64; 2]) -> Result<[f64; 2]> {
    let curve = FrozenInterface { parts: ctx.parts, psi };
    let vel = VelocityContext::new(ctx.config, &curve, ctx.quad.clone());
    let nodes = ctx.grid.abscissae();
    let defect = crate::par_map(&nodes, |&s| {
        vel.average_velocity(s, t)
            .map(|u| u - ctx.parts.first.value(s) - t * ctx.parts.second.value(s))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let m = (nodes.len() - 1) / 2;
    let h = nodes[1] - nodes[0];
    let edge = ctx.grid.half_width;
    let left = simpson(&defect[..=m], h) + tail(edge, defect[0], defect[m / 2]);
    let right = simpson(&defect[m..], h) + tail(edge, defect[2 * m], defect[m + m / 2]);
    Ok([left, right])
}

/// Result of [`solve_psi`].
#[derive(Clone, Debug, PartialEq)]
pub struct PsiSolution {
    pub trajectory: PsiTrajectory,
    /// Step count of the accepted run.
    pub steps: usize,
    /// Relative change of `psi(T)` against the run with half the steps.
    pub change: f64,
}

fn rk4(ctx: &PsiContext<'_>, steps: usize) -> Result<PsiTrajectory> {
    let horizon = ctx.config.horizon;
    let dt = horizon / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut psi = Vec::with_capacity(steps + 1);
    let mut rate = Vec::with_capacity(steps + 1);
    let mut y = [0.0; 2];
    let mut k1 = psi_rhs(ctx, 0.0, y)?;
    for n in 0..steps {
        let t = n as f64 * dt;
        times.push(t);
        psi.push(y);
        rate.push(k1);
        let at = |y: [f64; 2], k: [f64; 2], a: f64| [y[0] + a * dt * k[0], y[1] + a * dt * k[1]];
        let k2 = psi_rhs(ctx, t + 0.5 * dt, at(y, k1, 0.5))?;
        let k3 = psi_rhs(ctx, t + 0.5 * dt, at(y, k2, 0.5))?;
        let k4 = psi_rhs(ctx, t + dt, at(y, k3, 1.0))?;
        for c in 0..2 {
            y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        k1 = psi_rhs(ctx, t + dt, y)?;
    }
    times.push(horizon);
    psi.push(y);
    rate.push(k1);
    Ok(PsiTrajectory { times, psi, rate })
}

/// Classical RK4 for `psi' = h(t, psi)`, `psi(0) = 0`, halving the step until
/// `psi(T)` settles.
///
/// With positive speed at infinity `psi` vanishes identically and nothing is
/// integrated.
pub fn solve_psi(ctx: &PsiContext<'_>, spec: &PsiSpec) -> Result<PsiSolution> {
    if ctx.config.mode == SpeedMode::PositiveInf {
        return Ok(PsiSolution {
            trajectory: PsiTrajectory::zero(ctx.config.horizon),
            steps: 0,
            change: 0.0,
        });
    }
    let mut steps = spec.initial_steps.max(1);
    let mut prev = rk4(ctx, steps)?;
    let mut change = f64::INFINITY;
    loop {
        let next_steps = 2 * steps;
        if next_steps > spec.max_steps {
            return Err(Error::StepHalving { change, steps });
        }
        let next = rk4(ctx, next_steps)?;
        let a = prev.psi[prev.psi.len() - 1];
        let b = next.psi[next.psi.len() - 1];
        let scale = b[0].abs().max(b[1].abs());
        let diff = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
        change = if scale > 0.0 { diff / scale } else { diff };
        if change < spec.tolerance {
            return Ok(PsiSolution {
                trajectory: next,
                steps: next_steps,
                change,
            });
        }
        prev = next;
        steps = next_steps;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::MixingParams;
    use crate::operators::sharp_velocity;
    use proptest::prelude::*;

    fn config(n: usize, profile: ProfileFunction) -> MixingConfig {
        let params = MixingParams {
            layers: n,
            alpha: 0.5,
            beta: 0.0,
            horizon: 0.5,
            profile,
            speed: ProfileFunction::Constant(1.0),
            convention: CbarConvention::Doubled,
        };
        MixingConfig::new(params, &SamplingGrid::default()).unwrap()
    }

    fn small() -> TableSpec {
        TableSpec {
            half_width: 20.0,
            points: 201,
        }
    }

    #[test]
    fn z1_of_zero_profile_vanishes() {
        let cfg = config(2, ProfileFunction::zero());
        let z1 = build_z1(&cfg, &small(), &QuadSpec::default()).unwrap();
        assert!(z1.samples().iter().all(|d| d.iter().all(|v| *v == 0.0)));
        let z2 = build_z2(&cfg, &z1, CbarConvention::Doubled, &small(), &QuadSpec::default()).unwrap();
        assert!(z2.samples().iter().all(|d| d[0] == 0.0));
    }

    #[test]
    fn z1_matches_sharp_velocity_and_is_even() {
        let cfg = config(2, ProfileFunction::rational_bump(0.1, 0.0, 1.0));
        let spec = TableSpec {
            half_width: 20.0,
            points: 801,
        };
        let z1 = build_z1(&cfg, &spec, &QuadSpec::default()).unwrap();
        let z0 = cfg.initial_curve();
        for &s in &[0.37, 1.0, 4.2] {
            let direct = sharp_velocity(&z0, s, 0.0, &QuadSpec::default()).unwrap().value;
            assert!((z1.value(s) - direct).abs() < 1e-8);
        }
        // Even data give an even velocity.
        assert!((z1.value(1.3) - z1.value(-1.3)).abs() < 1e-12);
        assert!(z1.value(0.0) > 0.0);
    }

    #[test]
    fn time_zero_is_the_initial_curve() {
        let cfg = config(2, ProfileFunction::rational_bump(0.1, 0.0, 1.0));
        let pi = PseudoInterface::build(&cfg, &small(), &PsiSpec::default(), &QuadSpec::default()).unwrap();
        assert!(pi.trajectory.is_zero());
        for &s in &[-3.0, 0.0, 0.5] {
            assert_eq!(
                pi.z_eval(s, 0.0, Derivative::Value).unwrap(),
                cfg.initial_curve().derivs(s, 0.0)[0]
            );
            assert_eq!(pi.z_eval(s, 0.0, Derivative::Dt).unwrap(), pi.parts.first.value(s));
            assert_eq!(pi.z_eval(s, 0.0, Derivative::Dtt).unwrap(), pi.parts.second.value(s));
        }
        assert!(pi.z_eval(0.0, 1.0, Derivative::Value).is_err());
        let (t, dt) = (0.2, 1e-4);
        let fd = (pi.z_eval(0.3, t + dt, Derivative::Value).unwrap()
            - pi.z_eval(0.3, t - dt, Derivative::Value).unwrap())
            / (2.0 * dt);
        assert!((fd - pi.z_eval(0.3, t, Derivative::Dt).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn bumps_have_unit_mass_on_their_half_lines() {
        let [f1, f2] = default_bumps();
        let q = QuadSpec::default();
        let m1 = crate::quadrature::integrate(|s| f1.value(s), -2.0, -1.0, &q)
            .unwrap()
            .value;
        let m2 = crate::quadrature::integrate(|s| f2.value(s), 1.0, 2.0, &q)
            .unwrap()
            .value;
        assert!((m1 - 1.0).abs() < 1e-8 && (m2 - 1.0).abs() < 1e-8);
        assert_eq!(f1.value(0.5), 0.0);
        assert_eq!(f2.value(-1.5), 0.0);
    }

    #[test]
    fn trajectory_interpolation() {
        let tr = PsiTrajectory {
            times: alloc::vec![0.0, 0.5, 1.0],
            psi: alloc::vec![[0.0, 0.0], [0.125, -0.125], [1.0, -1.0]],
            rate: alloc::vec![[0.0, 0.0], [0.75, -0.75], [3.0, -3.0]],
        };
        let (p, dp, ddp) = tr.eval(0.7);
        assert!((p[0] - 0.343).abs() < 1e-12 && (p[1] + 0.343).abs() < 1e-12);
        assert!((dp[0] - 1.47).abs() < 1e-12);
        assert!((ddp[0] - 4.2).abs() < 1e-10);
    }

    #[test]
    fn finite_difference_slopes() {
        let h = 0.1;
        let v: Vec<f64> = (0..9).map(|k| (k as f64 * h).powi(4)).collect();
        for k in 0..9 {
            let x = k as f64 * h;
            assert!((slope_at(&v, k, h) - 4.0 * x * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let xs: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();
        let v: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        assert!((simpson(&v, 0.25) - (4.0 - 2.0)).abs() < 1e-13);
    }

    #[test]
    fn labels_and_density() {
        let cfg = config(2, ProfileFunction::zero());
        let z = cfg.initial_curve();
        let t = 0.1;
        let c1 = cfg.ladder_factor(1) * t;
        let c2 = cfg.ladder_factor(2) * t;
        assert_eq!(classify_point(&cfg, &z, [0.0, 2.0 * t], t), RegionLabel::Upper);
        assert_eq!(classify_point(&cfg, &z, [0.0, -2.0 * t], t), RegionLabel::Lower);
        assert_eq!(classify_point(&cfg, &z, [0.0, 0.5 * c1], t), RegionLabel::Layer(0));
        assert_eq!(
            classify_point(&cfg, &z, [0.0, 0.5 * (c1 + c2)], t),
            RegionLabel::Layer(1)
        );
        assert_eq!(
            classify_point(&cfg, &z, [0.0, -0.5 * (c1 + c2)], t),
            RegionLabel::Layer(-1)
        );
        assert_eq!(classify_point(&cfg, &z, [0.0, c1], t), RegionLabel::Interface(1));
        assert_eq!(density_rho(&cfg, &z, [0.0, 0.5 * (c1 + c2)], t), 0.5);
        assert_eq!(density_rho(&cfg, &z, [0.0, 0.0], t), 0.0);
        assert_eq!(density_rho(&cfg, &z, [0.0, c2], t), 1.0);
        assert_eq!(density_rho(&cfg, &z, [0.0, -c1], t), 0.0);
        assert_eq!(classify_point(&cfg, &z, [0.0, 0.1], 0.0), RegionLabel::Upper);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn density_is_bounded_and_odd(x1 in -5.0f64..5.0, x2 in -1.0f64..1.0, t in 0.01f64..0.5) {
            let cfg = config(3, ProfileFunction::zero());
            let z = cfg.initial_curve();
            let up = density_rho(&cfg, &z, [x1, x2], t);
            let down = density_rho(&cfg, &z, [-x1, -x2], t);
            prop_assert!(up.abs() <= 1.0);
            let on_interface = matches!(classify_point(&cfg, &z, [x1, x2], t), RegionLabel::Interface(_));
            prop_assume!(!on_interface);
            prop_assert!((up + down).abs() < 1e-15);
        }

        #[test]
        fn layers_are_ordered(s in -10.0f64..10.0, t in 0.001f64..0.5) {
            let cfg = config(3, ProfileFunction::rational_bump(0.1, 0.0, 1.0));
            let z = cfg.initial_curve();
            let vel = VelocityContext::new(&cfg, &z, QuadSpec::default());
            let idx = cfg.indices();
            for w in idx.windows(2) {
                prop_assert!(vel.ladder_interface(w[0], s, t).unwrap() < vel.ladder_interface(w[1], s, t).unwrap());
            }
            let width = vel.ladder_interface(3, s, t).unwrap() - vel.ladder_interface(-3, s, t).unwrap();
            prop_assert!((width - 2.0 * t).abs() < 1e-14);
        }
    }
}
