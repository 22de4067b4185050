//! Weighted Hilbert transforms, interface velocities and expansion residuals.
//!
//! All principal values are folded about the singular point, so integrands
//! are only ever evaluated away from it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::HermiteTable;
use crate::jet::{Jet, Scalar};
use crate::kernels::{
    difference_quotient, effective_cbar, kernel, kernel_prime, sigma, CbarConvention, Curve, MixingConfig,
    ProfileCurve, WeightKernel,
};
use crate::profiles::SamplingGrid;
use crate::quadrature::{pv_integrate_vec, QuadResult, QuadSpec};

fn values(r: Vec<QuadResult>) -> Vec<f64> {
    r.into_iter().map(|q| q.value).collect()
}

/// `(1/2pi) PV int (f'(s - xi) - f'(s)) / xi * phi(xi, s) dxi`.
pub fn t_phi<W: WeightKernel, F: Curve>(phi: &W, f: &F, t: f64, s: f64, quad: &QuadSpec) -> Result<QuadResult> {
    let df = f.derivs(s, t)[1];
    let mut g = |xi: f64, out: &mut [f64]| {
        let d = f.derivs(s - xi, t)[1];
        out[0] = (d - df) / xi * phi.value(xi, s) / (2.0 * PI);
    };
    Ok(pv_integrate_vec(&mut g, 1, 0.0, quad)?[0])
}

/// [`t_phi`] together with its first `M - 1` derivatives in `s`.
pub fn t_phi_derivs<const M: usize, W: WeightKernel, F: Curve>(
    phi: &W,
    f: &F,
    t: f64,
    s: f64,
    quad: &QuadSpec,
) -> Result<[f64; M]> {
    let sj = Jet::<M>::variable(s);
    let df = f.eval(sj, t, 1);
    let mut g = |xi: f64, out: &mut [f64]| {
        let x = Jet::<M>::constant(xi);
        let d = f.eval(sj - x, t, 1);
        let v = (d - df) * phi.eval(x, sj) / (2.0 * PI * xi);
        v.write(out);
    };
    let r = pv_integrate_vec(&mut g, M, 0.0, quad)?;
    let mut out = [0.0; M];
    for (o, q) in out.iter_mut().zip(r) {
        *o = q.value;
    }
    Ok(out)
}

/// `(1/2pi) PV int Phi_ij(xi, s, t) dxi / xi`.
pub fn i_integral<C: Curve>(
    config: &MixingConfig,
    curve: &C,
    i: i32,
    j: i32,
    s: f64,
    t: f64,
    quad: &QuadSpec,
) -> Result<QuadResult> {
    config.check_index(i)?;
    config.check_index(j)?;
    let phi = crate::kernels::LadderKernel { config, curve, i, j, t };
    let mut g = |xi: f64, out: &mut [f64]| out[0] = phi.value(xi, s) / (2.0 * PI * xi);
    Ok(pv_integrate_vec(&mut g, 1, 0.0, quad)?[0])
}

/// `PV int K(Z + c/xi) dxi / xi` for a curve frozen at `t = 0`.
pub fn offset_pv_integral<C: Curve>(curve: &C, c: f64, s: f64, quad: &QuadSpec) -> Result<QuadResult> {
    let mut g = |xi: f64, out: &mut [f64]| {
        let z = difference_quotient(curve, s, xi, 0.0);
        out[0] = kernel(z + c / xi) / xi;
    };
    Ok(pv_integrate_vec(&mut g, 1, 0.0, quad)?[0])
}

/// The small-offset limit `PV int [K(z'(s) + 1/xi) + K(Z)] dxi / xi`.
pub fn offset_pv_limit<C: Curve>(curve: &C, s: f64, quad: &QuadSpec) -> Result<QuadResult> {
    let a = curve.derivs(s, 0.0)[1];
    let mut g = |xi: f64, out: &mut [f64]| {
        let z = difference_quotient(curve, s, xi, 0.0);
        out[0] = (kernel(a + 1.0 / xi) + kernel(z)) / xi;
    };
    Ok(pv_integrate_vec(&mut g, 1, 0.0, quad)?[0])
}

/// `int [K(a + 1/xi) + K(a - 1/xi) - 2K(a)] dxi`.
///
/// The integrand is summed over a common denominator,
/// `2((3a^2 - 1) xi^2 - 1) / (q ((q xi^2 + 1)^2 - 4 a^2 xi^2))` with `q = 1 + a^2`,
/// which is regular at the origin and free of cancellation in the tails.
pub fn offset_identity_integral(a: f64, quad: &QuadSpec) -> Result<QuadResult> {
    let q = 1.0 + a * a;
    let mut g = |xi: f64, out: &mut [f64]| {
        let x2 = xi * xi;
        let p = q * x2 + 1.0;
        out[0] = 2.0 * ((3.0 * a * a - 1.0) * x2 - 1.0) / (q * (p * p - 4.0 * a * a * x2));
    };
    Ok(pv_integrate_vec(&mut g, 1, 0.0, quad)?[0])
}

/// Sharp-interface normal velocity `T_{2K(Z)} z`.
pub fn sharp_velocity<C: Curve>(curve: &C, s: f64, t: f64, quad: &QuadSpec) -> Result<QuadResult> {
    let phi = crate::kernels::InterfaceKernel { curve, t, factor: 2.0 };
    t_phi(&phi, curve, t, s, quad)
}

/// Everything needed to evaluate velocities of the layered interfaces
/// `z^(i) = z + c_i t`.
pub struct VelocityContext<'a, C: Curve> {
    pub config: &'a MixingConfig,
    pub curve: &'a C,
    pub quad: QuadSpec,
    /// Minimal vertical distance to an interface for plane queries.
    pub guard: f64,
}

impl<C: Curve> Clone for VelocityContext<'_, C> {
    fn clone(&self) -> Self {
        Self {
            config: self.config,
            curve: self.curve,
            quad: self.quad.clone(),
            guard: self.guard,
        }
    }
}

/// Local data of the ladder at the evaluation point `s`.
struct Anchor {
    z: [f64; 4],
    c: [f64; 4],
    factors: Vec<f64>,
}

impl<'a, C: Curve> VelocityContext<'a, C> {
    pub fn new(config: &'a MixingConfig, curve: &'a C, quad: QuadSpec) -> Self {
        Self {
            config,
            curve,
            quad,
            guard: 1e-9,
        }
    }

    /// `z^(i)(s, t)`.
    pub fn ladder_interface(&self, i: i32, s: f64, t: f64) -> Result<f64> {
        self.config.check_index(i)?;
        Ok(self.curve.derivs(s, t)[0] + self.config.ladder_factor(i) * self.config.speed.value(s) * t)
    }

    fn anchor(&self, s: f64, t: f64) -> Anchor {
        Anchor {
            z: self.curve.derivs(s, t),
            c: self.config.speed.derivs(s),
            factors: self
                .config
                .indices()
                .into_iter()
                .map(|i| self.config.ladder_factor(i))
                .collect(),
        }
    }

    /// Row `i` of `(1/2pi N) sum_j (z^(j)'(s - xi) - z^(i)'(s)) / xi * Phi_ij`.
    fn ladder_row(&self, a: &Anchor, s: f64, t: f64, xi: f64, out: &mut [f64]) {
        let n = self.config.layers as f64;
        let zx = self.curve.derivs(s - xi, t);
        let cx = self.config.speed.derivs(s - xi);
        let near = xi.abs() <= 1.0;
        let (zq, cq) = if near {
            (
                difference_quotient(self.curve, s, xi, t),
                difference_quotient(&self.config.speed, s, xi, 0.0),
            )
        } else {
            (0.0, 0.0)
        };
        for (o, &fi) in out.iter_mut().zip(&a.factors) {
            let dzi = a.z[1] + t * fi * a.c[1];
            let zi = a.z[0] + t * fi * a.c[0];
            let mut acc = 0.0;
            for &fj in &a.factors {
                let num = (zx[1] + t * fj * cx[1] - dzi) / xi;
                let phi = if near {
                    kernel(zq + t * fj * cq + (fi - fj) * a.c[0] * t / xi)
                } else {
                    let d = zi - (zx[0] + t * fj * cx[0]);
                    xi * xi / (xi * xi + d * d)
                };
                acc += num * phi;
            }
            *o = acc / (2.0 * PI * n);
        }
    }

    /// Normal velocities of all interfaces, ordered as [`MixingConfig::indices`].
    pub fn normal_velocities(&self, s: f64, t: f64) -> Result<Vec<f64>> {
        let a = self.anchor(s, t);
        let dim = a.factors.len();
        let mut g = |xi: f64, out: &mut [f64]| self.ladder_row(&a, s, t, xi, out);
        Ok(values(pv_integrate_vec(&mut g, dim, 0.0, &self.quad)?))
    }

    pub fn normal_velocity(&self, i: i32, s: f64, t: f64) -> Result<f64> {
        self.config.check_index(i)?;
        let k = self.config.indices().iter().position(|&j| j == i).unwrap_or(0);
        Ok(self.normal_velocities(s, t)?[k])
    }

    /// `(1/2N) sum_i u^(i)`.
    pub fn average_velocity(&self, s: f64, t: f64) -> Result<f64> {
        let a = self.anchor(s, t);
        let dim = a.factors.len();
        let mut row = vec![0.0; dim];
        let mut g = |xi: f64, out: &mut [f64]| {
            self.ladder_row(&a, s, t, xi, &mut row);
            out[0] = row.iter().sum::<f64>() / dim as f64;
        };
        Ok(pv_integrate_vec(&mut g, 1, 0.0, &self.quad)?[0].value)
    }

    /// Split evaluation `(1/N) sum_j T_{Phi_ij} z^(j) + (t/N) sum_j (c_j' - c_i') I_ij`.
    pub fn normal_velocity_split(&self, i: i32, s: f64, t: f64) -> Result<f64> {
        self.config.check_index(i)?;
        let n = self.config.layers as f64;
        let dc = self.config.speed.derivs(s)[1];
        let mut sum = 0.0;
        for j in self.config.indices() {
            let phi = crate::kernels::LadderKernel {
                config: self.config,
                curve: self.curve,
                i,
                j,
                t,
            };
            let zj = crate::kernels::LadderCurve {
                config: self.config,
                curve: self.curve,
                index: j,
            };
            sum += t_phi(&phi, &zj, t, s, &self.quad)?.value / n;
            if j != i {
                let cij = (self.config.ladder_factor(j) - self.config.ladder_factor(i)) * dc;
                if cij != 0.0 && t != 0.0 {
                    sum += t / n * cij * i_integral(self.config, self.curve, i, j, s, t, &self.quad)?.value;
                }
            }
        }
        Ok(sum)
    }

    /// Biot-Savart velocity of the layered vortex sheets at `x`.
    pub fn plane_velocity(&self, x: [f64; 2], t: f64) -> Result<[f64; 2]> {
        for i in self.config.indices() {
            let d = (x[1] - self.ladder_interface(i, x[0], t)?).abs();
            if d < self.guard {
                return Err(Error::InterfaceProximity {
                    index: i,
                    distance: d,
                    guard: self.guard,
                });
            }
        }
        let a = self.anchor(x[0], t);
        let scale = 1.0 / (2.0 * PI * self.config.layers as f64);
        let mut g = |xi: f64, out: &mut [f64]| {
            let z = self.curve.derivs(xi, t);
            let c = self.config.speed.derivs(xi);
            let dx = x[0] - xi;
            let (mut u, mut v) = (0.0, 0.0);
            for &f in &a.factors {
                let w = z[0] + t * f * c[0];
                let dw = z[1] + t * f * c[1];
                let dy = x[1] - w;
                let r2 = dx * dx + dy * dy;
                u -= dy / r2 * dw;
                v += dx / r2 * dw;
            }
            out[0] = u * scale;
            out[1] = v * scale;
        };
        let r = pv_integrate_vec(&mut g, 2, x[0], &self.quad)?;
        Ok([r[0].value, r[1].value])
    }
}

/// Inputs of the short-time expansion of the averaged velocity.
pub struct Expansion<'a, C: Curve> {
    pub velocity: VelocityContext<'a, C>,
    /// The initial interface.
    pub initial: ProfileCurve,
    /// The first-order correction, `d_t z` at `t = 0`.
    pub first: &'a HermiteTable,
    /// Points where residuals are sampled.
    pub grid: SamplingGrid,
}

/// Fitted curvature coefficient at one probe point.
#[derive(Clone, Debug, PartialEq)]
pub struct CbarFit {
    pub s: f64,
    /// Extrapolated coefficient at `t -> 0`.
    pub estimate: f64,
    /// Root-mean-square deviation of the fit.
    pub residual: f64,
    /// `(t, raw quotient)` pairs.
    pub samples: Vec<(f64, f64)>,
}

impl<C: Curve> Expansion<'_, C> {
    /// `(1/2pi) (z0'(s - xi) - z0'(s)) / xi * (Phi0 + t Psi0) + t (z1' ...) Phi0`.
    fn comparator(&self, s: f64, t: f64, xi: f64, d0: f64, d1: f64, first_order: bool) -> f64 {
        let z0x = self.initial.derivs(s - xi, 0.0)[1];
        let q0 = difference_quotient(&self.initial, s, xi, 0.0);
        let num0 = (z0x - d0) / xi;
        let k0 = 2.0 * kernel(q0);
        if first_order {
            return num0 * k0 / (2.0 * PI);
        }
        let z1x = self.first.derivs(s - xi)[1];
        let q1 = difference_quotient(self.first, s, xi, 0.0);
        let psi = 2.0 * kernel_prime(q0) * q1;
        (num0 * (k0 + t * psi) + t * (z1x - d1) / xi * k0) / (2.0 * PI)
    }

    /// `max_i |u^(i)(s, t) - T_{Phi0} z0(s)|`.
    pub fn first_residual_at(&self, s: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let v = &self.velocity;
        let a = v.anchor(s, t);
        let dim = a.factors.len();
        let d0 = self.initial.derivs(s, 0.0)[1];
        let mut g = |xi: f64, out: &mut [f64]| {
            v.ladder_row(&a, s, t, xi, out);
            let c = self.comparator(s, t, xi, d0, 0.0, true);
            out.iter_mut().for_each(|o| *o -= c);
        };
        let r = pv_integrate_vec(&mut g, dim, 0.0, &v.quad)?;
        Ok(r.iter().fold(0.0, |m, q| m.max(q.value.abs())))
    }

    /// Averaged velocity minus the first-order comparator, without the
    /// curvature term.
    fn second_defect(&self, s: f64, t: f64) -> Result<f64> {
        let v = &self.velocity;
        let a = v.anchor(s, t);
        let dim = a.factors.len();
        let d0 = self.initial.derivs(s, 0.0)[1];
        let d1 = self.first.derivs(s)[1];
        let mut row = vec![0.0; dim];
        let mut g = |xi: f64, out: &mut [f64]| {
            v.ladder_row(&a, s, t, xi, &mut row);
            out[0] = row.iter().sum::<f64>() / dim as f64 - self.comparator(s, t, xi, d0, d1, false);
        };
        Ok(pv_integrate_vec(&mut g, 1, 0.0, &v.quad)?[0].value)
    }

    /// Second-order residual at `(s, t)` with the given curvature convention.
    pub fn second_residual_at(&self, s: f64, t: f64, convention: CbarConvention) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let d = self.initial.derivs(s, 0.0);
        let cbar = effective_cbar(self.velocity.config, s, convention);
        Ok((self.second_defect(s, t)? - t * cbar * sigma(d[1]) * d[2]).abs())
    }

    fn weighted_max<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let alpha = self.velocity.config.alpha;
        let pts = self.grid.abscissae();
        let vals = crate::par_map(&pts, |&s| f(s).map(|r| (1.0 + s.abs().powf(1.0 + alpha)) * r));
        let mut m = 0.0f64;
        for v in vals {
            m = m.max(v?);
        }
        Ok(m)
    }

    /// Weighted sup over the grid of [`Self::first_residual_at`].
    pub fn expansion_residual_first(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        self.weighted_max(|s| self.first_residual_at(s, t))
    }

    /// Weighted sup over the grid of [`Self::second_residual_at`] under the
    /// configured convention.
    pub fn expansion_residual_second(&self, t: f64) -> Result<f64> {
        self.expansion_residual_second_with(t, self.velocity.config.convention)
    }

    pub fn expansion_residual_second_with(&self, t: f64, convention: CbarConvention) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        self.weighted_max(|s| self.second_residual_at(s, t, convention))
    }

    /// Fits the curvature coefficient at each probe as `a + b t` over `times`.
    pub fn fit_cbar_coefficient(&self, times: &[f64], probes: &[f64]) -> Result<Vec<CbarFit>> {
        let mut fits = Vec::with_capacity(probes.len());
        for &s in probes {
            let d = self.initial.derivs(s, 0.0);
            let denom = sigma(d[1]) * d[2];
            if denom.abs() < 1e-8 {
                return Err(Error::DegenerateDenominator { s });
            }
            let raw = crate::par_map(times, |&t| self.second_defect(s, t).map(|v| (t, v / (t * denom))));
            let samples = raw.into_iter().collect::<Result<Vec<_>>>()?;
            let (estimate, _, residual) = linear_fit(&samples);
            fits.push(CbarFit {
                s,
                estimate,
                residual,
                samples,
            });
        }
        Ok(fits)
    }
}

/// Least squares `y = a + b x`, returning `(a, b, rms deviation)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    if points.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rms = (points.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum::<f64>() / n).sqrt();
    (a, b, rms)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs).1
}
