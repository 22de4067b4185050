//! Adaptive Gauss–Kronrod integration on the line with principal values.
//!
//! Integrals over the whole line are folded about a center, so that the
//! integrand actually summed is `f(c + eta) + f(c - eta)` on `eta > 0`. Odd
//! parts about the center cancel pointwise, which realizes the symmetric limit
//! both at an interior `1/xi` singularity and at infinity. The far range
//! `eta > R` is mapped onto `(0, 1]` by `eta = R / tau`.
//!
//! The engine is global: every panel sits in one pool and the panel with the
//! largest normalized error is bisected next. Integrands may be vector valued;
//! each component gets its own tolerance.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_982_308_637_981,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights belonging to `XGK[1], XGK[3], .., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits of the adaptive engine.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Radius beyond which the mapped tail takes over.
    pub outer_radius: f64,
    /// Bisections allowed on the tail panel touching infinity; each one
    /// doubles the radius that is resolved explicitly.
    pub max_doublings: usize,
    /// Ratio of consecutive initial panels near a fold center.
    pub grading_ratio: f64,
    /// Number of geometric panels laid down toward a fold center.
    pub graded_levels: usize,
    /// Bisections allowed for any single panel.
    pub max_depth: usize,
    /// Total bisections allowed per integral.
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            outer_radius: 32.0,
            max_doublings: 20,
            grading_ratio: 2.0,
            graded_levels: 24,
            max_depth: 48,
            max_subdivisions: 4000,
        }
    }
}

impl QuadSpec {
    pub fn with_tolerance(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, reason| Err(Error::InvalidParameter { name, value, reason });
        if !(self.rel_tol > 0.0) {
            return bad("rel_tol", self.rel_tol, "tolerance must be positive");
        }
        if !(self.abs_tol >= 0.0) {
            return bad("abs_tol", self.abs_tol, "tolerance must be non-negative");
        }
        if !(self.outer_radius > 0.0 && self.outer_radius.is_finite()) {
            return bad("outer_radius", self.outer_radius, "radius must be positive");
        }
        if !(self.grading_ratio > 1.0) {
            return bad("grading_ratio", self.grading_ratio, "ratio must exceed 1");
        }
        if self.max_depth < 1 {
            return bad("max_depth", 0.0, "depth must be at least 1");
        }
        Ok(())
    }
}

/// Value of an integral with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// How a panel parameter maps to abscissae of the user integrand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PanelMap {
    /// `x = origin + dir * p`.
    Ray { origin: f64, dir: f64 },
    /// `f(center + p) + f(center - p)`.
    Fold { center: f64 },
    /// `x = origin + dir * R / p`, weight `R / p^2`.
    TailRay { origin: f64, dir: f64, radius: f64 },
    /// `f(center + R/p) + f(center - R/p)`, weight `R / p^2`.
    TailFold { center: f64, radius: f64 },
}

impl PanelMap {
    fn is_tail(&self) -> bool {
        matches!(self, Self::TailRay { .. } | Self::TailFold { .. })
    }
}

/// An initial panel `[lo, hi]` in the parameter of `map`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub map: PanelMap,
}

struct Work<'a, F> {
    f: &'a mut F,
    dim: usize,
    buf: Vec<f64>,
    acc: Vec<f64>,
    evaluations: usize,
}

impl<F: FnMut(f64, &mut [f64])> Work<'_, F> {
    fn point(&mut self, x: f64, w: f64) -> Result<()> {
        (self.f)(x, &mut self.buf);
        self.evaluations += 1;
        for k in 0..self.dim {
            let v = self.buf[k];
            if !v.is_finite() {
                return Err(Error::NonFinite { at: x });
            }
            self.acc[k] += w * v;
        }
        Ok(())
    }

    /// Mapped integrand at parameter `p` into `out`.
    fn eval(&mut self, map: PanelMap, p: f64, out: &mut [f64]) -> Result<()> {
        self.acc.iter_mut().for_each(|a| *a = 0.0);
        match map {
            PanelMap::Ray { origin, dir } => self.point(origin + dir * p, 1.0)?,
            PanelMap::Fold { center } => {
                self.point(center + p, 1.0)?;
                self.point(center - p, 1.0)?;
            }
            PanelMap::TailRay { origin, dir, radius } => {
                let eta = radius / p;
                self.point(origin + dir * eta, radius / (p * p))?;
            }
            PanelMap::TailFold { center, radius } => {
                let eta = radius / p;
                let w = radius / (p * p);
                self.point(center + eta, w)?;
                self.point(center - eta, w)?;
            }
        }
        out.copy_from_slice(&self.acc);
        Ok(())
    }
}

struct Seg {
    lo: f64,
    hi: f64,
    map: PanelMap,
    depth: usize,
    value: Vec<f64>,
    error: Vec<f64>,
    absval: Vec<f64>,
    frozen: bool,
}

fn kronrod<F: FnMut(f64, &mut [f64])>(
    w: &mut Work<'_, F>,
    map: PanelMap,
    lo: f64,
    hi: f64,
    depth: usize,
) -> Result<Seg> {
    let dim = w.dim;
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fc = vec![0.0; dim];
    w.eval(map, center, &mut fc)?;
    let mut f1 = vec![[0.0; 10]; dim];
    let mut f2 = vec![[0.0; 10]; dim];
    let mut tmp = vec![0.0; dim];
    for j in 0..10 {
        let dx = half * XGK[j];
        w.eval(map, center - dx, &mut tmp)?;
        for k in 0..dim {
            f1[k][j] = tmp[k];
        }
        w.eval(map, center + dx, &mut tmp)?;
        for k in 0..dim {
            f2[k][j] = tmp[k];
        }
    }
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    let mut absval = vec![0.0; dim];
    for k in 0..dim {
        let mut resk = WGK[10] * fc[k];
        let mut resg = 0.0;
        let mut resabs = resk.abs();
        for j in 0..10 {
            let s = f1[k][j] + f2[k][j];
            resk += WGK[j] * s;
            resabs += WGK[j] * (f1[k][j].abs() + f2[k][j].abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * s;
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[10] * (fc[k] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((f1[k][j] - mean).abs() + (f2[k][j] - mean).abs());
        }
        let hl = half.abs();
        resk *= half;
        resg *= half;
        resabs *= hl;
        resasc *= hl;
        let mut err = (resk - resg).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (1.0f64).min((200.0 * err / resasc).powf(1.5));
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        value[k] = resk;
        error[k] = err;
        absval[k] = resabs;
    }
    Ok(Seg {
        lo,
        hi,
        map,
        depth,
        value,
        error,
        absval,
        frozen: false,
    })
}

fn sums(segs: &[Seg], dim: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; dim];
    let mut e = vec![0.0; dim];
    let mut a = vec![0.0; dim];
    for s in segs {
        for k in 0..dim {
            v[k] += s.value[k];
            e[k] += s.error[k];
            a[k] += s.absval[k];
        }
    }
    (v, e, a)
}

/// Integrates a vector integrand over a union of mapped panels.
///
/// `f(x, out)` writes `dim` components. Every component must meet
/// `err <= max(abs_tol, rel_tol |I|, 100 eps int|f|)`.
pub fn integrate_panels<F>(f: &mut F, dim: usize, panels: &[Panel], spec: &QuadSpec) -> Result<Vec<QuadResult>>
where
    F: FnMut(f64, &mut [f64]),
{
    spec.validate()?;
    let mut w = Work {
        f,
        dim,
        buf: vec![0.0; dim],
        acc: vec![0.0; dim],
        evaluations: 0,
    };
    let mut segs = Vec::with_capacity(panels.len() + 64);
    for p in panels {
        if p.hi > p.lo {
            segs.push(kronrod(&mut w, p.map, p.lo, p.hi, 0)?);
        }
    }
    let mut subdivisions = 0;
    loop {
        let (v, e, a) = sums(&segs, dim);
        let tol: Vec<f64> = (0..dim)
            .map(|k| {
                spec.abs_tol
                    .max(spec.rel_tol * v[k].abs())
                    .max(100.0 * f64::EPSILON * a[k])
            })
            .collect();
        let done = (0..dim).all(|k| e[k] <= tol[k]);
        let mut worst: Option<(usize, f64)> = None;
        if !done {
            for (idx, s) in segs.iter().enumerate() {
                if s.frozen {
                    continue;
                }
                let score = (0..dim)
                    .map(|k| if e[k] > tol[k] { s.error[k] / tol[k] } else { 0.0 })
                    .fold(0.0, f64::max);
                if score > 0.0 && worst.map_or(true, |(_, b)| score > b) {
                    worst = Some((idx, score));
                }
            }
        }
        let pick = match (done, worst) {
            (true, _) | (false, None) => {
                let out: Vec<QuadResult> = (0..dim)
                    .map(|k| QuadResult {
                        value: v[k],
                        error_estimate: e[k],
                        evaluations: w.evaluations,
                    })
                    .collect();
                if done {
                    return Ok(out);
                }
                let k = (0..dim)
                    .max_by(|&i, &j| (e[i] / tol[i]).total_cmp(&(e[j] / tol[j])))
                    .unwrap_or(0);
                return Err(Error::NotConverged {
                    value: v[k],
                    error: e[k],
                    evaluations: w.evaluations,
                });
            }
            (false, Some((idx, _))) => idx,
        };
        if subdivisions >= spec.max_subdivisions {
            let k = (0..dim)
                .max_by(|&i, &j| (e[i] / tol[i]).total_cmp(&(e[j] / tol[j])))
                .unwrap_or(0);
            return Err(Error::NotConverged {
                value: v[k],
                error: e[k],
                evaluations: w.evaluations,
            });
        }
        let s = &segs[pick];
        let depth_cap = if s.map.is_tail() && s.lo == 0.0 {
            spec.max_doublings
        } else {
            spec.max_depth
        };
        let mid = 0.5 * (s.lo + s.hi);
        if s.depth >= depth_cap || !(mid > s.lo && mid < s.hi) {
            segs[pick].frozen = true;
            continue;
        }
        let (lo, hi, map, depth) = (s.lo, s.hi, s.map, s.depth);
        let left = kronrod(&mut w, map, lo, mid, depth + 1)?;
        let right = kronrod(&mut w, map, mid, hi, depth + 1)?;
        segs[pick] = left;
        segs.push(right);
        subdivisions += 1;
    }
}

/// Geometric panels on `[0, radius]` refining toward 0.
fn graded(map: PanelMap, radius: f64, spec: &QuadSpec, levels: usize) -> Vec<Panel> {
    let mut out = Vec::with_capacity(levels + 1);
    let mut hi = radius;
    for _ in 0..levels {
        let lo = hi / spec.grading_ratio;
        out.push(Panel { lo, hi, map });
        hi = lo;
    }
    out.push(Panel { lo: 0.0, hi, map });
    out
}

/// Panels for a symmetric whole-line integral folded about `center`.
pub fn folded_panels(center: f64, spec: &QuadSpec) -> Vec<Panel> {
    let radius = spec.outer_radius;
    let mut panels = graded(PanelMap::Fold { center }, radius, spec, spec.graded_levels);
    panels.push(Panel {
        lo: 0.0,
        hi: 1.0,
        map: PanelMap::TailFold { center, radius },
    });
    panels
}

/// Principal value over the line of a vector integrand, folded about `center`.
///
/// The center is the only interior point where a `1/(x - center)` singularity
/// is admissible; at infinity the limit is symmetric about `center`, which
/// agrees with the symmetric limit about 0 whenever `f = O(1/|x|)`.
pub fn pv_integrate_vec<F>(f: &mut F, dim: usize, center: f64, spec: &QuadSpec) -> Result<Vec<QuadResult>>
where
    F: FnMut(f64, &mut [f64]),
{
    integrate_panels(f, dim, &folded_panels(center, spec), spec)
}

/// Principal value of a scalar integrand over the line.
///
/// Each listed singularity is folded over a neighborhood that stays clear of
/// the others; the outer limit is symmetric about the origin.
pub fn pv_integrate<F>(mut f: F, singularities: &[f64], spec: &QuadSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    let mut sing: Vec<f64> = singularities.to_vec();
    sing.sort_by(|a, b| a.total_cmp(b));
    sing.dedup();
    if sing.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "singularities",
            value: f64::NAN,
            reason: "singular points must be finite",
        });
    }
    if sing.is_empty() || (sing.len() == 1 && sing[0] == 0.0) {
        return Ok(pv_integrate_vec(&mut g, 1, 0.0, spec)?[0]);
    }
    let far = sing.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let radius = spec.outer_radius.max(2.0 * far + 1.0);
    let mut panels = Vec::new();
    let mut left = -radius;
    for (k, &s) in sing.iter().enumerate() {
        let mut delta = radius - s.abs();
        if k > 0 {
            delta = delta.min(0.5 * (s - sing[k - 1]));
        }
        if k + 1 < sing.len() {
            delta = delta.min(0.5 * (sing[k + 1] - s));
        }
        panels.push(Panel {
            lo: left,
            hi: s - delta,
            map: PanelMap::Ray { origin: 0.0, dir: 1.0 },
        });
        panels.extend(graded(PanelMap::Fold { center: s }, delta, spec, spec.graded_levels));
        left = s + delta;
    }
    panels.push(Panel {
        lo: left,
        hi: radius,
        map: PanelMap::Ray { origin: 0.0, dir: 1.0 },
    });
    panels.push(Panel {
        lo: 0.0,
        hi: 1.0,
        map: PanelMap::TailFold { center: 0.0, radius },
    });
    Ok(integrate_panels(&mut g, 1, &panels, spec)?[0])
}

/// Panels for `int_0^inf f(endpoint + direction * u) du`.
pub fn halfline_panels(endpoint: f64, direction: f64, spec: &QuadSpec) -> Vec<Panel> {
    let radius = spec.outer_radius;
    let mut panels = graded(
        PanelMap::Ray {
            origin: endpoint,
            dir: direction,
        },
        radius,
        spec,
        6,
    );
    panels.push(Panel {
        lo: 0.0,
        hi: 1.0,
        map: PanelMap::TailRay {
            origin: endpoint,
            dir: direction,
            radius,
        },
    });
    panels
}

/// Integral over the half-line starting at `endpoint` in `direction` (sign only).
pub fn integrate_halfline_vec<F>(
    f: &mut F,
    dim: usize,
    endpoint: f64,
    direction: f64,
    spec: &QuadSpec,
) -> Result<Vec<QuadResult>>
where
    F: FnMut(f64, &mut [f64]),
{
    let dir = if direction < 0.0 { -1.0 } else { 1.0 };
    integrate_panels(f, dim, &halfline_panels(endpoint, dir, spec), spec)
}

pub fn integrate_halfline<F>(mut f: F, endpoint: f64, direction: f64, spec: &QuadSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    Ok(integrate_halfline_vec(&mut g, 1, endpoint, direction, spec)?[0])
}

/// Integral over a finite interval (orientation respected).
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    Ok(integrate_vec(&mut g, 1, a, b, spec)?[0])
}

pub fn integrate_vec<F>(f: &mut F, dim: usize, a: f64, b: f64, spec: &QuadSpec) -> Result<Vec<QuadResult>>
where
    F: FnMut(f64, &mut [f64]),
{
    if a == b {
        return Ok(vec![
            QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 0
            };
            dim
        ]);
    }
    let (dir, len) = if b > a { (1.0, b - a) } else { (-1.0, a - b) };
    let mut res = integrate_panels(
        f,
        dim,
        &[Panel {
            lo: 0.0,
            hi: len,
            map: PanelMap::Ray { origin: a, dir },
        }],
        spec,
    )?;
    if dir < 0.0 {
        res.iter_mut().for_each(|r| r.value = -r.value);
    }
    Ok(res)
}

/// Fixed 21-point Kronrod rule on `[a, b]`; exact for polynomials of degree 31.
pub fn kronrod21_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = WGK[10] * f(c);
    for j in 0..10 {
        acc += WGK[j] * (f(c - h * XGK[j]) + f(c + h * XGK[j]));
    }
    acc * h
}

/// Nodes of the fixed 21-point rule on `[a, b]`, ascending, with weights.
pub fn kronrod21_nodes(a: f64, b: f64) -> [(f64, f64); 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 21];
    for j in 0..10 {
        out[j] = (c - h * XGK[j], h * WGK[j]);
        out[20 - j] = (c + h * XGK[j], h * WGK[j]);
    }
    out[10] = (c, h * WGK[10]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn k(x: f64) -> f64 {
        1.0 / (1.0 + x * x)
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        for deg in 0..=31 {
            let got = kronrod21_fixed(|x| x.powi(deg), 0.0, 1.0);
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "degree {deg}: {got}");
        }
        // Embedded Gauss rule: exact to degree 19.
        let s: f64 = (0..5).map(|j| WG[j] * 2.0 * XGK[2 * j + 1].powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let wsum: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        assert!((wsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn odd_reciprocal_vanishes() {
        let r = pv_integrate(|x| 1.0 / x, &[0.0], &QuadSpec::default()).unwrap();
        assert!(r.value.abs() <= r.error_estimate.max(1e-300));
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn arctan_primitive() {
        let r = pv_integrate(k, &[], &QuadSpec::default()).unwrap();
        assert!((r.value - PI).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn shifted_singularity() {
        // PV int 1/((x-1)(1+x^2)) dx = -pi/2.
        let r = pv_integrate(|x| 1.0 / ((x - 1.0) * (1.0 + x * x)), &[1.0], &QuadSpec::default()).unwrap();
        assert!((r.value + PI / 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn sigma_family_at_zero() {
        let f = |xi: f64| k(1.0 / xi) + k(-1.0 / xi) - 2.0;
        let r = pv_integrate(f, &[0.0], &QuadSpec::default()).unwrap();
        assert!((r.value + 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "{r:?}");
    }

    #[test]
    fn halfline_examples() {
        let spec = QuadSpec::default();
        let e = integrate_halfline(|s| (-s).exp(), 0.0, 1.0, &spec).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8);
        let a = integrate_halfline(k, 0.0, 1.0, &spec).unwrap();
        assert!((a.value - PI / 2.0).abs() < 1e-8);
        let b = integrate_halfline(|s| s / (1.0 + s * s).powi(2), 0.0, 1.0, &spec).unwrap();
        assert!((b.value - 0.5).abs() < 1e-8);
        let left = integrate_halfline(|s| (s).exp(), 0.0, -1.0, &spec).unwrap();
        assert!((left.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn finite_interval_orientation() {
        let spec = QuadSpec::default();
        let r = integrate(|x| x * x, 2.0, 0.0, &spec).unwrap();
        assert!((r.value + 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn nan_is_reported() {
        let r = pv_integrate(|x| if x > 3.0 { f64::NAN } else { k(x) }, &[], &QuadSpec::default());
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn non_integrable_reports_nonconvergence() {
        let spec = QuadSpec {
            max_subdivisions: 200,
            ..QuadSpec::default()
        };
        let r = integrate_halfline(|s| 1.0 / (1.0 + s), 0.0, 1.0, &spec);
        assert!(matches!(r, Err(Error::NotConverged { .. })), "{r:?}");
    }

    #[test]
    fn vector_components_have_own_tolerance() {
        let mut f = |x: f64, out: &mut [f64]| {
            out[0] = k(x);
            out[1] = 1e-6 * x * x * k(x) * k(x);
        };
        let r = pv_integrate_vec(&mut f, 2, 0.0, &QuadSpec::default()).unwrap();
        assert!((r[0].value - PI).abs() < 1e-8);
        assert!((r[1].value - 1e-6 * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        let mut s = QuadSpec::default();
        s.rel_tol = 0.0;
        assert!(s.validate().is_err());
        s = QuadSpec::default();
        s.outer_radius = -1.0;
        assert!(s.validate().is_err());
        s = QuadSpec::default();
        s.max_depth = 0;
        assert!(s.validate().is_err());
    }
}
