//! Closed-form scalar profiles on the line and weighted Hölder norms.
//!
//! Profiles carry exact derivatives up to order three so that every kernel
//! built from them is free of numerical-differentiation noise.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

/// `\int_{-1}^{1} exp(-1/(1-u^2)) du`.
pub const COMPACT_BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// An analytic function of one variable with derivatives of order 0..=3.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileFunction {
    Constant(f64),
    /// `a s`
    LinearRamp(f64),
    /// `a (1 + ((s - s0)/w)^2)^(-p)`; `p = 1` is the rational bump.
    PowerBump {
        a: f64,
        s0: f64,
        w: f64,
        p: f64,
    },
    /// `a exp(-((s - s0)/w)^2)`
    Gaussian {
        a: f64,
        s0: f64,
        w: f64,
    },
    /// `a exp(-1/(1-u^2))` for `|u| < 1`, `u = (s - s0)/w`, zero elsewhere.
    CompactBump {
        a: f64,
        s0: f64,
        w: f64,
    },
    Sum(Box<ProfileFunction>, Box<ProfileFunction>),
    Product(Box<ProfileFunction>, Box<ProfileFunction>),
}

impl ProfileFunction {
    pub fn rational_bump(a: f64, s0: f64, w: f64) -> Self {
        Self::PowerBump { a, s0, w, p: 1.0 }
    }

    /// Compact bump supported on `[lo, hi]` with unit integral.
    pub fn normalized_compact_bump(lo: f64, hi: f64) -> Self {
        let w = 0.5 * (hi - lo);
        Self::CompactBump {
            a: 1.0 / (w * COMPACT_BUMP_MASS),
            s0: 0.5 * (hi + lo),
            w,
        }
    }

    pub fn zero() -> Self {
        Self::Constant(0.0)
    }

    pub fn plus(self, other: Self) -> Self {
        Self::Sum(Box::new(self), Box::new(other))
    }

    pub fn times(self, other: Self) -> Self {
        Self::Product(Box::new(self), Box::new(other))
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::Constant(factor).times(self)
    }

    /// Value and derivatives `[f, f', f'', f''']` at `s`.
    pub fn derivs(&self, s: f64) -> [f64; 4] {
        match self {
            Self::Constant(a) => [*a, 0.0, 0.0, 0.0],
            Self::LinearRamp(a) => [a * s, *a, 0.0, 0.0],
            Self::PowerBump { a, s0, w, p } => {
                let v = (Jet::<4>::variable(s) - *s0) / *w;
                let q = v * v + 1.0;
                let x = q.value();
                let base = x.powf(-p);
                let d = [
                    base,
                    -p * base / x,
                    p * (p + 1.0) * base / (x * x),
                    -p * (p + 1.0) * (p + 2.0) * base / (x * x * x),
                ];
                (q.compose(&d) * *a).derivatives()
            }
            Self::Gaussian { a, s0, w } => {
                let v = (Jet::<4>::variable(s) - *s0) / *w;
                let g = -(v * v);
                let e = g.value().exp();
                (g.compose(&[e, e, e, e]) * *a).derivatives()
            }
            Self::CompactBump { a, s0, w } => {
                let u0 = (s - s0) / w;
                if u0.abs() >= 1.0 || 1.0 - u0 * u0 < 1.0e-3 {
                    return [0.0; 4];
                }
                let u = (Jet::<4>::variable(s) - *s0) / *w;
                let g = -(Jet::<4>::constant(1.0) / (-(u * u) + 1.0));
                let e = g.value().exp();
                (g.compose(&[e, e, e, e]) * *a).derivatives()
            }
            Self::Sum(f, g) => {
                let (a, b) = (f.derivs(s), g.derivs(s));
                [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
            }
            Self::Product(f, g) => {
                let (a, b) = (f.derivs(s), g.derivs(s));
                [
                    a[0] * b[0],
                    a[1] * b[0] + a[0] * b[1],
                    a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
                    a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3],
                ]
            }
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivs(s)[0]
    }

    pub fn derivative(&self, order: usize, s: f64) -> f64 {
        self.derivs(s)[order]
    }

    /// The `shift`-th derivative evaluated on a scalar or jet argument.
    pub fn eval<S: Scalar>(&self, x: S, shift: usize) -> S {
        let d = self.derivs(x.value());
        x.compose(&d[shift..])
    }

    /// Largest `p` with `|f(s)| <= C |s|^(-p)` at infinity; negative for growth.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            Self::Constant(a) => {
                if *a == 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Self::LinearRamp(a) => {
                if *a == 0.0 {
                    f64::INFINITY
                } else {
                    -1.0
                }
            }
            Self::PowerBump { a, p, .. } => {
                if *a == 0.0 {
                    f64::INFINITY
                } else {
                    2.0 * p
                }
            }
            Self::Gaussian { .. } | Self::CompactBump { .. } => f64::INFINITY,
            Self::Sum(f, g) => f.decay_exponent().min(g.decay_exponent()),
            Self::Product(f, g) => f.decay_exponent() + g.decay_exponent(),
        }
    }

    /// Whether the function and its derivatives sit in the decaying class
    /// weighted by `1 + |s|^(1+alpha)`.
    pub fn is_decaying(&self, alpha: f64) -> bool {
        self.decay_exponent() >= 1.0 + alpha
    }

    /// Limits at `-inf` and `+inf` (possibly infinite).
    pub fn limits(&self) -> (f64, f64) {
        if self.decay_exponent() > 0.0 {
            return (0.0, 0.0);
        }
        match self {
            Self::Constant(a) => (*a, *a),
            Self::LinearRamp(a) => (-a * f64::INFINITY, a * f64::INFINITY),
            Self::PowerBump { .. } | Self::Gaussian { .. } | Self::CompactBump { .. } => (0.0, 0.0),
            Self::Sum(f, g) => {
                let (a, b) = (f.limits(), g.limits());
                (a.0 + b.0, a.1 + b.1)
            }
            Self::Product(f, g) => {
                let (a, b) = (f.limits(), g.limits());
                (a.0 * b.0, a.1 * b.1)
            }
        }
    }

    /// Limit of `f'` at infinity (same at both ends for the classes built here).
    pub fn asymptotic_slope(&self) -> f64 {
        match self {
            Self::Constant(_) | Self::PowerBump { .. } | Self::Gaussian { .. } | Self::CompactBump { .. } => 0.0,
            Self::LinearRamp(a) => *a,
            Self::Sum(f, g) => f.asymptotic_slope() + g.asymptotic_slope(),
            Self::Product(f, g) => {
                if self.decay_exponent() > 0.0 {
                    return 0.0;
                }
                let (lf, lg) = (f.limits().1, g.limits().1);
                let (sf, sg) = (f.asymptotic_slope(), g.asymptotic_slope());
                let mut acc = 0.0;
                if sf != 0.0 {
                    acc += sf * lg;
                }
                if sg != 0.0 {
                    acc += lf * sg;
                }
                acc
            }
        }
    }
}

/// Serializable description of a profile.
///
/// `kind` is one of `constant`, `linear_ramp`, `rational_bump`, `power_bump`,
/// `gaussian`, `compact_bump`, `sum`, `product`. For `constant` and
/// `linear_ramp` the parameter `a` is the value and the slope respectively.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ProfileSpec {
    pub kind: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub a: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub s0: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub w: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub p: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub terms: Vec<ProfileSpec>,
}

impl ProfileSpec {
    pub fn primitive(kind: &str, a: f64, s0: f64, w: f64) -> Self {
        Self {
            kind: kind.into(),
            a: Some(a),
            s0: Some(s0),
            w: Some(w),
            p: None,
            terms: Vec::new(),
        }
    }
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "must be finite",
        })
    }
}

/// Builds a [`ProfileFunction`] from its description.
pub fn make_profile(spec: &ProfileSpec) -> Result<ProfileFunction> {
    let a = finite("a", spec.a.unwrap_or(1.0))?;
    let s0 = finite("s0", spec.s0.unwrap_or(0.0))?;
    let w = finite("w", spec.w.unwrap_or(1.0))?;
    let bump_width = || {
        if w > 0.0 {
            Ok(w)
        } else {
            Err(Error::InvalidParameter {
                name: "w",
                value: w,
                reason: "width must be positive",
            })
        }
    };
    let fold = |combine: fn(ProfileFunction, ProfileFunction) -> ProfileFunction| -> Result<ProfileFunction> {
        let mut it = spec.terms.iter();
        let first = it.next().ok_or(Error::InvalidParameter {
            name: "terms",
            value: 0.0,
            reason: "composite profile needs at least one term",
        })?;
        let mut acc = make_profile(first)?;
        for t in it {
            acc = combine(acc, make_profile(t)?);
        }
        Ok(acc)
    };
    match spec.kind.as_str() {
        "constant" => Ok(ProfileFunction::Constant(a)),
        "linear_ramp" => Ok(ProfileFunction::LinearRamp(a)),
        "rational_bump" => Ok(ProfileFunction::rational_bump(a, s0, bump_width()?)),
        "power_bump" => {
            let p = finite("p", spec.p.unwrap_or(1.0))?;
            if p <= 0.0 {
                return Err(Error::InvalidParameter {
                    name: "p",
                    value: p,
                    reason: "exponent must be positive",
                });
            }
            Ok(ProfileFunction::PowerBump {
                a,
                s0,
                w: bump_width()?,
                p,
            })
        }
        "gaussian" => Ok(ProfileFunction::Gaussian {
            a,
            s0,
            w: bump_width()?,
        }),
        "compact_bump" => Ok(ProfileFunction::CompactBump {
            a,
            s0,
            w: bump_width()?,
        }),
        "sum" => fold(ProfileFunction::plus),
        "product" => fold(ProfileFunction::times),
        other => Err(Error::UnknownPrimitive(other.into())),
    }
}

/// Abscissae on `[-S, S]`, optionally graded toward the origin.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SamplingGrid {
    pub half_width: f64,
    pub points: usize,
    /// Exponent `g >= 1` of the map `u -> S sign(u) |u|^g`; 1 is uniform.
    pub grading: f64,
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            half_width: 40.0,
            points: 2001,
            grading: 1.0,
        }
    }
}

impl SamplingGrid {
    pub fn uniform(half_width: f64, points: usize) -> Result<Self> {
        Self::graded(half_width, points, 1.0)
    }

    pub fn graded(half_width: f64, points: usize, grading: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "half_width",
                value: half_width,
                reason: "must be positive",
            });
        }
        if points < 3 {
            return Err(Error::InvalidParameter {
                name: "points",
                value: points as f64,
                reason: "need at least 3 points",
            });
        }
        if !(grading >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "grading",
                value: grading,
                reason: "grading exponent must be >= 1",
            });
        }
        Ok(Self {
            half_width,
            points,
            grading,
        })
    }

    pub fn abscissae(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let u = -1.0 + 2.0 * k as f64 / (n - 1) as f64;
                self.half_width * u.signum() * u.abs().powf(self.grading)
            })
            .collect()
    }
}

/// Default shift set `{2^-j : j = 0..=12}`.
pub fn default_shifts() -> Vec<f64> {
    (0..=12).map(|j| 0.5f64.powi(j)).collect()
}

fn weight(s: f64, alpha: f64) -> f64 {
    1.0 + s.abs().powf(1.0 + alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "exponent must lie in (0, 1)",
        })
    }
}

fn check_shifts(shifts: &[f64]) -> Result<()> {
    for &x in shifts {
        if !(x != 0.0 && x.abs() <= 1.0) {
            return Err(Error::InvalidShift(x));
        }
    }
    Ok(())
}

/// Grid maximum of `(1+|s|^(1+alpha)) |f(s)|`, a lower bound for `||f||_0^*`.
pub fn weighted_sup_of<F: Fn(f64) -> f64>(f: F, alpha: f64, grid: &SamplingGrid) -> Result<f64> {
    check_alpha(alpha)?;
    let xs = grid.abscissae();
    if xs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(xs.iter().map(|&s| weight(s, alpha) * f(s).abs()).fold(0.0, f64::max))
}

/// Grid/shift maximum of `(1+|s|^(1+alpha)) |f(s-xi) - f(s)| / |xi|^alpha`.
///
/// Each shift is applied with both signs.
pub fn weighted_holder_of<F: Fn(f64) -> f64>(f: F, alpha: f64, grid: &SamplingGrid, shifts: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    check_shifts(shifts)?;
    let xs = grid.abscissae();
    if xs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut best = 0.0f64;
    for &s in &xs {
        let fs = f(s);
        let w = weight(s, alpha);
        for &h in shifts {
            let scale = h.abs().powf(alpha);
            for xi in [h, -h] {
                best = best.max(w * (f(s - xi) - fs).abs() / scale);
            }
        }
    }
    Ok(best)
}

pub fn weighted_sup_norm(f: &ProfileFunction, alpha: f64, grid: &SamplingGrid) -> Result<f64> {
    weighted_sup_of(|s| f.value(s), alpha, grid)
}

pub fn weighted_holder_seminorm(f: &ProfileFunction, alpha: f64, grid: &SamplingGrid, shifts: &[f64]) -> Result<f64> {
    weighted_holder_of(|s| f.value(s), alpha, grid, shifts)
}

/// `sup_{j<=k} ||d^j f||_0^* + [d^k f]_alpha^*` on the grid, `k <= 3`.
pub fn weighted_ck_norm(f: &ProfileFunction, k: usize, alpha: f64, grid: &SamplingGrid, shifts: &[f64]) -> Result<f64> {
    if k > 3 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "derivative order must be <= 3",
        });
    }
    let mut sup = 0.0f64;
    for j in 0..=k {
        sup = sup.max(weighted_sup_of(|s| f.derivative(j, s), alpha, grid)?);
    }
    Ok(sup + weighted_holder_of(|s| f.derivative(k, s), alpha, grid, shifts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb() -> ProfileFunction {
        ProfileFunction::rational_bump(1.0, 0.0, 1.0)
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(rb().value(0.0), 1.0);
        assert_eq!(rb().derivative(1, 0.0), 0.0);
        let g = ProfileFunction::Gaussian {
            a: 1.0,
            s0: 0.0,
            w: 1.0,
        };
        assert!((g.value(1.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn make_profile_errors() {
        let mut spec = ProfileSpec::primitive("rational_bump", 1.0, 0.0, 0.0);
        assert!(matches!(
            make_profile(&spec),
            Err(Error::InvalidParameter { name: "w", .. })
        ));
        spec.kind = "sinc".into();
        assert_eq!(make_profile(&spec), Err(Error::UnknownPrimitive("sinc".into())));
        spec = ProfileSpec::primitive("gaussian", 2.0, 1.0, 0.5);
        assert_eq!(
            make_profile(&spec).unwrap(),
            ProfileFunction::Gaussian {
                a: 2.0,
                s0: 1.0,
                w: 0.5
            }
        );
    }

    #[test]
    fn composite_profiles() {
        let spec = ProfileSpec {
            kind: "sum".into(),
            a: None,
            s0: None,
            w: None,
            p: None,
            terms: alloc::vec![
                ProfileSpec::primitive("linear_ramp", 0.5, 0.0, 1.0),
                ProfileSpec::primitive("rational_bump", 0.1, 0.0, 1.0),
            ],
        };
        let f = make_profile(&spec).unwrap();
        assert!((f.value(2.0) - (1.0 + 0.1 / 5.0)).abs() < 1e-15);
        assert_eq!(f.asymptotic_slope(), 0.5);
        assert_eq!(f.decay_exponent(), -1.0);
        assert!(!f.is_decaying(0.5));
    }

    #[test]
    fn compact_bump_mass_and_support() {
        let f = ProfileFunction::normalized_compact_bump(1.0, 2.0);
        assert_eq!(f.derivs(0.9), [0.0; 4]);
        assert_eq!(f.derivs(2.1), [0.0; 4]);
        // Trapezoid on a smooth compactly supported function is spectrally accurate.
        let n = 4000;
        let h = 1.0 / n as f64;
        let mass: f64 = (1..n).map(|k| f.value(1.0 + k as f64 * h) * h).sum();
        assert!((mass - 1.0).abs() < 1e-12, "mass {mass}");
    }

    #[test]
    fn decay_flags() {
        assert!(rb().is_decaying(0.5));
        let c = ProfileFunction::PowerBump {
            a: 0.5,
            s0: 0.0,
            w: 1.0,
            p: 1.0 / 6.0,
        };
        assert!(!c.is_decaying(0.5));
        assert!((c.decay_exponent() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ProfileFunction::Constant(1.0).limits(), (1.0, 1.0));
        assert_eq!(c.limits(), (0.0, 0.0));
    }

    #[test]
    fn grid_validation() {
        assert!(SamplingGrid::uniform(0.0, 10).is_err());
        assert!(SamplingGrid::uniform(1.0, 2).is_err());
        let g = SamplingGrid::graded(4.0, 9, 2.0).unwrap();
        let xs = g.abscissae();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(xs[0], -4.0);
        assert_eq!(xs[8], 4.0);
    }

    #[test]
    fn zero_and_constant_norms() {
        let grid = SamplingGrid::default();
        let z = ProfileFunction::zero();
        assert_eq!(weighted_sup_norm(&z, 0.5, &grid).unwrap(), 0.0);
        for k in 0..=3 {
            assert_eq!(weighted_ck_norm(&z, k, 0.5, &grid, &default_shifts()).unwrap(), 0.0);
        }
        let c = ProfileFunction::Constant(3.0);
        assert_eq!(
            weighted_holder_seminorm(&c, 0.5, &grid, &default_shifts()).unwrap(),
            0.0
        );
    }

    #[test]
    fn holder_single_point_contribution() {
        // f(s) = s at s = 0, xi = 1, alpha = 1/2 contributes exactly 1.
        let f = ProfileFunction::LinearRamp(1.0);
        let v = weighted_holder_of(|s| f.value(s), 0.5, &SamplingGrid::uniform(1.0, 3).unwrap(), &[1.0]).unwrap();
        // Grid {-1, 0, 1}: the s = +-1 points carry weight 2, so the max is 2; s = 0 gives 1.
        assert_eq!(v, 2.0);
        let at_zero = (f.value(0.0 - 1.0) - f.value(0.0)).abs() / 1.0f64.powf(0.5);
        assert_eq!(at_zero, 1.0);
    }

    #[test]
    fn shift_and_alpha_errors() {
        let grid = SamplingGrid::default();
        assert_eq!(
            weighted_holder_seminorm(&rb(), 0.5, &grid, &[1.5]),
            Err(Error::InvalidShift(1.5))
        );
        assert_eq!(
            weighted_holder_seminorm(&rb(), 0.5, &grid, &[0.0]),
            Err(Error::InvalidShift(0.0))
        );
        assert!(weighted_sup_norm(&rb(), 1.0, &grid).is_err());
    }
}
