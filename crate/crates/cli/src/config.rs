//! Run configuration: a strict JSON document with defaults for every section.

use std::path::Path;

use muskat_core::kernels::minimal_layers;
use muskat_core::pseudo_interface::{PsiSpec, TableSpec};
use muskat_core::subsolution::CertifySpec;
use muskat_core::{make_profile, CbarConvention, MixingConfig, MixingParams, ProfileSpec, QuadSpec, SamplingGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Decaying part of the initial interface.
    pub profile: ProfileSpec,
    /// Mixing speed `c(s)`.
    pub speed: ProfileSpec,
    pub mixing: MixingSection,
    pub quadrature: QuadSpec,
    pub grids: GridSection,
    pub run: RunSection,
    pub conventions: Conventions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::primitive("rational_bump", 0.1, 0.0, 1.0),
            speed: ProfileSpec {
                kind: "constant".into(),
                a: Some(1.0),
                s0: None,
                w: None,
                p: None,
                terms: Vec::new(),
            },
            mixing: MixingSection::default(),
            quadrature: QuadSpec::default(),
            grids: GridSection::default(),
            run: RunSection::default(),
            conventions: Conventions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// `N` as a number or the string `"auto"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LayerCount {
    Fixed(usize),
    Auto(Auto),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixingSection {
    #[serde(rename = "N")]
    pub layers: LayerCount,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl Default for MixingSection {
    fn default() -> Self {
        Self {
            layers: LayerCount::Fixed(2),
            alpha: 0.5,
            beta: 0.0,
            horizon: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Abscissae on which the speed bounds are checked.
    pub gate: SamplingGrid,
    /// Nodes of the `z1`, `z2` tables.
    pub table: TableSpec,
    pub psi: PsiSpec,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            gate: SamplingGrid::default(),
            table: TableSpec::default(),
            psi: PsiSpec::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub identities: IdentitiesRun,
    pub expand: ExpandRun,
    pub fields: FieldsRun,
    pub validate: CertifySpec,
    pub evolve: EvolveRun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitiesRun {
    /// Slopes `a` of the offset-kernel identity.
    pub slopes: Vec<f64>,
    /// Points of the Hilbert-pair comparison.
    pub hilbert: SamplingGrid,
    /// Points where odd integrands must integrate to zero.
    pub odd_points: Vec<f64>,
    pub tolerance: f64,
}

impl Default for IdentitiesRun {
    fn default() -> Self {
        Self {
            slopes: vec![0.0, 0.5, -0.5, 1.0, -1.0, 2.0],
            hilbert: SamplingGrid {
                half_width: 10.0,
                points: 201,
                grading: 1.0,
            },
            odd_points: vec![-1.3, 0.0, 2.1],
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpandRun {
    /// Residuals at `T 2^-k` for `k` in `first_level..=last_level`.
    pub first_level: u32,
    pub last_level: u32,
    /// Abscissae of the weighted residual maxima.
    pub residual_grid: SamplingGrid,
    /// Probe points of the curvature-coefficient fit.
    pub probes: Vec<f64>,
}

impl Default for ExpandRun {
    fn default() -> Self {
        Self {
            first_level: 4,
            last_level: 9,
            residual_grid: SamplingGrid {
                half_width: 20.0,
                points: 81,
                grading: 1.0,
            },
            probes: vec![0.0, 0.5, -0.5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldsRun {
    /// Sampling time; `--t` overrides it.
    pub t: f64,
    /// `[lo, hi]` in `x1` and `x2`.
    pub x1: [f64; 2],
    pub x2: [f64; 2],
    pub points_x1: usize,
    pub points_x2: usize,
    /// Potential table the layer fields are read from.
    pub slice: SamplingGrid,
}

impl Default for FieldsRun {
    fn default() -> Self {
        Self {
            t: 0.05,
            x1: [-4.0, 4.0],
            x2: [-0.25, 0.25],
            points_x1: 41,
            points_x2: 51,
            slice: SamplingGrid {
                half_width: 20.0,
                points: 401,
                grading: 1.0,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveRun {
    /// Rows written, uniformly spaced in `[0, T]`.
    pub rows: usize,
}

impl Default for EvolveRun {
    fn default() -> Self {
        Self { rows: 33 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Conventions {
    pub cbar: CbarConvention,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            cbar: CbarConvention::Doubled,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn params(&self) -> Result<MixingParams, CliError> {
        let profile = make_profile(&self.profile)?;
        let speed = make_profile(&self.speed)?;
        let layers = match self.mixing.layers {
            LayerCount::Fixed(n) => n,
            LayerCount::Auto(_) => {
                let c_max = self
                    .grids
                    .gate
                    .abscissae()
                    .iter()
                    .map(|&s| speed.value(s))
                    .fold(0.0, f64::max);
                minimal_layers(c_max)?
            }
        };
        Ok(MixingParams {
            layers,
            alpha: self.mixing.alpha,
            beta: self.mixing.beta,
            horizon: self.mixing.horizon,
            profile,
            speed,
            convention: self.conventions.cbar,
        })
    }

    /// Validated parameters, including the layer bound on `c_max`.
    pub fn mixing(&self) -> Result<MixingConfig, CliError> {
        self.quadrature.validate()?;
        Ok(MixingConfig::new(self.params()?, &self.grids.gate)?)
    }

    /// Validated parameters without the layer bound; enough for expansions.
    pub fn mixing_unbounded(&self) -> Result<MixingConfig, CliError> {
        self.quadrature.validate()?;
        Ok(MixingConfig::unbounded(self.params()?, &self.grids.gate)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_canonical_config() {
        let c = RunConfig::parse("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        let m = c.mixing().unwrap();
        assert_eq!(m.layers, 2);
        assert_eq!(m.c_max, 1.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::parse(r#"{"mixing": {"M": 2}}"#),
            Err(CliError::Config(_))
        ));
        assert!(matches!(RunConfig::parse(r#"{"extra": 1}"#), Err(CliError::Config(_))));
        assert!(matches!(
            RunConfig::parse(r#"{"run": {"validate": {"level": 3}}}"#),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn auto_layers_resolve_from_the_speed_maximum() {
        let c = RunConfig::parse(r#"{"mixing": {"N": "auto"}, "speed": {"kind": "constant", "a": 1.5}}"#).unwrap();
        assert_eq!(c.mixing().unwrap().layers, 3);
        let c = RunConfig::parse(r#"{"mixing": {"N": "auto"}}"#).unwrap();
        assert_eq!(c.mixing().unwrap().layers, 2);
        assert!(RunConfig::parse(r#"{"mixing": {"N": "many"}}"#).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let c = RunConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
    }

    #[test]
    fn gate_failures_are_config_errors() {
        let c = RunConfig::parse(r#"{"speed": {"kind": "constant", "a": 1.95}}"#).unwrap();
        assert!(matches!(c.mixing(), Err(CliError::Gate(_))));
        let c = RunConfig::parse(
            r#"{"mixing": {"beta": 0.2}, "speed": {"kind": "power_bump", "a": 0.5, "p": 0.16666666666666666}}"#,
        )
        .unwrap();
        assert!(matches!(c.mixing(), Err(CliError::Gate(_))));
    }
}
