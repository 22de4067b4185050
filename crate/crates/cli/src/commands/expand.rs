use std::path::Path;

use muskat_core::kernels::{cbar_closed_form, cbar_factor, MixingConfig, MixingParams};
use muskat_core::operators::{loglog_slope, Expansion, VelocityContext};
use muskat_core::pseudo_interface::PseudoInterface;
use muskat_core::{CbarConvention, ProfileFunction, SamplingGrid};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_csv, write_json, write_text};

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub t: f64,
    pub first: f64,
    /// Under the configured convention.
    pub second: f64,
    /// Under the other convention.
    pub second_alternate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitRow {
    pub s: f64,
    pub estimate: f64,
    pub fit_rms: f64,
    /// `(2N + 1)/(3N) c(s)`.
    pub doubled: f64,
    /// `(2N + 1)/(6N) c(s)`.
    pub literal: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Brute-force coefficient sums against their closed forms, per unit speed.
#[derive(Clone, Debug, Serialize)]
pub struct CbarRow {
    pub layers: usize,
    pub literal_sum: f64,
    pub literal_closed: f64,
    pub doubled_sum: f64,
    pub doubled_closed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConventionCheck {
    pub s: f64,
    pub t: f64,
    pub doubled: f64,
    pub literal: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpandReport {
    pub layers: usize,
    pub alpha: f64,
    pub convention: CbarConvention,
    pub rows: Vec<ResidualRow>,
    pub first_slope: f64,
    pub second_slope: f64,
    pub second_alternate_slope: f64,
    pub fits: Vec<FitRow>,
    pub cbar_sums: Vec<CbarRow>,
    pub convention_check: ConventionCheck,
    pub note: String,
}

fn other(c: CbarConvention) -> CbarConvention {
    match c {
        CbarConvention::Doubled => CbarConvention::Literal,
        CbarConvention::Literal => CbarConvention::Doubled,
    }
}

/// Signed-sum coefficients for `N = 1..=max_layers` at unit speed.
pub fn cbar_table(max_layers: usize) -> Result<Vec<CbarRow>, CliError> {
    let grid = SamplingGrid::uniform(1.0, 3)?;
    (1..=max_layers)
        .map(|n| {
            let cfg = MixingConfig::unbounded(
                MixingParams {
                    layers: n,
                    alpha: 0.5,
                    beta: 0.0,
                    horizon: 1.0,
                    profile: ProfileFunction::zero(),
                    speed: ProfileFunction::Constant(1.0),
                    convention: CbarConvention::Doubled,
                },
                &grid,
            )?;
            Ok(CbarRow {
                layers: n,
                literal_sum: cbar_factor(&cfg, CbarConvention::Literal),
                literal_closed: 0.5 * cbar_closed_form(n),
                doubled_sum: cbar_factor(&cfg, CbarConvention::Doubled),
                doubled_closed: cbar_closed_form(n),
            })
        })
        .collect()
}

const GNUPLOT: &str = "\
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set logscale xy
set xlabel 't'
set ylabel 'weighted residual'
set format y '%.0e'
set terminal pngcairo size 800,600
set output 'expand_residuals.png'
plot 'expand_residuals.csv' using 1:2 with linespoints title 'first order', \\
     '' using 1:3 with linespoints title 'second order', \\
     '' using 1:4 with linespoints title 'second order, other convention'
";

/// Residual ladders of the short-time expansion and the fitted curvature
/// coefficient. The layer bound on `c_max` is not required here.
pub fn run_expand(cfg: &RunConfig, out: &Path) -> Result<ExpandReport, CliError> {
    let spec = &cfg.run.expand;
    let mixing = cfg.mixing_unbounded()?;
    let quad = cfg.quadrature.clone();
    let pi = PseudoInterface::build(&mixing, &cfg.grids.table, &cfg.grids.psi, &quad)?;
    let ex = Expansion {
        velocity: VelocityContext::new(&mixing, &pi, quad),
        initial: mixing.initial_curve(),
        first: &pi.parts.first,
        grid: spec.residual_grid.clone(),
    };
    let alt = other(mixing.convention);

    let times: Vec<f64> = (spec.first_level..=spec.last_level)
        .map(|k| mixing.horizon * 0.5f64.powi(k as i32))
        .collect();
    let mut rows = vec![ResidualRow {
        t: 0.0,
        first: ex.expansion_residual_first(0.0)?,
        second: ex.expansion_residual_second(0.0)?,
        second_alternate: ex.expansion_residual_second_with(0.0, alt)?,
    }];
    for &t in &times {
        rows.push(ResidualRow {
            t,
            first: ex.expansion_residual_first(t)?,
            second: ex.expansion_residual_second(t)?,
            second_alternate: ex.expansion_residual_second_with(t, alt)?,
        });
    }
    let slope = |f: fn(&ResidualRow) -> f64| {
        loglog_slope(
            &rows
                .iter()
                .filter(|r| r.t > 0.0)
                .map(|r| (r.t, f(r)))
                .collect::<Vec<_>>(),
        )
    };
    let first_slope = slope(|r| r.first);
    let second_slope = slope(|r| r.second);
    let second_alternate_slope = slope(|r| r.second_alternate);

    let n = mixing.layers;
    let fits = ex
        .fit_cbar_coefficient(&times, &spec.probes)?
        .into_iter()
        .map(|f| {
            let c = mixing.speed.value(f.s);
            FitRow {
                s: f.s,
                estimate: f.estimate,
                fit_rms: f.residual,
                doubled: cbar_closed_form(n) * c,
                literal: 0.5 * cbar_closed_form(n) * c,
                samples: f.samples,
            }
        })
        .collect::<Vec<_>>();

    let probe = spec.probes.first().copied().unwrap_or(0.0);
    let t_check = 1e-3;
    let convention_check = ConventionCheck {
        s: probe,
        t: t_check,
        doubled: ex.second_residual_at(probe, t_check, CbarConvention::Doubled)?,
        literal: ex.second_residual_at(probe, t_check, CbarConvention::Literal)?,
    };

    let report = ExpandReport {
        layers: n,
        alpha: mixing.alpha,
        convention: mixing.convention,
        rows,
        first_slope,
        second_slope,
        second_alternate_slope,
        fits,
        cbar_sums: cbar_table(6)?,
        convention_check,
        note: "the signed sum with prefactor 1/(8N^2) gives (2N+1)/(6N), \
               half of the closed form (2N+1)/(3N) selected by the fit"
            .into(),
    };

    write_csv(
        &out.join("expand_residuals.csv"),
        &["t", "first", "second", "second_alternate"],
        &report
            .rows
            .iter()
            .map(|r| vec![r.t, r.first, r.second, r.second_alternate])
            .collect::<Vec<_>>(),
    )?;
    write_csv(
        &out.join("expand_cbar.csv"),
        &["s", "estimate", "fit_rms", "doubled", "literal"],
        &report
            .fits
            .iter()
            .map(|f| vec![f.s, f.estimate, f.fit_rms, f.doubled, f.literal])
            .collect::<Vec<_>>(),
    )?;
    write_text(&out.join("expand_residuals.gp"), GNUPLOT)?;
    write_json(&out.join("expand.json"), &report)?;
    Ok(report)
}
