use std::path::Path;

use muskat_core::pseudo_interface::{PseudoInterface, RegionLabel};
use muskat_core::subsolution::SubsolutionFields;
use muskat_core::{par_map, Error};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_csv, write_json, write_text};

pub const FIELD_COLUMNS: [&str; 12] = [
    "x1", "x2", "region", "rho", "u1", "u2", "gamma1", "gamma2", "m1", "m2", "margin", "mixing",
];

#[derive(Clone, Debug, Serialize)]
pub struct FieldsSummary {
    pub t: f64,
    pub points: usize,
    pub mixing_points: usize,
    /// Points exactly on an interface, written with `nan` fields.
    pub interface_points: usize,
    pub min_mixing_margin: f64,
    pub max_outer_margin: f64,
    pub max_speed: f64,
}

/// Region code: `N` above the zone, `-N` below, the layer index inside and
/// `nan` on an interface.
fn region_code(label: RegionLabel, layers: usize) -> f64 {
    match label {
        RegionLabel::Upper => layers as f64,
        RegionLabel::Lower => -(layers as f64),
        RegionLabel::Layer(i) => i as f64,
        RegionLabel::Interface(_) => f64::NAN,
    }
}

fn gnuplot(layers: usize) -> String {
    format!(
        "\
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set xlabel 'x1'
set ylabel 'x2'
set view map
set terminal pngcairo size 1000,700
set output 'fields_density.png'
set title 'density staircase ({layers} layers per side)'
set palette defined (-1 'blue', 0 'white', 1 'red')
set cbrange [-1:1]
splot 'fields.csv' using 1:2:4 with points pointtype 5 pointsize 1 palette notitle
set output 'fields_margin.png'
set title 'strict margin'
set palette defined (0 'black', 1 'yellow')
set autoscale cb
splot 'fields.csv' using 1:2:11 with points pointtype 5 pointsize 1 palette notitle
"
    )
}

fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (range[0] + range[1])];
    }
    let h = (range[1] - range[0]) / (n - 1) as f64;
    (0..n).map(|k| range[0] + h * k as f64).collect()
}

/// Samples density, velocity, `gamma`, `m` and the strict margin at time `t`.
pub fn run_fields(cfg: &RunConfig, t: Option<f64>, out: &Path) -> Result<FieldsSummary, CliError> {
    let spec = &cfg.run.fields;
    let t = t.unwrap_or(spec.t);
    if !(t > 0.0) {
        return Err(CliError::Gate(format!("fields need t > 0, got {t}")));
    }
    if spec.points_x1 == 0 || spec.points_x2 == 0 {
        return Err(CliError::Config("sampling grid is empty".into()));
    }
    let mixing = cfg.mixing()?;
    let quad = cfg.quadrature.clone();
    let pi = PseudoInterface::build(&mixing, &cfg.grids.table, &cfg.grids.psi, &quad)?;
    let fields = SubsolutionFields::new(&pi, quad);
    let slice = fields.slice(t, &spec.slice)?;
    let velocity = fields.velocity();
    let n = mixing.layers;

    let points: Vec<[f64; 2]> = linspace(spec.x1, spec.points_x1)
        .into_iter()
        .flat_map(|x1| linspace(spec.x2, spec.points_x2).into_iter().map(move |x2| [x1, x2]))
        .collect();
    let rows = par_map(&points, |&x| -> Result<Vec<f64>, Error> {
        let label = pi.classify_point(x, t);
        let rho = fields.density(x, t);
        let mixing = matches!(label, RegionLabel::Layer(_));
        let nan = [f64::NAN; 2];
        let (u, gamma, m, margin) = match label {
            RegionLabel::Interface(_) => (nan, nan, nan, f64::NAN),
            _ => match velocity.plane_velocity(x, t) {
                Ok(u) => (
                    u,
                    fields.gamma_field(&slice, x)?,
                    fields.m_field(&slice, x)?,
                    fields.strict_margin(&slice, x)?,
                ),
                Err(Error::InterfaceProximity { .. }) => (nan, nan, nan, f64::NAN),
                Err(e) => return Err(e),
            },
        };
        Ok(vec![
            x[0],
            x[1],
            region_code(label, n),
            rho,
            u[0],
            u[1],
            gamma[0],
            gamma[1],
            m[0],
            m[1],
            margin,
            if mixing { 1.0 } else { 0.0 },
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut summary = FieldsSummary {
        t,
        points: rows.len(),
        mixing_points: 0,
        interface_points: 0,
        min_mixing_margin: f64::INFINITY,
        max_outer_margin: 0.0,
        max_speed: 0.0,
    };
    for r in &rows {
        if r[2].is_nan() || r[10].is_nan() {
            summary.interface_points += 1;
            continue;
        }
        if r[11] == 1.0 {
            summary.mixing_points += 1;
            summary.min_mixing_margin = summary.min_mixing_margin.min(r[10]);
        } else {
            summary.max_outer_margin = summary.max_outer_margin.max(r[10].abs());
        }
        summary.max_speed = summary.max_speed.max(r[4].hypot(r[5]));
    }
    if summary.mixing_points == 0 {
        summary.min_mixing_margin = f64::NAN;
    }

    write_csv(&out.join("fields.csv"), &FIELD_COLUMNS, &rows)?;
    write_text(&out.join("fields.gp"), &gnuplot(n))?;
    write_json(&out.join("fields.json"), &summary)?;
    Ok(summary)
}
