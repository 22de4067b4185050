use std::path::Path;

use muskat_core::pseudo_interface::{solve_psi, Corrections, PsiContext};
use muskat_core::SpeedMode;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_csv, write_json, write_text};

#[derive(Clone, Debug, Serialize)]
pub struct PsiRow {
    pub t: f64,
    pub psi: [f64; 2],
    /// `h(t, psi(t)) = psi'(t)`.
    pub rate: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveReport {
    pub mode: SpeedMode,
    pub steps: usize,
    /// Relative change of `psi(T)` under the last step halving.
    pub change: f64,
    pub tolerance: f64,
    pub rows: Vec<PsiRow>,
    /// `max |psi| / t` per row after the first.
    pub psi_over_t: Vec<f64>,
}

const GNUPLOT: &str = "\
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set xlabel 't'
set terminal pngcairo size 800,600
set output 'evolve.png'
plot 'evolve.csv' using 1:2 with linespoints, '' using 1:3 with linespoints
";

/// Integrates the `psi` ODE; with positive speed at infinity `psi` is zero.
pub fn run_evolve(cfg: &RunConfig, out: &Path) -> Result<EvolveReport, CliError> {
    let mixing = cfg.mixing()?;
    let quad = cfg.quadrature.clone();
    let parts = Corrections::build(&mixing, &cfg.grids.table, &quad)?;
    let psi_spec = &cfg.grids.psi;
    let ctx = PsiContext::new(&mixing, &parts, psi_spec.grid.clone(), quad)?;
    let sol = solve_psi(&ctx, psi_spec)?;

    let n = cfg.run.evolve.rows.max(2);
    let rows: Vec<PsiRow> = (0..n)
        .map(|k| {
            let t = mixing.horizon * k as f64 / (n - 1) as f64;
            let (psi, rate, _) = sol.trajectory.eval(t);
            PsiRow { t, psi, rate }
        })
        .collect();
    let report = EvolveReport {
        mode: mixing.mode,
        steps: sol.steps,
        change: sol.change,
        tolerance: psi_spec.tolerance,
        psi_over_t: rows[1..]
            .iter()
            .map(|r| r.psi[0].abs().max(r.psi[1].abs()) / r.t)
            .collect(),
        rows,
    };
    write_csv(
        &out.join("evolve.csv"),
        &["t", "psi1", "psi2", "h1", "h2"],
        &report
            .rows
            .iter()
            .map(|r| vec![r.t, r.psi[0], r.psi[1], r.rate[0], r.rate[1]])
            .collect::<Vec<_>>(),
    )?;
    write_text(&out.join("evolve.gp"), GNUPLOT)?;
    write_json(&out.join("evolve.json"), &report)?;
    Ok(report)
}
