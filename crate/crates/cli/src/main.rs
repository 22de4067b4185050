use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use muskat_cli::commands::{run_evolve, run_expand, run_fields, run_identities, run_validate};
use muskat_cli::{CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "muskat",
    version,
    about = "Mixing subsolutions for the unstable Muskat problem"
)]
struct Cli {
    /// JSON run configuration; defaults apply to missing sections.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for reports, tables and plot scripts.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, env = "MUSKAT_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel identities, the Hilbert pair and odd-symmetry checks.
    Identities,
    /// Short-time expansion residuals and the fitted curvature coefficient.
    Expand,
    /// Density, velocity, m and margin on a rectangular grid.
    Fields {
        /// Sampling time.
        #[arg(long = "t", value_name = "VALUE")]
        t: Option<f64>,
    },
    /// Admissibility certificate.
    Validate,
    /// The psi trajectory.
    Evolve,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    std::fs::create_dir_all(&cli.out)?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Identities => {
            let r = run_identities(&cfg, out)?;
            println!(
                "identities: max error vs -2*pi*sigma {:.3e}, vs -pi*sigma {:.3e}; hilbert max error {:.3e}",
                r.max_doubled_error, r.max_halved_error, r.hilbert.max_error
            );
        }
        Command::Expand => {
            let r = run_expand(&cfg, out)?;
            println!(
                "expand: N = {}, slopes first {:.3} second {:.3}",
                r.layers, r.first_slope, r.second_slope
            );
            for f in &r.fits {
                println!(
                    "  s = {:+.2}: cbar {:.5} (doubled {:.5}, literal {:.5})",
                    f.s, f.estimate, f.doubled, f.literal
                );
            }
        }
        Command::Fields { t } => {
            let r = run_fields(&cfg, t, out)?;
            println!(
                "fields: t = {}, {} points, {} in the mixing zone, min margin {:.4}",
                r.t, r.points, r.mixing_points, r.min_mixing_margin
            );
        }
        Command::Validate => {
            let r = run_validate(&cfg, out)?;
            let a = &r.admissibility;
            println!(
                "validate: certified t* = {}, margin at t*/2 = {:.4}, jump residual {:.2e}",
                a.t_star, a.margin_at_half, a.jump_residual
            );
        }
        Command::Evolve => {
            let r = run_evolve(&cfg, out)?;
            println!("evolve: {:?} mode, {} steps, change {:.2e}", r.mode, r.steps, r.change);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("muskat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
