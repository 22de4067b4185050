//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use muskat_cli::commands::{cbar_table, run_evolve, run_expand, run_identities, run_validate, ExpandReport};
use muskat_cli::RunConfig;
use muskat_core::kernels::{sigma, Curve, OffsetKernel, ProfileCurve};
use muskat_core::operators::{loglog_slope, offset_pv_integral, offset_pv_limit, t_phi, VelocityContext};
use muskat_core::profiles::weighted_sup_of;
use muskat_core::pseudo_interface::PseudoInterface;
use muskat_core::{ProfileFunction, QuadSpec, SamplingGrid, SpeedMode};
use tempfile::TempDir;

const ALPHA: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn scratch() -> TempDir {
    tempfile::tempdir().expect("temporary directory")
}

fn config(text: &str) -> RunConfig {
    RunConfig::parse(text).expect("valid configuration")
}

fn vanishing_config() -> RunConfig {
    config(r#"{"speed": {"kind": "power_bump", "a": 0.5, "p": 0.16666666666666666}}"#)
}

fn identities_and_hilbert() -> (Outcome, Outcome) {
    let dir = scratch();
    let start = Instant::now();
    let r = run_identities(&RunConfig::default(), dir.path()).expect("identities run");
    let elapsed = start.elapsed();

    let slopes = [0.0, 0.5, -0.5, 1.0, -1.0, 2.0];
    let covered = slopes.iter().all(|a| r.rows.iter().any(|row| row.a == *a));
    let worst = r
        .rows
        .iter()
        .map(|row| {
            let oracle = -2.0 * std::f64::consts::PI * sigma(row.a);
            let err = (row.integral - oracle).abs();
            if oracle == 0.0 {
                err
            } else {
                err / oracle.abs()
            }
        })
        .fold(0.0, f64::max);
    let flagged = r.rows.iter().any(|row| row.a != 0.0 && row.halved_error > 0.1) && r.all_match_doubled;
    let first = Outcome::new(
        covered && worst < 1e-6 && flagged && elapsed < Duration::from_secs(5),
        format!(
            "max rel error {worst:.2e} vs -2*pi*sigma(a), halved form flagged: {flagged}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    );
    let h = &r.hilbert;
    let second = Outcome::new(
        h.half_width >= 10.0 && h.max_error < 1e-5 && elapsed < Duration::from_secs(10),
        format!("sup error {:.2e} on [-{}, {}]", h.max_error, h.half_width, h.half_width),
    );
    (first, second)
}

fn expand_with_layers(n: usize) -> ExpandReport {
    let dir = scratch();
    let cfg = config(&format!(r#"{{"mixing": {{"N": {n}}}}}"#));
    run_expand(&cfg, dir.path()).expect("expand run")
}

fn cbar_and_rates() -> (Outcome, Outcome) {
    let table = cbar_table(6).expect("cbar table");
    let sum_error = table
        .iter()
        .map(|row| {
            let n = row.layers as f64;
            let literal = (2.0 * n + 1.0) / (6.0 * n);
            (row.literal_sum - literal)
                .abs()
                .max((row.doubled_sum - 2.0 * literal).abs())
        })
        .fold(0.0, f64::max);

    let mut fit_error: f64 = 0.0;
    let mut both_recorded = true;
    let mut canonical = None;
    for n in 1..=3 {
        let r = expand_with_layers(n);
        let target = (2.0 * n as f64 + 1.0) / (3.0 * n as f64);
        for f in &r.fits {
            fit_error = fit_error.max((f.estimate - target).abs() / target);
            both_recorded &= (f.literal - 0.5 * target).abs() < 1e-12 && (f.doubled - target).abs() < 1e-12;
        }
        if n == 2 {
            canonical = Some(r);
        }
    }
    let third = Outcome::new(
        sum_error < 1e-12 && fit_error < 0.02 && both_recorded,
        format!(
            "signed sums within {sum_error:.1e}, fitted coefficient within {:.2}%",
            100.0 * fit_error
        ),
    );
    let r = canonical.expect("N = 2 run");
    let fourth = Outcome::new(
        r.first_slope >= ALPHA - 0.1 && r.second_slope >= 1.0 + ALPHA - 0.1,
        format!("slopes {:.3} and {:.3}", r.first_slope, r.second_slope),
    );
    (third, fourth)
}

fn trace_consistency() -> Outcome {
    let cfg = RunConfig::default();
    let mixing = cfg.mixing().expect("canonical config");
    let pi = PseudoInterface::build(&mixing, &cfg.grids.table, &cfg.grids.psi, &cfg.quadrature).expect("interface");
    let v = VelocityContext::new(&mixing, &pi, cfg.quadrature.clone());
    let t = 1e-2;
    let offset = 1e-4;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let s = -4.75 + 0.5 * k as f64;
        let z = v.ladder_interface(1, s, t).expect("ladder");
        let slope = pi.derivs(s, t)[1] + t * mixing.ladder_factor(1) * mixing.speed.derivs(s)[1];
        let normal = v.normal_velocity(1, s, t).expect("normal velocity");
        for side in [1.0, -1.0] {
            let u = v.plane_velocity([s, z + side * offset], t).expect("plane velocity");
            worst = worst.max((u[1] - slope * u[0] - normal).abs());
        }
    }
    Outcome::new(worst < 1e-3, format!("max trace mismatch {worst:.2e} at 20 points"))
}

fn certification() -> Outcome {
    let dir = scratch();
    let r = run_validate(&RunConfig::default(), dir.path()).expect("validate run");
    let a = &r.admissibility;
    let limit_ok = (a.limit_gradient - 1.0 / 6.0).abs() < 1e-12 && a.limit_deviation < 1e-2;
    Outcome::new(
        a.certified
            && a.t_star > 0.0
            && a.margin_at_half > 0.1
            && limit_ok
            && a.jump_residual < 1e-6
            && a.r1_decreasing
            && a.r2_decreasing,
        format!(
            "t* = {}, margin {:.3}, limit deviation {:.1e}, jump {:.1e}, r1/r2 decreasing {}/{}",
            a.t_star, a.margin_at_half, a.limit_deviation, a.jump_residual, a.r1_decreasing, a.r2_decreasing
        ),
    )
}

fn psi_ode() -> Outcome {
    let dir = scratch();
    let flat = run_evolve(&RunConfig::default(), dir.path()).expect("evolve run");
    let zero = flat.mode == SpeedMode::PositiveInf && flat.rows.iter().all(|r| r.psi == [0.0, 0.0]);

    let r = run_evolve(&vanishing_config(), dir.path()).expect("evolve run");
    let ratios = &r.psi_over_t;
    let shrinking = ratios.windows(2).all(|w| w[0] < w[1]);
    let times: Vec<f64> = r.rows[1..].iter().map(|row| row.t).collect();
    let (slope, intercept) = {
        let n = times.len() as f64;
        let mt = times.iter().sum::<f64>() / n;
        let mr = ratios.iter().sum::<f64>() / n;
        let cov: f64 = times.iter().zip(ratios).map(|(t, q)| (t - mt) * (q - mr)).sum();
        let var: f64 = times.iter().map(|t| (t - mt) * (t - mt)).sum();
        let b = cov / var;
        (b, mr - b * mt)
    };
    let peak = ratios.iter().cloned().fold(0.0, f64::max);
    let toward_zero = slope > 0.0 && intercept.abs() < 0.05 * peak;
    Outcome::new(
        zero && r.mode == SpeedMode::Vanishing && r.change < 1e-6 && shrinking && toward_zero,
        format!(
            "zero psi for positive speed: {zero}; halving change {:.1e}; psi/t from {:.2e} to {:.2e}",
            r.change,
            ratios.first().copied().unwrap_or(f64::NAN),
            peak
        ),
    )
}

fn offset_scaling() -> Outcome {
    let z = ProfileCurve {
        beta: 0.0,
        profile: ProfileFunction::rational_bump(0.1, 0.0, 1.0),
    };
    let one = ProfileFunction::Constant(1.0);
    let f = ProfileFunction::rational_bump(1.0, 0.0, 1.0);
    let quad = QuadSpec::default();
    let grid = SamplingGrid::uniform(8.0, 33).expect("grid");

    let norms: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125]
        .iter()
        .map(|&c| {
            let phi = OffsetKernel {
                curve: &z,
                offset: &one,
                scale: c,
                symmetric: false,
            };
            let n = weighted_sup_of(
                |s| t_phi(&phi, &f, 0.0, s, &quad).expect("offset operator").value,
                ALPHA,
                &grid,
            )
            .expect("norm");
            (c, n)
        })
        .collect();
    let scaling = loglog_slope(&norms);

    let c = 1e-3;
    let phi = OffsetKernel {
        curve: &z,
        offset: &one,
        scale: c,
        symmetric: true,
    };
    let limit_error = [0.0, 0.5, -0.5, 2.0]
        .iter()
        .map(|&s| {
            let got = t_phi(&phi, &f, 0.0, s, &quad).expect("offset operator").value / c;
            let want = sigma(z.profile.derivs(s)[1]) * f.derivs(s)[2];
            (got - want).abs() / want.abs()
        })
        .fold(0.0, f64::max);

    let rate = [0.7, -1.5]
        .iter()
        .map(|&s| {
            let limit = offset_pv_limit(&z, s, &quad).expect("limit").value;
            let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125, 0.00625]
                .iter()
                .map(|&c| {
                    (
                        c,
                        (offset_pv_integral(&z, c, s, &quad).expect("integral").value - limit).abs(),
                    )
                })
                .collect();
            loglog_slope(&pts)
        })
        .fold(f64::INFINITY, f64::min);

    Outcome::new(
        scaling >= ALPHA - 0.1 && limit_error < 0.01 && rate >= ALPHA - 0.1,
        format!(
            "offset scaling {scaling:.3}, small-offset limit within {:.2}%, convergence {rate:.3}",
            100.0 * limit_error
        ),
    )
}

fn validate_bytes(out: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_muskat"))
        .arg("--out")
        .arg(out)
        .arg("validate")
        .status()
        .expect("spawn muskat");
    assert!(status.success(), "validate exited with {status}");
    std::fs::read(out.join("validate.json")).expect("validate.json")
}

fn determinism() -> Outcome {
    let (a, b) = (scratch(), scratch());
    let first = validate_bytes(a.path());
    let second = validate_bytes(b.path());
    Outcome::new(
        !first.is_empty() && first == second,
        format!("{} bytes, identical: {}", first.len(), first == second),
    )
}

fn main() -> ExitCode {
    let mut outcomes = Vec::new();
    let (one, two) = identities_and_hilbert();
    outcomes.push(("kernel identity", one));
    outcomes.push(("hilbert pair", two));
    let (three, four) = cbar_and_rates();
    outcomes.push(("curvature coefficient", three));
    outcomes.push(("expansion rates", four));
    outcomes.push(("trace consistency", trace_consistency()));
    outcomes.push(("certification", certification()));
    outcomes.push(("psi ode", psi_ode()));
    outcomes.push(("scaling suites", offset_scaling()));
    outcomes.push(("determinism", determinism()));

    let mut failed = 0;
    for (k, (name, o)) in outcomes.iter().enumerate() {
        println!(
            "criterion {} {name}: {} ({})",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
