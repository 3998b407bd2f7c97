//! Command-line front end.
//!
//! Failures print `{"error": <kind>, "message": <text>}` on stderr and exit with 1;
//! usage errors print clap's usage text and exit with 2.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::{load_config, SimConfig};
use crate::error::{Error, Result};
use crate::ladder::{detect_climbing_sign, ChirpSign, Frame};
use crate::output::{
    crossings_csv, emit_json, emit_summary, emit_trajectory, scan_csv, spectrum_csv, write_atomic, Summary,
};
use crate::propagator::IntegratorSpec;
use crate::scenarios::{calibrate, scan, spread_average, CalibrationSpec, MirrorParams, RunOutcome};
use crate::spectrum::{adiabaticity_rows, dressed_table, locate_crossings};
use crate::units::{convert_units, LabUnits, RecoilParams};

#[derive(Debug, Parser)]
#[command(
    name = "chirped-bragg",
    version,
    about = "Chirped standing-wave momentum ladder simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate a configuration and write the trajectory CSV and summary JSON.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Directory for default output names `<stem>.csv` and `<stem>.summary.json`.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Dressed (adiabatic) energies on a time grid.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Avoided crossings under the pulse with Landau-Zener diagnostics.
    Crossings {
        config: PathBuf,
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one numeric config key.
    Scan {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "range",
            required_unless_present = "range"
        )]
        values: Option<Vec<f64>>,
        /// `start:stop:count`, endpoints included.
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full scan document (metrics plus config snapshot) as JSON.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Search the mirror pulse for the smallest peak Rabi frequency meeting the targets.
    Calibrate {
        #[arg(long, default_value_t = 0.99)]
        target_fidelity: f64,
        #[arg(long, default_value_t = 0.06)]
        max_transient: f64,
        #[arg(long, default_value_t = 0.6)]
        omega_min: f64,
        #[arg(long, default_value_t = 0.8)]
        omega_max: f64,
        #[arg(long, default_value_t = 5)]
        omega_steps: usize,
        #[arg(long, default_value_t = 8.0)]
        ramp_min: f64,
        #[arg(long, default_value_t = 24.0)]
        ramp_max: f64,
        #[arg(long, default_value_t = 3)]
        ramp_steps: usize,
        #[arg(long, default_value_t = 4)]
        refinements: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Laboratory-unit sheet for a recoil frequency, target rung and chirp rate.
    Units {
        #[arg(long)]
        omega_k_hz: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        /// Pulse duration in recoil units; defaults to n crossing periods.
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Chirp-sign check plus a quick invariant subset.
    Selftest,
}

/// Parse `args` (including the program name) and run; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Simulate {
            config,
            trajectory,
            summary,
            out_dir,
        } => simulate(&config, trajectory, summary, &out_dir),
        Command::Spectrum {
            config,
            t_start,
            t_end,
            samples,
            out,
        } => {
            let exp = load_config(&config)?.experiment()?;
            let (a, b) = exp.ladder.pulse_support();
            let window = checked_window(t_start.unwrap_or(a), t_end.unwrap_or(b))?;
            emit_text(
                &spectrum_csv(&dressed_table(&exp.ladder, window, samples)),
                out.as_deref(),
            )
        }
        Command::Crossings {
            config,
            t_start,
            t_end,
            out,
        } => {
            let exp = load_config(&config)?.experiment()?;
            let (a, b) = exp.ladder.pulse_support();
            let window = checked_window(t_start.unwrap_or(a), t_end.unwrap_or(b))?;
            let records = locate_crossings(&exp.ladder, window)?;
            let rows = adiabaticity_rows(&exp.ladder, &records);
            emit_text(&crossings_csv(&records, &rows), out.as_deref())
        }
        Command::Scan {
            config,
            param,
            values,
            range,
            out,
            summary,
        } => {
            let cfg = load_config(&config)?;
            let values = match (values, range) {
                (Some(v), _) => v,
                (None, Some(r)) => parse_range(&r)?,
                (None, None) => unreachable!("clap requires one of --values, --range"),
            };
            let result = scan(&param, &values, cfg.snapshot(), |v| {
                Ok(run_config(&cfg.with_value(&param, v)?)?.metrics)
            })?;
            if let Some(p) = summary {
                emit_json(&result, &p)?;
            }
            emit_text(
                &scan_csv(&result.parameter, &result.values, &result.metrics),
                out.as_deref(),
            )
        }
        Command::Calibrate {
            target_fidelity,
            max_transient,
            omega_min,
            omega_max,
            omega_steps,
            ramp_min,
            ramp_max,
            ramp_steps,
            refinements,
            dt,
            out,
        } => {
            let spec = CalibrationSpec {
                base: MirrorParams {
                    integrator: IntegratorSpec::rk4(dt),
                    ..MirrorParams::default()
                },
                target_fidelity,
                max_transient,
                omega0: (omega_min, omega_max),
                omega0_steps: omega_steps,
                ramp_up: (ramp_min, ramp_max),
                ramp_up_steps: ramp_steps,
                ramp_down: (ramp_min, ramp_max),
                ramp_down_steps: ramp_steps,
                refinements,
            };
            let cal = calibrate(&spec)?;
            let doc = json!({ "spec": spec, "calibration": cal });
            match out {
                Some(p) => emit_json(&doc, &p)?,
                None => println!("{}", serde_json::to_string_pretty(&doc)?),
            }
            Ok(0)
        }
        Command::Units {
            omega_k_hz,
            n,
            alpha,
            duration,
            json,
        } => {
            let sheet = convert_units(&LabUnits::new(omega_k_hz)?, &RecoilParams { n, alpha, duration })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&sheet)?);
            } else {
                println!("recoil frequency     {:.6} kHz", sheet.omega_k_hz * 1e-3);
                println!("target rung          n = {} (momentum {}ħk)", sheet.n, 2 * sheet.n);
                println!("detuning span        {:.6} MHz", sheet.span_hz * 1e-6);
                println!("chirp rate           {:.6} kHz/µs", sheet.chirp_khz_per_us);
                println!("crossing period      {:.6} µs", sheet.crossing_period_s * 1e6);
                println!(
                    "duration             {} = {:.6} µs",
                    sheet.duration,
                    sheet.duration_s * 1e6
                );
                println!("critical spread      {:.6e} ħk", sheet.critical_spread);
            }
            Ok(0)
        }
        Command::Selftest => selftest(),
    }
}

/// Run a configuration, averaging over quasi-momentum when `sigma_q > 0`.
pub fn run_config(cfg: &SimConfig) -> Result<RunOutcome> {
    let exp = cfg.experiment()?;
    if cfg.sigma_q > 0.0 {
        spread_average(&exp, cfg.sigma_q, cfg.q_points)
    } else {
        exp.run()
    }
}

fn simulate(config: &Path, trajectory: Option<PathBuf>, summary: Option<PathBuf>, out_dir: &Path) -> Result<i32> {
    let cfg = load_config(config)?;
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let traj_path = trajectory
        .or_else(|| cfg.trajectory_out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| out_dir.join(format!("{stem}.csv")));
    let summary_path = summary
        .or_else(|| cfg.summary_out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| out_dir.join(format!("{stem}.summary.json")));
    for p in [&traj_path, &summary_path] {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
    }
    let outcome = run_config(&cfg)?;
    emit_trajectory(&outcome.trajectory, &traj_path)?;
    let snapshot = cfg.snapshot();
    emit_summary(
        &Summary {
            config: &snapshot,
            metrics: &outcome.metrics,
            adiabaticity: &outcome.adiabaticity,
            warnings: &outcome.warnings,
            steps: outcome.trajectory.steps,
        },
        &summary_path,
    )?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}",
        json!({
            "fidelity": outcome.metrics.fidelity,
            "targets": outcome.metrics.targets,
            "trajectory": traj_path,
            "summary": summary_path,
        })
    );
    Ok(0)
}

fn checked_window(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::Config(vec![format!("time window [{a}, {b}] is empty")]));
    }
    Ok((a, b))
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<i32> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(0)
}

/// `start:stop:count` with both endpoints.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(vec![format!("--range: expected start:stop:count, got `{spec}`")]);
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    pass: bool,
}

fn check(name: &'static str, value: f64, limit: f64) -> Check {
    Check {
        name,
        value,
        limit,
        pass: value <= limit,
    }
}

fn selftest() -> Result<i32> {
    let sign = detect_climbing_sign();
    let base = MirrorParams {
        target: 3,
        integrator: IntegratorSpec::rk4(2e-3),
        ..MirrorParams::default()
    };
    let rot = base.experiment()?.run()?;
    let bare = MirrorParams {
        frame: Frame::Bare,
        ..base
    }
    .experiment()?
    .run()?;
    let rev = base.experiment()?.reversed()?.run()?;
    let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let rot_p = rot.trajectory.final_populations();
    let mirrored: Vec<f64> = rev.trajectory.final_populations().iter().rev().copied().collect();
    let checks = [
        check("chirp-sign-climbs", (sign != ChirpSign::climbing()) as u8 as f64, 0.0),
        check("norm-conservation", rot.trajectory.max_norm_deviation(), 1e-9),
        check(
            "frame-equivalence",
            max_diff(rot_p, bare.trajectory.final_populations()),
            1e-8,
        ),
        check("chirp-reversal", max_diff(rot_p, &mirrored), 1e-8),
        check("transfer-to-target", 1.0 - rot.metrics.fidelity, 0.05),
    ];
    let ok = checks.iter().all(|c| c.pass);
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "climbing_sign": sign.value(),
            "checks": checks,
            "pass": ok,
        }))?
    );
    Ok(if ok { 0 } else { 1 })
}
