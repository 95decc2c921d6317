//! Command-line front end over scenario files.
//!
//! Exit codes: 0 success, 1 other error, 2 non-linear constraints for
//! `analyze`, 3 parse error, 4 inconclusive certification, 5 failed
//! verification, 6 dimension mismatch.

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{analyze_with, rho};
use crate::error::{Error, Result};
use crate::scenario::{Overrides, ScenarioFile};
use crate::synth::{certify_ir_pair, synthesize_kernel_bump, synthesize_loop_through_r, CertifyOptions};
use crate::trajectory::{admissible, boundary_residence_with_breaks, simulate, FloatSystem, SampledSignal, TrajectoryTriple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_NONLINEAR: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;
pub const EXIT_DIMENSION: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "ir-redundancy", version, about = "Input redundancy analysis and certification for constrained LTI systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario files; several files are processed independently.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Output file (or directory when several files are given).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for multiple files.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    /// Grid step overriding the scenario.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon overriding the scenario.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Initial state as comma-separated numbers.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Name of the input signal in the scenario.
    #[arg(long)]
    pub nominal: Option<String>,
}

impl TrajectoryArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            dt: self.dt,
            horizon: self.horizon,
            x0: self.x0.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact kind and degree of redundancy (linear constraints only).
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Use the R, F, L matrices pinned in the scenario.
        #[arg(long)]
        pin_bases: bool,
        /// Human-readable report instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Certify that (x0, y) is an IR pair along a nominal input.
    Certify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        traj: TrajectoryArgs,
        /// Bound on the output deviation of the increment.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Report the boundary-residence test when inconclusive.
        #[arg(long)]
        boundary_residence: bool,
    },
    /// Simulate a scenario input and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        traj: TrajectoryArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Build an output-invisible increment on a window and write it as CSV.
    Synthesize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        traj: TrajectoryArgs,
        /// Window as `t1,t2`; defaults to the whole horizon.
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<f64>>,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonLinearConstraints => EXIT_NONLINEAR,
        Error::Parse(_) | Error::Json(_) => EXIT_PARSE,
        Error::NoInteriorWindow => EXIT_INCONCLUSIVE,
        Error::VerificationFailed { .. } => EXIT_VERIFICATION,
        Error::DimensionMismatch { .. } => EXIT_DIMENSION,
        _ => EXIT_OTHER,
    }
}

/// What a subcommand produced for one file.
struct Outcome {
    code: i32,
    body: String,
    extension: &'static str,
    /// Written next to the main output, or to stderr without `--out`.
    side: Option<String>,
}

impl Outcome {
    fn ok(body: String, extension: &'static str) -> Self {
        Self {
            code: EXIT_OK,
            body,
            extension,
            side: None,
        }
    }

    fn from_error(err: &Error) -> Self {
        Self {
            code: exit_code(err),
            body: String::new(),
            extension: "json",
            side: Some(format!("error: {err}")),
        }
    }
}

type Job<'a> = Box<dyn Fn(&Path) -> Outcome + Sync + 'a>;

pub fn run(cli: Cli) -> i32 {
    let (common, job): (&Common, Job) = match &cli.command {
        Command::Analyze { common, pin_bases, text } => {
            let (pin, text) = (*pin_bases, *text);
            (common, Box::new(move |p| analyze_file(p, pin, text)))
        }
        Command::Certify {
            common,
            traj,
            tol,
            boundary_residence,
        } => (common, Box::new(move |p| certify_file(p, traj, *tol, *boundary_residence))),
        Command::Simulate { common, traj, tol } => (common, Box::new(move |p| simulate_file(p, traj, *tol))),
        Command::Synthesize { common, traj, window } => {
            (common, Box::new(move |p| synthesize_file(p, traj, window.as_deref())))
        }
    };
    let outcomes: Vec<Outcome> = if common.files.len() > 1 && common.jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(common.jobs).build() {
            Ok(pool) => pool.install(|| common.files.par_iter().map(|p| job(p)).collect()),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_OTHER;
            }
        }
    } else {
        common.files.iter().map(|p| job(p)).collect()
    };
    let mut worst = EXIT_OK;
    for (path, outcome) in common.files.iter().zip(&outcomes) {
        if let Err(e) = emit(path, outcome, common) {
            eprintln!("error: {e}");
            worst = worst.max(EXIT_OTHER);
        }
        worst = worst.max(outcome.code);
    }
    worst
}

fn emit(path: &Path, outcome: &Outcome, common: &Common) -> Result<()> {
    let target = match &common.out {
        None => None,
        Some(out) if common.files.len() > 1 => {
            std::fs::create_dir_all(out)?;
            let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
            Some(out.join(format!("{stem}.{}", outcome.extension)))
        }
        Some(out) => Some(out.clone()),
    };
    match target {
        Some(file) => {
            if !outcome.body.is_empty() {
                std::fs::write(&file, &outcome.body)?;
            }
            if let Some(side) = &outcome.side {
                if outcome.code == EXIT_OK || !outcome.body.is_empty() {
                    let mut name = file.into_os_string();
                    name.push(".summary.json");
                    std::fs::write(PathBuf::from(name), side)?;
                } else {
                    eprintln!("{}: {side}", path.display());
                }
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(outcome.body.as_bytes())?;
            if let Some(side) = &outcome.side {
                eprintln!("{}: {side}", path.display());
            }
        }
    }
    Ok(())
}

fn analyze_file(path: &Path, pin: bool, text: bool) -> Outcome {
    let run = || -> Result<String> {
        let file = ScenarioFile::load(path)?;
        let pinned = if pin { file.pinned() } else { None };
        let report = analyze_with(&file.system, &file.constraints.u, &file.constraints.x, pinned)?;
        if text {
            Ok(report.to_text())
        } else {
            Ok(serde_json::to_string_pretty(&report)? + "\n")
        }
    };
    match run() {
        Ok(body) => Outcome::ok(body, if text { "txt" } else { "json" }),
        Err(e) => Outcome::from_error(&e),
    }
}

fn certify_file(path: &Path, traj: &TrajectoryArgs, tol: f64, residence: bool) -> Outcome {
    let file = match ScenarioFile::load(path) {
        Ok(f) => f,
        Err(e) => return Outcome::from_error(&e),
    };
    let opts = CertifyOptions {
        tol,
        ..CertifyOptions::default()
    };
    let prepared = (|| -> Result<_> {
        let ov = traj.overrides();
        let grid = file.grid(&ov)?;
        let x0 = file.x0(&ov)?;
        let (_, u) = file.signal(traj.nominal.as_deref(), &grid)?;
        Ok((x0, u))
    })();
    let (x0, u) = match prepared {
        Ok(v) => v,
        Err(e) => return Outcome::from_error(&e),
    };
    match certify_ir_pair(&file.system, &file.constraints.u, &file.constraints.x, &x0, &u, &opts) {
        Ok(cert) => match serde_json::to_string_pretty(&cert) {
            Ok(body) => Outcome::ok(body + "\n", "json"),
            Err(e) => Outcome::from_error(&e.into()),
        },
        Err(Error::NoInteriorWindow) => {
            let mut report = json!({
                "status": "inconclusive",
                "reason": Error::NoInteriorWindow.to_string(),
            });
            if residence {
                let verdict = (|| -> Result<bool> {
                    let fsys = FloatSystem::from(&file.system);
                    let nominal = simulate(&fsys, &x0, &u)?;
                    let r = rho(file.system.b(), file.system.d())?;
                    boundary_residence_with_breaks(
                        &nominal,
                        &file.constraints.u,
                        &file.constraints.x,
                        r,
                        opts.membership_tol,
                        file.breakpoints(),
                    )
                })();
                match verdict {
                    Ok(b) => report["boundary_residence"] = json!(b),
                    Err(e) => return Outcome::from_error(&e),
                }
            }
            Outcome {
                code: EXIT_INCONCLUSIVE,
                body: serde_json::to_string_pretty(&report).unwrap_or_default() + "\n",
                extension: "json",
                side: None,
            }
        }
        Err(e) => Outcome::from_error(&e),
    }
}

fn triple_csv(triple: &TrajectoryTriple) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=triple.u.dim()).map(|i| format!("u{i}")));
    header.extend((1..=triple.x.dim()).map(|i| format!("x{i}")));
    header.extend((1..=triple.y.dim()).map(|i| format!("y{i}")));
    w.write_record(&header)?;
    for k in 0..triple.u.len() {
        let mut row = vec![triple.u.time(k).to_string()];
        for s in [&triple.u, &triple.x, &triple.y] {
            row.extend(s.values()[k].iter().map(f64::to_string));
        }
        w.write_record(&row)?;
    }
    into_string(w)
}

fn signals_csv(names: &[&str], signals: &[&SampledSignal]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    for (name, s) in names.iter().zip(signals) {
        header.extend((1..=s.dim()).map(|i| format!("{name}{i}")));
    }
    w.write_record(&header)?;
    for k in 0..signals[0].len() {
        let mut row = vec![signals[0].time(k).to_string()];
        for s in signals {
            row.extend(s.values()[k].iter().map(f64::to_string));
        }
        w.write_record(&row)?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn simulate_file(path: &Path, traj: &TrajectoryArgs, tol: f64) -> Outcome {
    let run = || -> Result<(String, String)> {
        let file = ScenarioFile::load(path)?;
        let ov = traj.overrides();
        let grid = file.grid(&ov)?;
        let x0 = file.x0(&ov)?;
        let (name, u) = file.signal(traj.nominal.as_deref(), &grid)?;
        let triple = simulate(&FloatSystem::from(&file.system), &x0, &u)?;
        let adm = admissible(&triple, &file.constraints.u, &file.constraints.x, tol)?;
        let summary = json!({
            "input": name,
            "x0": x0.iter().collect::<Vec<_>>(),
            "dt": grid.dt,
            "steps": grid.steps,
            "admissible": adm.ok,
            "first_violation": adm.first_violation,
        });
        Ok((triple_csv(&triple)?, serde_json::to_string_pretty(&summary)? + "\n"))
    };
    match run() {
        Ok((csv, summary)) => Outcome {
            side: Some(summary),
            ..Outcome::ok(csv, "csv")
        },
        Err(e) => Outcome::from_error(&e),
    }
}

fn synthesize_file(path: &Path, traj: &TrajectoryArgs, window: Option<&[f64]>) -> Outcome {
    let run = || -> Result<(String, String)> {
        let file = ScenarioFile::load(path)?;
        let grid = file.grid(&traj.overrides())?;
        let window = match window {
            None => (grid.t0, grid.end_time()),
            Some([t1, t2]) => (*t1, *t2),
            Some(_) => return Err(Error::Parse("window needs exactly two times".into())),
        };
        let sys = &file.system;
        let (csv, route) = if rho(sys.b(), sys.d())? > 0 {
            let u_hat = synthesize_kernel_bump(sys.b(), sys.d(), window, &grid)?;
            (signals_csv(&["u_hat"], &[&u_hat])?, "KernelBump")
        } else {
            let (u_hat, x_hat) = synthesize_loop_through_r(sys, window, &grid)?;
            (signals_csv(&["u_hat", "x_hat"], &[&u_hat, &x_hat])?, "LoopThroughR")
        };
        let summary = json!({"route": route, "window": [window.0, window.1]});
        Ok((csv, serde_json::to_string_pretty(&summary)? + "\n"))
    };
    match run() {
        Ok((csv, summary)) => Outcome {
            side: Some(summary),
            ..Outcome::ok(csv, "csv")
        },
        Err(e) => Outcome::from_error(&e),
    }
}
