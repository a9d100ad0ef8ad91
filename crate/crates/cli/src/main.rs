// SPDX-License-Identifier: Apache-2.0

//! `cavent`: photocurrent spectra, entanglement sweeps, single-point reports
//! and calibration of the coupling scale.
//!
//! Exit codes: 0 success, 1 runtime error, 2 configuration error,
//! 3 calibration failure.

mod config;
mod plot;
mod report;
mod selfcheck;
mod term;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavent_core::photodiode::photocurrent_spectrum;
use cavent_core::sweep::{calibrate_defaults, run_point, run_sweep, write_csv, write_spectrum_csv, SweepRow};
use cavent_core::Error;
use clap::{Parser, Subcommand};

use config::{resolve, RunConfig, Sources};
use plot::{Figure, Series};

#[derive(Parser, Debug)]
#[command(name = "cavent", version, about = "Optical/microwave cavity entanglement through an optoelectronic cross-Kerr coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file, applied over the preset.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for sweeps; output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Built-in figure preset: fig2, fig3, fig4 or fig5.
    #[arg(long, global = true)]
    preset: Option<String>,

    /// Render SVG plots.
    #[arg(long, global = true, overrides_with = "no_plot")]
    plot: bool,

    /// Skip SVG plots.
    #[arg(long = "no-plot", global = true, overrides_with = "plot")]
    no_plot: bool,

    /// Dotted-path override, e.g. `--set mw.kappa=6.283e6`. Repeatable;
    /// applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Photocurrent spectrum over photon energy, one curve per temperature.
    Photocurrent {
        /// Temperatures in K (comma separated); overrides `spectrum.temperatures`.
        #[arg(long, value_delimiter = ',')]
        temps: Option<Vec<f64>>,
    },
    /// Sweep 2 eta over one or two axes.
    Entangle,
    /// Full report for the configured operating point.
    Point,
    /// Search q_scale so the fig3 resonant and off-resonant checks hold, and write a calibration record.
    Calibrate,
    /// Run the built-in physics self-test.
    Check,
}

enum Failure {
    Config(String),
    Runtime(String),
    Calibration(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 2,
            Failure::Calibration(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Calibration(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

struct Run {
    config: RunConfig,
    workers: usize,
}

impl Run {
    fn out_dir(&self) -> Result<&Path, Failure> {
        let dir = self.config.output.dir.as_path();
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        Ok(dir)
    }

    /// Writes the fully resolved config next to the outputs.
    fn echo_config(&self) -> Result<(), Failure> {
        let path = self.out_dir()?.join("resolved.toml");
        fs::write(&path, self.config.to_toml()).map_err(|e| io_failure(&path, e))
    }

    fn plot(&self, name: &str, fig: Figure) -> Result<(), Failure> {
        if !self.config.output.plot {
            return Ok(());
        }
        let path = self.out_dir()?.join(name);
        if let Err(e) = plot::render(&path, &fig) {
            term::warn(&format!("plot {} not written: {e}", path.display()));
        }
        Ok(())
    }
}

fn resolve_run(cli: &Cli) -> Result<Run, Failure> {
    let sources = Sources {
        preset: cli.preset.as_deref(),
        file: cli.config.as_deref(),
        sets: &cli.sets,
    };
    let mut config = resolve(&sources).map_err(Failure::Config)?;
    if let Some(dir) = &cli.out {
        config.output.dir = dir.clone();
    }
    if cli.plot {
        config.output.plot = true;
    }
    if cli.no_plot {
        config.output.plot = false;
    }
    if let Command::Photocurrent { temps: Some(t) } = &cli.command {
        if t.is_empty() || t.iter().any(|x| x.is_nan() || *x < 0.0) {
            return Err(Failure::Config(format!("--temps must be non-negative, got {t:?}")));
        }
        config.spectrum.temperatures = t.clone();
    }
    let workers = match cli.workers {
        Some(0) => return Err(Failure::Config("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(Run { config, workers })
}

fn cmd_photocurrent(run: &Run) -> Result<(), Failure> {
    let cfg = &run.config;
    let ledger = cfg.ledger();
    let energies = cfg.spectrum.energies_ev.values().map_err(Failure::Config)?;
    let temps = &cfg.spectrum.temperatures;
    let drive = ledger.optical_drive()?;
    let rows = photocurrent_spectrum(&energies, temps, &ledger.material()?, drive.a0_sq, ledger.coupling.n_abs)?;

    let path = run.out_dir()?.join("photocurrent.csv");
    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
    write_spectrum_csv(&rows, BufWriter::new(file))?;
    run.echo_config()?;

    let series = temps
        .iter()
        .map(|&t| Series {
            label: format!("T = {t} K"),
            points: rows
                .iter()
                .filter(|r| r.temperature == t)
                .map(|r| (r.energy_ev, Some(r.current * 1e6)))
                .collect(),
        })
        .collect();
    run.plot(
        "photocurrent.svg",
        Figure {
            title: "Photocurrent",
            x_label: "photon energy (eV)",
            y_label: "photocurrent (uA)",
            series,
            reference: None,
        },
    )?;
    term::info(&format!("wrote {} ({} rows)", path.display(), rows.len()));
    Ok(())
}

fn entangle_figure<'a>(rows: &[SweepRow], spec: &cavent_core::sweep::SweepSpec, x_label: &'a str) -> Figure<'a> {
    let series_values: Vec<Option<f64>> = match spec.axes.get(1) {
        Some(axis) => axis.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let series = series_values
        .into_iter()
        .map(|sv| Series {
            label: match (sv, spec.axes.get(1)) {
                (Some(v), Some(axis)) => format!("{} = {v} {}", axis.name, axis.name.unit()),
                _ => "2 eta".into(),
            },
            points: rows
                .iter()
                .filter(|r| sv.is_none_or(|v| r.coords[1] == v))
                .map(|r| (r.coords[0], r.result.two_eta))
                .collect(),
        })
        .collect();
    Figure {
        title: "Gaussian entanglement: 2 eta (entangled below 1)",
        x_label,
        y_label: "2 eta",
        series,
        reference: Some(1.0),
    }
}

fn cmd_entangle(run: &Run) -> Result<(), Failure> {
    let spec = run.config.sweep_spec().map_err(Failure::Config)?;
    let rows = run_sweep(&spec, run.workers)?;
    let path = run.out_dir()?.join("entangle.csv");
    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
    write_csv(&rows, &spec.axes, BufWriter::new(file))?;
    run.echo_config()?;

    let x_label = format!("{} ({})", spec.axes[0].name, spec.axes[0].name.unit());
    run.plot("entangle.svg", entangle_figure(&rows, &spec, &x_label))?;
    let flagged = rows.iter().filter(|r| !r.result.stable).count();
    term::info(&format!(
        "wrote {} ({} rows, {flagged} without a stationary state)",
        path.display(),
        rows.len()
    ));
    Ok(())
}

fn cmd_point(run: &Run) -> Result<(), Failure> {
    let result = run_point(&run.config.ledger())?;
    print!("{}", report::point_report(&result));
    let path = run.out_dir()?.join("point.toml");
    fs::write(&path, report::point_record(&result)?).map_err(|e| io_failure(&path, e))?;
    run.echo_config()
}

fn cmd_calibrate(run: &Run) -> Result<(), Failure> {
    let ledger = run.config.ledger();
    let outcome = calibrate_defaults(&ledger, &run.config.calibration, run.workers);
    let (record, failure) = match outcome {
        Ok(r) => (r, None),
        Err(Error::CalibrationFailure { nearest }) => {
            let msg = Error::CalibrationFailure { nearest: nearest.clone() }.to_string();
            (*nearest, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };
    let path = run.out_dir()?.join("calibration.toml");
    fs::write(&path, record.to_text()?).map_err(|e| io_failure(&path, e))?;
    run.echo_config()?;
    term::info(&format!(
        "wrote {} (q_scale = {:e}, {} failed checks)",
        path.display(),
        record.q_scale,
        record.failed_checks
    ));
    match failure {
        Some(msg) => Err(Failure::Calibration(msg)),
        None => Ok(()),
    }
}

fn cmd_check() -> Result<(), Failure> {
    let results = selfcheck::run_all();
    let mut failed = 0;
    for c in &results {
        term::status(c.passed, &format!("{}: {}", c.name, c.detail));
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} of {} self-checks failed", results.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check => cmd_check(),
        cmd => resolve_run(&cli).and_then(|run| match cmd {
            Command::Photocurrent { .. } => cmd_photocurrent(&run),
            Command::Entangle => cmd_entangle(&run),
            Command::Point => cmd_point(&run),
            Command::Calibrate => cmd_calibrate(&run),
            Command::Check => unreachable!(),
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let kind = match f {
                Failure::Config(_) => "config error",
                Failure::Runtime(_) => "error",
                Failure::Calibration(_) => "error",
            };
            term::error(kind, f.message().trim_end());
            ExitCode::from(f.code())
        }
    }
}
