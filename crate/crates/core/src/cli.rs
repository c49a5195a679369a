// Copyright 2026 The spinfriction Authors
// SPDX-License-Identifier: Apache-2.0

//! The `spinfriction` command line.
//!
//! ```text
//! spinfriction sweep   # S(rho2||rho0) and w_fric over a tau grid, per pulse
//! spinfriction bloch   # Bloch trajectory of both legs for one pulse
//! spinfriction gap     # energy gap along the forward leg, per pulse
//! spinfriction run     # one protocol, JSON report
//! ```
//!
//! Settings resolve as command-line flag, then `--config` file, then the
//! built-in default. Exit codes: 0 success, 1 I/O failure, 2 usage error,
//! 3 numerical integrity or convergence failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::protocol::{
    gap_series, run_protocol, sweep_tau, tau_grid, ProtocolConfig, DEFAULT_SAMPLE_STRIDE, DEFAULT_STEPS_PER_LEG,
};
use crate::pulses::PulseShape;
use crate::spin::{ComplexMatrix2, DensityMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spinfriction", version, about = "Internal friction of a driven spin-1/2 in forward-backward protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative entropy and friction work over a grid of total protocol times.
    Sweep(Flags),
    /// Bloch-vector trajectory through both legs of one protocol.
    Bloch(Flags),
    /// Energy gap along the forward leg.
    Gap(Flags),
    /// One protocol run with a JSON report.
    Run(Flags),
}

#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// Static longitudinal field B0.
    #[arg(long, allow_negative_numbers = true)]
    pub b0: Option<f64>,
    /// Initial transverse field B1.
    #[arg(long, allow_negative_numbers = true)]
    pub b1: Option<f64>,
    /// Turning-point transverse field B2.
    #[arg(long, allow_negative_numbers = true)]
    pub b2: Option<f64>,
    /// Inverse temperature of the initial Gibbs state.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Total protocol time (bloch, run).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub tau_min: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub tau_step: Option<f64>,
    /// Comma-separated pulse shapes: sin, pow:<n>.
    #[arg(long)]
    pub pulse: Option<String>,
    /// Integration steps per leg.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Keep every n-th step in trajectory and gap output.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value file using the flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub beta: f64,
    pub tau: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    /// `None` means the subcommand's default pulse set.
    pub pulses: Option<Vec<PulseShape>>,
    pub steps: usize,
    pub stride: usize,
    pub out: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        let cfg = ProtocolConfig::default();
        Self {
            b0: cfg.b0,
            b1: cfg.b1,
            b2: cfg.b2,
            beta: cfg.beta,
            tau: cfg.tau,
            tau_min: 0.5,
            tau_max: 100.0,
            tau_step: 0.5,
            pulses: None,
            steps: DEFAULT_STEPS_PER_LEG,
            stride: DEFAULT_SAMPLE_STRIDE,
            out: None,
        }
    }
}

impl Settings {
    pub fn config(&self, shape: PulseShape) -> ProtocolConfig {
        ProtocolConfig {
            b0: self.b0,
            b1: self.b1,
            b2: self.b2,
            beta: self.beta,
            tau: self.tau,
            shape,
            steps_per_leg: self.steps,
            sample_stride: self.stride,
        }
    }

    fn pulses_or_all(&self) -> Vec<PulseShape> {
        self.pulses.clone().unwrap_or_else(|| PulseShape::PRESETS.to_vec())
    }

    fn single_pulse(&self) -> Result<PulseShape, CliError> {
        match self.pulses.as_deref() {
            None => Ok(PulseShape::Sinusoidal),
            Some([one]) => Ok(*one),
            Some(_) => Err(CliError::Usage("this subcommand takes exactly one pulse".into())),
        }
    }
}

fn parse_pulses(list: &str) -> Result<Vec<PulseShape>, CliError> {
    let shapes = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<PulseShape>())
        .collect::<Result<Vec<_>, _>>()?;
    if shapes.is_empty() {
        return Err(CliError::Usage("empty pulse list".into()));
    }
    Ok(shapes)
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>, CliError> {
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {value:?}")))
}

impl Settings {
    /// Layers config-file entries, then flags, over the defaults.
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let mut entries: Vec<_> = parse_config_file(&text)?.into_iter().collect();
            entries.sort();
            for (key, value) in entries {
                s.apply(&key, &value)?;
            }
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut s.b0, flags.b0);
        set(&mut s.b1, flags.b1);
        set(&mut s.b2, flags.b2);
        set(&mut s.beta, flags.beta);
        set(&mut s.tau, flags.tau);
        set(&mut s.tau_min, flags.tau_min);
        set(&mut s.tau_max, flags.tau_max);
        set(&mut s.tau_step, flags.tau_step);
        if let Some(p) = &flags.pulse {
            s.pulses = Some(parse_pulses(p)?);
        }
        if let Some(n) = flags.steps {
            s.steps = n;
        }
        if let Some(n) = flags.stride {
            s.stride = n;
        }
        if let Some(out) = &flags.out {
            s.out = Some(out.clone());
        }
        Ok(s)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "b0" => self.b0 = parse_value(key, value)?,
            "b1" => self.b1 = parse_value(key, value)?,
            "b2" => self.b2 = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "tau" => self.tau = parse_value(key, value)?,
            "tau-min" => self.tau_min = parse_value(key, value)?,
            "tau-max" => self.tau_max = parse_value(key, value)?,
            "tau-step" => self.tau_step = parse_value(key, value)?,
            "pulse" => self.pulses = Some(parse_pulses(value)?),
            "steps" => self.steps = parse_value(key, value)?,
            "stride" => self.stride = parse_value(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }
}

/// One emitted CSV row.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputRecord {
    Sweep {
        pulse: PulseShape,
        tau: f64,
        relative_entropy: f64,
        friction_work: f64,
    },
    Trajectory {
        leg: Leg,
        t: f64,
        rx: f64,
        ry: f64,
        rz: f64,
        field: f64,
    },
    Gap {
        pulse: PulseShape,
        phase: f64,
        delta_e: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Forward,
    Backward,
}

impl Leg {
    pub fn as_str(&self) -> &'static str {
        match self {
            Leg::Forward => "forward",
            Leg::Backward => "backward",
        }
    }
}

pub const SWEEP_HEADER: &str = "pulse,tau,relative_entropy,friction_work";
pub const BLOCH_HEADER: &str = "leg,t,rx,ry,rz,B";
pub const GAP_HEADER: &str = "pulse,phase,delta_e";

/// 17 significant digits: round-trips every `f64`.
pub fn format_number(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

impl OutputRecord {
    pub fn to_csv(&self) -> String {
        let n = format_number;
        match self {
            OutputRecord::Sweep {
                pulse,
                tau,
                relative_entropy,
                friction_work,
            } => format!("{pulse},{},{},{}", n(*tau), n(*relative_entropy), n(*friction_work)),
            OutputRecord::Trajectory {
                leg,
                t,
                rx,
                ry,
                rz,
                field,
            } => format!("{},{},{},{},{},{}", leg.as_str(), n(*t), n(*rx), n(*ry), n(*rz), n(*field)),
            OutputRecord::Gap { pulse, phase, delta_e } => format!("{pulse},{},{}", n(*phase), n(*delta_e)),
        }
    }
}

fn render(header: &str, rows: &[OutputRecord]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

pub fn sweep_records(settings: &Settings) -> Result<Vec<OutputRecord>, CliError> {
    let grid = tau_grid(settings.tau_min, settings.tau_max, settings.tau_step)?;
    let mut rows = Vec::new();
    for pulse in settings.pulses_or_all() {
        let series = sweep_tau(&settings.config(pulse), &grid)?;
        rows.extend(series.points.iter().map(|p| OutputRecord::Sweep {
            pulse,
            tau: p.tau,
            relative_entropy: p.relative_entropy,
            friction_work: p.friction_work,
        }));
    }
    Ok(rows)
}

pub fn bloch_records(settings: &Settings) -> Result<Vec<OutputRecord>, CliError> {
    let cfg = settings.config(settings.single_pulse()?);
    let result = run_protocol(&cfg)?;
    let offset = 0.5 * cfg.tau;
    let legs = [
        (Leg::Forward, &result.forward_trajectory, 0.0),
        (Leg::Backward, &result.backward_trajectory, offset),
    ];
    Ok(legs
        .into_iter()
        .flat_map(|(leg, traj, t0)| {
            traj.samples.iter().map(move |s| {
                let r = s.state.bloch();
                OutputRecord::Trajectory {
                    leg,
                    t: t0 + s.t,
                    rx: r.rx,
                    ry: r.ry,
                    rz: r.rz,
                    field: s.field,
                }
            })
        })
        .collect())
}

pub fn gap_records(settings: &Settings) -> Result<Vec<OutputRecord>, CliError> {
    let mut rows = Vec::new();
    for pulse in settings.pulses_or_all() {
        for g in gap_series(&settings.config(pulse))? {
            rows.push(OutputRecord::Gap {
                pulse,
                phase: g.phase,
                delta_e: g.delta_e,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    b0: f64,
    b1: f64,
    b2: f64,
    beta: f64,
    tau: f64,
    pulse: String,
    steps_per_leg: usize,
    sample_stride: usize,
}

type MatrixEntries = [[[f64; 2]; 2]; 2];

fn entries(m: &ComplexMatrix2) -> MatrixEntries {
    m.0.map(|row| row.map(|z| [z.re, z.im]))
}

#[derive(Debug, Serialize)]
struct RunReport {
    config: ConfigEcho,
    /// Row-major `[re, im]` pairs.
    rho0: MatrixEntries,
    rho1: MatrixEntries,
    rho2: MatrixEntries,
    relative_entropy: f64,
    friction_work: f64,
    heat_to_bath: f64,
    energy_initial: f64,
    energy_final: f64,
    integrator_error: f64,
}

pub fn run_report(settings: &Settings) -> Result<String, CliError> {
    let cfg = settings.config(settings.single_pulse()?);
    let result = run_protocol(&cfg)?;
    let state = |rho: &DensityMatrix| entries(rho.matrix());
    let report = RunReport {
        config: ConfigEcho {
            b0: cfg.b0,
            b1: cfg.b1,
            b2: cfg.b2,
            beta: cfg.beta,
            tau: cfg.tau,
            pulse: cfg.shape.to_string(),
            steps_per_leg: cfg.steps_per_leg,
            sample_stride: cfg.sample_stride,
        },
        rho0: state(&result.rho0),
        rho1: state(&result.rho1),
        rho2: state(&result.rho2),
        relative_entropy: result.report.relative_entropy,
        friction_work: result.report.friction_work,
        heat_to_bath: result.report.heat_to_bath,
        energy_initial: result.report.energy_initial,
        energy_final: result.report.energy_final,
        integrator_error: result.integrator_error,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.into()))?;
    text.push('\n');
    Ok(text)
}

fn write_output(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => {
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Executes an already-parsed command.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (flags, text) = match command {
        Command::Sweep(f) => {
            let s = Settings::resolve(f)?;
            (s.clone(), render(SWEEP_HEADER, &sweep_records(&s)?))
        }
        Command::Bloch(f) => {
            let s = Settings::resolve(f)?;
            (s.clone(), render(BLOCH_HEADER, &bloch_records(&s)?))
        }
        Command::Gap(f) => {
            let s = Settings::resolve(f)?;
            (s.clone(), render(GAP_HEADER, &gap_records(&s)?))
        }
        Command::Run(f) => {
            let s = Settings::resolve(f)?;
            (s.clone(), run_report(&s)?)
        }
    };
    write_output(flags.out.as_deref(), stdout, &text)
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "spinfriction: {e}");
            e.exit_code()
        }
    }
}
