//! Command-line experiment runner.
//!
//! Every verb reads an optional TOML config, applies flag overrides,
//! validates the result and writes one report. Exit codes: 0 success,
//! 1 I/O failure, 2 validation failure, 3 numeric non-convergence.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::FracParams;

pub use commands::execute;
pub use report::{build_id, sig12, Format, Report, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "frac-yamabe", version, about = "Fractional Yamabe numerical experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Constants,
    SolvabilityScan,
    SphereYamabe,
    BubbleCheck,
    ExtensionDemo,
    HalfspaceSolve,
    HopfCheck,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Constants => "constants",
            Self::SolvabilityScan => "solvability-scan",
            Self::SphereYamabe => "sphere-yamabe",
            Self::BubbleCheck => "bubble-check",
            Self::ExtensionDemo => "extension-demo",
            Self::HalfspaceSolve => "halfspace-solve",
            Self::HopfCheck => "hopf-check",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Closed-form constants per (n, gamma); gamma = 1 allowed.
    Constants(Flags),
    /// Sign of theta-hat over an n-range and gamma-grid.
    SolvabilityScan(Flags),
    /// Subcritical fixed-point solves on the round sphere.
    SphereYamabe(Flags),
    /// Sobolev quotient of the bubble against 1/S-bar.
    BubbleCheck(Flags),
    /// Half-strip error table for one cosine mode under refinement.
    ExtensionDemo(Flags),
    /// One half-strip Dirichlet solve of a cosine mode.
    HalfspaceSolve(Flags),
    /// Weighted normal derivative at the zero of 1 - cos(2 pi x/L).
    HopfCheck(Flags),
}

impl Verb {
    fn split(self) -> (CommandKind, Flags) {
        match self {
            Verb::Constants(f) => (CommandKind::Constants, f),
            Verb::SolvabilityScan(f) => (CommandKind::SolvabilityScan, f),
            Verb::SphereYamabe(f) => (CommandKind::SphereYamabe, f),
            Verb::BubbleCheck(f) => (CommandKind::BubbleCheck, f),
            Verb::ExtensionDemo(f) => (CommandKind::ExtensionDemo, f),
            Verb::HalfspaceSolve(f) => (CommandKind::HalfspaceSolve, f),
            Verb::HopfCheck(f) => (CommandKind::HopfCheck, f),
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Dimension(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Fractional order(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Zonal band limit K.
    #[arg(long = "band-limit")]
    pub band_limit: Option<usize>,
    /// Half-strip grid as nx,ny.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub grid: Vec<usize>,
    /// Subcritical exponent(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bubble scale.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Cosine mode number on the half-strip.
    #[arg(long)]
    pub mode: Option<u32>,
    /// Amplitude of the random perturbation of the constant initial field.
    #[arg(long)]
    pub perturb: Option<f64>,
    /// Where to save the solved field (.bin or .csv).
    #[arg(long = "field-out")]
    pub field_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    command: Option<CommandKind>,
    n: Option<OneOrMany<u32>>,
    gamma: Option<OneOrMany<f64>>,
    band_limit: Option<usize>,
    grid: Option<Vec<usize>>,
    beta: Option<OneOrMany<f64>>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    mu: Option<f64>,
    seed: Option<u64>,
    mode: Option<u32>,
    perturb: Option<f64>,
    field_out: Option<PathBuf>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub n: Vec<u32>,
    pub gamma: Vec<f64>,
    pub band_limit: usize,
    pub grid: (usize, usize),
    pub beta: Vec<f64>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub mu: f64,
    pub seed: u64,
    pub mode: u32,
    pub perturb: f64,
    pub field_out: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| invalid(format!("config {}: {e}", path.display())))
}

fn pick<T>(flag: Vec<T>, file: Option<OneOrMany<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag
    } else {
        file.map(Vec::from).unwrap_or(default)
    }
}

fn single<T: Copy + std::fmt::Debug>(name: &str, v: &[T]) -> Result<T> {
    match v {
        [x] => Ok(*x),
        _ => Err(invalid(format!("this command takes exactly one {name}, got {v:?}"))),
    }
}

impl ExperimentConfig {
    /// Merge config file and flags, then validate against the command's schema.
    pub fn resolve(command: CommandKind, flags: Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        if let Some(c) = file.command {
            if c != command {
                return Err(invalid(format!(
                    "config is for '{}', invoked as '{}'",
                    c.name(),
                    command.name()
                )));
            }
        }
        use CommandKind::*;
        let default_n = match command {
            SolvabilityScan => (2..=10).collect(),
            _ => vec![3],
        };
        let default_gamma = match command {
            SolvabilityScan => (1..=9).map(|k| k as f64 / 10.0).collect(),
            _ => vec![0.5],
        };
        let default_grid = match command {
            ExtensionDemo | HalfspaceSolve => (256, 256),
            _ => (128, 128),
        };
        let default_tol = match command {
            SphereYamabe => 1e-10,
            HopfCheck => 1e-8,
            _ => 1e-12,
        };
        let grid = if !flags.grid.is_empty() { Some(flags.grid) } else { file.grid };
        let grid = match grid.as_deref() {
            None => default_grid,
            Some([nx, ny]) => (*nx, *ny),
            Some(g) => return Err(invalid(format!("grid must be nx,ny, got {g:?}"))),
        };
        let cfg = Self {
            command,
            n: pick(flags.n, file.n, default_n),
            gamma: pick(flags.gamma, file.gamma, default_gamma),
            band_limit: flags.band_limit.or(file.band_limit).unwrap_or(32),
            grid,
            beta: pick(flags.beta, file.beta, vec![2.0, 2.4, 2.8]),
            tol: flags.tol.or(file.tol).unwrap_or(default_tol),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or_default(),
            mu: flags.mu.or(file.mu).unwrap_or(1.0),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            mode: flags.mode.or(file.mode).unwrap_or(1),
            perturb: flags.perturb.or(file.perturb).unwrap_or(0.0),
            field_out: flags.field_out.or(file.field_out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        use CommandKind::*;
        if self.n.is_empty() || self.gamma.is_empty() {
            return Err(invalid("need at least one n and one gamma"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        match self.command {
            Constants => {
                for &n in &self.n {
                    for &g in &self.gamma {
                        FracParams::with_endpoint(n, g)?;
                    }
                }
            }
            SolvabilityScan => {
                if let Some(g) = self.gamma.iter().find(|g| !(**g > 0.0 && **g < 1.0)) {
                    return Err(invalid(format!("gamma must lie in (0, 1), got {g}")));
                }
                if self.n.contains(&0) {
                    return Err(invalid("n must be positive"));
                }
            }
            SphereYamabe => {
                let p = self.params()?;
                if self.band_limit == 0 {
                    return Err(invalid("band limit must be at least 1"));
                }
                let ts = p.two_star();
                if let Some(b) = self.beta.iter().find(|b| !(**b >= 2.0 && **b < ts)) {
                    return Err(invalid(format!("beta must lie in [2, {ts}), got {b}")));
                }
                if !(self.perturb >= 0.0 && self.perturb < 1.0) {
                    return Err(invalid(format!("perturb must lie in [0, 1), got {}", self.perturb)));
                }
            }
            BubbleCheck => {
                self.params()?;
                if !(self.mu > 0.0 && self.mu.is_finite()) {
                    return Err(invalid(format!("mu must be positive, got {}", self.mu)));
                }
            }
            ExtensionDemo | HalfspaceSolve | HopfCheck => {
                self.params()?;
                let (nx, ny) = self.grid;
                if nx < 4 || ny < 4 || nx > 1 << 14 || ny > 1 << 14 {
                    return Err(invalid(format!("grid sizes must lie in [4, 16384], got {nx}x{ny}")));
                }
                if self.command == ExtensionDemo && (nx < 16 || ny < 16) {
                    return Err(invalid("extension-demo needs a grid of at least 16x16"));
                }
                if self.mode == 0 || self.mode as usize >= nx / 2 {
                    return Err(invalid(format!("mode must lie in [1, nx/2), got {}", self.mode)));
                }
            }
        }
        Ok(())
    }

    /// The single `(n, γ)` of a one-point command.
    pub fn params(&self) -> Result<FracParams> {
        FracParams::new(single("n", &self.n)?, single("gamma", &self.gamma)?)
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

/// Resolve, execute and emit; returns the process exit code.
pub fn run_verb(verb: Verb) -> i32 {
    let (kind, flags) = verb.split();
    let result = ExperimentConfig::resolve(kind, flags).and_then(|cfg| {
        let report = execute(&cfg)?;
        report.emit(cfg.format, cfg.out.as_deref())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("frac-yamabe {}: {e}", kind.name());
            exit_code(&e)
        }
    }
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_verb(cli.command),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            }
        }
    }
}
