//! Command-line driver: JSON configuration in, CSV files out.
//!
//! Exit status: 0 success, 2 configuration error, 3 non-generic potential
//! detected by `critical` (or `report`), 4 numerical failure.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{parse_config, ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_GENERIC: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<andloc::Error> for CliError {
    fn from(e: andloc::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0.join("; "))
    }
}

#[derive(Parser, Debug)]
#[command(name = "andloc", version, about = "Localization diagnostics for quasi one-dimensional Anderson-Bernoulli operators")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Also write plot.py next to the CSV files.
    #[arg(long, global = true)]
    pub plot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Print spectral bounds and the energy interval.
    Interval,
    /// Density certificates over an energy grid.
    Certify,
    /// Scan for energies where the bracket closure is deficient.
    Critical,
    /// Lyapunov spectrum over an energy grid.
    Lyapunov,
    /// Integrated density of states from finite restrictions.
    Ids,
    /// Eigenfunction decay fits in an energy window.
    Localize,
    /// Everything above plus a cross-referenced summary.
    Report,
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    let out = cfg.output_dir.clone();
    let code = match cli.command {
        Command::Interval => commands::interval(&cfg, &out).map(|_| EXIT_OK)?,
        Command::Certify => commands::certify(&cfg, &out).map(|_| EXIT_OK)?,
        Command::Critical => {
            let set = commands::critical(&cfg, &out)?;
            if set.non_generic_flag { EXIT_NON_GENERIC } else { EXIT_OK }
        }
        Command::Lyapunov => commands::lyapunov(&cfg, &out).map(|_| EXIT_OK)?,
        Command::Ids => commands::ids(&cfg, &out).map(|_| EXIT_OK)?,
        Command::Localize => commands::localize(&cfg, &out).map(|_| EXIT_OK)?,
        Command::Report => {
            let r = commands::report(&cfg, &out)?;
            if r.critical.non_generic_flag { EXIT_NON_GENERIC } else { EXIT_OK }
        }
    };
    if cli.plot {
        output::write_atomic(&out, "plot.py", output::PLOT_SCRIPT.as_bytes())?;
    }
    Ok(code)
}

/// Parses `args` (program name first), runs the subcommand, and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("configuration error: cannot start {} threads: {e}", cli.threads);
            return EXIT_CONFIG;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
