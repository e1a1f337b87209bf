//! Flag parsing and the top-level driver.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{run, Command, CommandError};
use crate::config::{RawConfig, RunConfig};
use crate::{EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "leapfrog",
    version,
    about = "Two-firm competition map: orbits, fixed points, regimes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Time series `n,z,w,x,y` for a single elasticity `c`
    Simulate(Common),
    /// Fixed points `c,z0,w0,residual7a,residual7b,converged`
    FixedPoints(Common),
    /// Bifurcation samples `c,sample_index,z,w,period` over a `c` range
    Bifurcation(Common),
    /// Regime table `a,b,alpha,beta,c,label,period,min_w,lyapunov`
    Classify(Common),
    /// Eigenvalues, critical elasticity and Lyapunov exponent per `c`
    Stability(Common),
}

impl Sub {
    fn split(&self) -> (Command, &Common) {
        match self {
            Sub::Simulate(c) => (Command::Simulate, c),
            Sub::FixedPoints(c) => (Command::FixedPoints, c),
            Sub::Bifurcation(c) => (Command::Bifurcation, c),
            Sub::Classify(c) => (Command::Classify, c),
            Sub::Stability(c) => (Command::Stability, c),
        }
    }
}

/// Flags shared by every subcommand. Values are kept as text and parsed
/// together with the config file so both report errors the same way.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Flat `key = value` config file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Elasticity coefficient
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Comma-separated elasticity values
    #[arg(long, allow_hyphen_values = true)]
    pub c_values: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_c: Option<String>,
    /// Discarded steps before sampling
    #[arg(long, value_name = "N", allow_hyphen_values = true)]
    pub transient: Option<String>,
    /// Retained samples
    #[arg(long, value_name = "N", allow_hyphen_values = true)]
    pub samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed_x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed_y: Option<String>,
    /// Also emit the transient steps (simulate)
    #[arg(long)]
    pub include_transient: bool,
}

impl Common {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let pairs = [
            ("out", &self.out),
            ("format", &self.format),
            ("a", &self.a),
            ("b", &self.b),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("c", &self.c),
            ("c_values", &self.c_values),
            ("c_min", &self.c_min),
            ("c_max", &self.c_max),
            ("n_c", &self.n_c),
            ("transient", &self.transient),
            ("samples", &self.samples),
            ("seed_x", &self.seed_x),
            ("seed_y", &self.seed_y),
        ];
        let mut out: Vec<_> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect();
        if self.include_transient {
            out.push(("include_transient", "true"));
        }
        out
    }

    /// Config file first, then flags on top.
    pub fn resolve(&self) -> Result<RunConfig, crate::ConfigError> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        for (key, value) in self.overrides() {
            raw.set_flag(key, value)?;
        }
        RunConfig::from_raw(&raw)
    }
}

/// Runs the tool and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (cmd, common) = cli.command.split();
    let cfg = match common.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let table = match run(cmd, &cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                CommandError::Config(_) => EXIT_CONFIG,
                CommandError::Diverged { .. } => EXIT_DIVERGED,
            };
        }
    };
    let written = match &cfg.out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            table.write(cfg.format, &mut w)?;
            w.flush()
        }),
        None => table.write(cfg.format, std::io::stdout().lock()),
    };
    match written {
        Ok(()) => EXIT_OK,
        // a closed pipe downstream is not our failure
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: writing output: {e}");
            EXIT_IO
        }
    }
}
