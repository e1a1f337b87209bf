//! Flat `key = value` run configuration with command-line overrides.
//!
//! ```text
//! # fig6.cfg
//! a = 0.7
//! b = 0.45
//! alpha = 0.7
//! beta = 0.4
//! c = 150
//! c_values = 10, 20, 150
//! ```
//!
//! Blank lines and lines starting with `#` or `;` are ignored. Unknown keys
//! and repeated keys are rejected. Flags replace file values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use leapfrog_core::orbits::{
    DEFAULT_DEADBAND, DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL, DEFAULT_SEED,
};
use leapfrog_core::stability::DEFAULT_LYAPUNOV_SAMPLES;
use leapfrog_core::{to_diffsum, ClassifyOptions, Config, Params, PeriodOptions, Sales, ScanGrid};

pub const KEYS: &[&str] = &[
    "a",
    "b",
    "alpha",
    "beta",
    "c",
    "c_values",
    "c_min",
    "c_max",
    "n_c",
    "transient",
    "samples",
    "seed_x",
    "seed_y",
    "divergence_bound",
    "include_transient",
    "deadband",
    "period_tol",
    "max_period",
    "lyapunov_samples",
    "scan_min",
    "scan_max",
    "scan_points",
    "format",
    "out",
];

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File { path: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::File { path, line } => write!(f, "{}:{line}", path.display()),
            Source::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub source: Option<Source>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(source: &Source, field: &str, message: impl Into<String>) -> Self {
        Self {
            source: Some(source.clone()),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            source: None,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = &self.source {
            write!(f, "{s}: ")?;
        }
        if let Some(k) = &self.field {
            write!(f, "field `{k}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Untyped key/value pairs in the order of precedence they were applied.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, (String, Source)>,
}

impl RawConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let source = Source::File {
                path: path.to_path_buf(),
                line: i + 1,
            };
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError {
                    source: Some(source),
                    field: None,
                    message: format!("expected `key = value`, got `{trimmed}`"),
                });
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::at(&source, key, "unknown key"));
            }
            if let Some((_, first)) = raw.values.get(key) {
                return Err(ConfigError::at(
                    &source,
                    key,
                    format!("repeated key, first set at {first}"),
                ));
            }
            raw.values
                .insert(key.to_string(), (value.trim().to_string(), source));
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source: None,
            field: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text, path)
    }

    /// Sets `key` from a command-line flag, replacing any file value.
    pub fn set_flag(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::field(key, "unknown key"));
        }
        self.values
            .insert(key.to_string(), (value.into(), Source::Flag));
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some((text, source)) => text.parse().map(Some).map_err(|_| {
                ConfigError::at(
                    source,
                    key,
                    format!("cannot parse `{text}` as {}", std::any::type_name::<T>()),
                )
            }),
        }
    }

    fn source(&self, key: &str) -> Option<&Source> {
        self.values.get(key).map(|(_, s)| s)
    }

    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        match self.source(key) {
            Some(s) => ConfigError::at(s, key, message),
            None => ConfigError::field(key, message),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.get(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(self.error(key, "must be finite")),
            other => Ok(other),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some((text, source)) = self.values.get(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for item in text.split(',') {
            let item = item.trim();
            match item.parse::<f64>() {
                Ok(x) if x.is_finite() => out.push(x),
                _ => {
                    return Err(ConfigError::at(
                        source,
                        key,
                        format!("cannot parse `{item}` as a finite number"),
                    ))
                }
            }
        }
        Ok(Some(out))
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.values.get(key) {
            None => Ok(false),
            Some((text, source)) => match text.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(ConfigError::at(
                    source,
                    key,
                    format!("expected a boolean, got `{text}`"),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub c_min: f64,
    pub c_max: f64,
    pub n_c: usize,
}

pub const DEFAULT_SWEEP: SweepRange = SweepRange {
    c_min: 0.0,
    c_max: 200.0,
    n_c: 800,
};
pub const DEFAULT_PLOTTED_SAMPLES: usize = 200;

/// Validated configuration for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Model parameters; `c` is zero when the file gives none.
    pub model: Params,
    pub c: Option<f64>,
    pub c_values: Option<Vec<f64>>,
    pub sweep: Option<SweepRange>,
    pub orbit: Config,
    /// `samples` was given explicitly.
    pub samples_set: bool,
    pub include_transient: bool,
    pub classify: ClassifyOptions<f64>,
    pub scan: ScanGrid<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let required = |key: &str| -> Result<f64, ConfigError> {
            raw.number(key)?
                .ok_or_else(|| ConfigError::field(key, "missing required value"))
        };
        let (a, b, alpha, beta) = (
            required("a")?,
            required("b")?,
            required("alpha")?,
            required("beta")?,
        );
        let c = raw.number("c")?;
        let model = Params::new(a, b, alpha, beta, c.unwrap_or(0.0)).map_err(|e| {
            let key = match &e {
                leapfrog_core::Error::InvalidParameter { name, .. } => *name,
                _ => "a",
            };
            raw.error(key, e.to_string())
        })?;

        let c_values = raw.list("c_values")?;
        if let Some(cs) = &c_values {
            if cs.iter().any(|c| *c < 0.0) {
                return Err(raw.error("c_values", "elasticity values must be >= 0"));
            }
        }

        let sweep = match (
            raw.number("c_min")?,
            raw.number("c_max")?,
            raw.get::<usize>("n_c")?,
        ) {
            (None, None, None) => None,
            (lo, hi, n) => {
                let s = SweepRange {
                    c_min: lo.unwrap_or(DEFAULT_SWEEP.c_min),
                    c_max: hi.unwrap_or(DEFAULT_SWEEP.c_max),
                    n_c: n.unwrap_or(DEFAULT_SWEEP.n_c),
                };
                if s.c_min < 0.0 || s.c_min >= s.c_max {
                    return Err(raw.error("c_min", "need 0 <= c_min < c_max"));
                }
                if s.n_c < 2 {
                    return Err(raw.error("n_c", "must be >= 2"));
                }
                Some(s)
            }
        };

        let defaults = Config::default();
        let seed = Sales {
            x: raw.number("seed_x")?.unwrap_or(DEFAULT_SEED.0),
            y: raw.number("seed_y")?.unwrap_or(DEFAULT_SEED.1),
        };
        let samples: Option<usize> = raw.get("samples")?;
        let orbit = Config {
            initial: to_diffsum(seed),
            n_transient: raw.get("transient")?.unwrap_or(defaults.n_transient),
            n_sample: samples.unwrap_or(defaults.n_sample),
            divergence_bound: raw
                .number("divergence_bound")?
                .unwrap_or(defaults.divergence_bound),
        };
        if orbit.n_transient < 1 {
            return Err(raw.error("transient", "must be >= 1"));
        }
        if orbit.n_sample < 1 {
            return Err(raw.error("samples", "must be >= 1"));
        }
        if !(orbit.divergence_bound > 0.0) {
            return Err(raw.error("divergence_bound", "must be > 0"));
        }

        let classify = ClassifyOptions {
            deadband: raw.number("deadband")?.unwrap_or(DEFAULT_DEADBAND),
            period: PeriodOptions {
                tol: raw.number("period_tol")?.unwrap_or(DEFAULT_PERIOD_TOL),
                max_period: raw.get("max_period")?.unwrap_or(DEFAULT_MAX_PERIOD),
            },
            lyapunov_samples: raw
                .get("lyapunov_samples")?
                .unwrap_or(DEFAULT_LYAPUNOV_SAMPLES),
            ..ClassifyOptions::default()
        };
        if !(classify.deadband > 0.0) {
            return Err(raw.error("deadband", "must be > 0"));
        }
        if !(classify.period.tol > 0.0) {
            return Err(raw.error("period_tol", "must be > 0"));
        }
        if classify.period.max_period < 1 {
            return Err(raw.error("max_period", "must be >= 1"));
        }
        if classify.lyapunov_samples < leapfrog_core::stability::MIN_LYAPUNOV_SAMPLES {
            return Err(raw.error("lyapunov_samples", "must be >= 1000"));
        }

        let scan_default = ScanGrid::default();
        let scan = ScanGrid {
            lo: raw.number("scan_min")?.unwrap_or(scan_default.lo),
            hi: raw.number("scan_max")?.unwrap_or(scan_default.hi),
            points: raw.get("scan_points")?.unwrap_or(scan_default.points),
        };
        if !(scan.lo < scan.hi) {
            return Err(raw.error("scan_min", "need scan_min < scan_max"));
        }
        if scan.points < 2 {
            return Err(raw.error("scan_points", "must be >= 2"));
        }

        let format = match raw.values.get("format") {
            None => Format::default(),
            Some((text, source)) => text.parse().map_err(|_| {
                ConfigError::at(
                    source,
                    "format",
                    format!("expected csv or json, got `{text}`"),
                )
            })?,
        };

        Ok(RunConfig {
            model,
            c,
            c_values,
            sweep,
            orbit,
            samples_set: samples.is_some(),
            include_transient: raw.flag("include_transient")?,
            classify,
            scan,
            format,
            out: raw.get::<String>("out")?.map(PathBuf::from),
        })
    }

    /// The single elasticity value a command needs.
    pub fn single_c(&self) -> Result<f64, ConfigError> {
        self.c
            .ok_or_else(|| ConfigError::field("c", "missing required value"))
    }

    /// Elasticity values for table-producing commands: an explicit list,
    /// else the sweep grid, else the single `c`.
    pub fn c_list(&self) -> Result<Vec<f64>, ConfigError> {
        if let Some(cs) = &self.c_values {
            return Ok(cs.clone());
        }
        if let Some(s) = &self.sweep {
            return Ok(leapfrog_core::orbits::linspace(s.c_min, s.c_max, s.n_c));
        }
        self.c.map(|c| vec![c]).ok_or_else(|| {
            ConfigError::field("c", "give `c`, `c_values` or a `c_min`/`c_max`/`n_c` range")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_raw(&RawConfig::parse(text, Path::new("test.cfg"))?)
    }

    const FIG1: &str = "# fig 1\na = 0.16\nb = 0.9\nalpha = 0.46\nbeta = 0.7\nc = 105\n";

    #[test]
    fn parses_minimal_file() {
        let cfg = parse(FIG1).unwrap();
        assert_eq!(cfg.model.a(), 0.16);
        assert_eq!(cfg.c, Some(105.0));
        assert_eq!(cfg.model.c(), 105.0);
        assert_eq!(cfg.orbit, Config::default());
        assert_eq!(cfg.format, Format::Csv);
        assert!(cfg.sweep.is_none());
        assert_eq!(cfg.c_list().unwrap(), vec![105.0]);
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        let err = parse(&format!("{FIG1}gamma = 1\n")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("gamma"));
        assert!(err.to_string().contains("test.cfg:7"), "{err}");
        let err = parse(&format!("{FIG1}a = 0.2\n")).unwrap_err();
        assert!(err.message.contains("repeated"));
        let err = parse("a 0.1\n").unwrap_err();
        assert!(err.to_string().contains("test.cfg:1"));
    }

    #[test]
    fn reports_field_of_invalid_values() {
        let err = parse("a = 0.16\nb = 0.9\nalpha = 1.5\nbeta = 0.7\n").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("alpha"));
        assert!(err.to_string().starts_with("test.cfg:3"), "{err}");
        let err = parse("a = x\nb = 0.9\nalpha = 0.5\nbeta = 0.7\n").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("a"));
        let err = parse("b = 0.9\nalpha = 0.5\nbeta = 0.7\n").unwrap_err();
        assert!(err.message.contains("missing"));
        let err = parse(&format!("{FIG1}c_min = 5\nc_max = 1\n")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("c_min"));
        let err = parse(&format!("{FIG1}c_values = 1, x\n")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("c_values"));
        let err = parse(&format!("{FIG1}format = xml\n")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("format"));
        let err = parse(&format!("{FIG1}samples = 0\n")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("samples"));
        let err = parse(&format!("{FIG1}c = nan\n")).unwrap_err();
        assert!(err.field.is_some());
    }

    #[test]
    fn flags_override_file() {
        let mut raw = RawConfig::parse(FIG1, Path::new("f.cfg")).unwrap();
        raw.set_flag("c", "20").unwrap();
        raw.set_flag("seed_x", "0.3").unwrap();
        let cfg = RunConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.c, Some(20.0));
        assert!((cfg.orbit.initial.z - 0.1).abs() < 1e-15);
        raw.set_flag("beta", "-1").unwrap();
        let err = RunConfig::from_raw(&raw).unwrap_err();
        assert_eq!(err.source, Some(Source::Flag));
        assert!(raw.set_flag("nope", "1").is_err());
    }

    #[test]
    fn sweep_defaults_and_lists() {
        let cfg = parse(&format!("{FIG1}c_max = 50\n")).unwrap();
        assert_eq!(
            cfg.sweep,
            Some(SweepRange {
                c_min: 0.0,
                c_max: 50.0,
                n_c: 800
            })
        );
        assert_eq!(cfg.c_list().unwrap().len(), 800);
        let cfg = parse(&format!("{FIG1}c_values = 10, 20,150\n")).unwrap();
        assert_eq!(cfg.c_list().unwrap(), vec![10.0, 20.0, 150.0]);
        let cfg = parse("a = 0.16\nb = 0.9\nalpha = 0.46\nbeta = 0.7\n").unwrap();
        assert!(cfg.c_list().is_err());
        assert!(cfg.single_c().is_err());
    }
}
