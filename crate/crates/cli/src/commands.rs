//! Subcommand bodies: each turns a validated [`RunConfig`] into a [`Table`].

use leapfrog_core::fixed_points::fixed_point_sweep;
use leapfrog_core::orbits::{grid_cells, trajectory};
use leapfrog_core::stability::lyapunov_largest_bounded;
use leapfrog_core::{
    bifurcation_sweep, classify_fixed_point, critical_elasticity, from_diffsum, jacobian_at,
    period_one_condition, regime_grid, Config, Error, FixedPoint, Period, StabilityReport,
    Transformed,
};

use crate::config::{ConfigError, RunConfig, DEFAULT_PLOTTED_SAMPLES, DEFAULT_SWEEP};
use crate::output::{Cell, Table};

pub const TIME_SERIES_HEADER: &[&str] = &["n", "z", "w", "x", "y"];
pub const FIXED_POINT_HEADER: &[&str] = &["c", "z0", "w0", "residual7a", "residual7b", "converged"];
pub const BIFURCATION_HEADER: &[&str] = &["c", "sample_index", "z", "w", "period"];
pub const REGIME_HEADER: &[&str] = &[
    "a", "b", "alpha", "beta", "c", "label", "period", "min_w", "lyapunov",
];
pub const STABILITY_HEADER: &[&str] = &[
    "c",
    "z0",
    "w0",
    "eig1_re",
    "eig1_im",
    "eig2_re",
    "eig2_im",
    "spectral_radius",
    "classification",
    "trace",
    "determinant",
    "period_one_condition",
    "period_one_condition_at_zero",
    "critical_elasticity",
    "critical_elasticity_applicable",
    "lyapunov",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    FixedPoints,
    Bifurcation,
    Classify,
    Stability,
}

#[derive(Debug)]
pub enum CommandError {
    Config(ConfigError),
    Diverged { c: f64, step: usize },
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Config(e) => write!(f, "{e}"),
            CommandError::Diverged { c, step } => {
                write!(f, "orbit diverged at step {step} (c = {c})")
            }
        }
    }
}

impl std::error::Error for CommandError {}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Table, CommandError> {
    match cmd {
        Command::Simulate => simulate(cfg),
        Command::FixedPoints => fixed_points(cfg),
        Command::Bifurcation => bifurcation(cfg),
        Command::Classify => classify(cfg),
        Command::Stability => stability(cfg),
    }
}

/// Short in-row marker for a failed cell.
pub fn marker(e: &Error) -> &'static str {
    match e {
        Error::DegenerateSlope { .. } => "degenerate-slope",
        Error::NoSignChange { .. } => "no-root",
        Error::Diverged { .. } => "diverged",
        Error::ZeroB1(_) => "zero-b1",
        Error::NotConverged => "not-converged",
        Error::InvalidParameter { .. } | Error::NonFiniteState(..) => "invalid-parameter",
        Error::InsufficientSamples { .. } => "insufficient-samples",
    }
}

fn core_error(field: &str, e: Error) -> CommandError {
    CommandError::Config(ConfigError {
        source: None,
        field: Some(field.to_string()),
        message: e.to_string(),
    })
}

fn transformed_at(cfg: &RunConfig, c: f64) -> Result<Transformed, CommandError> {
    cfg.model
        .with_c(c)
        .map(|p| p.transform())
        .map_err(|e| core_error("c", e))
}

pub fn simulate(cfg: &RunConfig) -> Result<Table, CommandError> {
    let c = cfg.single_c()?;
    let tp = transformed_at(cfg, c)?;
    let states = trajectory(&cfg.orbit, &tp).map_err(|e| match e {
        Error::Diverged { step } => CommandError::Diverged { c, step },
        e => core_error("seed_x", e),
    })?;
    let start = if cfg.include_transient {
        0
    } else {
        cfg.orbit.n_transient + 1
    };
    let mut table = Table::new(TIME_SERIES_HEADER);
    for (n, s) in states.iter().enumerate().skip(start) {
        let sale = from_diffsum(*s);
        table.push(vec![
            Cell::Int(n),
            Cell::Num(s.z),
            Cell::Num(s.w),
            Cell::Num(sale.x),
            Cell::Num(sale.y),
        ]);
    }
    Ok(table)
}

fn fixed_point_cells(c: f64, fp: &FixedPoint) -> Vec<Cell> {
    vec![
        Cell::Num(c),
        Cell::Num(fp.z0),
        Cell::Num(fp.w0),
        Cell::Num(fp.residual7a),
        Cell::Num(fp.residual7b),
        Cell::Bool(fp.converged),
    ]
}

fn failed_row(c: f64, width: usize, marker_col: usize, text: &str) -> Vec<Cell> {
    let mut row = vec![Cell::Empty; width];
    row[0] = Cell::Num(c);
    row[marker_col] = Cell::text(text);
    row
}

pub fn fixed_points(cfg: &RunConfig) -> Result<Table, CommandError> {
    let cs = cfg.c_list()?;
    let mut table = Table::new(FIXED_POINT_HEADER);
    for row in fixed_point_sweep(&cfg.model.transform(), &cs, &cfg.scan) {
        match row.roots {
            Ok(roots) if roots.is_empty() => table.push(failed_row(row.c, 6, 5, "no-root")),
            Ok(roots) => {
                for fp in &roots {
                    table.push(fixed_point_cells(row.c, fp));
                }
            }
            Err(e) => table.push(failed_row(row.c, 6, 5, marker(&e))),
        }
    }
    Ok(table)
}

pub fn bifurcation(cfg: &RunConfig) -> Result<Table, CommandError> {
    let sweep = cfg.sweep.unwrap_or(DEFAULT_SWEEP);
    let orbit = Config {
        n_sample: if cfg.samples_set {
            cfg.orbit.n_sample
        } else {
            DEFAULT_PLOTTED_SAMPLES
        },
        ..cfg.orbit
    };
    let rows = bifurcation_sweep(
        &cfg.model.transform(),
        sweep.c_min,
        sweep.c_max,
        sweep.n_c,
        &orbit,
        &cfg.classify.period,
    )
    .map_err(|e| core_error("c_min", e))?;
    let mut table = Table::new(BIFURCATION_HEADER);
    for row in rows {
        match row.outcome {
            Ok(s) => {
                let period = match s.period {
                    Period::Finite(p) => Cell::Int(p),
                    Period::Aperiodic => Cell::text("aperiodic"),
                };
                for (i, (z, w)) in s.z.iter().zip(&s.w).enumerate() {
                    table.push(vec![
                        Cell::Num(row.c),
                        Cell::Int(i),
                        Cell::Num(*z),
                        Cell::Num(*w),
                        period.clone(),
                    ]);
                }
            }
            Err(e) => table.push(failed_row(row.c, 5, 4, marker(&e))),
        }
    }
    Ok(table)
}

pub fn classify(cfg: &RunConfig) -> Result<Table, CommandError> {
    let cs = cfg.c_list()?;
    let cells = grid_cells(&[cfg.model], &cs).map_err(|e| core_error("c_values", e))?;
    let mut table = Table::new(REGIME_HEADER);
    for cell in regime_grid(&cells, &cfg.orbit, &cfg.classify) {
        let p = cell.params;
        let mut row = vec![
            Cell::Num(p.a()),
            Cell::Num(p.b()),
            Cell::Num(p.alpha()),
            Cell::Num(p.beta()),
            Cell::Num(p.c()),
        ];
        match cell.report {
            Ok(r) => row.extend([
                Cell::text(r.label.as_str()),
                r.period.map_or(Cell::Empty, Cell::Int),
                Cell::Num(r.min_w),
                Cell::Num(r.lyapunov),
            ]),
            Err(e) => row.extend([
                Cell::text(marker(&e)),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]),
        }
        table.push(row);
    }
    Ok(table)
}

pub fn stability(cfg: &RunConfig) -> Result<Table, CommandError> {
    let cs = cfg.c_list()?;
    let base = cfg.model.transform();
    let (cc, cc_ok) = match critical_elasticity(&base) {
        Ok(cc) => (Cell::Num(cc.value), Cell::Bool(cc.applicable)),
        Err(e) => (Cell::Empty, Cell::text(marker(&e))),
    };
    let mut table = Table::new(STABILITY_HEADER);
    for c in cs {
        let tp = transformed_at(cfg, c)?;
        let lyapunov = match lyapunov_largest_bounded(
            cfg.orbit.initial,
            &tp,
            cfg.orbit.n_transient,
            cfg.classify.lyapunov_samples,
            cfg.orbit.divergence_bound,
        ) {
            Ok(l) => Cell::Num(l),
            Err(e) => Cell::text(marker(&e)),
        };
        let at_zero = Cell::Num(period_one_condition(0.0, &tp).value);
        let roots = match leapfrog_core::find_fixed_points(&tp, &cfg.scan) {
            Ok(r) if r.is_empty() => Err("no-root"),
            Ok(r) => Ok(r),
            Err(e) => Err(marker(&e)),
        };
        let tail = |row: &mut Vec<Cell>| {
            row.extend([at_zero.clone(), cc.clone(), cc_ok.clone(), lyapunov.clone()]);
        };
        match roots {
            Ok(roots) => {
                for fp in &roots {
                    // unconverged roots are still reported, straight from the Jacobian
                    let report = classify_fixed_point(fp, &tp).unwrap_or_else(|_| {
                        StabilityReport::from_jacobian(&jacobian_at(fp.z0, &tp))
                    });
                    let [e1, e2] = report.eigenvalues;
                    let mut row = vec![
                        Cell::Num(c),
                        Cell::Num(fp.z0),
                        Cell::Num(fp.w0),
                        Cell::Num(e1.re),
                        Cell::Num(e1.im),
                        Cell::Num(e2.re),
                        Cell::Num(e2.im),
                        Cell::Num(report.spectral_radius),
                        Cell::text(report.classification.as_str()),
                        Cell::Num(report.trace),
                        Cell::Num(report.determinant),
                        Cell::Num(period_one_condition(fp.z0, &tp).value),
                    ];
                    tail(&mut row);
                    table.push(row);
                }
            }
            Err(text) => {
                let mut row = failed_row(c, 12, 8, text);
                tail(&mut row);
                table.push(row);
            }
        }
    }
    Ok(table)
}
