//! Trajectories, period detection, bifurcation sweeps and regime labels.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    step_xy, step_zw, to_diffsum, DiffSumState, ModelParams, SaleState, TransformedParams,
    DEFAULT_DIVERGENCE_BOUND,
};
use crate::scalar::Real;
use crate::stability::{
    lyapunov_largest_bounded, sale_lyapunov_largest, CHAOS_THRESHOLD, DEFAULT_LYAPUNOV_SAMPLES,
};

pub const DEFAULT_TRANSIENT: usize = 1000;
pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_PERIOD_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_PERIOD: usize = 64;
pub const DEFAULT_DEADBAND: f64 = 1e-9;
/// Default seed in sale coordinates, `(x0, y0)`.
pub const DEFAULT_SEED: (f64, f64) = (0.1, 0.2);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig<T> {
    pub initial: DiffSumState<T>,
    pub n_transient: usize,
    pub n_sample: usize,
    pub divergence_bound: T,
}

impl<T: Real> Default for OrbitConfig<T> {
    fn default() -> Self {
        Self {
            initial: to_diffsum(SaleState {
                x: T::lit(DEFAULT_SEED.0),
                y: T::lit(DEFAULT_SEED.1),
            }),
            n_transient: DEFAULT_TRANSIENT,
            n_sample: DEFAULT_SAMPLES,
            divergence_bound: T::lit(DEFAULT_DIVERGENCE_BOUND),
        }
    }
}

impl<T: Real> OrbitConfig<T> {
    pub fn validate(&self) -> Result<()> {
        DiffSumState::new(self.initial.z, self.initial.w)?;
        if self.n_transient < 1 {
            return Err(invalid("n_transient", 0.0, "must be >= 1"));
        }
        if self.n_sample < 1 {
            return Err(invalid("n_sample", 0.0, "must be >= 1"));
        }
        if !(self.divergence_bound > T::zero()) {
            return Err(invalid(
                "divergence_bound",
                self.divergence_bound.as_f64(),
                "must be > 0",
            ));
        }
        Ok(())
    }

    fn with_samples(&self, n_sample: usize) -> Self {
        Self { n_sample, ..*self }
    }
}

/// Post-transient samples of an orbit in transformed coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Orbit<T> {
    pub z: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Real> Orbit<T> {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Keeps only the final `n` samples.
    pub fn tail(&self, n: usize) -> Self {
        let start = self.len().saturating_sub(n);
        Self {
            z: self.z[start..].to_vec(),
            w: self.w[start..].to_vec(),
        }
    }

    pub fn min_w(&self) -> T {
        self.w.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Every state from the seed (index 0) through step
/// `n_transient + n_sample`.
pub fn trajectory<T: Real>(
    cfg: &OrbitConfig<T>,
    tp: &TransformedParams<T>,
) -> Result<Vec<DiffSumState<T>>> {
    cfg.validate()?;
    let total = cfg.n_transient + cfg.n_sample;
    let mut states = Vec::with_capacity(total + 1);
    let mut s = cfg.initial;
    if !s.is_bounded(cfg.divergence_bound) {
        return Err(Error::Diverged { step: 0 });
    }
    states.push(s);
    for step in 1..=total {
        s = step_zw(s, tp);
        if !s.is_bounded(cfg.divergence_bound) {
            return Err(Error::Diverged { step });
        }
        states.push(s);
    }
    Ok(states)
}

/// Iterates the transformed map and returns the last `n_sample` states.
pub fn iterate_orbit<T: Real>(cfg: &OrbitConfig<T>, tp: &TransformedParams<T>) -> Result<Orbit<T>> {
    let states = trajectory(cfg, tp)?;
    Ok(collect_orbit(&states[cfg.n_transient + 1..]))
}

/// Iterates the original map from the same seed and reports the samples in
/// transformed coordinates.
pub fn iterate_sale_orbit<T: Real>(cfg: &OrbitConfig<T>, p: &ModelParams<T>) -> Result<Orbit<T>> {
    cfg.validate()?;
    let total = cfg.n_transient + cfg.n_sample;
    let mut s: SaleState<T> = cfg.initial.into();
    let mut orbit = Orbit {
        z: Vec::with_capacity(cfg.n_sample),
        w: Vec::with_capacity(cfg.n_sample),
    };
    for step in 1..=total {
        s = step_xy(s, p);
        let d = to_diffsum(s);
        if !d.is_bounded(cfg.divergence_bound) {
            return Err(Error::Diverged { step });
        }
        if step > cfg.n_transient {
            orbit.z.push(d.z);
            orbit.w.push(d.w);
        }
    }
    Ok(orbit)
}

fn collect_orbit<T: Real>(states: &[DiffSumState<T>]) -> Orbit<T> {
    Orbit {
        z: states.iter().map(|s| s.z).collect(),
        w: states.iter().map(|s| s.w).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Period {
    Finite(usize),
    Aperiodic,
}

impl Period {
    pub fn finite(&self) -> Option<usize> {
        match self {
            Period::Finite(p) => Some(*p),
            Period::Aperiodic => None,
        }
    }
}

impl std::fmt::Display for Period {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Period::Finite(p) => write!(f, "{p}"),
            Period::Aperiodic => f.write_str("aperiodic"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions<T> {
    pub tol: T,
    pub max_period: usize,
}

impl<T: Real> Default for PeriodOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(DEFAULT_PERIOD_TOL),
            max_period: DEFAULT_MAX_PERIOD,
        }
    }
}

impl<T: Real> PeriodOptions<T> {
    /// Samples [`detect_period`] needs to see.
    pub fn window(&self) -> usize {
        4 * self.max_period
    }
}

/// Smallest `p <= max_period` with `|z[n + p] - z[n]| <= tol` over the final
/// `4 * max_period` samples.
pub fn detect_period<T: Real>(z: &[T], tol: T, max_period: usize) -> Result<Period> {
    if !(tol > T::zero()) {
        return Err(invalid("tol", tol.as_f64(), "must be > 0"));
    }
    if max_period < 1 {
        return Err(invalid("max_period", 0.0, "must be >= 1"));
    }
    let window = 4 * max_period;
    if z.len() < window {
        return Err(Error::InsufficientSamples {
            len: z.len(),
            required: window,
        });
    }
    let tail = &z[z.len() - window..];
    let period = (1..=max_period).find(|&p| {
        tail.iter()
            .zip(&tail[p..])
            .all(|(a, b)| (*b - *a).abs() <= tol)
    });
    Ok(period.map_or(Period::Aperiodic, Period::Finite))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationSamples<T> {
    pub z: Vec<T>,
    pub w: Vec<T>,
    pub period: Period,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationRow<T> {
    pub c: T,
    pub outcome: Result<BifurcationSamples<T>>,
}

/// `n` evenly spaced values from `lo` to `hi`, both included.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + step * T::from_usize_lossy(i)
            }
        })
        .collect()
}

/// Orbit long enough for period detection; the caller trims to `n_sample`.
fn detection_orbit<T: Real>(
    cfg: &OrbitConfig<T>,
    tp: &TransformedParams<T>,
    period: &PeriodOptions<T>,
) -> Result<(Orbit<T>, Period)> {
    let n = cfg.n_sample.max(period.window());
    let orbit = iterate_orbit(&cfg.with_samples(n), tp)?;
    let detected = detect_period(&orbit.z, period.tol, period.max_period)?;
    Ok((orbit, detected))
}

/// Post-transient samples and detected period on a uniform `c` grid.
///
/// Each row carries `cfg.n_sample` samples; diverged cells keep their error
/// and the sweep carries on.
pub fn bifurcation_sweep<T: Real>(
    tp_base: &TransformedParams<T>,
    c_min: T,
    c_max: T,
    n_c: usize,
    cfg: &OrbitConfig<T>,
    period: &PeriodOptions<T>,
) -> Result<Vec<BifurcationRow<T>>> {
    if !(c_min < c_max) || c_min < T::zero() || !c_max.is_finite() {
        return Err(invalid("c_min", c_min.as_f64(), "need 0 <= c_min < c_max"));
    }
    if n_c < 2 {
        return Err(invalid("n_c", n_c as f64, "must be >= 2"));
    }
    cfg.validate()?;
    Ok(linspace(c_min, c_max, n_c)
        .into_par_iter()
        .map(|c| {
            let outcome = tp_base.with_c(c).and_then(|tp| {
                let (orbit, period) = detection_orbit(cfg, &tp, period)?;
                let kept = orbit.tail(cfg.n_sample);
                Ok(BifurcationSamples {
                    z: kept.z,
                    w: kept.w,
                    period,
                })
            });
            BifurcationRow { c, outcome }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeLabel {
    FixedPoint,
    Leapfrogging,
    MonopolyX,
    MonopolyY,
    PeriodicOneSided,
    Chaotic,
    Diverged,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::FixedPoint => "fixed-point",
            RegimeLabel::Leapfrogging => "leapfrogging",
            RegimeLabel::MonopolyX => "monopoly-X",
            RegimeLabel::MonopolyY => "monopoly-Y",
            RegimeLabel::PeriodicOneSided => "periodic-one-sided",
            RegimeLabel::Chaotic => "chaotic",
            RegimeLabel::Diverged => "diverged",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions<T> {
    /// `|z|` at or below this counts as neither sign.
    pub deadband: T,
    pub period: PeriodOptions<T>,
    pub lyapunov_samples: usize,
    pub chaos_threshold: T,
}

impl<T: Real> Default for ClassifyOptions<T> {
    fn default() -> Self {
        Self {
            deadband: T::lit(DEFAULT_DEADBAND),
            period: PeriodOptions::default(),
            lyapunov_samples: DEFAULT_LYAPUNOV_SAMPLES,
            chaos_threshold: T::lit(CHAOS_THRESHOLD),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport<T> {
    pub label: RegimeLabel,
    /// `None` for aperiodic orbits, including quasi-periodic ones.
    pub period: Option<usize>,
    pub sign_changes_per_period: usize,
    pub min_w: T,
    pub lyapunov: T,
}

impl<T: Real> RegimeReport<T> {
    fn diverged() -> Self {
        Self {
            label: RegimeLabel::Diverged,
            period: None,
            sign_changes_per_period: 0,
            min_w: T::nan(),
            lyapunov: T::nan(),
        }
    }
}

/// Signs of `z` outside the deadband, in order.
fn signs<T: Real>(z: &[T], deadband: T) -> Vec<bool> {
    z.iter()
        .filter(|v| v.abs() > deadband)
        .map(|v| *v > T::zero())
        .collect()
}

fn count_changes(signs: &[bool]) -> usize {
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Sign changes of `z` over one period.
///
/// For a finite period the last full period is read cyclically. Without a
/// period the count is averaged over oscillation cycles, each cycle being
/// delimited by successive upward crossings.
pub fn sign_changes_per_period<T: Real>(z: &[T], period: Period, deadband: T) -> usize {
    match period {
        Period::Finite(p) => {
            let start = z.len().saturating_sub(p);
            let s = signs(&z[start..], deadband);
            let wrap = match (s.first(), s.last()) {
                (Some(first), Some(last)) if s.len() > 1 => usize::from(first != last),
                _ => 0,
            };
            count_changes(&s) + wrap
        }
        Period::Aperiodic => {
            let s = signs(z, deadband);
            let changes = count_changes(&s);
            let cycles = s.windows(2).filter(|w| !w[0] && w[1]).count();
            if cycles == 0 {
                changes
            } else {
                (changes as f64 / cycles as f64).round() as usize
            }
        }
    }
}

/// Lengths of the maximal runs of constant sign (deadband samples skipped).
pub fn sign_blocks<T: Real>(z: &[T], deadband: T) -> Vec<usize> {
    let s = signs(z, deadband);
    let mut blocks = Vec::new();
    let mut run = 0;
    for (i, v) in s.iter().enumerate() {
        if i > 0 && *v != s[i - 1] {
            blocks.push(run);
            run = 0;
        }
        run += 1;
    }
    if run > 0 {
        blocks.push(run);
    }
    blocks
}

/// Labels an already sampled orbit.
///
/// Decision order: period one is a fixed point; an aperiodic orbit with
/// exponent above the chaos threshold is chaotic; every other orbit
/// (periodic, or aperiodic without expansion) is labelled by the signs
/// `z` takes.
pub fn classify_orbit<T: Real>(
    orbit: &Orbit<T>,
    lyapunov: T,
    opts: &ClassifyOptions<T>,
) -> Result<RegimeReport<T>> {
    let period = detect_period(&orbit.z, opts.period.tol, opts.period.max_period)?;
    let min_w = orbit.min_w();
    let deadband = opts.deadband;
    let label = if period == Period::Finite(1) {
        RegimeLabel::FixedPoint
    } else if period == Period::Aperiodic && lyapunov > opts.chaos_threshold {
        RegimeLabel::Chaotic
    } else {
        let positive = orbit.z.iter().any(|v| *v > deadband);
        let negative = orbit.z.iter().any(|v| *v < -deadband);
        let all_positive = orbit.z.iter().all(|v| *v > deadband);
        let all_negative = orbit.z.iter().all(|v| *v < -deadband);
        if positive && negative {
            RegimeLabel::Leapfrogging
        } else if all_positive {
            RegimeLabel::MonopolyX
        } else if all_negative {
            RegimeLabel::MonopolyY
        } else {
            RegimeLabel::PeriodicOneSided
        }
    };
    Ok(RegimeReport {
        label,
        period: period.finite(),
        sign_changes_per_period: sign_changes_per_period(&orbit.z, period, deadband),
        min_w,
        lyapunov,
    })
}

fn check_options<T: Real>(opts: &ClassifyOptions<T>) -> Result<()> {
    if !(opts.deadband > T::zero()) {
        return Err(invalid("deadband", opts.deadband.as_f64(), "must be > 0"));
    }
    Ok(())
}

/// Iterates, detects the period, estimates the Lyapunov exponent and
/// labels the regime. A divergent orbit yields the `diverged` label.
pub fn classify_regime<T: Real>(
    tp: &TransformedParams<T>,
    cfg: &OrbitConfig<T>,
    opts: &ClassifyOptions<T>,
) -> Result<RegimeReport<T>> {
    check_options(opts)?;
    cfg.validate()?;
    let n = cfg.n_sample.max(opts.period.window());
    let orbit = match iterate_orbit(&cfg.with_samples(n), tp) {
        Ok(o) => o,
        Err(Error::Diverged { .. }) => return Ok(RegimeReport::diverged()),
        Err(e) => return Err(e),
    };
    let lyapunov = match lyapunov_largest_bounded(
        cfg.initial,
        tp,
        cfg.n_transient,
        opts.lyapunov_samples,
        cfg.divergence_bound,
    ) {
        Ok(l) => l,
        Err(Error::Diverged { .. }) => return Ok(RegimeReport::diverged()),
        Err(e) => return Err(e),
    };
    classify_orbit(&orbit, lyapunov, opts)
}

/// Same as [`classify_regime`] but iterating the original map.
pub fn classify_sale_regime<T: Real>(
    p: &ModelParams<T>,
    cfg: &OrbitConfig<T>,
    opts: &ClassifyOptions<T>,
) -> Result<RegimeReport<T>> {
    check_options(opts)?;
    cfg.validate()?;
    let n = cfg.n_sample.max(opts.period.window());
    let orbit = match iterate_sale_orbit(&cfg.with_samples(n), p) {
        Ok(o) => o,
        Err(Error::Diverged { .. }) => return Ok(RegimeReport::diverged()),
        Err(e) => return Err(e),
    };
    let lyapunov = match sale_lyapunov_largest(
        cfg.initial.into(),
        p,
        cfg.n_transient,
        opts.lyapunov_samples,
        cfg.divergence_bound,
    ) {
        Ok(l) => l,
        Err(Error::Diverged { .. }) => return Ok(RegimeReport::diverged()),
        Err(e) => return Err(e),
    };
    classify_orbit(&orbit, lyapunov, opts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCell<T> {
    pub params: ModelParams<T>,
    pub report: Result<RegimeReport<T>>,
}

/// Cartesian product of parameter sets and elasticity values, sets outermost.
pub fn grid_cells<T: Real>(sets: &[ModelParams<T>], c_values: &[T]) -> Result<Vec<ModelParams<T>>> {
    let mut cells = Vec::with_capacity(sets.len() * c_values.len());
    for p in sets {
        for &c in c_values {
            cells.push(p.with_c(c)?);
        }
    }
    Ok(cells)
}

/// Classifies every cell; row order follows `cells`.
pub fn regime_grid<T: Real>(
    cells: &[ModelParams<T>],
    cfg: &OrbitConfig<T>,
    opts: &ClassifyOptions<T>,
) -> Vec<RegimeCell<T>> {
    cells
        .par_iter()
        .map(|p| RegimeCell {
            params: *p,
            report: classify_regime(&p.transform(), cfg, opts),
        })
        .collect()
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
