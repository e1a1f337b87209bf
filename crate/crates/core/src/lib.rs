//! Simulation and analysis of a two-firm competition map with logistic
//! investment response.
//!
//! The map advances the sales `(x, y)` of two firms whose investment depends
//! on a logistic function of their sales difference. Everything here works
//! in the equivalent sale-difference / sale-sum coordinates `(z, w)` as
//! well:
//!
//! * [`model`]: parameters, states and both forms of the map,
//! * [`fixed_points`]: Brent-refined fixed points and sweeps over `c`,
//! * [`stability`]: Jacobians, eigenvalue classification, the closed-form
//!   critical elasticity and the largest Lyapunov exponent,
//! * [`orbits`]: trajectories, period detection, bifurcation sweeps and
//!   regime labels (leapfrogging, monopoly, chaos).
//!
//! All computations are generic over [`Real`]; the aliases below fix the
//! scalar to `f64`, which is what the command-line tool uses.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixed_points;
pub mod model;
pub mod orbits;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use fixed_points::{
    brent_root, find_fixed_points, fixed_point_sweep, linear_slope, scalar_residual,
    BracketingInterval, FixedPointResult, FixedPointRow, ScanGrid,
};
pub use model::{
    from_diffsum, sigmoid, step_xy, step_zw, to_diffsum, transform_params, DiffSumState,
    ModelParams, SaleState, TransformedParams,
};
pub use orbits::{
    bifurcation_sweep, classify_regime, detect_period, iterate_orbit, regime_grid, BifurcationRow,
    ClassifyOptions, Orbit, OrbitConfig, Period, PeriodOptions, RegimeLabel, RegimeReport,
};
pub use scalar::Real;
pub use stability::{
    classify_fixed_point, critical_elasticity, jacobian_at, lyapunov_largest, period_one_condition,
    Classification, CriticalElasticity, Jacobian2x2, StabilityReport,
};

pub type Params = ModelParams<f64>;
pub type Transformed = TransformedParams<f64>;
pub type Sales = SaleState<f64>;
pub type DiffSum = DiffSumState<f64>;
pub type FixedPoint = FixedPointResult<f64>;
pub type Jacobian = Jacobian2x2<f64>;
pub type Stability = StabilityReport<f64>;
pub type Config = OrbitConfig<f64>;
pub type Regime = RegimeReport<f64>;
