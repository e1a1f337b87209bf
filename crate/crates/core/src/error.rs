use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state is not finite: ({0}, {1})")]
    NonFiniteState(f64, f64),

    #[error("degenerate slope: a1*beta1 - b1*alpha1 = {denominator:e} is below 1e-14")]
    DegenerateSlope { denominator: f64 },

    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("fixed point did not converge")]
    NotConverged,

    #[error("b1 = {0:e} is zero, critical elasticity undefined")]
    ZeroB1(f64),

    #[error("orbit diverged at step {step}")]
    Diverged { step: usize },

    #[error("need at least {required} samples, got {len}")]
    InsufficientSamples { len: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
