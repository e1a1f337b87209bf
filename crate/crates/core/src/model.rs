//! Parameters, states and the two equivalent forms of the competition map.
//!
//! The original form advances the sales `(x, y)` of the two firms. The
//! transformed form advances the sale difference `z = x - y` and the sale
//! sum `w = x + y`, driven by the derived parameters in [`TransformedParams`].

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Iteration aborts once `|z|` or `|w|` exceeds this bound.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e12;

/// Parameters of the original two-firm map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    a: T,
    b: T,
    alpha: T,
    beta: T,
    c: T,
}

impl<T: Real> ModelParams<T> {
    /// Validates `a, b > 0`, `alpha, beta` in `(0, 1]` and `c >= 0`.
    pub fn new(a: T, b: T, alpha: T, beta: T, c: T) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        decay_rate("alpha", alpha)?;
        decay_rate("beta", beta)?;
        elasticity(c)?;
        Ok(Self {
            a,
            b,
            alpha,
            beta,
            c,
        })
    }

    pub fn with_c(self, c: T) -> Result<Self> {
        elasticity(c)?;
        Ok(Self { c, ..self })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn transform(&self) -> TransformedParams<T> {
        transform_params(self)
    }
}

/// Parameters of the sale-difference / sale-sum map.
///
/// `a1 = a + b`, `b1 = b - a`, `alpha1 = (alpha + beta) / 2`,
/// `beta1 = (beta - alpha) / 2`; `c` is carried through unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedParams<T> {
    a1: T,
    b1: T,
    alpha1: T,
    beta1: T,
    c: T,
}

impl<T: Real> TransformedParams<T> {
    /// Builds transformed parameters directly. Requires `a1 > 0`, `c >= 0`
    /// and finite `b1`, `alpha1`, `beta1` (which may take any sign).
    pub fn new(a1: T, b1: T, alpha1: T, beta1: T, c: T) -> Result<Self> {
        positive("a1", a1)?;
        finite("b1", b1)?;
        finite("alpha1", alpha1)?;
        finite("beta1", beta1)?;
        elasticity(c)?;
        Ok(Self {
            a1,
            b1,
            alpha1,
            beta1,
            c,
        })
    }

    pub fn with_c(self, c: T) -> Result<Self> {
        elasticity(c)?;
        Ok(Self { c, ..self })
    }

    pub fn a1(&self) -> T {
        self.a1
    }

    pub fn b1(&self) -> T {
        self.b1
    }

    pub fn alpha1(&self) -> T {
        self.alpha1
    }

    pub fn beta1(&self) -> T {
        self.beta1
    }

    pub fn c(&self) -> T {
        self.c
    }
}

/// Sales `(x, y)` of firms X and Y at one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaleState<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> SaleState<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(Error::NonFiniteState(x.as_f64(), y.as_f64()))
        }
    }
}

/// Sale difference `z = x - y` and sale sum `w = x + y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffSumState<T> {
    pub z: T,
    pub w: T,
}

impl<T: Real> DiffSumState<T> {
    pub fn new(z: T, w: T) -> Result<Self> {
        if z.is_finite() && w.is_finite() {
            Ok(Self { z, w })
        } else {
            Err(Error::NonFiniteState(z.as_f64(), w.as_f64()))
        }
    }

    /// `true` while both coordinates stay within `bound` in magnitude.
    pub fn is_bounded(&self, bound: T) -> bool {
        self.z.abs() <= bound && self.w.abs() <= bound
    }
}

impl<T: Real> From<SaleState<T>> for DiffSumState<T> {
    fn from(s: SaleState<T>) -> Self {
        to_diffsum(s)
    }
}

impl<T: Real> From<DiffSumState<T>> for SaleState<T> {
    fn from(d: DiffSumState<T>) -> Self {
        from_diffsum(d)
    }
}

/// Logistic function `1 / (1 + exp(-u))`.
///
/// Negative arguments go through `exp(u) / (1 + exp(u))` so that neither
/// branch ever exponentiates a large positive number.
#[inline]
pub fn sigmoid<T: Real>(u: T) -> T {
    if u >= T::zero() {
        T::one() / (T::one() + (-u).exp())
    } else {
        let e = u.exp();
        e / (T::one() + e)
    }
}

/// One step of the original map.
pub fn step_xy<T: Real>(s: SaleState<T>, p: &ModelParams<T>) -> SaleState<T> {
    let one = T::one();
    let invest = sigmoid(p.c * (s.x - s.y));
    SaleState {
        x: (one - p.alpha) * s.x + p.a * invest,
        y: (one - p.beta) * s.y + p.b * invest,
    }
}

/// One step of the transformed map.
pub fn step_zw<T: Real>(s: DiffSumState<T>, tp: &TransformedParams<T>) -> DiffSumState<T> {
    let keep = T::one() - tp.alpha1;
    let invest = sigmoid(tp.c * s.z);
    DiffSumState {
        z: keep * s.z + tp.beta1 * s.w - tp.b1 * invest,
        w: keep * s.w + tp.beta1 * s.z + tp.a1 * invest,
    }
}

pub fn transform_params<T: Real>(p: &ModelParams<T>) -> TransformedParams<T> {
    let two = T::lit(2.0);
    TransformedParams {
        a1: p.a + p.b,
        b1: p.b - p.a,
        alpha1: (p.alpha + p.beta) / two,
        beta1: (p.beta - p.alpha) / two,
        c: p.c,
    }
}

#[inline]
pub fn to_diffsum<T: Real>(s: SaleState<T>) -> DiffSumState<T> {
    DiffSumState {
        z: s.x - s.y,
        w: s.x + s.y,
    }
}

#[inline]
pub fn from_diffsum<T: Real>(d: DiffSumState<T>) -> SaleState<T> {
    let two = T::lit(2.0);
    SaleState {
        x: (d.w + d.z) / two,
        y: (d.w - d.z) / two,
    }
}

fn finite<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.as_f64(),
            reason: "must be finite",
        })
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    finite(name, v)?;
    if v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.as_f64(),
            reason: "must be > 0",
        })
    }
}

fn decay_rate<T: Real>(name: &'static str, v: T) -> Result<()> {
    finite(name, v)?;
    if v > T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.as_f64(),
            reason: "decay rate must lie in (0, 1]",
        })
    }
}

fn elasticity<T: Real>(c: T) -> Result<()> {
    finite("c", c)?;
    if c >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "c",
            value: c.as_f64(),
            reason: "elasticity must be >= 0",
        })
    }
}
