//! Fixed points of the transformed map.
//!
//! Eliminating the sigmoid between the two fixed-point equations gives the
//! linear relation `w0 = k * z0`. Substituting it back leaves one scalar
//! equation in `z0`, which is bracketed on a grid and refined with Brent's
//! method. Residuals are always reported on the unreduced pair of equations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{sigmoid, TransformedParams};
use crate::scalar::Real;

/// `|a1*beta1 - b1*alpha1|` below this makes the linear relation undefined.
pub const DEGENERACY_EPS: f64 = 1e-14;
pub const DEFAULT_BRENT_TOL: f64 = 1e-12;
pub const DEDUP_DISTANCE: f64 = 1e-8;
/// A root is reported as converged when both residuals are at most this.
pub const RESIDUAL_TOL: f64 = 1e-10;
const BRENT_MAX_ITER: usize = 500;

/// Uniform grid on which the reduced residual is scanned for sign changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid<T> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
}

impl<T: Real> Default for ScanGrid<T> {
    fn default() -> Self {
        Self {
            lo: T::lit(-5.0),
            hi: T::lit(5.0),
            points: 2001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResult<T> {
    pub z0: T,
    pub w0: T,
    /// `|alpha1 z0 - beta1 w0 + b1 sigmoid(c z0)|`
    pub residual7a: T,
    /// `|alpha1 w0 - beta1 z0 - a1 sigmoid(c z0)|`
    pub residual7b: T,
    pub converged: bool,
}

/// An interval `[lo, hi]` whose endpoint residuals differ in sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketingInterval<T> {
    pub lo: T,
    pub hi: T,
    pub g_lo: T,
    pub g_hi: T,
}

impl<T: Real> BracketingInterval<T> {
    pub fn new<F: Fn(T) -> T>(g: F, lo: T, hi: T) -> Result<Self> {
        let bracket = Self {
            lo,
            hi,
            g_lo: g(lo),
            g_hi: g(hi),
        };
        bracket.check()?;
        Ok(bracket)
    }

    fn check(&self) -> Result<()> {
        let encloses = self.lo < self.hi
            && self.g_lo.is_finite()
            && self.g_hi.is_finite()
            && self.g_lo * self.g_hi <= T::zero();
        if encloses {
            Ok(())
        } else {
            Err(Error::NoSignChange {
                lo: self.lo.as_f64(),
                hi: self.hi.as_f64(),
                g_lo: self.g_lo.as_f64(),
                g_hi: self.g_hi.as_f64(),
            })
        }
    }
}

/// Slope `k` of the relation `w0 = k z0` shared by every fixed point.
pub fn linear_slope<T: Real>(tp: &TransformedParams<T>) -> Result<T> {
    let den = tp.a1() * tp.beta1() - tp.b1() * tp.alpha1();
    if den.abs() < T::lit(DEGENERACY_EPS) {
        return Err(Error::DegenerateSlope {
            denominator: den.as_f64(),
        });
    }
    Ok((tp.a1() * tp.alpha1() - tp.b1() * tp.beta1()) / den)
}

/// The fixed-point problem reduced to one unknown.
#[derive(Debug, Clone, Copy)]
pub struct ScalarResidual<T> {
    tp: TransformedParams<T>,
    slope: T,
}

impl<T: Real> ScalarResidual<T> {
    pub fn new(tp: &TransformedParams<T>) -> Result<Self> {
        Ok(Self {
            tp: *tp,
            slope: linear_slope(tp)?,
        })
    }

    pub fn slope(&self) -> T {
        self.slope
    }

    /// `g(z) = alpha1 z - beta1 k z + b1 sigmoid(c z)`.
    ///
    /// With `b1 = 0` that expression vanishes identically, so the second
    /// fixed-point equation is used instead:
    /// `alpha1 k z - beta1 z - a1 sigmoid(c z)`.
    pub fn eval(&self, z: T) -> T {
        let tp = &self.tp;
        let s = sigmoid(tp.c() * z);
        if tp.b1().abs() < T::lit(DEGENERACY_EPS) {
            tp.alpha1() * self.slope * z - tp.beta1() * z - tp.a1() * s
        } else {
            tp.alpha1() * z - tp.beta1() * self.slope * z + tp.b1() * s
        }
    }
}

/// Reduced residual `g(z)` for the given parameters.
pub fn scalar_residual<T: Real>(z: T, tp: &TransformedParams<T>) -> Result<T> {
    Ok(ScalarResidual::new(tp)?.eval(z))
}

/// Residuals of both unreduced fixed-point equations at `(z, w)`.
pub fn fixed_point_residuals<T: Real>(z: T, w: T, tp: &TransformedParams<T>) -> (T, T) {
    let s = sigmoid(tp.c() * z);
    let r7a = tp.alpha1() * z - tp.beta1() * w + tp.b1() * s;
    let r7b = tp.alpha1() * w - tp.beta1() * z - tp.a1() * s;
    (r7a.abs(), r7b.abs())
}

/// Brent's method: inverse quadratic interpolation and secant steps,
/// falling back to bisection whenever they would not shrink the bracket
/// fast enough.
///
/// `tol` is an absolute tolerance on the abscissa. The returned point lies
/// within `tol + 4 eps |r|` of a sign change of `g`.
pub fn brent_root<T, F>(g: F, bracket: &BracketingInterval<T>, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    bracket.check()?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol.as_f64(),
            reason: "must be > 0",
        });
    }
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let eps = T::epsilon();

    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (bracket.g_lo, bracket.g_hi);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..BRENT_MAX_ITER {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * eps * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = two * xm * s;
                q = T::one() - s;
            } else {
                // inverse quadratic
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if xm > T::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = g(b);
    }
    Ok(b)
}

/// All fixed points whose `z0` lies on the scan grid, ordered by `z0`.
///
/// An empty list means no sign change was found on the grid.
pub fn find_fixed_points<T: Real>(
    tp: &TransformedParams<T>,
    grid: &ScanGrid<T>,
) -> Result<Vec<FixedPointResult<T>>> {
    find_fixed_points_with_tol(tp, grid, T::lit(DEFAULT_BRENT_TOL))
}

pub fn find_fixed_points_with_tol<T: Real>(
    tp: &TransformedParams<T>,
    grid: &ScanGrid<T>,
    tol: T,
) -> Result<Vec<FixedPointResult<T>>> {
    if grid.points < 2 || !(grid.lo < grid.hi) {
        return Err(Error::InvalidParameter {
            name: "scan grid",
            value: grid.points as f64,
            reason: "needs at least two points on a nonempty range",
        });
    }
    let residual = ScalarResidual::new(tp)?;
    let g = |z: T| residual.eval(z);
    let step = (grid.hi - grid.lo) / T::from_usize_lossy(grid.points - 1);
    let node = |i: usize| {
        if i + 1 == grid.points {
            grid.hi
        } else {
            grid.lo + step * T::from_usize_lossy(i)
        }
    };

    let mut roots: Vec<T> = Vec::new();
    let mut prev_z = node(0);
    let mut prev_g = g(prev_z);
    if prev_g == T::zero() {
        roots.push(prev_z);
    }
    for i in 1..grid.points {
        let z = node(i);
        let gz = g(z);
        if gz == T::zero() {
            roots.push(z);
        } else if prev_g != T::zero() && (prev_g < T::zero()) != (gz < T::zero()) {
            let bracket = BracketingInterval {
                lo: prev_z,
                hi: z,
                g_lo: prev_g,
                g_hi: gz,
            };
            roots.push(brent_root(g, &bracket, tol)?);
        }
        prev_z = z;
        prev_g = gz;
    }

    let dedup = T::lit(DEDUP_DISTANCE);
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|later, kept| (*later - *kept).abs() < dedup);

    let k = residual.slope();
    let limit = T::lit(RESIDUAL_TOL);
    Ok(roots
        .into_iter()
        .map(|z0| {
            let w0 = k * z0;
            let (residual7a, residual7b) = fixed_point_residuals(z0, w0, tp);
            FixedPointResult {
                z0,
                w0,
                residual7a,
                residual7b,
                converged: residual7a <= limit && residual7b <= limit,
            }
        })
        .collect())
}

/// One row of a fixed-point sweep over the elasticity coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointRow<T> {
    pub c: T,
    pub roots: Result<Vec<FixedPointResult<T>>>,
}

/// Fixed points for every `c` in `c_values`, in input order. Cells that
/// fail (negative `c`, degenerate slope) carry their error in-row.
pub fn fixed_point_sweep<T: Real>(
    tp_base: &TransformedParams<T>,
    c_values: &[T],
    grid: &ScanGrid<T>,
) -> Vec<FixedPointRow<T>> {
    c_values
        .par_iter()
        .map(|&c| FixedPointRow {
            c,
            roots: tp_base
                .with_c(c)
                .and_then(|tp| find_fixed_points(&tp, grid)),
        })
        .collect()
}
