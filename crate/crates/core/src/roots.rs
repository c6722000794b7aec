//! Bracketing root search for scalar equations.

use crate::error::{Error, Result};
use crate::scalar::Real;

const BISECTION_MAX_ITER: usize = 400;

/// A sign-change interval of a residual. `lo == hi` marks an exact zero on
/// the scan grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
}

/// Scans `f` on an increasing grid and returns every sign-change interval.
pub fn scan_brackets<T, F>(mut f: F, grid: &[T]) -> Result<Vec<Bracket<T>>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut out = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for &x in grid {
        let fx = f(x)?;
        if fx.is_nan() {
            return Err(Error::domain("scan_brackets", format!("residual is NaN at {x}")));
        }
        if fx == T::zero() {
            out.push(Bracket { lo: x, hi: x });
        } else if let Some((xp, fp)) = prev {
            if fp != T::zero() && (fp < T::zero()) != (fx < T::zero()) {
                out.push(Bracket { lo: xp, hi: x });
            }
        }
        prev = Some((x, fx));
    }
    Ok(out)
}

/// Bisection inside a bracket until the residual is below `tol` or the
/// interval cannot be split further.
pub fn bisect<T, F>(mut f: F, bracket: Bracket<T>, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    if lo == hi {
        return Ok(lo);
    }
    let mut f_lo = f(lo)?;
    if f_lo == T::zero() {
        return Ok(lo);
    }
    let half = T::lit(0.5);
    let mut mid = half * (lo + hi);
    for _ in 0..BISECTION_MAX_ITER {
        mid = half * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}
