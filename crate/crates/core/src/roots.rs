//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Absolute tolerance on the root location used throughout the crate.
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

/// Finds a root of `f` in `[a, b]` by bisection, with a secant step tried
/// before every halving.
///
/// `f(a)` and `f(b)` must differ in sign (or one of them be zero). The
/// bracket shrinks at least by half per iteration, so convergence is
/// guaranteed for continuous `f`; the secant step speeds up the smooth case.
pub fn bisect_secant<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) {
        return Err(Error::NoBracket { a: lo, b: hi });
    }

    for _ in 0..max_iter {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }

        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if secant > lo && secant < hi {
            let f_s = f(secant);
            if f_s == 0.0 {
                return Ok(secant);
            }
            if f_s.signum() == f_lo.signum() {
                lo = secant;
                f_lo = f_s;
            } else {
                hi = secant;
                f_hi = f_s;
            }
            if hi - lo <= tol {
                return Ok(0.5 * (lo + hi));
            }
        }

        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    if hi - lo <= tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NoConvergence(max_iter))
    }
}
