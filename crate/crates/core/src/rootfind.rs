//! Bracketed scalar root finding: sign scan plus bisection.

use crate::error::{Error, Result};

/// Scan `[a, b]` in `n` equal steps for the first sign change of `f`.
/// Returns the bracketing pair, or `None` if `f` keeps one sign at the
/// sampled points. An exact zero at a sample brackets trivially.
pub fn bracket_first_sign_change(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    n: usize,
) -> Option<(f64, f64)> {
    assert!(n >= 1);
    let step = (b - a) / n as f64;
    let mut s_prev = a;
    let mut f_prev = f(a);
    for i in 1..=n {
        let s = if i == n { b } else { a + step * i as f64 };
        let fv = f(s);
        if f_prev == 0.0 {
            return Some((s_prev, s_prev));
        }
        if f_prev.signum() != fv.signum() {
            return Some((s_prev, s));
        }
        s_prev = s;
        f_prev = fv;
    }
    None
}

/// Bisection on a bracketing interval, to absolute width `tol`.
pub fn bisect(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoRoot(format!(
            "no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }
    // 200 halvings reduce any bracket below f64 resolution.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
