//! One-dimensional maximization helpers.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n` points spaced evenly in log scale from `lo` to `hi` inclusive.
pub fn log_grid<S: Real>(lo: S, hi: S, n: usize) -> Result<Vec<S>> {
    if !(lo > S::zero() && hi >= lo) || n == 0 || (n == 1 && hi != lo) {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < lo <= hi and enough points (lo={lo}, hi={hi}, n={n})"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / S::lit((n - 1) as f64);
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + step * S::lit(i as f64)).exp()
            }
        })
        .collect())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid<S: Real>(lo: S, hi: S, n: usize) -> Result<Vec<S>> {
    if !(hi >= lo) || n == 0 || (n == 1 && hi != lo) {
        return Err(Error::InvalidArgument(format!(
            "linear grid needs lo <= hi and enough points (lo={lo}, hi={hi}, n={n})"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / S::lit((n - 1) as f64);
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * S::lit(i as f64) })
        .collect())
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Stops when the bracket is narrower than `rel_tol * |x|`.
pub fn golden_section_max<S, F>(mut f: F, lo: S, hi: S, rel_tol: S, max_iter: usize) -> Result<(S, S)>
where
    S: Real,
    F: FnMut(S) -> Result<S>,
{
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty bracket [{lo}, {hi}]")));
    }
    let inv_phi = (S::lit(5.0).sqrt() - S::one()) / S::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..max_iter {
        if (b - a).abs() <= rel_tol * (c.abs() + d.abs()) / S::lit(2.0) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}
