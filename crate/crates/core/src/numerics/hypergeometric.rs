//! Gauss hypergeometric function restricted to `z <= 0`, `c > b > 0`.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_TERMS: usize = 2_000_000;

fn series<S: Real>(a: S, b: S, c: S, z: S) -> Result<S> {
    let mut term = S::one();
    let mut sum = S::one();
    let mut k = S::zero();
    let mut quiet = 0;
    for _ in 0..MAX_TERMS {
        term = term * (a + k) * (b + k) / ((c + k) * (k + S::one())) * z;
        sum = sum + term;
        k = k + S::one();
        if term.abs() <= S::epsilon() * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::SeriesNonConvergence("2F1"))
}

/// `2F1(a, b; c; z)` for `z <= 0` and `c > b > 0`.
///
/// Uses the power series for `-1/2 <= z <= 0` and the Pfaff transformation
/// `2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))` below that, so the
/// series argument always stays inside `[0, 1)`.
pub fn gauss_2f1<S: Real>(a: S, b: S, c: S, z: S) -> Result<S> {
    if !(z <= S::zero()) || !z.is_finite() || !(c > b && b > S::zero()) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "2F1 implemented for z <= 0 and c > b > 0; got a={a}, b={b}, c={c}, z={z}"
        )));
    }
    if z == S::zero() {
        return Ok(S::one());
    }
    if z >= S::lit(-0.5) {
        return series(a, b, c, z);
    }
    let w = z / (z - S::one());
    Ok((S::one() - z).powf(-a) * series(a, c - b, c, w)?)
}
