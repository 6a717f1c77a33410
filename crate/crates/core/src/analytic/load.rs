//! Approximate user-load distribution and per-user rate.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadModel<S> {
    /// Users per km².
    pub user_density: S,
    /// Satellites per km².
    pub satellite_density: S,
    /// Bandwidth in Hz.
    pub bandwidth: S,
}

impl<S: Real> LoadModel<S> {
    /// Users per satellite, `lambda_u / lambda`.
    pub fn ratio(&self) -> Result<S> {
        if !(self.satellite_density > S::zero()) || !(self.user_density >= S::zero()) || !(self.bandwidth >= S::zero()) {
            return Err(Error::Domain(format!(
                "load model needs lambda > 0 and nonnegative user density and bandwidth ({:?})",
                self
            )));
        }
        Ok(self.user_density / self.satellite_density)
    }
}

const SHAPE: f64 = 3.5;

/// `P[L = n] ~ 3.5^3.5 / n! * Gamma(n + 4.5) / Gamma(3.5) * rho^n * (3.5 + rho)^-(n + 4.5)`
/// with `rho = lambda_u / lambda`. This is a negative binomial law with mean `9 rho / 7`.
pub fn load_pmf<S: Real>(n: u64, model: &LoadModel<S>) -> Result<S> {
    let rho = model.ratio()?.as_f64();
    if rho == 0.0 {
        return Ok(if n == 0 { S::one() } else { S::zero() });
    }
    let nf = n as f64;
    let ln_p = SHAPE * SHAPE.ln() + ln_gamma(nf + SHAPE + 1.0) - ln_gamma(SHAPE) - ln_gamma(nf + 1.0) + nf * rho.ln()
        - (nf + SHAPE + 1.0) * (SHAPE + rho).ln();
    Ok(S::lit(ln_p.exp()))
}

/// `(W / load) log2(1 + sinr)` in bits per second.
pub fn per_user_rate<S: Real>(bandwidth: S, load: u64, sinr: S) -> Result<S> {
    if load == 0 {
        return Err(Error::Domain("load must be at least 1".into()));
    }
    if !(sinr >= S::zero()) || !(bandwidth >= S::zero()) {
        return Err(Error::Domain(format!("bandwidth and SINR must be nonnegative (W={bandwidth}, sinr={sinr})")));
    }
    Ok(bandwidth / S::lit(load as f64) * sinr.ln_1p() / S::LN_2())
}
