//! Coverage-maximizing satellite density and the density-altitude trade-off.
//!
//! For Rayleigh fading the closed-form lower bound reads
//! `P(lambda) = (e^(-a lambda) - e^(-b lambda)) / c` with
//! `a = pi (R_S/R_E) eta^U R_min^2`, `b = pi (R_S/R_E) ((1 + eta^U) R_max^2 - R_min^2)`
//! and `c = 1 + eta^U`. It is unimodal with maximizer `ln(b/a) / (b - a)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::coverage::{coverage_lower_tractable, coverage_rayleigh_closed, eta_upper_rayleigh};
use crate::error::{Error, Result};
use crate::geometry::NetworkConfig;
use crate::numerics::eta::{eta_upper, EtaArgs};
use crate::numerics::quadrature::QuadratureSpec;
use crate::numerics::search::{golden_section_max, log_grid};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumMethod {
    /// Closed-form maximizer of the Rayleigh lower bound.
    ClosedForm,
    /// Grid search plus golden section over the tractable lower bound.
    Numeric,
}

impl OptimumMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalDensityResult<S> {
    /// Satellites per km².
    pub lambda_star: S,
    /// `lambda* |A|`
    pub mean_count_star: S,
    pub coverage_at_star: S,
    /// `eta^U(m gamma)`
    pub eta_u_value: S,
    pub method: OptimumMethod,
    /// Numeric searches only: the maximum sat on the search boundary.
    pub at_boundary: bool,
}

/// `(a, b, c)` of the simplified objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveCoefficients<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Real> ObjectiveCoefficients<S> {
    pub fn argmax(&self) -> S {
        (self.b / self.a).ln() / (self.b - self.a)
    }
}

fn check_inputs<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<()> {
    config.validate()?;
    if config.nakagami_m != 1 {
        return Err(Error::Unsupported(format!(
            "the closed-form optimum needs m = 1 (got m = {}); use the numeric search",
            config.nakagami_m
        )));
    }
    if !(gamma > S::zero()) || !gamma.is_finite() {
        return Err(Error::Domain(format!("threshold must be positive, got {gamma}")));
    }
    Ok(())
}

pub fn objective_coefficients<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<ObjectiveCoefficients<S>> {
    check_inputs(gamma, config)?;
    let eta_u = eta_upper_rayleigh(gamma, config)?;
    let cap = config.cap()?;
    let k = config.area_per_squared_distance();
    let (rmin, rmax) = (cap.r_min, cap.r_max);
    Ok(ObjectiveCoefficients {
        a: k * eta_u * rmin * rmin,
        b: k * ((S::one() + eta_u) * rmax * rmax - rmin * rmin),
        c: S::one() + eta_u,
    })
}

/// `(e^(-a lambda) - e^(-b lambda)) / c`
pub fn simplified_objective<S: Real>(lambda: S, coeffs: &ObjectiveCoefficients<S>) -> S {
    ((-coeffs.a * lambda).exp() - (-coeffs.b * lambda).exp()) / coeffs.c
}

/// Density maximizing the Rayleigh closed-form coverage lower bound.
pub fn optimal_density<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<OptimalDensityResult<S>> {
    let coeffs = objective_coefficients(gamma, config)?;
    let lambda_star = coeffs.argmax();
    let tuned = config.with_density(lambda_star);
    Ok(OptimalDensityResult {
        lambda_star,
        mean_count_star: lambda_star * config.cap()?.area,
        coverage_at_star: coverage_rayleigh_closed(gamma, &tuned)?,
        eta_u_value: coeffs.c - S::one(),
        method: OptimumMethod::ClosedForm,
        at_boundary: false,
    })
}

/// 50 log-spaced altitudes over [200, 2000] km.
pub fn default_tradeoff_altitudes<S: Real>() -> Vec<S> {
    log_grid(S::lit(200.0), S::lit(2000.0), 50).expect("static grid")
}

/// `(h, lambda* |A|)` for each altitude in km.
pub fn tradeoff_curve<S: Real>(gamma: S, config: &NetworkConfig<S>, altitudes: &[S]) -> Result<Vec<(S, S)>> {
    altitudes
        .par_iter()
        .map(|&h| {
            let mut c = *config;
            c.satellite_radius = c.earth_radius + h;
            Ok((h, optimal_density(gamma, &c)?.mean_count_star))
        })
        .collect()
}

/// Result of a numeric density search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySearch<S> {
    pub lambda: S,
    pub objective: S,
    pub at_boundary: bool,
}

const SEARCH_POINTS: usize = 161;

fn grid_then_golden<S, F>(lo: S, hi: S, objective: F) -> Result<DensitySearch<S>>
where
    S: Real,
    F: Fn(S) -> Result<S> + Sync,
{
    if !(lo > S::zero() && hi > lo) {
        return Err(Error::InvalidArgument(format!("need 0 < lambda_lo < lambda_hi, got [{lo}, {hi}]")));
    }
    let grid = log_grid(lo, hi, SEARCH_POINTS)?;
    let values = grid.par_iter().map(|&l| objective(l)).collect::<Result<Vec<S>>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let last = grid.len() - 1;
    if best == 0 || best == last {
        log::warn!("objective maximum lies on the search boundary at lambda = {}", grid[best]);
        return Ok(DensitySearch { lambda: grid[best], objective: values[best], at_boundary: true });
    }
    let (a, b) = (grid[best - 1].ln(), grid[best + 1].ln());
    let (x, fx) = golden_section_max(|t: S| objective(t.exp()), a, b, S::lit(1e-10), 200)?;
    Ok(DensitySearch { lambda: x.exp(), objective: fx, at_boundary: false })
}

/// Numeric argmax of the Rayleigh closed-form bound over `[lambda_lo, lambda_hi]`.
pub fn argmax_density_oracle<S: Real>(gamma: S, config: &NetworkConfig<S>, lambda_lo: S, lambda_hi: S) -> Result<DensitySearch<S>> {
    check_inputs(gamma, config)?;
    let c = *config;
    grid_then_golden(lambda_lo, lambda_hi, |l| coverage_rayleigh_closed(gamma, &c.with_density(l)))
}

/// The Rayleigh closed-form bound on a density grid.
pub fn objective_on_grid<S: Real>(gamma: S, config: &NetworkConfig<S>, densities: &[S]) -> Result<Vec<S>> {
    check_inputs(gamma, config)?;
    let c = *config;
    densities.par_iter().map(|&l| coverage_rayleigh_closed(gamma, &c.with_density(l))).collect()
}

/// Number of sign changes of consecutive differences, ignoring exact ties.
pub fn difference_sign_changes<S: Real>(values: &[S]) -> usize {
    let signs: Vec<bool> = values
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| w[1] > w[0])
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Grid search for any `m` over the tractable lower bound. A numerical
/// feature, reported with [`OptimumMethod::Numeric`].
pub fn optimal_density_numeric<S: Real>(
    gamma: S,
    config: &NetworkConfig<S>,
    lambda_lo: S,
    lambda_hi: S,
) -> Result<OptimalDensityResult<S>> {
    config.validate()?;
    if !(gamma > S::zero()) || !gamma.is_finite() {
        return Err(Error::Domain(format!("threshold must be positive, got {gamma}")));
    }
    let c = *config;
    let found = grid_then_golden(lambda_lo, lambda_hi, |l| coverage_lower_tractable(gamma, &c.with_density(l)))?;
    let args = EtaArgs::from_config(config)?;
    let eta_u = eta_upper(S::count(config.nakagami_m) * gamma, &args, &QuadratureSpec::for_scalar::<S>())?;
    Ok(OptimalDensityResult {
        lambda_star: found.lambda,
        mean_count_star: found.lambda * config.cap()?.area,
        coverage_at_star: found.objective,
        eta_u_value: eta_u,
        method: OptimumMethod::Numeric,
        at_boundary: found.at_boundary,
    })
}
