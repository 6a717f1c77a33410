//! Coverage curves over a threshold grid.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::coverage::{
    coverage_bound, coverage_bounds, coverage_exact, coverage_lower_tractable, coverage_noise_limited,
    coverage_rayleigh_closed, default_approx_kappa,
};
use crate::error::{Error, Result};
use crate::geometry::NetworkConfig;
use crate::numerics::search::linear_grid;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMethod {
    Exact,
    BoundUpper,
    BoundLowerAlzer,
    ApproxKappa,
    LowerTractable,
    RayleighClosed,
    NoiseLimited,
    MonteCarlo,
}

impl CoverageMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::BoundUpper => "bound_upper",
            Self::BoundLowerAlzer => "bound_lower_alzer",
            Self::ApproxKappa => "approx_kappa",
            Self::LowerTractable => "lower_tractable",
            Self::RayleighClosed => "rayleigh_closed",
            Self::NoiseLimited => "noise_limited",
            Self::MonteCarlo => "monte_carlo",
        }
    }

    /// Methods whose curves must be nonincreasing in the threshold.
    pub fn is_monotone(self) -> bool {
        matches!(self, Self::Exact | Self::MonteCarlo | Self::RayleighClosed)
    }
}

impl fmt::Display for CoverageMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoverageMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact" => Self::Exact,
            "bound_upper" => Self::BoundUpper,
            "bound_lower_alzer" => Self::BoundLowerAlzer,
            "approx_kappa" => Self::ApproxKappa,
            "lower_tractable" => Self::LowerTractable,
            "rayleigh_closed" => Self::RayleighClosed,
            "noise_limited" => Self::NoiseLimited,
            "monte_carlo" => Self::MonteCarlo,
            other => return Err(Error::InvalidArgument(format!("unknown coverage method '{other}'"))),
        })
    }
}

/// Coverage values on a grid of linear thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve<S> {
    pub thresholds: Vec<S>,
    pub values: Vec<S>,
    pub method: CoverageMethod,
    /// 95% half-widths, Monte Carlo only.
    pub ci_halfwidth: Option<Vec<S>>,
}

impl<S: Real> CoverageCurve<S> {
    pub fn new(thresholds: Vec<S>, values: Vec<S>, method: CoverageMethod, ci_halfwidth: Option<Vec<S>>) -> Result<Self> {
        if thresholds.len() != values.len() || ci_halfwidth.as_ref().is_some_and(|c| c.len() != values.len()) {
            return Err(Error::InvalidArgument("curve columns differ in length".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= S::zero() && **v <= S::one())) {
            return Err(Error::Domain(format!("coverage value {v} outside [0, 1]")));
        }
        Ok(Self { thresholds, values, method, ci_halfwidth })
    }

    pub fn thresholds_db(&self) -> Vec<S> {
        self.thresholds.iter().map(|&g| linear_to_db(g)).collect()
    }

    pub fn is_nonincreasing(&self, tol: S) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn db_to_linear<S: Real>(db: S) -> S {
    S::lit(10.0).powf(db / S::lit(10.0))
}

pub fn linear_to_db<S: Real>(x: S) -> S {
    S::lit(10.0) * x.log10()
}

/// Linear thresholds for `points` values evenly spaced in dB over `[start, stop]`.
pub fn threshold_grid_db<S: Real>(start_db: S, stop_db: S, points: usize) -> Result<Vec<S>> {
    Ok(linear_grid(start_db, stop_db, points)?.into_iter().map(db_to_linear).collect())
}

/// Evaluates `f` at every threshold in parallel; results keep grid order.
pub fn coverage_curve<S, F>(thresholds: &[S], method: CoverageMethod, f: F) -> Result<CoverageCurve<S>>
where
    S: Real,
    F: Fn(S) -> Result<S> + Sync,
{
    let values = thresholds.par_iter().map(|&g| f(g)).collect::<Result<Vec<S>>>()?;
    CoverageCurve::new(thresholds.to_vec(), values, method, None)
}

/// Analytic curve for one of the single-valued methods. `kappa` applies to
/// [`CoverageMethod::ApproxKappa`] and defaults to the midpoint of the range.
pub fn analytic_curve<S: Real>(
    config: &NetworkConfig<S>,
    thresholds: &[S],
    method: CoverageMethod,
    kappa: Option<S>,
) -> Result<CoverageCurve<S>> {
    let c = *config;
    match method {
        CoverageMethod::Exact => coverage_curve(thresholds, method, |g| coverage_exact(g, &c)),
        CoverageMethod::ApproxKappa => {
            let k = kappa.unwrap_or_else(|| default_approx_kappa(c.nakagami_m));
            coverage_curve(thresholds, method, |g| coverage_bound(g, &c, k))
        }
        CoverageMethod::LowerTractable => coverage_curve(thresholds, method, |g| coverage_lower_tractable(g, &c)),
        CoverageMethod::RayleighClosed => coverage_curve(thresholds, method, |g| coverage_rayleigh_closed(g, &c)),
        CoverageMethod::NoiseLimited => coverage_curve(thresholds, method, |g| coverage_noise_limited(g, &c)),
        CoverageMethod::BoundUpper | CoverageMethod::BoundLowerAlzer => {
            let (lo, hi) = bound_curves(config, thresholds)?;
            Ok(if method == CoverageMethod::BoundUpper { hi } else { lo })
        }
        CoverageMethod::MonteCarlo => Err(Error::Unsupported("Monte Carlo curves come from the simulator".into())),
    }
}

/// Lower and upper `kappa`-endpoint curves, sorted per grid point.
pub fn bound_curves<S: Real>(config: &NetworkConfig<S>, thresholds: &[S]) -> Result<(CoverageCurve<S>, CoverageCurve<S>)> {
    let c = *config;
    let pairs = thresholds.par_iter().map(|&g| coverage_bounds(g, &c)).collect::<Result<Vec<_>>>()?;
    let lower = CoverageCurve::new(
        thresholds.to_vec(),
        pairs.iter().map(|p| p.lower).collect(),
        CoverageMethod::BoundLowerAlzer,
        None,
    )?;
    let upper = CoverageCurve::new(
        thresholds.to_vec(),
        pairs.iter().map(|p| p.upper).collect(),
        CoverageMethod::BoundUpper,
        None,
    )?;
    Ok((lower, upper))
}
