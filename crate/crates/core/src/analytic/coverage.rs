//! Coverage probability: exact quadrature, gamma-CDF sandwich bounds and the
//! tractable lower bounds, plus the noise-limited counterpart.
//!
//! All unconditional expressions integrate `2 kappa r exp(-kappa (r^2 - R_min^2))`,
//! which is the nearest-distance density already multiplied by the
//! visibility probability, with `kappa = lambda pi R_S / R_E`.

use serde::{Deserialize, Serialize};

use crate::analytic::laplace::Prepared;
use crate::error::{Error, Result};
use crate::geometry::NetworkConfig;
use crate::numerics::eta::{eta, eta_upper, eta_upper_closed, eta_upper_hypergeometric};
use crate::numerics::quadrature::{integrate_fallible, QuadratureSpec};
use crate::randomfield::fading_power_ccdf;
use crate::scalar::Real;

fn check_gamma<S: Real>(gamma: S) -> Result<()> {
    if !(gamma > S::zero()) || !gamma.is_finite() {
        return Err(Error::Domain(format!("threshold must be positive and finite, got {gamma}")));
    }
    Ok(())
}

fn clamp_probability<S: Real>(v: S, ceiling: S) -> S {
    v.max(S::zero()).min(ceiling)
}

fn binomial<S: Real>(n: u32, k: u32) -> S {
    let mut c = S::one();
    for i in 0..k {
        c = c * S::count(n - i) / S::count(i + 1);
    }
    c
}

/// Exact interference-limited coverage `P[SIR >= gamma]` by nested quadrature.
pub fn coverage_exact<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<S> {
    coverage_exact_with(gamma, config, &QuadratureSpec::for_scalar::<S>())
}

/// [`coverage_exact`] with explicit outer tolerances; the inner integrals run one
/// order of magnitude tighter.
pub fn coverage_exact_with<S: Real>(gamma: S, config: &NetworkConfig<S>, spec: &QuadratureSpec) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    if p.kappa == S::zero() {
        return Ok(S::zero());
    }
    let inner = spec.tightened::<S>();
    let x = S::count(p.m) * gamma;
    let order = (p.m - 1) as usize;
    let v = integrate_fallible(
        |r| {
            let a = p.signed_scaled_derivatives(x, r, order, &inner)?;
            let mut fact = S::one();
            let mut sum = S::zero();
            for (k, ak) in a.iter().enumerate() {
                if k > 0 {
                    fact = fact * S::lit(k as f64);
                }
                sum = sum + *ak / fact;
            }
            Ok(p.weight(r) * sum)
        },
        p.cap.r_min,
        p.cap.r_max,
        spec,
    )?
    .value;
    Ok(clamp_probability(v, p.visibility))
}

/// Endpoints of the admissible `kappa` range: `(1, (m!)^(-1/m))`.
///
/// With `kappa = 1` the gamma CDF sandwich gives a lower bound on the fading
/// tail, with `(m!)^(-1/m)` an upper bound; the two coincide for `m = 1`.
pub fn kappa_endpoints<S: Real>(m: u32) -> (S, S) {
    let ln_fact: f64 = (2..=m).map(|k| f64::from(k).ln()).sum();
    (S::one(), S::lit((-ln_fact / f64::from(m.max(1))).exp()))
}

/// Default `kappa` of the tunable approximation: the midpoint of the range.
pub fn default_approx_kappa<S: Real>(m: u32) -> S {
    let (a, b) = kappa_endpoints::<S>(m);
    (a + b) / S::lit(2.0)
}

/// Coverage with the fading tail replaced by `1 - (1 - exp(-m kappa x))^m`.
/// `kappa = 1` and `kappa = (m!)^(-1/m)` give a bracketing pair; values in
/// between give the tunable approximation.
pub fn coverage_bound<S: Real>(gamma: S, config: &NetworkConfig<S>, kappa: S) -> Result<S> {
    coverage_bound_with(gamma, config, kappa, &QuadratureSpec::for_scalar::<S>())
}

pub fn coverage_bound_with<S: Real>(gamma: S, config: &NetworkConfig<S>, kappa: S, spec: &QuadratureSpec) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    let (k1, k2) = kappa_endpoints::<S>(p.m);
    let (lo, hi) = (k1.min(k2), k1.max(k2));
    let slack = S::lit(16.0) * S::epsilon();
    if !(kappa >= lo * (S::one() - slack) && kappa <= hi * (S::one() + slack)) {
        return Err(Error::InvalidArgument(format!(
            "kappa {kappa} outside [{lo}, {hi}] for m = {}",
            p.m
        )));
    }
    if p.kappa == S::zero() {
        return Ok(S::zero());
    }
    let inner = spec.tightened::<S>();
    let m = p.m;
    let coeffs: Vec<(S, S)> = (1..=m)
        .map(|l| {
            let sign = if l % 2 == 1 { S::one() } else { -S::one() };
            (sign * binomial::<S>(m, l), S::count(l) * S::count(m) * kappa * gamma)
        })
        .collect();
    let v = integrate_fallible(
        |r| {
            let mut sum = S::zero();
            for &(c, x) in &coeffs {
                sum = sum + c * (-p.kappa * r * r * eta(x, r, &p.eta, &inner)?).exp();
            }
            Ok(p.weight(r) * sum)
        },
        p.cap.r_min,
        p.cap.r_max,
        spec,
    )?
    .value;
    Ok(clamp_probability(v, p.visibility))
}

/// The two `kappa`-endpoint evaluations sorted by value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair<S> {
    pub lower: S,
    pub upper: S,
    pub kappa_lower: S,
    pub kappa_upper: S,
}

pub fn coverage_bounds<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<BoundPair<S>> {
    coverage_bounds_with(gamma, config, &QuadratureSpec::for_scalar::<S>())
}

pub fn coverage_bounds_with<S: Real>(gamma: S, config: &NetworkConfig<S>, spec: &QuadratureSpec) -> Result<BoundPair<S>> {
    let (k1, k2) = kappa_endpoints::<S>(config.nakagami_m);
    let v1 = coverage_bound_with(gamma, config, k1, spec)?;
    let v2 = if k1 == k2 { v1 } else { coverage_bound_with(gamma, config, k2, spec)? };
    Ok(if v1 <= v2 {
        BoundPair { lower: v1, upper: v2, kappa_lower: k1, kappa_upper: k2 }
    } else {
        BoundPair { lower: v2, upper: v1, kappa_lower: k2, kappa_upper: k1 }
    })
}

/// `[e^(-k eta R_min^2) - e^(-k((1+eta) R_max^2 - R_min^2))] / (1 + eta)`,
/// written as a product to avoid cancellation.
fn tractable_term<S: Real>(p: &Prepared<S>, eta_u: S) -> S {
    let (rmin, rmax) = (p.cap.r_min, p.cap.r_max);
    let one_eta = S::one() + eta_u;
    let head = (-p.kappa * eta_u * rmin * rmin).exp();
    let tail = -(-p.kappa * one_eta * (rmax - rmin) * (rmax + rmin)).exp_m1();
    head * tail / one_eta
}

/// Integral-free lower bound obtained by replacing `eta(x, r)` with `eta^U(x)`.
pub fn coverage_lower_tractable<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<S> {
    coverage_lower_tractable_with(gamma, config, &QuadratureSpec::for_scalar::<S>())
}

pub fn coverage_lower_tractable_with<S: Real>(gamma: S, config: &NetworkConfig<S>, spec: &QuadratureSpec) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    if p.kappa == S::zero() {
        return Ok(S::zero());
    }
    let m = p.m;
    let mut sum = S::zero();
    for l in 1..=m {
        let sign = if l % 2 == 1 { S::one() } else { -S::one() };
        let x = S::count(l) * S::count(m) * gamma;
        let eta_u = eta_upper(x, &p.eta, spec)?;
        sum = sum + sign * binomial::<S>(m, l) * tractable_term(&p, eta_u);
    }
    Ok(clamp_probability(sum, p.visibility))
}

/// `eta^U(gamma)` for Rayleigh fading from special functions: the logarithmic
/// closed form for `alpha = 2`, the hypergeometric form for `alpha > 2`.
pub fn eta_upper_rayleigh<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    rayleigh_eta(&p, gamma)
}

fn rayleigh_eta<S: Real>(p: &Prepared<S>, gamma: S) -> Result<S> {
    if p.m != 1 {
        return Err(Error::Unsupported(format!("closed form requires m = 1, got m = {}", p.m)));
    }
    let x_gain = p.eta.gain_ratio * gamma;
    if p.alpha == S::lit(2.0) {
        eta_upper_closed(x_gain, &p.eta)
    } else {
        eta_upper_hypergeometric(x_gain, &p.eta)
    }
}

/// Closed-form Rayleigh (`m = 1`) lower bound.
pub fn coverage_rayleigh_closed<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    let eta_u = rayleigh_eta(&p, gamma)?;
    if p.kappa == S::zero() {
        return Ok(S::zero());
    }
    Ok(clamp_probability(tractable_term(&p, eta_u), p.visibility))
}

/// `P[SNR >= gamma | cap nonempty]` ignoring interference, with the noise
/// taken from `config.normalized_noise` (km-based units).
pub fn coverage_noise_limited_conditional<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<S> {
    coverage_noise_limited_conditional_with(gamma, config, &QuadratureSpec::for_scalar::<S>())
}

pub fn coverage_noise_limited_conditional_with<S: Real>(
    gamma: S,
    config: &NetworkConfig<S>,
    spec: &QuadratureSpec,
) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    if p.kappa == S::zero() {
        return Err(Error::InvalidConfig("conditional coverage needs density > 0".into()));
    }
    Ok(clamp_probability(noise_integral(&p, gamma, config.normalized_noise, spec)? / p.visibility, S::one()))
}

/// Unconditional noise-limited coverage: the conditional value times the
/// visibility probability.
pub fn coverage_noise_limited<S: Real>(gamma: S, config: &NetworkConfig<S>) -> Result<S> {
    check_gamma(gamma)?;
    let p = Prepared::new(config)?;
    if p.kappa == S::zero() {
        return Ok(S::zero());
    }
    let spec = QuadratureSpec::for_scalar::<S>();
    Ok(clamp_probability(noise_integral(&p, gamma, config.normalized_noise, &spec)?, p.visibility))
}

fn noise_integral<S: Real>(p: &Prepared<S>, gamma: S, noise: S, spec: &QuadratureSpec) -> Result<S> {
    if !(noise >= S::zero()) {
        return Err(Error::Domain(format!("normalized noise must be >= 0, got {noise}")));
    }
    let m = p.m;
    let alpha = p.alpha;
    Ok(integrate_fallible(
        |r| Ok(p.weight(r) * fading_power_ccdf(m, gamma * r.powf(alpha) * noise)?),
        p.cap.r_min,
        p.cap.r_max,
        spec,
    )?
    .value)
}
