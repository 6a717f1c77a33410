//! Visibility probability and the conditional Laplace transform of interference.

use crate::error::{Error, Result};
use crate::geometry::{CapGeometry, NetworkConfig};
use crate::numerics::derivatives::exp_composite_derivatives;
use crate::numerics::eta::{eta, eta_derivative_integrals, EtaArgs};
use crate::numerics::quadrature::QuadratureSpec;
use crate::scalar::Real;

/// Quantities shared by every analytic coverage expression.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Prepared<S> {
    pub cap: CapGeometry<S>,
    /// `lambda pi R_S / R_E`
    pub kappa: S,
    pub eta: EtaArgs<S>,
    pub visibility: S,
    pub alpha: S,
    pub m: u32,
}

impl<S: Real> Prepared<S> {
    pub fn new(config: &NetworkConfig<S>) -> Result<Self> {
        config.validate()?;
        let cap = config.cap()?;
        let kappa = config.density * config.area_per_squared_distance();
        Ok(Self {
            cap,
            kappa,
            eta: EtaArgs::from_config(config)?,
            visibility: -(-config.density * cap.area).exp_m1(),
            alpha: config.path_loss_exponent,
            m: config.nakagami_m,
        })
    }

    /// `2 kappa r exp(-kappa (r^2 - R_min^2))`: the nearest-distance density
    /// times the visibility probability.
    #[inline]
    pub fn weight(&self, r: S) -> S {
        let rm = self.cap.r_min;
        S::lit(2.0) * self.kappa * r * (-self.kappa * (r - rm) * (r + rm)).exp()
    }

    /// `(-1)^k s^k L^(k)(s)` for `k = 0..=order` at `s = x r^alpha`.
    ///
    /// Every term of the recurrence is nonnegative in this signed form, so no
    /// cancellation occurs.
    pub fn signed_scaled_derivatives(&self, x: S, r: S, order: usize, spec: &QuadratureSpec) -> Result<Vec<S>> {
        let j = eta_derivative_integrals(x, r, order, &self.eta, spec)?;
        let scale = self.kappa * r * r;
        let mut b: Vec<S> = j.iter().map(|&v| scale * v).collect();
        b[0] = -b[0];
        Ok(exp_composite_derivatives(&b))
    }
}

/// Probability that at least one satellite is visible, `1 - exp(-lambda |A|)`.
/// Uses the elevation-limited cap when `min_elevation > 0`.
pub fn visibility_probability<S: Real>(config: &NetworkConfig<S>) -> Result<S> {
    Ok(Prepared::new(config)?.visibility)
}

fn check_s<S: Real>(s: S) -> Result<()> {
    if !(s >= S::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!("Laplace argument must be finite and >= 0, got {s}")));
    }
    Ok(())
}

/// `E[exp(-s I_r)]` where `I_r` sums `G H_i d_i^(-alpha)` over satellites farther than `r`.
pub fn laplace_interference<S: Real>(s: S, r: S, config: &NetworkConfig<S>) -> Result<S> {
    laplace_interference_with(s, r, config, &QuadratureSpec::for_scalar::<S>())
}

pub fn laplace_interference_with<S: Real>(s: S, r: S, config: &NetworkConfig<S>, spec: &QuadratureSpec) -> Result<S> {
    check_s(s)?;
    let p = Prepared::new(config)?;
    let r = p.cap.clamp_to_support(r)?;
    if s == S::zero() || p.kappa == S::zero() {
        return Ok(S::one());
    }
    let x = s / r.powf(p.alpha);
    Ok((-p.kappa * r * r * eta(x, r, &p.eta, spec)?).exp())
}

/// `L(s), L'(s), ..., L^(order)(s)` of [`laplace_interference`] in `s`, from the
/// analytic derivatives of the exponent.
pub fn laplace_derivatives<S: Real>(
    s: S,
    r: S,
    order: usize,
    config: &NetworkConfig<S>,
    spec: &QuadratureSpec,
) -> Result<Vec<S>> {
    check_s(s)?;
    if s == S::zero() {
        if order > 0 {
            return Err(Error::Domain("derivatives are evaluated at s > 0".into()));
        }
        return Ok(vec![S::one()]);
    }
    let p = Prepared::new(config)?;
    let r = p.cap.clamp_to_support(r)?;
    if p.kappa == S::zero() {
        let mut out = vec![S::zero(); order + 1];
        out[0] = S::one();
        return Ok(out);
    }
    let x = s / r.powf(p.alpha);
    let a = p.signed_scaled_derivatives(x, r, order, spec)?;
    let mut out = Vec::with_capacity(order + 1);
    let mut s_pow = S::one();
    for (k, v) in a.into_iter().enumerate() {
        let sign = if k % 2 == 0 { S::one() } else { -S::one() };
        out.push(sign * v / s_pow);
        s_pow = s_pow * s;
    }
    Ok(out)
}
