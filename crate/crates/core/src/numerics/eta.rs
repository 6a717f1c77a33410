//! The interference-exponent integral η and its r-independent upper version η^U.
//!
//! With `y = G x / m` the defining integral
//!
//! ```text
//! eta(x, r) = y^(2/a) * int_{y^(-2/a)}^{y^(-2/a) (Rmax/r)^2} [1 - (1 + u^(-a/2))^(-m)] du
//! ```
//!
//! is evaluated after the substitution `u = y^(-2/a) t`, which gives
//! `int_1^{(Rmax/r)^2} [1 - (1 + y t^(-a/2))^(-m)] dt` on a bounded interval
//! whatever the size of `y`.

use crate::error::{Error, Result};
use crate::geometry::NetworkConfig;
use crate::numerics::hypergeometric::gauss_2f1;
use crate::numerics::quadrature::{integrate, QuadratureSpec};
use crate::scalar::Real;

/// Model quantities η depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaArgs<S> {
    pub alpha: S,
    pub m: u32,
    pub gain_ratio: S,
    pub r_min: S,
    pub r_max: S,
}

impl<S: Real> EtaArgs<S> {
    /// Parameters for the visible cap of `config` (honors its minimum elevation).
    pub fn from_config(config: &NetworkConfig<S>) -> Result<Self> {
        let cap = config.cap()?;
        Ok(Self {
            alpha: config.path_loss_exponent,
            m: config.nakagami_m,
            gain_ratio: config.gain_ratio,
            r_min: cap.r_min,
            r_max: cap.r_max,
        })
    }

    fn check(&self) -> Result<()> {
        if self.m < 1 || !(self.alpha > S::zero()) || !(self.gain_ratio > S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "eta needs m >= 1, alpha > 0, G > 0 (m={}, alpha={}, G={})",
                self.m, self.alpha, self.gain_ratio
            )));
        }
        if !(self.r_min > S::zero() && self.r_max >= self.r_min) {
            return Err(Error::InvalidArgument(format!(
                "invalid support [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }

    fn scaled(&self, x: S) -> Result<S> {
        if !(x > S::zero()) || !x.is_finite() {
            return Err(Error::Domain(format!("eta argument must be positive and finite, got {x}")));
        }
        Ok(self.gain_ratio * x / S::count(self.m))
    }

    fn upper_limit(&self, r: S) -> Result<S> {
        let slack = S::lit(1e-9).max(S::lit(8.0) * S::epsilon() * self.r_max);
        if !(r >= self.r_min - slack && r <= self.r_max + slack) {
            return Err(Error::Domain(format!(
                "serving distance {r} outside [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        let r = r.max(self.r_min).min(self.r_max);
        let q = self.r_max / r;
        Ok(q * q)
    }
}

/// `1 - (1 + w)^(-m)` without cancellation for small `w`.
#[inline]
pub(crate) fn interferer_term<S: Real>(w: S, m: u32) -> S {
    -(-(S::count(m)) * w.ln_1p()).exp_m1()
}

/// η(x, r): the exponent of the conditional interference Laplace transform,
/// normalized by `lambda pi (R_S/R_E) r^2`.
pub fn eta<S: Real>(x: S, r: S, params: &EtaArgs<S>, spec: &QuadratureSpec) -> Result<S> {
    params.check()?;
    let y = params.scaled(x)?;
    let upper = params.upper_limit(r)?;
    let half_alpha = params.alpha / S::lit(2.0);
    let m = params.m;
    Ok(integrate(|t: S| interferer_term(y * t.powf(-half_alpha), m), S::one(), upper, spec)?.value)
}

/// η^U(x) = η(x, R_min), an upper bound of η(x, r) over the support.
pub fn eta_upper<S: Real>(x: S, params: &EtaArgs<S>, spec: &QuadratureSpec) -> Result<S> {
    eta(x, params.r_min, params, spec)
}

/// Integrals behind the s-derivatives of the Laplace exponent.
///
/// Returns `J_0 = eta(x, r)` and, for `1 <= j <= order`,
/// `J_j = (m)_j int_1^{(Rmax/r)^2} w^j (1 + w)^(-m-j) dt` with `w = y t^(-a/2)`.
/// With `s = x r^a` and `g(s)` the log Laplace transform,
/// `s^j g^(j)(s) = (-1)^j lambda pi (R_S/R_E) r^2 J_j` for `j >= 1`.
pub fn eta_derivative_integrals<S: Real>(
    x: S,
    r: S,
    order: usize,
    params: &EtaArgs<S>,
    spec: &QuadratureSpec,
) -> Result<Vec<S>> {
    params.check()?;
    let y = params.scaled(x)?;
    let upper = params.upper_limit(r)?;
    let half_alpha = params.alpha / S::lit(2.0);
    let m = params.m;
    let mut out = Vec::with_capacity(order + 1);
    out.push(eta(x, r, params, spec)?);
    let mut rising = S::one();
    for j in 1..=order {
        rising = rising * S::count(m + j as u32 - 1);
        let jf = S::lit(j as f64);
        let power = -(S::count(m) + jf);
        let v = integrate(
            |t: S| {
                let w = y * t.powf(-half_alpha);
                w.powf(jf) * (w.ln_1p() * power).exp()
            },
            S::one(),
            upper,
            spec,
        )?
        .value;
        out.push(rising * v);
    }
    Ok(out)
}

/// Closed forms of η^U for `(alpha, m)` in `{(2,1), (2,2), (2,4), (4,1)}`.
///
/// `x_gain` is the already gain-scaled argument `G x`. The closed forms are
/// expressed in `y = G x / m` and the squared range ratio `(R_max/R_min)^2`.
pub fn eta_upper_closed<S: Real>(x_gain: S, params: &EtaArgs<S>) -> Result<S> {
    params.check()?;
    if !(x_gain > S::zero()) || !x_gain.is_finite() {
        return Err(Error::Domain(format!("eta argument must be positive, got {x_gain}")));
    }
    let y = x_gain / S::count(params.m);
    let q = params.upper_limit(params.r_min)?;
    let two = S::lit(2.0);
    let alpha = params.alpha;
    let log_ratio = ((y + q) / (y + S::one())).ln();
    match (alpha, params.m) {
        (a, 1) if a == two => Ok(y * log_ratio),
        (a, 2) if a == two => Ok(y * y / (y + q) - y * y / (y + S::one()) + two * y * log_ratio),
        (a, 4) if a == two => {
            let three = S::lit(3.0);
            let poly = |z: S| y * y * (S::lit(13.0) * y * y + S::lit(30.0) * y * z + S::lit(18.0) * z * z)
                / (three * (y + z).powi(3));
            Ok(poly(q) - poly(S::one()) + S::lit(4.0) * y * log_ratio)
        }
        (a, 1) if a == S::lit(4.0) => {
            let sy = y.sqrt();
            Ok(sy * ((q - S::one()) * sy / (q + y)).atan())
        }
        _ => Err(Error::Unsupported(format!(
            "no closed form for alpha = {alpha}, m = {}",
            params.m
        ))),
    }
}

/// η^U for Rayleigh fading (`m = 1`) and `alpha > 2` through the Gauss
/// hypergeometric function:
/// `int_A^inf du / (1 + u^(a/2)) = 2 A^(1-a/2) / (a-2) * 2F1(1, 1-2/a; 2-2/a; -A^(-a/2))`,
/// taken between `A = (G x)^(-2/a)` and `A (R_max/R_min)^2`.
pub fn eta_upper_hypergeometric<S: Real>(x_gain: S, params: &EtaArgs<S>) -> Result<S> {
    params.check()?;
    if params.m != 1 {
        return Err(Error::Unsupported(format!(
            "hypergeometric form needs m = 1, got m = {}",
            params.m
        )));
    }
    let two = S::lit(2.0);
    let alpha = params.alpha;
    if !(alpha > two) {
        return Err(Error::Unsupported(format!(
            "hypergeometric form needs alpha > 2, got {alpha}"
        )));
    }
    if !(x_gain > S::zero()) || !x_gain.is_finite() {
        return Err(Error::Domain(format!("eta argument must be positive, got {x_gain}")));
    }
    let q = params.upper_limit(params.r_min)?;
    let b = S::one() - two / alpha;
    let c = two - two / alpha;
    let half_alpha = alpha / two;
    // tail(A) * (G x)^(2/a) with A = (G x)^(-2/a) t, written in t to keep magnitudes moderate
    let tail = |t: S| -> Result<S> {
        let z = -x_gain * t.powf(-half_alpha);
        Ok(x_gain * t.powf(S::one() - half_alpha) * gauss_2f1(S::one(), b, c, z)?)
    };
    Ok(two / (alpha - two) * (tail(S::one())? - tail(q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(h: f64, alpha: f64, m: u32) -> EtaArgs<f64> {
        let c = NetworkConfig::with_altitude(h)
            .with_path_loss_exponent(alpha)
            .with_nakagami_m(m)
            .with_gain_ratio(1.0);
        EtaArgs::from_config(&c).unwrap()
    }

    fn tight() -> QuadratureSpec {
        QuadratureSpec::new(1e-15, 1e-13, 400).unwrap()
    }

    /// The defining integral in the original variable u, as an independent route.
    fn eta_literal(x: f64, r: f64, p: &EtaArgs<f64>) -> f64 {
        let y = p.gain_ratio * x / p.m as f64;
        let lo = y.powf(-2.0 / p.alpha);
        let hi = lo * (p.r_max / r).powi(2);
        let f = |u: f64| 1.0 - (1.0 + u.powf(-p.alpha / 2.0)).powi(-(p.m as i32));
        y.powf(2.0 / p.alpha) * integrate(f, lo, hi, &tight()).unwrap().value
    }

    #[test]
    fn zero_at_far_edge() {
        let p = params(500.0, 2.0, 1);
        assert_eq!(eta(0.3, p.r_max, &p, &QuadratureSpec::default()).unwrap(), 0.0);
    }

    #[test]
    fn log_closed_form_oracle() {
        let mut p = params(500.0, 2.0, 1);
        p.gain_ratio = 0.1;
        let v = eta(1.0, p.r_min, &p, &QuadratureSpec::default()).unwrap();
        let ratio: f64 = 13242.0 / 500.0;
        assert_relative_eq!(v, 0.1 * ((ratio + 0.1) / 1.1).ln(), max_relative = 1e-10);
        assert_relative_eq!(v, 0.31849, max_relative = 1e-4);
        assert_eq!(eta_upper(1.0, &p, &QuadratureSpec::default()).unwrap(), v);
    }

    #[test]
    fn arctan_closed_form_oracle() {
        let p = params(500.0, 4.0, 1);
        let v = eta_upper(1.0, &p, &tight()).unwrap();
        assert_relative_eq!(v, (25.484f64 / 27.484).atan(), max_relative = 1e-10);
        assert_relative_eq!(v, 0.747657, max_relative = 1e-5);
    }

    #[test]
    fn substituted_form_matches_literal_integral() {
        for &(alpha, m) in &[(2.0, 1), (2.5, 2), (3.0, 3), (4.0, 4)] {
            let p = params(700.0, alpha, m);
            for &x in &[1e-3, 0.7, 40.0] {
                for &r in &[p.r_min, 0.5 * (p.r_min + p.r_max), 0.95 * p.r_max] {
                    let v = eta(x, r, &p, &tight()).unwrap();
                    assert_relative_eq!(v, eta_literal(x, r, &p), max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn decreasing_in_distance() {
        let p = params(500.0, 3.0, 2);
        let spec = QuadratureSpec::default();
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let r = p.r_min + (p.r_max - p.r_min) * i as f64 / 20.0;
            let v = eta(2.0, r, &p, &spec).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn closed_forms_two_one() {
        let p = params(500.0, 2.0, 1);
        assert_relative_eq!(eta_upper_closed(1.0, &p).unwrap(), (27.484f64 / 2.0).ln(), max_relative = 1e-4);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for &(alpha, m) in &[(2.0, 1), (2.0, 2), (2.0, 4), (4.0, 1)] {
            for &h in &[300.0, 500.0, 1000.0] {
                let p = params(h, alpha, m);
                for &x in &[1e-3, 0.1, 1.0, 10.0, 1e3] {
                    let closed = eta_upper_closed(x, &p).unwrap();
                    let quad = eta_upper(x, &p, &tight()).unwrap();
                    assert_relative_eq!(closed, quad, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn closed_form_vanishes_at_origin() {
        let p = params(500.0, 2.0, 2);
        assert!(eta_upper_closed(1e-12, &p).unwrap() < 1e-10);
    }

    #[test]
    fn unsupported_pairs() {
        let p = params(500.0, 3.0, 1);
        assert!(matches!(eta_upper_closed(1.0, &p), Err(Error::Unsupported(_))));
        let p = params(500.0, 2.0, 3);
        assert!(matches!(eta_upper_closed(1.0, &p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hypergeometric_matches_quadrature() {
        let mut p = params(500.0, 3.0, 1);
        p.gain_ratio = 0.1;
        let q = eta_upper(1.0, &p, &tight()).unwrap();
        let h = eta_upper_hypergeometric(0.1, &p).unwrap();
        assert_relative_eq!(h, q, max_relative = 1e-10);
        for &alpha in &[2.5, 4.0, 6.0] {
            let p = params(800.0, alpha, 1);
            for &x in &[0.01, 1.0, 30.0] {
                assert_relative_eq!(
                    eta_upper_hypergeometric(x, &p).unwrap(),
                    eta_upper(x, &p, &tight()).unwrap(),
                    max_relative = 1e-10
                );
            }
        }
        assert!(eta_upper_hypergeometric(1.0, &params(500.0, 2.0, 1)).is_err());
    }

    #[test]
    fn derivative_integrals_match_finite_differences_of_eta() {
        // d/dx [x-scaled exponent]: s^j g^(j)(s) relations checked for j = 1 via
        // d eta(x, r)/dx * x = J_1 (the r^2 factor cancels at fixed r).
        let p = params(500.0, 2.0, 2);
        let spec = tight();
        let (x, r) = (3.0, 900.0);
        let j = eta_derivative_integrals(x, r, 1, &p, &spec).unwrap();
        let h = 1e-4 * x;
        let d = (eta(x + h, r, &p, &spec).unwrap() - eta(x - h, r, &p, &spec).unwrap()) / (2.0 * h);
        assert_relative_eq!(j[1], x * d, max_relative = 1e-7);
    }

    #[test]
    fn domain_errors() {
        let p = params(500.0, 2.0, 1);
        let spec = QuadratureSpec::default();
        assert!(eta(0.0, p.r_min, &p, &spec).is_err());
        assert!(eta(1.0, p.r_min - 1.0, &p, &spec).is_err());
        assert!(eta(1.0, p.r_max + 1.0, &p, &spec).is_err());
    }
}
