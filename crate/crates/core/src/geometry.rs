//! Geometry of the satellite sphere, the visible spherical cap and its
//! distance-parameterized sub-caps.
//!
//! The typical user sits at `(0, 0, R_E)`. The visible cap is the part of the
//! satellite sphere above the user's tangent plane (`z >= R_E`), optionally
//! shrunk further by a minimum elevation angle. Every zone of a sphere has an
//! area proportional to its height, so a cap of height `H` on a sphere of
//! radius `R_S` has area `2 pi R_S H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Scalar model parameters. Lengths in km, densities in km⁻².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig<S> {
    pub earth_radius: S,
    pub satellite_radius: S,
    /// Satellites per km² on the satellite sphere.
    pub density: S,
    pub path_loss_exponent: S,
    pub nakagami_m: u32,
    /// Interferer-to-server antenna gain ratio, in (0, 1].
    pub gain_ratio: S,
    /// Noise power normalized by transmit power and serving gain.
    pub normalized_noise: S,
    /// Minimum elevation angle in radians.
    pub min_elevation: S,
}

impl<S: Real> NetworkConfig<S> {
    /// Config at the given altitude with `R_E = 6371 km`, `alpha = 2`, `m = 1`,
    /// `G = 0.1`, no noise, full visibility and zero density.
    pub fn with_altitude(altitude: S) -> Self {
        let earth_radius = S::lit(EARTH_RADIUS_KM);
        Self {
            earth_radius,
            satellite_radius: earth_radius + altitude,
            density: S::zero(),
            path_loss_exponent: S::lit(2.0),
            nakagami_m: 1,
            gain_ratio: S::lit(0.1),
            normalized_noise: S::zero(),
            min_elevation: S::zero(),
        }
    }

    pub fn altitude(&self) -> S {
        self.satellite_radius - self.earth_radius
    }

    pub fn with_earth_radius(mut self, earth_radius: S) -> Self {
        let h = self.altitude();
        self.earth_radius = earth_radius;
        self.satellite_radius = earth_radius + h;
        self
    }

    pub fn with_density(mut self, density: S) -> Self {
        self.density = density;
        self
    }

    pub fn with_path_loss_exponent(mut self, alpha: S) -> Self {
        self.path_loss_exponent = alpha;
        self
    }

    pub fn with_nakagami_m(mut self, m: u32) -> Self {
        self.nakagami_m = m;
        self
    }

    pub fn with_gain_ratio(mut self, gain_ratio: S) -> Self {
        self.gain_ratio = gain_ratio;
        self
    }

    pub fn with_normalized_noise(mut self, noise: S) -> Self {
        self.normalized_noise = noise;
        self
    }

    pub fn with_min_elevation(mut self, psi: S) -> Self {
        self.min_elevation = psi;
        self
    }

    /// Sets the density so that the visible cap holds `mean_count` satellites on average.
    pub fn with_mean_count(mut self, mean_count: S) -> Result<Self> {
        if !(mean_count >= S::zero()) || !mean_count.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "mean count must be finite and nonnegative, got {mean_count}"
            )));
        }
        let cap = self.cap()?;
        self.density = mean_count / cap.area;
        Ok(self)
    }

    /// Average number of satellites in the visible cap, `lambda |A|`.
    pub fn mean_count(&self) -> Result<S> {
        Ok(self.density * self.cap()?.area)
    }

    /// `pi R_S / R_E`: the rate at which sub-cap area grows with squared distance.
    pub fn area_per_squared_distance(&self) -> S {
        S::PI() * self.satellite_radius / self.earth_radius
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.earth_radius > S::zero()) || !self.earth_radius.is_finite() {
            return fail(format!("earth radius must be positive, got {}", self.earth_radius));
        }
        if !(self.satellite_radius > self.earth_radius) || !self.satellite_radius.is_finite() {
            return fail(format!(
                "satellite radius {} must exceed earth radius {}",
                self.satellite_radius, self.earth_radius
            ));
        }
        if !(self.density >= S::zero()) || !self.density.is_finite() {
            return fail(format!("density must be finite and nonnegative, got {}", self.density));
        }
        if !(self.path_loss_exponent >= S::lit(2.0)) || !self.path_loss_exponent.is_finite() {
            return fail(format!(
                "path-loss exponent must be >= 2, got {}",
                self.path_loss_exponent
            ));
        }
        if self.nakagami_m < 1 {
            return fail("nakagami m must be a positive integer".into());
        }
        if !(self.gain_ratio > S::zero() && self.gain_ratio <= S::one()) {
            return fail(format!("gain ratio must lie in (0, 1], got {}", self.gain_ratio));
        }
        if !(self.normalized_noise >= S::zero()) || !self.normalized_noise.is_finite() {
            return fail(format!(
                "normalized noise must be finite and nonnegative, got {}",
                self.normalized_noise
            ));
        }
        check_elevation(self.min_elevation)?;
        Ok(())
    }

    /// Visible cap, honoring `min_elevation`.
    pub fn cap(&self) -> Result<CapGeometry<S>> {
        limited_visibility(self, self.min_elevation)
    }
}

/// Derived geometry of the visible cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapGeometry<S> {
    pub r_min: S,
    pub r_max: S,
    pub area: S,
    pub elevation_limited: bool,
    pub earth_radius: S,
    pub satellite_radius: S,
}

impl<S: Real> CapGeometry<S> {
    /// Lowest `z` coordinate of the cap.
    pub fn axial_min(&self) -> S {
        self.axial_at(self.r_max)
    }

    /// `z` coordinate of cap points at distance `r` from the user.
    pub fn axial_at(&self, r: S) -> S {
        let (re, rs) = (self.earth_radius, self.satellite_radius);
        (rs * rs + re * re - r * r) / (S::lit(2.0) * re)
    }

    /// Distance from the user to a sphere point with axial coordinate `z`.
    pub fn distance_at_axial(&self, z: S) -> S {
        let (re, rs) = (self.earth_radius, self.satellite_radius);
        (rs * rs + re * re - S::lit(2.0) * re * z).max(S::zero()).sqrt()
    }

    /// `(r_max / r_min)^2`.
    pub fn range_ratio_sq(&self) -> S {
        let q = self.r_max / self.r_min;
        q * q
    }

    /// Round-off slack for support checks: 1e-9 km, widened for low-precision scalars.
    pub fn slack(&self) -> S {
        S::lit(1e-9).max(S::lit(8.0) * S::epsilon() * self.r_max)
    }

    /// Validates `r` against `[r_min, r_max]` and clamps it into the support.
    pub fn clamp_to_support(&self, r: S) -> Result<S> {
        let slack = self.slack();
        if !r.is_finite() || r < self.r_min - slack || r > self.r_max + slack {
            return Err(Error::Domain(format!(
                "distance {r} km outside [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        Ok(r.max(self.r_min).min(self.r_max))
    }

    pub fn contains(&self, r: S) -> bool {
        self.clamp_to_support(r).is_ok()
    }
}

fn check_elevation<S: Real>(psi: S) -> Result<()> {
    if !(psi >= S::zero() && psi < S::FRAC_PI_2()) {
        return Err(Error::Domain(format!(
            "minimum elevation must lie in [0, pi/2), got {psi} rad"
        )));
    }
    Ok(())
}

fn check_radii<S: Real>(config: &NetworkConfig<S>) -> Result<()> {
    if !(config.earth_radius > S::zero()) || !(config.satellite_radius > config.earth_radius) {
        return Err(Error::InvalidConfig(format!(
            "need R_S > R_E > 0, got R_S = {}, R_E = {}",
            config.satellite_radius, config.earth_radius
        )));
    }
    Ok(())
}

/// Area of the full visible cap, `2 pi (R_S - R_E) R_S`.
pub fn cap_area<S: Real>(config: &NetworkConfig<S>) -> Result<S> {
    check_radii(config)?;
    let (re, rs) = (config.earth_radius, config.satellite_radius);
    Ok(S::lit(2.0) * S::PI() * (rs - re) * rs)
}

/// Height of the sub-cap of points farther than `r`, measured down from the tangent plane.
pub fn chord_height<S: Real>(r: S, config: &NetworkConfig<S>) -> Result<S> {
    let cap = unrestricted_cap(config)?;
    let r = cap.clamp_to_support(r)?;
    let (re, rs) = (config.earth_radius, config.satellite_radius);
    Ok(((rs * rs - re * re) - r * r) / (S::lit(2.0) * re))
}

/// Area of the set of cap points within distance `r` of the user.
pub fn partial_cap_area<S: Real>(r: S, config: &NetworkConfig<S>) -> Result<S> {
    let h_r = chord_height(r, config)?;
    let (re, rs) = (config.earth_radius, config.satellite_radius);
    Ok(S::lit(2.0) * S::PI() * (rs - re - h_r) * rs)
}

fn unrestricted_cap<S: Real>(config: &NetworkConfig<S>) -> Result<CapGeometry<S>> {
    let area = cap_area(config)?;
    let (re, rs) = (config.earth_radius, config.satellite_radius);
    Ok(CapGeometry {
        r_min: rs - re,
        r_max: (rs * rs - re * re).sqrt(),
        area,
        elevation_limited: false,
        earth_radius: re,
        satellite_radius: rs,
    })
}

/// Cap of satellites seen at elevation at least `psi_min`.
///
/// `psi_min = 0` returns the unrestricted cap bit for bit.
pub fn limited_visibility<S: Real>(config: &NetworkConfig<S>, psi_min: S) -> Result<CapGeometry<S>> {
    check_elevation(psi_min)?;
    let full = unrestricted_cap(config)?;
    if psi_min == S::zero() {
        return Ok(full);
    }
    let (re, rs) = (config.earth_radius, config.satellite_radius);
    let a = re * psi_min.sin();
    let b = rs * rs - re * re;
    // sqrt(a^2 + b) - a, rearranged to avoid cancellation near the zenith.
    let r_max = b / ((a * a + b).sqrt() + a);
    let area = S::lit(2.0) * S::PI() * rs * (rs - re - r_max * (S::FRAC_PI_2() - psi_min).cos());
    Ok(CapGeometry {
        r_max,
        area,
        elevation_limited: true,
        ..full
    })
}
