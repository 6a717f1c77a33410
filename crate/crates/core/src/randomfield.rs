//! Random elements of the model: satellite counts, uniform cap points,
//! Nakagami-m fading powers and the nearest-satellite distance law.
//!
//! Distribution functions are generic over the scalar type. Samplers draw
//! `f64` values from explicitly passed generators.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CapGeometry, NetworkConfig};
use crate::scalar::Real;

/// Generator identity: a 64-bit seed plus a stream number.
///
/// The same pair always yields the same ChaCha8 sequence. Parallel work uses
/// one stream per trial (or per snapshot) so the partitioning does not matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Poisson count with the given mean.
pub fn sample_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::InvalidArgument(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

/// A satellite position on the cap and its distance to the user at `(0, 0, R_E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapPoint {
    pub position: [f64; 3],
    pub distance_to_observer: f64,
}

#[inline]
fn sample_axial<R: Rng + ?Sized>(z_lo: f64, z_hi: f64, rng: &mut R) -> f64 {
    z_lo + (z_hi - z_lo) * rng.random::<f64>()
}

/// `n` independent points uniform on the cap: the axial coordinate is uniform
/// over the cap's height and the azimuth uniform on `[0, 2 pi)`.
pub fn sample_cap_points<R: Rng + ?Sized>(n: usize, cap: &CapGeometry<f64>, rng: &mut R) -> Vec<CapPoint> {
    let rs = cap.satellite_radius;
    let z_lo = cap.axial_min();
    (0..n)
        .map(|_| {
            let z = sample_axial(z_lo, rs, rng);
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            let rho = (rs * rs - z * z).max(0.0).sqrt();
            let d = cap.distance_at_axial(z).clamp(cap.r_min, cap.r_max);
            CapPoint {
                position: [rho * phi.cos(), rho * phi.sin(), z],
                distance_to_observer: d,
            }
        })
        .collect()
}

/// Distance to one uniform cap point, without building its coordinates.
#[inline]
pub fn sample_cap_distance<R: Rng + ?Sized>(cap: &CapGeometry<f64>, rng: &mut R) -> f64 {
    let z = sample_axial(cap.axial_min(), cap.satellite_radius, rng);
    cap.distance_at_axial(z).clamp(cap.r_min, cap.r_max)
}

/// Distance to a point uniform on the part of the cap farther than `r`.
#[inline]
pub fn sample_distance_beyond<R: Rng + ?Sized>(cap: &CapGeometry<f64>, r: f64, rng: &mut R) -> f64 {
    let z = sample_axial(cap.axial_min(), cap.axial_at(r), rng);
    cap.distance_at_axial(z).clamp(r, cap.r_max)
}

/// Draws Nakagami-m fading powers: Gamma with shape `m` and mean 1.
#[derive(Debug, Clone, Copy)]
pub struct FadingSampler {
    gamma: Gamma<f64>,
}

impl FadingSampler {
    pub fn new(m: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("Nakagami m must be >= 1".into()));
        }
        let shape = f64::from(m);
        let gamma = Gamma::new(shape, 1.0 / shape).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { gamma })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

pub fn sample_fading_power<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<f64> {
    Ok(FadingSampler::new(m)?.sample(rng))
}

/// `P[H >= x] = e^(-m x) sum_{k<m} (m x)^k / k!` for unit-mean Gamma(m) power.
pub fn fading_power_ccdf<S: Real>(m: u32, x: S) -> Result<S> {
    if m < 1 {
        return Err(Error::InvalidArgument("Nakagami m must be >= 1".into()));
    }
    if !(x >= S::zero()) {
        return Err(Error::Domain(format!("fading CCDF needs x >= 0, got {x}")));
    }
    let mx = S::count(m) * x;
    let mut term = (-mx).exp();
    let mut sum = term;
    for k in 1..m {
        term = term * mx / S::count(k);
        sum = sum + term;
    }
    Ok(sum.min(S::one()))
}

struct NearestLaw<S> {
    cap: CapGeometry<S>,
    kappa: S,
    /// `1 - exp(-lambda |A|)`
    norm: S,
}

impl<S: Real> NearestLaw<S> {
    fn new(config: &NetworkConfig<S>) -> Result<Self> {
        config.validate()?;
        if !(config.density > S::zero()) {
            return Err(Error::InvalidConfig(format!(
                "nearest-distance law needs density > 0, got {}",
                config.density
            )));
        }
        let cap = config.cap()?;
        let kappa = config.density * config.area_per_squared_distance();
        let norm = -(-kappa * (cap.r_max - cap.r_min) * (cap.r_max + cap.r_min)).exp_m1();
        Ok(Self { cap, kappa, norm })
    }

    /// `kappa (r^2 - R_min^2)`, i.e. lambda times the area closer than `r`.
    fn inner(&self, r: S) -> S {
        self.kappa * (r - self.cap.r_min) * (r + self.cap.r_min)
    }

    /// `kappa (R_max^2 - r^2)`
    fn outer(&self, r: S) -> S {
        self.kappa * (self.cap.r_max - r) * (self.cap.r_max + r)
    }
}

/// Density of the distance to the nearest visible satellite given at least one is visible.
/// Zero outside `[R_min, R_max]`.
pub fn nearest_distance_pdf<S: Real>(r: S, config: &NetworkConfig<S>) -> Result<S> {
    let law = NearestLaw::new(config)?;
    if !(r >= law.cap.r_min && r <= law.cap.r_max) {
        return Ok(S::zero());
    }
    Ok(S::lit(2.0) * law.kappa * r * (-law.inner(r)).exp() / law.norm)
}

/// `P[R > r | cap nonempty] = (e^(-lambda |A_r|) - e^(-lambda |A|)) / (1 - e^(-lambda |A|))`.
pub fn nearest_distance_ccdf<S: Real>(r: S, config: &NetworkConfig<S>) -> Result<S> {
    let law = NearestLaw::new(config)?;
    if r <= law.cap.r_min {
        return Ok(S::one());
    }
    if r >= law.cap.r_max {
        return Ok(S::zero());
    }
    Ok((-law.inner(r)).exp() * -(-law.outer(r)).exp_m1() / law.norm)
}

/// `P[R <= r | cap nonempty]`, computed without cancellation near `R_min`.
pub fn nearest_distance_cdf<S: Real>(r: S, config: &NetworkConfig<S>) -> Result<S> {
    let law = NearestLaw::new(config)?;
    if r <= law.cap.r_min {
        return Ok(S::zero());
    }
    if r >= law.cap.r_max {
        return Ok(S::one());
    }
    Ok(-(-law.inner(r)).exp_m1() / law.norm)
}

/// Inverse of [`nearest_distance_cdf`] for `u` in `[0, 1]`.
pub fn nearest_distance_quantile<S: Real>(u: S, config: &NetworkConfig<S>) -> Result<S> {
    if !(u >= S::zero() && u <= S::one()) {
        return Err(Error::Domain(format!("quantile level must lie in [0, 1], got {u}")));
    }
    let law = NearestLaw::new(config)?;
    let inner = -(-(u * law.norm)).ln_1p();
    let r = (law.cap.r_min * law.cap.r_min + inner / law.kappa).sqrt();
    Ok(r.max(law.cap.r_min).min(law.cap.r_max))
}
