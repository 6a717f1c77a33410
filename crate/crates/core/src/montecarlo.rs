//! Monte Carlo simulation of the downlink SIR/SINR.
//!
//! Trial `i` draws from stream `seed.stream_id + i`, and per-threshold results
//! are reduced as integer counts, so estimates are identical under any thread
//! count or work partitioning.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::curve::{CoverageCurve, CoverageMethod};
use crate::error::{Error, Result};
use crate::geometry::{CapGeometry, NetworkConfig};
use crate::randomfield::{sample_cap_distance, sample_count, sample_distance_beyond, FadingSampler, RngSeed};
use crate::stats::wilson_halfwidth;

/// Largest number of satellites a single trial may place.
pub const MAX_POINTS_PER_TRIAL: u64 = 5_000_000;

/// Speed of light in m/s.
const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Number of satellites per realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointProcess {
    /// Poisson with mean `lambda |A|`.
    Ppp,
    /// Exactly `n` points.
    Bpp(u64),
}

/// Physical link budget used to derive the normalized noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub transmit_power_w: f64,
    pub transmit_gain_dbi: f64,
    pub receive_gain_dbi: f64,
    pub carrier_frequency_hz: f64,
}

impl Default for NoiseParams {
    /// -174 dBm/Hz, 10 MHz, 10 W, 30 dBi transmit, 0 dBi receive, 2 GHz.
    fn default() -> Self {
        Self {
            noise_density_dbm_hz: -174.0,
            bandwidth_hz: 10e6,
            transmit_power_w: 10.0,
            transmit_gain_dbi: 30.0,
            receive_gain_dbi: 0.0,
            carrier_frequency_hz: 2e9,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.bandwidth_hz, self.transmit_power_w, self.carrier_frequency_hz];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite())
            || !self.noise_density_dbm_hz.is_finite()
            || !self.transmit_gain_dbi.is_finite()
            || !self.receive_gain_dbi.is_finite()
        {
            return Err(Error::InvalidConfig(format!("invalid noise parameters {self:?}")));
        }
        Ok(())
    }

    /// Noise power in W.
    pub fn noise_power_w(&self) -> f64 {
        10f64.powf((self.noise_density_dbm_hz - 30.0) / 10.0) * self.bandwidth_hz
    }

    /// Serving link gain `G_t G_r (c / (4 pi f_c))^2`, distances in meters.
    pub fn serving_gain(&self) -> f64 {
        let g = 10f64.powf((self.transmit_gain_dbi + self.receive_gain_dbi) / 10.0);
        let w = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * self.carrier_frequency_hz);
        g * w * w
    }

    /// `sigma^2 / (P G_1)` rescaled so that distances can be given in km.
    pub fn normalized_noise_km(&self, alpha: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.noise_power_w() / (self.transmit_power_w * self.serving_gain()) * 1000f64.powf(alpha))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub config: NetworkConfig<f64>,
    pub mode: PointProcess,
    pub trials: u64,
    /// Linear thresholds.
    pub thresholds: Vec<f64>,
    /// Add noise to the SIR denominator.
    pub include_noise: bool,
    /// Physical noise parameters; without them `config.normalized_noise` is used.
    pub noise: Option<NoiseParams>,
    pub seed: RngSeed,
}

impl SimulationPlan {
    pub fn new(config: NetworkConfig<f64>, trials: u64, thresholds: Vec<f64>, seed: u64) -> Self {
        Self {
            config,
            mode: PointProcess::Ppp,
            trials,
            thresholds,
            include_noise: false,
            noise: None,
            seed: RngSeed::new(seed),
        }
    }

    pub fn with_mode(mut self, mode: PointProcess) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_noise(mut self, noise: Option<NoiseParams>) -> Self {
        self.include_noise = true;
        self.noise = noise;
        self
    }

    /// Normalized noise added to the denominator, in km units; 0 without noise.
    pub fn effective_noise(&self) -> Result<f64> {
        if !self.include_noise {
            return Ok(0.0);
        }
        match &self.noise {
            Some(n) => n.normalized_noise_km(self.config.path_loss_exponent),
            None => Ok(self.config.normalized_noise),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.trials < 1 {
            return Err(Error::InvalidConfig("simulation needs at least one trial".into()));
        }
        if self.thresholds.iter().any(|g| !(*g >= 0.0) || g.is_nan()) {
            return Err(Error::InvalidConfig("thresholds must be nonnegative".into()));
        }
        let worst = match self.mode {
            PointProcess::Bpp(n) => n as f64,
            PointProcess::Ppp => {
                let mean = self.config.mean_count()?;
                mean + 10.0 * mean.sqrt()
            }
        };
        if worst > MAX_POINTS_PER_TRIAL as f64 {
            return Err(Error::ResourceExceeded(format!(
                "about {worst:.0} satellites per trial exceeds the limit of {MAX_POINTS_PER_TRIAL}"
            )));
        }
        self.effective_noise()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    /// Unconditional coverage: empty caps count as not covered.
    pub curve: CoverageCurve<f64>,
    pub empty_cap_fraction: f64,
    pub trials_used: u64,
    pub covered_counts: Vec<u64>,
    pub empty_count: u64,
}

impl CoverageEstimate {
    /// Coverage given a nonempty cap, with Wilson half-widths.
    pub fn conditional(&self) -> Result<CoverageCurve<f64>> {
        let nonempty = self.trials_used - self.empty_count;
        if nonempty == 0 {
            return Err(Error::Degenerate("every trial had an empty cap".into()));
        }
        let values = self.covered_counts.iter().map(|&c| c as f64 / nonempty as f64).collect();
        let ci = self.covered_counts.iter().map(|&c| wilson_halfwidth(c, nonempty)).collect();
        CoverageCurve::new(self.curve.thresholds.clone(), values, CoverageMethod::MonteCarlo, Some(ci))
    }
}

/// One realization: `None` for an empty cap, otherwise the SIR (or SINR).
fn simulate_trial(
    cap: &CapGeometry<f64>,
    config: &NetworkConfig<f64>,
    count: u64,
    fading: &FadingSampler,
    noise: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Option<f64> {
    if count == 0 {
        return None;
    }
    let alpha = config.path_loss_exponent;
    let mut near_d = f64::INFINITY;
    let mut near_power = 0.0;
    let mut interference = 0.0;
    for _ in 0..count {
        let d = sample_cap_distance(cap, rng);
        let power = fading.sample(rng) * d.powf(-alpha);
        if d < near_d {
            if near_d.is_finite() {
                interference += near_power;
            }
            near_d = d;
            near_power = power;
        } else {
            interference += power;
        }
    }
    Some(near_power / (config.gain_ratio * interference + noise))
}

/// Estimates the coverage curve of `plan`.
pub fn run_simulation(plan: &SimulationPlan) -> Result<CoverageEstimate> {
    plan.validate()?;
    let config = plan.config;
    let cap = config.cap()?;
    let fading = FadingSampler::new(config.nakagami_m)?;
    let noise = plan.effective_noise()?;
    let mean = config.mean_count()?;
    let thresholds = &plan.thresholds;
    let k = thresholds.len();
    let base = plan.seed;
    // counts[0..k] covered per threshold, counts[k] empty caps
    let counts = (0..plan.trials)
        .into_par_iter()
        .map(|i| -> Result<Vec<u64>> {
            let mut rng = base.with_stream(base.stream_id.wrapping_add(i)).rng();
            let n = match plan.mode {
                PointProcess::Ppp => sample_count(mean, &mut rng)?,
                PointProcess::Bpp(n) => n,
            };
            if n > MAX_POINTS_PER_TRIAL {
                return Err(Error::ResourceExceeded(format!("trial {i} drew {n} satellites")));
            }
            let mut c = vec![0u64; k + 1];
            match simulate_trial(&cap, &config, n, &fading, noise, &mut rng) {
                None => c[k] = 1,
                Some(sir) => {
                    for (j, &g) in thresholds.iter().enumerate() {
                        if sir >= g {
                            c[j] = 1;
                        }
                    }
                }
            }
            Ok(c)
        })
        .try_reduce(
            || vec![0u64; k + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let trials = plan.trials;
    let values = counts[..k].iter().map(|&c| c as f64 / trials as f64).collect();
    let ci = counts[..k].iter().map(|&c| wilson_halfwidth(c, trials)).collect();
    Ok(CoverageEstimate {
        curve: CoverageCurve::new(thresholds.clone(), values, CoverageMethod::MonteCarlo, Some(ci))?,
        empty_cap_fraction: counts[k] as f64 / trials as f64,
        trials_used: trials,
        covered_counts: counts[..k].to_vec(),
        empty_count: counts[k],
    })
}

/// Nearest-satellite distances from PPP realizations with at least one
/// visible satellite; empty realizations are redrawn.
pub fn sample_conditioned_nearest(config: &NetworkConfig<f64>, n_samples: usize, seed: RngSeed) -> Result<Vec<f64>> {
    config.validate()?;
    if !(config.density > 0.0) {
        return Err(Error::InvalidConfig("conditioning on a nonempty cap needs density > 0".into()));
    }
    let cap = config.cap()?;
    let mean = config.mean_count()?;
    if mean > MAX_POINTS_PER_TRIAL as f64 {
        return Err(Error::ResourceExceeded(format!("mean count {mean} too large")));
    }
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.with_stream(seed.stream_id.wrapping_add(i)).rng();
            loop {
                let n = sample_count(mean, &mut rng)?;
                if n == 0 {
                    continue;
                }
                let mut best = f64::INFINITY;
                for _ in 0..n {
                    best = best.min(sample_cap_distance(&cap, &mut rng));
                }
                return Ok(best);
            }
        })
        .collect()
}

/// Empirical `E[exp(-s I_r)]` with interferers restricted to distances in `(r, R_max]`.
pub fn estimate_laplace(config: &NetworkConfig<f64>, r: f64, s: f64, trials: u64, seed: RngSeed) -> Result<f64> {
    config.validate()?;
    let cap = config.cap()?;
    let r = cap.clamp_to_support(r)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("Laplace argument must be >= 0, got {s}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let mean = config.density * config.area_per_squared_distance() * (cap.r_max - r) * (cap.r_max + r);
    if mean > MAX_POINTS_PER_TRIAL as f64 {
        return Err(Error::ResourceExceeded(format!("mean interferer count {mean} too large")));
    }
    let fading = FadingSampler::new(config.nakagami_m)?;
    let alpha = config.path_loss_exponent;
    let g = config.gain_ratio;
    let draws = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.with_stream(seed.stream_id.wrapping_add(i)).rng();
            let n = sample_count(mean, &mut rng)?;
            let mut interference = 0.0;
            for _ in 0..n {
                let d = sample_distance_beyond(&cap, r, &mut rng);
                interference += g * fading.sample(&mut rng) * d.powf(-alpha);
            }
            Ok((-s * interference).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    // summed in trial order so the result does not depend on scheduling
    Ok(draws.iter().sum::<f64>() / trials as f64)
}
