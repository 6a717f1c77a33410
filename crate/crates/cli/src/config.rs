//! Experiment configuration shared by the subcommands. A JSON file supplies a
//! base; command-line flags override individual fields.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use satcov::analytic::{db_to_linear, threshold_grid_db};
use satcov::montecarlo::NoiseParams;
use satcov::NetworkConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Bounds,
    Approx,
    Lower,
    RayleighClosed,
    NoiseLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Ppp,
    Bpp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSpec {
    pub re_km: f64,
    pub altitude_km: f64,
    /// Satellites per km²; exclusive with `mean_count`.
    pub density: Option<f64>,
    /// Expected number of visible satellites; exclusive with `density`.
    pub mean_count: Option<f64>,
    pub alpha: f64,
    pub m: u32,
    pub gain_ratio_db: f64,
    pub min_elevation_deg: f64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            re_km: satcov::EARTH_RADIUS_KM,
            altitude_km: 500.0,
            density: None,
            mean_count: None,
            alpha: 2.0,
            m: 1,
            gain_ratio_db: -10.0,
            min_elevation_deg: 0.0,
        }
    }
}

impl NetworkSpec {
    /// Geometry and link parameters without a density.
    pub fn base(&self) -> NetworkConfig<f64> {
        NetworkConfig::with_altitude(self.altitude_km)
            .with_earth_radius(self.re_km)
            .with_path_loss_exponent(self.alpha)
            .with_nakagami_m(self.m)
            .with_gain_ratio(db_to_linear(self.gain_ratio_db))
            .with_min_elevation(self.min_elevation_deg.to_radians())
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some() || self.mean_count.is_some()
    }

    /// Full model; fails when neither density nor mean count is set.
    pub fn resolve(&self) -> Result<NetworkConfig<f64>, CliError> {
        let base = self.base();
        let config = match (self.density, self.mean_count) {
            (Some(_), Some(_)) => return Err(CliError::Usage("--density and --mean-count are mutually exclusive".into())),
            (Some(d), None) => base.with_density(d),
            (None, Some(n)) => base.with_mean_count(n)?,
            (None, None) => return Err(CliError::Usage("one of --density or --mean-count is required".into())),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub start_db: f64,
    pub stop_db: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { start_db: -10.0, stop_db: 20.0, points: 31 }
    }
}

impl GridSpec {
    /// Parses `START:STOP:POINTS`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected START:STOP:POINTS, got `{s}`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number"));
        let points = parts[2].trim().parse::<usize>().map_err(|_| format!("`{}` is not a point count", parts[2]))?;
        Ok(Self { start_db: num(parts[0])?, stop_db: num(parts[1])?, points })
    }

    pub fn db_values(&self) -> Result<Vec<f64>, CliError> {
        Ok(satcov::numerics::linear_grid(self.start_db, self.stop_db, self.points)?)
    }

    pub fn linear(&self) -> Result<Vec<f64>, CliError> {
        Ok(threshold_grid_db(self.start_db, self.stop_db, self.points)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSpec {
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    pub n_fixed: Option<u64>,
    pub noise: bool,
    pub noise_params: NoiseParams,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self { trials: 100_000, seed: 42, mode: Mode::Ppp, n_fixed: None, noise: false, noise_params: NoiseParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSpec,
    pub gamma_db: GridSpec,
    pub method: Method,
    /// Approximation parameter for `method = approx`.
    pub kappa: Option<f64>,
    pub simulation: SimulationSpec,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            network: NetworkSpec::default(),
            gamma_db: GridSpec::default(),
            method: Method::Exact,
            kappa: None,
            simulation: SimulationSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}
