//! `satcov`: coverage experiments for satellite downlinks.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, Format, GridSpec, Method, Mode, NetworkSpec};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "satcov", version, about = "Downlink coverage of satellite constellations modeled as spherical Poisson point processes")]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic coverage curve.
    Coverage(CoverageArgs),
    /// Monte Carlo coverage curve.
    Simulate(SimulateArgs),
    /// Coverage-maximizing density, or its trade-off against altitude.
    Optimize(OptimizeArgs),
    /// Visible-count statistics and empirical coverage from a snapshot file.
    Ingest(IngestArgs),
    /// Write synthetic snapshots drawn from the model.
    SynthSnapshots(SynthArgs),
    /// Tables for the standard figure presets.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Default)]
pub struct NetworkFlags {
    /// Earth radius [km].
    #[arg(long)]
    re_km: Option<f64>,
    /// Constellation altitude [km].
    #[arg(long)]
    altitude_km: Option<f64>,
    /// Satellites per km².
    #[arg(long, conflicts_with = "mean_count")]
    density: Option<f64>,
    /// Expected number of visible satellites, lambda |A|.
    #[arg(long)]
    mean_count: Option<f64>,
    /// Path-loss exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Nakagami fading parameter.
    #[arg(long)]
    m: Option<u32>,
    /// Side-lobe to main-lobe gain ratio [dB].
    #[arg(long, allow_hyphen_values = true)]
    gain_ratio_db: Option<f64>,
    /// Minimum elevation angle [deg].
    #[arg(long)]
    min_elevation_deg: Option<f64>,
}

impl NetworkFlags {
    fn apply(&self, spec: &mut NetworkSpec) {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { spec.$f = v; })*};
        }
        set!(re_km, altitude_km, alpha, m, gain_ratio_db, min_elevation_deg);
        if let Some(d) = self.density {
            spec.density = Some(d);
            spec.mean_count = None;
        }
        if let Some(n) = self.mean_count {
            spec.mean_count = Some(n);
            spec.density = None;
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct OutputFlags {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args, Default)]
pub struct NoiseFlags {
    /// Add thermal noise (SINR instead of SIR).
    #[arg(long)]
    noise: bool,
    /// Noise spectral density [dBm/Hz].
    #[arg(long, allow_hyphen_values = true)]
    noise_density_dbm_hz: Option<f64>,
    /// Bandwidth [Hz].
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    /// Transmit power [W].
    #[arg(long)]
    tx_power_w: Option<f64>,
    /// Transmit antenna gain [dBi].
    #[arg(long, allow_hyphen_values = true)]
    tx_gain_dbi: Option<f64>,
    /// Receive antenna gain [dBi].
    #[arg(long, allow_hyphen_values = true)]
    rx_gain_dbi: Option<f64>,
    /// Carrier frequency [Hz].
    #[arg(long)]
    carrier_hz: Option<f64>,
}

impl NoiseFlags {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        let n = &mut cfg.simulation.noise_params;
        if self.noise {
            cfg.simulation.noise = true;
        }
        if let Some(v) = self.noise_density_dbm_hz {
            n.noise_density_dbm_hz = v;
        }
        if let Some(v) = self.bandwidth_hz {
            n.bandwidth_hz = v;
        }
        if let Some(v) = self.tx_power_w {
            n.transmit_power_w = v;
        }
        if let Some(v) = self.tx_gain_dbi {
            n.transmit_gain_dbi = v;
        }
        if let Some(v) = self.rx_gain_dbi {
            n.receive_gain_dbi = v;
        }
        if let Some(v) = self.carrier_hz {
            n.carrier_frequency_hz = v;
        }
    }
}

#[derive(Debug, Args)]
struct CoverageArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkFlags,
    /// Threshold grid in dB as START:STOP:POINTS [default: -10:20:31].
    #[arg(long, value_parser = GridSpec::parse, allow_hyphen_values = true)]
    gamma_db_range: Option<GridSpec>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Parameter of the approximation, between (m!)^(-1/m) and 1.
    #[arg(long)]
    kappa: Option<f64>,
    #[command(flatten)]
    noise: NoiseFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkFlags,
    #[arg(long, value_parser = GridSpec::parse, allow_hyphen_values = true)]
    gamma_db_range: Option<GridSpec>,
    /// Number of realizations [default: 100000].
    #[arg(long)]
    trials: Option<u64>,
    /// Seed [default: 42].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Satellites per realization for `--mode bpp`.
    #[arg(long)]
    n_fixed: Option<u64>,
    #[command(flatten)]
    noise: NoiseFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    network: NetworkFlags,
    /// SIR threshold [dB].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma_db: f64,
    /// Grid search over the tractable lower bound; required when m > 1.
    #[arg(long)]
    numeric: bool,
    /// Density search interval [km^-2] for the numeric search.
    #[arg(long, default_value_t = 1e-10)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1e-4)]
    lambda_max: f64,
    /// Emit the optimum against altitude instead of a single point.
    #[arg(long)]
    sweep_altitude: bool,
    /// Altitudes for the sweep, log-spaced, as START:STOP:POINTS in km.
    #[arg(long, default_value = "200:2000:50", value_parser = parse_range)]
    altitude_range: (f64, f64, usize),
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Snapshot file (snapshot_id,timestamp,lat_deg,lon_deg,alt_km).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    observer_lat: f64,
    #[arg(long, allow_hyphen_values = true)]
    observer_lon: f64,
    /// Minimum elevation angle [deg].
    #[arg(long, default_value_t = 25.0)]
    min_elevation_deg: f64,
    /// Orthogonal resources K; each satellite picks one at random.
    #[arg(long, default_value_t = 20)]
    resources: u32,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    gain_ratio_db: f64,
    #[arg(long, default_value_t = satcov::EARTH_RADIUS_KM)]
    re_km: f64,
    /// Altitude of the comparison model [km]; defaults to the mean satellite altitude.
    #[arg(long)]
    altitude_km: Option<f64>,
    /// Scale applied to the fitted density for the comparison model.
    #[arg(long, default_value_t = 1.0)]
    density_tune: f64,
    #[arg(long, default_value = "-10:20:31", value_parser = GridSpec::parse, allow_hyphen_values = true)]
    gamma_db_range: GridSpec,
    #[arg(long, default_value_t = 100)]
    trials_per_snapshot: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the visible-count histogram as CSV here.
    #[arg(long)]
    counts_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    network: NetworkFlags,
    /// Number of snapshots.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    observer_lat: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    observer_lon: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig7b,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    figure: Figure,
    #[arg(long, default_value = "-10:20:31", value_parser = GridSpec::parse, allow_hyphen_values = true)]
    gamma_db_range: GridSpec,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Threshold for fig7b [dB].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma_db: f64,
    #[command(flatten)]
    output: OutputFlags,
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let g = GridSpec::parse(s)?;
    Ok((g.start_db, g.stop_db, g.points))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    match cli.command {
        Command::Coverage(a) => commands::coverage(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::SynthSnapshots(a) => commands::synth(a),
        Command::Reproduce(a) => commands::reproduce(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let name = match &cli.command {
        Command::Coverage(_) => "coverage",
        Command::Simulate(_) => "simulate",
        Command::Optimize(_) => "optimize",
        Command::Ingest(_) => "ingest",
        Command::SynthSnapshots(_) => "synth-snapshots",
        Command::Reproduce(_) => "reproduce",
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    eprintln!("{}", sub.render_usage());
                }
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
