//! Constellation snapshots: parsing, visibility from a ground observer,
//! visible-count statistics and empirical coverage with resource thinning.
//!
//! Snapshot files are comma-separated with the header
//! `snapshot_id,timestamp,lat_deg,lon_deg,alt_km`, one satellite per row.
//! Rows sharing a `snapshot_id` form one snapshot, in order of first appearance.
//! Coordinates are converted on a spherical Earth of radius `R_E`.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDateTime, SecondsFormat, TimeZone, Utc};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::curve::{CoverageCurve, CoverageMethod};
use crate::error::{Error, Result};
use crate::geometry::{NetworkConfig, EARTH_RADIUS_KM};
use crate::montecarlo::MAX_POINTS_PER_TRIAL;
use crate::randomfield::{sample_count, FadingSampler, RngSeed};
use crate::stats::{poisson_chi_square, wilson_halfwidth};

pub const SNAPSHOT_HEADER: [&str; 5] = ["snapshot_id", "timestamp", "lat_deg", "lon_deg", "alt_km"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observer {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

impl Observer {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self> {
        check_lat_lon(lat_deg, lon_deg).map_err(|(field, message)| Error::InvalidArgument(format!("observer {field}: {message}")))?;
        Ok(Self { lat_deg, lon_deg })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatellitePosition {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSnapshot {
    pub id: String,
    /// ISO-8601 timestamp as written in the file.
    pub timestamp: String,
    pub satellites: Vec<SatellitePosition>,
    pub observer: Observer,
}

/// A satellite as seen from the observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibleSatellite {
    pub slant_range_km: f64,
    pub elevation_rad: f64,
}

fn check_lat_lon(lat: f64, lon: f64) -> std::result::Result<(), (&'static str, String)> {
    if !(lat.abs() <= 90.0) {
        return Err(("lat_deg", format!("latitude {lat} outside [-90, 90]")));
    }
    if !(lon.abs() <= 180.0) {
        return Err(("lon_deg", format!("longitude {lon} outside [-180, 180]")));
    }
    Ok(())
}

fn is_iso8601(s: &str) -> bool {
    DateTime::parse_from_rfc3339(s).is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f").is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%.f").is_ok()
}

/// Reads snapshots from a file. An empty file yields no snapshots and a warning.
pub fn parse_snapshots(path: impl AsRef<Path>, observer: Observer) -> Result<Vec<ConstellationSnapshot>> {
    let file = std::fs::File::open(path.as_ref())?;
    let out = read_snapshots(file, observer)?;
    if out.is_empty() {
        log::warn!("{} contains no snapshots", path.as_ref().display());
    }
    Ok(out)
}

/// Like [`parse_snapshots`] but from any reader.
pub fn read_snapshots<R: Read>(reader: R, observer: Observer) -> Result<Vec<ConstellationSnapshot>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Ok(Vec::new()),
        Some(h) => h.map_err(|e| csv_error(e, 1))?,
    };
    let names: Vec<&str> = header.iter().collect();
    if names != SNAPSHOT_HEADER {
        return Err(Error::Parse {
            line: 1,
            field: "header".into(),
            message: format!("expected `{}`, found `{}`", SNAPSHOT_HEADER.join(","), names.join(",")),
        });
    }

    let mut out: Vec<ConstellationSnapshot> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != SNAPSHOT_HEADER.len() {
            return Err(Error::Parse {
                line,
                field: "row".into(),
                message: format!("expected {} fields, found {}", SNAPSHOT_HEADER.len(), rec.len()),
            });
        }
        let err = |field: &str, message: String| Error::Parse { line, field: field.into(), message };
        let id = &rec[0];
        if id.is_empty() {
            return Err(err("snapshot_id", "empty".into()));
        }
        let timestamp = &rec[1];
        if !is_iso8601(timestamp) {
            return Err(err("timestamp", format!("`{timestamp}` is not an ISO-8601 date-time")));
        }
        let num = |i: usize| -> Result<f64> {
            let v: f64 = rec[i].parse().map_err(|_| err(SNAPSHOT_HEADER[i], format!("`{}` is not a number", &rec[i])))?;
            if !v.is_finite() {
                return Err(err(SNAPSHOT_HEADER[i], format!("`{}` is not finite", &rec[i])));
            }
            Ok(v)
        };
        let (lat, lon, alt) = (num(2)?, num(3)?, num(4)?);
        check_lat_lon(lat, lon).map_err(|(field, message)| err(field, message))?;
        if !(alt > 0.0) {
            return Err(err("alt_km", format!("altitude {alt} must be positive")));
        }
        let sat = SatellitePosition { lat_deg: lat, lon_deg: lon, alt_km: alt };
        match index.get(id) {
            Some(&k) => {
                if out[k].timestamp != timestamp {
                    return Err(err(
                        "timestamp",
                        format!("snapshot `{id}` already has timestamp `{}`", out[k].timestamp),
                    ));
                }
                out[k].satellites.push(sat);
            }
            None => {
                index.insert(id.to_string(), out.len());
                out.push(ConstellationSnapshot {
                    id: id.to_string(),
                    timestamp: timestamp.to_string(),
                    satellites: vec![sat],
                    observer,
                });
            }
        }
    }
    Ok(out)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse { line, field: "row".into(), message: e.to_string() }
}

/// Writes snapshots in the format read by [`parse_snapshots`].
pub fn write_snapshots<W: Write>(writer: W, snapshots: &[ConstellationSnapshot]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SNAPSHOT_HEADER).map_err(io)?;
    for s in snapshots {
        for p in &s.satellites {
            w.write_record([
                s.id.clone(),
                s.timestamp.clone(),
                format!("{:.6}", p.lat_deg),
                format!("{:.6}", p.lon_deg),
                format!("{:.3}", p.alt_km),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn ecef(lat_deg: f64, lon_deg: f64, radius: f64) -> [f64; 3] {
    let (lat, lon) = (lat_deg.to_radians(), lon_deg.to_radians());
    [radius * lat.cos() * lon.cos(), radius * lat.cos() * lon.sin(), radius * lat.sin()]
}

/// Satellites at elevation `>= psi_min` above the observer's horizon.
pub fn visible_satellites(snapshot: &ConstellationSnapshot, psi_min: f64, earth_radius: f64) -> Vec<VisibleSatellite> {
    let o = ecef(snapshot.observer.lat_deg, snapshot.observer.lon_deg, earth_radius);
    let up = o.map(|c| c / earth_radius);
    snapshot
        .satellites
        .iter()
        .filter_map(|s| {
            let p = ecef(s.lat_deg, s.lon_deg, earth_radius + s.alt_km);
            let d = [p[0] - o[0], p[1] - o[1], p[2] - o[2]];
            let range = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let sin_el = (d[0] * up[0] + d[1] * up[1] + d[2] * up[2]) / range;
            let elevation = sin_el.clamp(-1.0, 1.0).asin();
            (elevation >= psi_min).then_some(VisibleSatellite { slant_range_km: range, elevation_rad: elevation })
        })
        .collect()
}

/// Number of visible satellites in each snapshot.
pub fn visible_counts(snapshots: &[ConstellationSnapshot], psi_min: f64, earth_radius: f64) -> Vec<u64> {
    snapshots.iter().map(|s| visible_satellites(s, psi_min, earth_radius).len() as u64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    /// `visible_counts[k]` is the number of snapshots with exactly `k` visible satellites.
    pub visible_counts: Vec<u64>,
    pub snapshots: usize,
    /// Sample mean of the counts.
    pub poisson_mean_fit: f64,
    /// Chi-square goodness-of-fit p-value; `None` when the data are degenerate.
    pub p_value: Option<f64>,
    /// Set when the test cannot be formed (all counts zero, or too few pooled bins).
    pub degenerate: bool,
}

/// Moment-matched Poisson fit of visible counts with a chi-square test.
pub fn fit_poisson(counts: &[u64]) -> Result<EmpiricalStats> {
    if counts.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 snapshots, got {}", counts.len())));
    }
    let max = *counts.iter().max().unwrap_or(&0) as usize;
    let mut hist = vec![0u64; max + 1];
    for &c in counts {
        hist[c as usize] += 1;
    }
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64;
    let (p_value, degenerate) = if mean == 0.0 {
        (None, true)
    } else {
        match poisson_chi_square(counts, mean, 1) {
            Ok(t) => (Some(t.p_value), false),
            Err(Error::Degenerate(msg)) => {
                log::warn!("Poisson fit is degenerate: {msg}");
                (None, true)
            }
            Err(e) => return Err(e),
        }
    };
    Ok(EmpiricalStats { visible_counts: hist, snapshots: counts.len(), poisson_mean_fit: mean, p_value, degenerate })
}

/// Link model applied to snapshot geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLink {
    pub nakagami_m: u32,
    pub path_loss_exponent: f64,
    pub gain_ratio: f64,
    /// Number of orthogonal resources; each satellite picks one uniformly.
    pub resources: u32,
    pub min_elevation: f64,
    pub earth_radius: f64,
}

impl Default for EmpiricalLink {
    fn default() -> Self {
        Self {
            nakagami_m: 1,
            path_loss_exponent: 2.0,
            gain_ratio: 0.1,
            resources: 1,
            min_elevation: 0.0,
            earth_radius: EARTH_RADIUS_KM,
        }
    }
}

impl EmpiricalLink {
    pub fn validate(&self) -> Result<()> {
        if self.nakagami_m < 1 {
            return Err(Error::InvalidConfig("Nakagami m must be >= 1".into()));
        }
        if !(self.path_loss_exponent >= 2.0) || !self.path_loss_exponent.is_finite() {
            return Err(Error::InvalidConfig(format!("alpha must be >= 2, got {}", self.path_loss_exponent)));
        }
        if !(self.gain_ratio > 0.0 && self.gain_ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!("gain ratio must lie in (0, 1], got {}", self.gain_ratio)));
        }
        if self.resources < 1 {
            return Err(Error::InvalidConfig("resource count K must be >= 1".into()));
        }
        if !(self.min_elevation >= 0.0 && self.min_elevation < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidConfig(format!("minimum elevation must lie in [0, pi/2), got {}", self.min_elevation)));
        }
        if !(self.earth_radius > 0.0) || !self.earth_radius.is_finite() {
            return Err(Error::InvalidConfig(format!("Earth radius must be positive, got {}", self.earth_radius)));
        }
        Ok(())
    }
}

/// Resource index in `0..k` for each of `n` satellites.
pub fn assign_resources<R: Rng + ?Sized>(n: usize, k: u32, rng: &mut R) -> Vec<u32> {
    (0..n).map(|_| if k <= 1 { 0 } else { rng.random_range(0..k) }).collect()
}

/// Coverage averaged over snapshots and trials. In each trial the visible
/// satellites keep resource 0 with probability `1/K`, fading is redrawn, and
/// the user attaches to the nearest retained satellite. Trials with no
/// retained satellite count as not covered.
///
/// Snapshot `j` uses stream `seed.stream_id + j`, so the result does not depend
/// on the thread count.
pub fn empirical_coverage(
    snapshots: &[ConstellationSnapshot],
    link: &EmpiricalLink,
    thresholds: &[f64],
    trials_per_snapshot: u64,
    seed: RngSeed,
) -> Result<CoverageCurve<f64>> {
    link.validate()?;
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("no snapshots to evaluate".into()));
    }
    if trials_per_snapshot == 0 {
        return Err(Error::InvalidArgument("trials per snapshot must be >= 1".into()));
    }
    let fading = FadingSampler::new(link.nakagami_m)?;
    let k = thresholds.len();
    let counts = snapshots
        .par_iter()
        .enumerate()
        .map(|(j, snap)| {
            let mut rng = seed.with_stream(seed.stream_id.wrapping_add(j as u64)).rng();
            let ranges: Vec<f64> = visible_satellites(snap, link.min_elevation, link.earth_radius)
                .iter()
                .map(|v| v.slant_range_km)
                .collect();
            let mut covered = vec![0u64; k];
            for _ in 0..trials_per_snapshot {
                let resources = assign_resources(ranges.len(), link.resources, &mut rng);
                let mut near_d = f64::INFINITY;
                let mut near_power = 0.0;
                let mut interference = 0.0;
                for (&d, &res) in ranges.iter().zip(&resources) {
                    if res != 0 {
                        continue;
                    }
                    let power = fading.sample(&mut rng) * d.powf(-link.path_loss_exponent);
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
                if !near_d.is_finite() {
                    continue;
                }
                let sir = near_power / (link.gain_ratio * interference);
                for (c, &g) in covered.iter_mut().zip(thresholds) {
                    if sir >= g {
                        *c += 1;
                    }
                }
            }
            covered
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total = trials_per_snapshot * snapshots.len() as u64;
    let values = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let ci = counts.iter().map(|&c| wilson_halfwidth(c, total)).collect();
    CoverageCurve::new(thresholds.to_vec(), values, CoverageMethod::MonteCarlo, Some(ci))
}

/// Snapshots whose satellites form a Poisson process of the configured
/// density on the whole shell of altitude `h`. Snapshot `j` uses stream
/// `seed.stream_id + j` and is stamped one minute after snapshot `j - 1`.
pub fn synthesize_snapshots(
    config: &NetworkConfig<f64>,
    observer: Observer,
    count: usize,
    seed: RngSeed,
) -> Result<Vec<ConstellationSnapshot>> {
    config.validate()?;
    let h = config.altitude();
    let rs = config.satellite_radius;
    let mean = config.density * 4.0 * std::f64::consts::PI * rs * rs;
    if mean > MAX_POINTS_PER_TRIAL as f64 {
        return Err(Error::ResourceExceeded(format!("mean shell population {mean} too large")));
    }
    let start = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).single().expect("valid start date");
    (0..count)
        .into_par_iter()
        .map(|j| {
            let mut rng = seed.with_stream(seed.stream_id.wrapping_add(j as u64)).rng();
            let n = sample_count(mean, &mut rng)?;
            let satellites = (0..n)
                .map(|_| {
                    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
                    let lon = 360.0 * rng.random::<f64>() - 180.0;
                    SatellitePosition { lat_deg: z.asin().to_degrees(), lon_deg: lon, alt_km: h }
                })
                .collect();
            Ok(ConstellationSnapshot {
                id: format!("s{j:05}"),
                timestamp: (start + Duration::minutes(j as i64)).to_rfc3339_opts(SecondsFormat::Secs, true),
                satellites,
                observer,
            })
        })
        .collect()
}
