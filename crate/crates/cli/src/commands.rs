//! Subcommand implementations.

use rayon::prelude::*;
use satcov::analytic::{
    analytic_curve, bound_curves, coverage_bounds, coverage_exact, coverage_lower_tractable, default_approx_kappa,
    threshold_grid_db, CoverageMethod,
};
use satcov::ingest::{
    empirical_coverage, fit_poisson, parse_snapshots, synthesize_snapshots, visible_counts, write_snapshots,
    EmpiricalLink, Observer,
};
use satcov::montecarlo::{run_simulation, CoverageEstimate, NoiseParams, PointProcess, SimulationPlan};
use satcov::numerics::log_grid;
use satcov::optimizer::{optimal_density, optimal_density_numeric, tradeoff_curve, OptimalDensityResult};
use satcov::randomfield::RngSeed;
use satcov::stats::{wilson_interval, Z95};
use satcov::NetworkConfig;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, GridSpec, Method, Mode};
use crate::error::CliError;
use crate::output::{Cell, Report, Table};
use crate::{CoverageArgs, Figure, IngestArgs, OptimizeArgs, OutputFlags, ReproduceArgs, SimulateArgs, SynthArgs};

fn apply_output(cfg: &mut ExperimentConfig, out: &OutputFlags) {
    if out.out.is_some() {
        cfg.output.path.clone_from(&out.out);
    }
    if let Some(f) = out.format {
        cfg.output.format = f;
    }
}

fn emit(cfg: &ExperimentConfig, command: &str, table: Table, extra: Option<Value>) -> Result<(), CliError> {
    let report = Report { command: command.into(), config: serde_json::to_value(cfg)?, table, extra };
    report.emit(cfg.output.format, cfg.output.path.as_deref())
}

fn emit_plain(out: &OutputFlags, command: &str, config: Value, table: Table, extra: Option<Value>) -> Result<(), CliError> {
    let report = Report { command: command.into(), config, table, extra };
    report.emit(out.format.unwrap_or_default(), out.out.as_deref())
}

pub fn coverage(a: CoverageArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load_or_default(a.config.as_deref())?;
    a.network.apply(&mut cfg.network);
    if let Some(g) = a.gamma_db_range {
        cfg.gamma_db = g;
    }
    if let Some(m) = a.method {
        cfg.method = m;
    }
    if a.kappa.is_some() {
        cfg.kappa = a.kappa;
    }
    a.noise.apply(&mut cfg);
    apply_output(&mut cfg, &a.output);

    let mut config = cfg.network.resolve()?;
    let db = cfg.gamma_db.db_values()?;
    let gammas = cfg.gamma_db.linear()?;
    let table = match cfg.method {
        Method::Bounds => {
            let k = default_approx_kappa::<f64>(config.nakagami_m);
            let mid = analytic_curve(&config, &gammas, CoverageMethod::ApproxKappa, Some(k))?;
            let (lo, hi) = bound_curves(&config, &gammas)?;
            let mut t = Table::new(&["gamma_db", "value", "lower", "upper"]);
            for (i, d) in db.iter().enumerate() {
                t.push(vec![*d, mid.values[i], lo.values[i], hi.values[i]]);
            }
            t
        }
        method => {
            let m = match method {
                Method::Exact => CoverageMethod::Exact,
                Method::Approx => CoverageMethod::ApproxKappa,
                Method::Lower => CoverageMethod::LowerTractable,
                Method::RayleighClosed => CoverageMethod::RayleighClosed,
                Method::NoiseLimited => {
                    let noise = cfg.simulation.noise_params.normalized_noise_km(config.path_loss_exponent)?;
                    config = config.with_normalized_noise(noise);
                    CoverageMethod::NoiseLimited
                }
                Method::Bounds => unreachable!(),
            };
            let curve = analytic_curve(&config, &gammas, m, cfg.kappa)?;
            let mut t = Table::new(&["gamma_db", "value"]);
            for (d, v) in db.iter().zip(&curve.values) {
                t.push(vec![*d, *v]);
            }
            t
        }
    };
    emit(&cfg, "coverage", table, None)
}

/// Rows `gamma_db, value, ci_low, ci_high` with Wilson 95% limits.
fn estimate_rows(db: &[f64], est: &CoverageEstimate, table: &mut Table) {
    for (i, d) in db.iter().enumerate() {
        let (lo, hi) = wilson_interval(est.covered_counts[i], est.trials_used, Z95);
        table.push(vec![*d, est.curve.values[i], lo, hi]);
    }
}

pub fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load_or_default(a.config.as_deref())?;
    a.network.apply(&mut cfg.network);
    if let Some(g) = a.gamma_db_range {
        cfg.gamma_db = g;
    }
    let s = &mut cfg.simulation;
    if let Some(t) = a.trials {
        s.trials = t;
    }
    if let Some(v) = a.seed {
        s.seed = v;
    }
    if let Some(m) = a.mode {
        s.mode = m;
    }
    if a.n_fixed.is_some() {
        s.n_fixed = a.n_fixed;
    }
    a.noise.apply(&mut cfg);
    apply_output(&mut cfg, &a.output);

    let sim = &cfg.simulation;
    let (config, mode) = match sim.mode {
        Mode::Ppp => (cfg.network.resolve()?, PointProcess::Ppp),
        Mode::Bpp => {
            let n = sim.n_fixed.ok_or_else(|| CliError::Usage("--mode bpp needs --n-fixed".into()))?;
            let config = if cfg.network.has_density() {
                cfg.network.resolve()?
            } else {
                cfg.network.base().with_mean_count(n as f64)?
            };
            (config, PointProcess::Bpp(n))
        }
    };
    let mut plan = SimulationPlan::new(config, sim.trials, cfg.gamma_db.linear()?, sim.seed).with_mode(mode);
    if sim.noise {
        plan = plan.with_noise(Some(sim.noise_params));
    }
    let est = run_simulation(&plan)?;
    let mut table = Table::new(&["gamma_db", "value", "ci_low", "ci_high"]);
    estimate_rows(&cfg.gamma_db.db_values()?, &est, &mut table);
    let extra = json!({ "trials": est.trials_used, "empty_cap_fraction": est.empty_cap_fraction });
    emit(&cfg, "simulate", table, Some(extra))
}

fn optimum_row(r: &OptimalDensityResult<f64>) -> Vec<Cell> {
    vec![
        r.method.as_str().into(),
        r.lambda_star.into(),
        r.mean_count_star.into(),
        r.coverage_at_star.into(),
        r.eta_u_value.into(),
        if r.at_boundary { 1.0.into() } else { 0.0.into() },
    ]
}

pub fn optimize(a: OptimizeArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load_or_default(a.config.as_deref())?;
    a.network.apply(&mut cfg.network);
    apply_output(&mut cfg, &a.output);
    let base = cfg.network.base();
    base.validate()?;
    let gamma = satcov::analytic::db_to_linear(a.gamma_db);
    if base.nakagami_m != 1 && !a.numeric {
        return Err(CliError::Usage(format!(
            "the closed-form optimum holds for Rayleigh fading only (m = 1, got m = {}); pass --numeric for a grid search",
            base.nakagami_m
        )));
    }
    let solve = |c: &NetworkConfig<f64>| -> Result<OptimalDensityResult<f64>, CliError> {
        Ok(if a.numeric { optimal_density_numeric(gamma, c, a.lambda_min, a.lambda_max)? } else { optimal_density(gamma, c)? })
    };
    let extra = json!({ "gamma_db": a.gamma_db, "numeric": a.numeric });
    let table = if a.sweep_altitude {
        let (lo, hi, n) = a.altitude_range;
        let hs = log_grid(lo, hi, n)?;
        let mut t = Table::new(&["h_km", "mean_count_star", "lambda_star"]);
        if a.numeric {
            let rows = hs
                .par_iter()
                .map(|&h| {
                    let mut c = base;
                    c.satellite_radius = c.earth_radius + h;
                    solve(&c).map(|r| vec![h, r.mean_count_star, r.lambda_star])
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.into_iter().for_each(|r| t.push(r));
        } else {
            for (h, n) in tradeoff_curve(gamma, &base, &hs)? {
                let area = satcov::cap_area(&{
                    let mut c = base;
                    c.satellite_radius = c.earth_radius + h;
                    c
                })?;
                t.push(vec![h, n, n / area]);
            }
        }
        t
    } else {
        let r = solve(&base)?;
        let mut t = Table::new(&["method", "lambda_star", "mean_count_star", "coverage_at_star", "eta_u", "at_boundary"]);
        t.push_cells(optimum_row(&r));
        t
    };
    emit(&cfg, "optimize", table, Some(extra))
}

pub fn ingest(a: IngestArgs) -> Result<(), CliError> {
    let observer = Observer::new(a.observer_lat, a.observer_lon)?;
    let snapshots = parse_snapshots(&a.input, observer)?;
    let psi = a.min_elevation_deg.to_radians();
    let counts = visible_counts(&snapshots, psi, a.re_km);
    let fit = fit_poisson(&counts)?;
    let link = EmpiricalLink {
        nakagami_m: a.m,
        path_loss_exponent: a.alpha,
        gain_ratio: satcov::analytic::db_to_linear(a.gain_ratio_db),
        resources: a.resources,
        min_elevation: psi,
        earth_radius: a.re_km,
    };
    let gammas = a.gamma_db_range.linear()?;
    let db = a.gamma_db_range.db_values()?;
    let emp = empirical_coverage(&snapshots, &link, &gammas, a.trials_per_snapshot, RngSeed::new(a.seed))?;

    let altitude = match a.altitude_km {
        Some(h) => h,
        None => {
            let (sum, n) = snapshots
                .iter()
                .flat_map(|s| &s.satellites)
                .fold((0.0, 0usize), |(s, n), p| (s + p.alt_km, n + 1));
            sum / n as f64
        }
    };
    let model_mean = fit.poisson_mean_fit * a.density_tune / f64::from(a.resources.max(1));
    let model = NetworkConfig::with_altitude(altitude)
        .with_earth_radius(a.re_km)
        .with_nakagami_m(a.m)
        .with_path_loss_exponent(a.alpha)
        .with_gain_ratio(link.gain_ratio)
        .with_min_elevation(psi)
        .with_mean_count(model_mean)?;
    let model_values = gammas.par_iter().map(|&g| coverage_exact(g, &model)).collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(&["gamma_db", "empirical", "ci_low", "ci_high", "model"]);
    let ci = emp.ci_halfwidth.as_deref().unwrap_or(&[]);
    for i in 0..db.len() {
        let v = emp.values[i];
        table.push(vec![db[i], v, (v - ci[i]).max(0.0), (v + ci[i]).min(1.0), model_values[i]]);
    }

    let n = counts.len() as f64;
    let mut hist = Table::new(&["visible_count", "snapshots", "poisson_expected"]);
    for (k, &c) in fit.visible_counts.iter().enumerate() {
        let expected = n * poisson_pmf(k as u64, fit.poisson_mean_fit);
        hist.push(vec![k as f64, c as f64, expected]);
    }
    if let Some(path) = &a.counts_out {
        let mut buf = Vec::new();
        hist.write_csv(&mut buf)?;
        std::fs::write(path, buf).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    eprintln!(
        "snapshots: {}, fitted Poisson mean: {:.4}, chi-square p-value: {}",
        fit.snapshots,
        fit.poisson_mean_fit,
        fit.p_value.map_or_else(|| "n/a (degenerate)".to_string(), |p| format!("{p:.4}"))
    );
    let config = json!({
        "input": a.input,
        "observer": observer,
        "link": link,
        "model_altitude_km": altitude,
        "density_tune": a.density_tune,
        "gamma_db": a.gamma_db_range,
        "trials_per_snapshot": a.trials_per_snapshot,
        "seed": a.seed,
    });
    let extra = json!({ "fit": fit, "histogram": hist });
    emit_plain(&a.output, "ingest", config, table, Some(extra))
}

fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (k as f64 * mean.ln() - mean - ln_fact).exp()
}

pub fn synth(a: SynthArgs) -> Result<(), CliError> {
    let mut spec = crate::config::NetworkSpec::default();
    a.network.apply(&mut spec);
    let config = spec.resolve()?;
    let observer = Observer::new(a.observer_lat, a.observer_lon)?;
    let snaps = synthesize_snapshots(&config, observer, a.count, RngSeed::new(a.seed))?;
    match &a.out {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            write_snapshots(std::io::BufWriter::new(f), &snaps)?;
        }
        None => write_snapshots(std::io::stdout().lock(), &snaps)?,
    }
    Ok(())
}

fn fig1_config(m: u32) -> Result<NetworkConfig<f64>, CliError> {
    Ok(NetworkConfig::with_altitude(500.0).with_nakagami_m(m).with_mean_count(10.0)?)
}

pub fn reproduce(a: ReproduceArgs) -> Result<(), CliError> {
    let grid: &GridSpec = &a.gamma_db_range;
    let db = grid.db_values()?;
    let gammas = threshold_grid_db(grid.start_db, grid.stop_db, grid.points)?;
    let exact = |c: &NetworkConfig<f64>| -> Result<Vec<f64>, CliError> {
        Ok(analytic_curve(c, &gammas, CoverageMethod::Exact, None)?.values)
    };
    let simulate = |c: NetworkConfig<f64>, mode: PointProcess, noise: bool| -> Result<CoverageEstimate, CliError> {
        let mut plan = SimulationPlan::new(c, a.trials, gammas.clone(), a.seed).with_mode(mode);
        if noise {
            plan = plan.with_noise(Some(NoiseParams::default()));
        }
        Ok(run_simulation(&plan)?)
    };
    let mut columns: Vec<String> = vec!["gamma_db".into()];
    let mut data: Vec<Vec<f64>> = Vec::new();
    let mut add = |name: String, values: Vec<f64>| {
        columns.push(name);
        data.push(values);
    };
    let mut config = json!({ "figure": format!("{:?}", a.figure).to_lowercase(), "gamma_db": grid, "trials": a.trials, "seed": a.seed });

    match a.figure {
        Figure::Fig1 => {
            config["network"] = json!({ "altitude_km": 500.0, "mean_count": 10.0, "alpha": 2.0, "gain_ratio": 0.1, "m": [1, 2, 4] });
            config["noise"] = serde_json::to_value(NoiseParams::default())?;
            for m in [1, 2, 4] {
                let c = fig1_config(m)?;
                add(format!("exact_m{m}"), exact(&c)?);
                add(format!("sim_m{m}"), simulate(c, PointProcess::Ppp, false)?.curve.values);
                add(format!("sim_sinr_m{m}"), simulate(c, PointProcess::Ppp, true)?.curve.values);
            }
        }
        Figure::Fig2 => {
            config["network"] = json!({ "altitude_km": 500.0, "mean_count": 10.0, "gain_ratio": 0.1, "m": 2, "alpha": [2.0, 4.0] });
            for alpha in [2.0, 4.0] {
                let c = fig1_config(2)?.with_path_loss_exponent(alpha);
                let pairs = gammas.par_iter().map(|&g| coverage_bounds(g, &c)).collect::<Result<Vec<_>, _>>()?;
                let tag = format!("a{alpha}");
                add(format!("exact_{tag}"), exact(&c)?);
                add(format!("lower_{tag}"), pairs.iter().map(|p| p.lower).collect());
                add(format!("upper_{tag}"), pairs.iter().map(|p| p.upper).collect());
                add(format!("approx_{tag}"), analytic_curve(&c, &gammas, CoverageMethod::ApproxKappa, None)?.values);
            }
        }
        Figure::Fig3 => {
            config["network"] = json!({ "altitude_km": 500.0, "gain_ratio": 0.1, "m": 1, "alpha": [2.0, 4.0], "mean_count": [10.0, 30.0] });
            for alpha in [2.0, 4.0] {
                for n in [10.0, 30.0] {
                    let c = NetworkConfig::with_altitude(500.0).with_path_loss_exponent(alpha).with_mean_count(n)?;
                    let tag = format!("a{alpha}_n{n}");
                    add(format!("exact_{tag}"), exact(&c)?);
                    add(
                        format!("lower_{tag}"),
                        gammas.par_iter().map(|&g| coverage_lower_tractable(g, &c)).collect::<Result<Vec<_>, _>>()?,
                    );
                }
            }
        }
        Figure::Fig4 => {
            config["network"] = json!({ "altitude_km": 550.0, "gain_ratio": 0.1, "m": 1, "alpha": 2.0, "n": [2, 10] });
            for n in [2u64, 10] {
                let c = NetworkConfig::with_altitude(550.0).with_mean_count(n as f64)?;
                let ppp = simulate(c, PointProcess::Ppp, false)?;
                let bpp = simulate(c, PointProcess::Bpp(n), false)?;
                add(format!("ppp_exact_n{n}"), exact(&c)?);
                add(format!("ppp_sim_n{n}"), ppp.curve.values.clone());
                add(format!("ppp_ci_n{n}"), ppp.curve.ci_halfwidth.clone().unwrap_or_default());
                add(format!("bpp_sim_n{n}"), bpp.curve.values.clone());
                add(format!("bpp_ci_n{n}"), bpp.curve.ci_halfwidth.clone().unwrap_or_default());
            }
        }
        Figure::Fig7b => {
            let gamma = satcov::analytic::db_to_linear(a.gamma_db);
            config = json!({ "figure": "fig7b", "gamma_db": a.gamma_db, "network": { "alpha": 2.0, "gain_ratio": 0.1, "m": 1 } });
            let curve = tradeoff_curve(gamma, &NetworkConfig::with_altitude(500.0), &log_grid(200.0, 2000.0, 50)?)?;
            let mut t = Table::new(&["h_km", "mean_count_star"]);
            for (h, n) in curve {
                t.push(vec![h, n]);
            }
            return emit_plain(&a.output, "reproduce", config, t, None);
        }
    }
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = Table::new(&names);
    for (i, d) in db.iter().enumerate() {
        let mut row = vec![*d];
        row.extend(data.iter().map(|col| col[i]));
        t.push(row);
    }
    emit_plain(&a.output, "reproduce", config, t, None)
}
