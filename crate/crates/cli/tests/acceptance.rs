//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still evaluated and reported
//! honestly; a failure there does not fail the run, anything else does.

use std::error::Error;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use satcov::analytic::{
    coverage_bounds, coverage_exact, coverage_lower_tractable, laplace_derivatives, laplace_interference,
    laplace_interference_with, threshold_grid_db, visibility_probability,
};
use satcov::montecarlo::{estimate_laplace, run_simulation, sample_conditioned_nearest, NoiseParams, PointProcess, SimulationPlan};
use satcov::numerics::{
    eta_upper, eta_upper_closed, eta_upper_hypergeometric, integrate, log_grid, EtaArgs, QuadratureSpec,
};
use satcov::optimizer::{
    argmax_density_oracle, difference_sign_changes, objective_on_grid, optimal_density, tradeoff_curve,
};
use satcov::randomfield::{nearest_distance_cdf, nearest_distance_pdf, RngSeed};
use satcov::stats::ks_test;
use satcov::{limited_visibility, NetworkConfig};

type Check = Result<(bool, String), Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Check);

const KNOWN_UNATTAINABLE: [usize; 3] = [2, 9, 10];
const TRIALS: u64 = 100_000;

fn fig1(m: u32) -> NetworkConfig<f64> {
    NetworkConfig::with_altitude(500.0).with_nakagami_m(m).with_mean_count(10.0).expect("valid config")
}

fn grid() -> Vec<f64> {
    threshold_grid_db(-10.0, 20.0, 31).expect("valid grid")
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::new(1e-15, 1e-13, 1000).expect("valid spec")
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c1_simulation_matches_exact() -> Check {
    let start = Instant::now();
    let g = grid();
    let mut worst: f64 = 0.0;
    for m in [1, 2, 4] {
        let c = fig1(m);
        let est = run_simulation(&SimulationPlan::new(c, TRIALS, g.clone(), 1))?;
        let exact = g.iter().map(|&x| coverage_exact(x, &c)).collect::<Result<Vec<_>, _>>()?;
        worst = worst.max(max_abs_diff(&est.curve.values, &exact));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst <= 0.01 && secs <= 120.0, format!("max |exact - mc| = {worst:.4}, {secs:.1} s")))
}

fn c2_bounds_bracket() -> Check {
    let mut bracketed = true;
    let mut widest: f64 = 0.0;
    for alpha in [2.0, 4.0] {
        let c = fig1(2).with_path_loss_exponent(alpha);
        for g in grid() {
            let exact = coverage_exact(g, &c)?;
            let b = coverage_bounds(g, &c)?;
            bracketed &= b.lower <= exact + 1e-9 && exact <= b.upper + 1e-9;
            widest = widest.max(b.upper - b.lower);
        }
    }
    Ok((bracketed && widest <= 0.1, format!("bracketed = {bracketed}, max width = {widest:.4}")))
}

fn c3_tractable_tightens() -> Check {
    let mut below = true;
    let mut detail = Vec::new();
    let mut ok = true;
    for alpha in [2.0, 4.0] {
        let mut gaps = Vec::new();
        for mean in [10.0, 30.0] {
            let c = NetworkConfig::with_altitude(500.0).with_path_loss_exponent(alpha).with_mean_count(mean)?;
            let mut total = 0.0;
            for g in grid() {
                let exact = coverage_exact(g, &c)?;
                let lower = coverage_lower_tractable(g, &c)?;
                below &= lower <= exact + 1e-9;
                total += exact - lower;
            }
            gaps.push(total / 31.0);
        }
        ok &= gaps[1] < gaps[0];
        detail.push(format!("alpha {alpha}: gap {:.4} -> {:.4}", gaps[0], gaps[1]));
    }
    Ok((ok && below, format!("below = {below}, {}", detail.join(", "))))
}

fn c4_closed_forms() -> Check {
    let spec = tight();
    let xs = log_grid(1e-3, 1e3, 50)?;
    let mut worst_closed: f64 = 0.0;
    for h in [300.0f64, 500.0, 1000.0] {
        for (alpha, m) in [(2.0, 1), (2.0, 2), (2.0, 4), (4.0, 1)] {
            let c = NetworkConfig::with_altitude(h).with_path_loss_exponent(alpha).with_nakagami_m(m);
            let args = EtaArgs::from_config(&c)?;
            for &x in &xs {
                let closed = eta_upper_closed(c.gain_ratio * x, &args)?;
                let quad = eta_upper(x, &args, &spec)?;
                worst_closed = worst_closed.max((closed - quad).abs() / quad.abs());
            }
        }
    }
    let mut worst_hyp: f64 = 0.0;
    for alpha in [2.5, 3.0, 4.0, 5.0] {
        let c = fig1(1).with_path_loss_exponent(alpha);
        let args = EtaArgs::from_config(&c)?;
        for g in grid() {
            let hyp = eta_upper_hypergeometric(c.gain_ratio * g, &args)?;
            let quad = eta_upper(g, &args, &spec)?;
            worst_hyp = worst_hyp.max((hyp - quad).abs() / quad.abs());
        }
    }
    Ok((
        worst_closed <= 1e-8 && worst_hyp <= 1e-6,
        format!("closed rel err {worst_closed:.2e}, hypergeometric rel err {worst_hyp:.2e}"),
    ))
}

fn c5_nearest_distance() -> Check {
    let c = fig1(1);
    let samples = sample_conditioned_nearest(&c, 10_000, RngSeed::new(5))?;
    let ks = ks_test(&samples, |r| nearest_distance_cdf(r, &c).unwrap_or(f64::NAN))?;
    let cap = c.cap()?;
    let spec = QuadratureSpec::new(1e-14, 1e-13, 500)?;
    let total = integrate(|r| nearest_distance_pdf(r, &c).unwrap_or(f64::NAN), cap.r_min, cap.r_max, &spec)?.value;
    let err = (total - 1.0).abs();
    Ok((ks.p_value > 0.01 && err <= 1e-9, format!("KS p = {:.3}, |int pdf - 1| = {err:.1e}", ks.p_value)))
}

fn c6_laplace() -> Check {
    let c = fig1(1);
    let cap = c.cap()?;
    let mut worst: f64 = 0.0;
    for (r, x) in [(cap.r_min + 100.0, 1.0), (900.0, 0.3), (1500.0, 3.0)] {
        let s = x * r * r;
        let analytic = laplace_interference(s, r, &c)?;
        let empirical = estimate_laplace(&c, r, s, TRIALS, RngSeed::new(17))?;
        worst = worst.max((analytic - empirical).abs() / analytic);
    }
    Ok((worst <= 0.01, format!("max rel err = {worst:.4}")))
}

fn c7_optimal_density() -> Check {
    let mut worst: f64 = 0.0;
    let mut unimodal = true;
    let lambda_grid = log_grid(1e-10, 1e-4, 400)?;
    for h in [300.0f64, 500.0, 1000.0] {
        for gamma in [0.1, 1.0, 10.0] {
            let c = NetworkConfig::with_altitude(h);
            let closed = optimal_density(gamma, &c)?;
            let found = argmax_density_oracle(gamma, &c, 1e-10, 1e-4)?;
            worst = worst.max((closed.lambda_star - found.lambda).abs() / found.lambda);
            unimodal &= !found.at_boundary;
            unimodal &= difference_sign_changes(&objective_on_grid(gamma, &c, &lambda_grid)?) == 1;
        }
    }
    Ok((worst <= 0.01 && unimodal, format!("max rel err = {worst:.2e}, single sign change = {unimodal}")))
}

fn c8_tradeoff() -> Check {
    let c = NetworkConfig::<f64>::with_altitude(500.0);
    let curve = tradeoff_curve(1.0, &c, &log_grid(200.0, 2000.0, 60)?)?;
    let decreasing = curve.windows(2).all(|w| w[1].1 < w[0].1);
    let pts = tradeoff_curve(1.0, &c, &log_grid(100.0, 1000.0, 40)?)?;
    let xs: Vec<f64> = pts.iter().map(|p| (1.0 / p.0).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    Ok((decreasing && r2 >= 0.99, format!("strictly decreasing = {decreasing}, R^2 = {r2:.4}")))
}

fn c9_ppp_vs_bpp() -> Check {
    let g = grid();
    let mut gaps = Vec::new();
    let mut significant = Vec::new();
    for n in [10u64, 2] {
        let c = NetworkConfig::with_altitude(550.0).with_mean_count(n as f64)?;
        let ppp = run_simulation(&SimulationPlan::new(c, TRIALS, g.clone(), 1))?;
        let bpp = run_simulation(&SimulationPlan::new(c, TRIALS, g.clone(), 1).with_mode(PointProcess::Bpp(n)))?;
        let (pc, bc) = (ppp.curve.ci_halfwidth.unwrap_or_default(), bpp.curve.ci_halfwidth.unwrap_or_default());
        gaps.push(max_abs_diff(&ppp.curve.values, &bpp.curve.values));
        significant.push(
            (0..g.len()).filter(|&i| (ppp.curve.values[i] - bpp.curve.values[i]).abs() > pc[i] + bc[i]).count(),
        );
    }
    Ok((
        gaps[0] <= 0.015 && significant[1] >= 1,
        format!("N=10 max gap = {:.4}, N=2 points beyond CI = {}", gaps[0], significant[1]),
    ))
}

fn c10_noise() -> Check {
    let g = grid();
    let plan = SimulationPlan::new(fig1(1), TRIALS, g, 1);
    let sir = run_simulation(&plan)?;
    let sinr = run_simulation(&plan.clone().with_noise(Some(NoiseParams::default())))?;
    let gap = max_abs_diff(&sir.curve.values, &sinr.curve.values);
    Ok((gap <= 0.01, format!("max |SINR - SIR| = {gap:.4}")))
}

fn c11_limited_visibility() -> Check {
    let base = fig1(2);
    let zero = base.with_min_elevation(0.0);
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    let mut same = base.cap()? == limited_visibility(&base, 0.0)?;
    same &= rel(visibility_probability(&base)?, visibility_probability(&zero)?);
    for g in [0.1, 1.0, 10.0] {
        same &= rel(coverage_exact(g, &base)?, coverage_exact(g, &zero)?);
        let (a, b) = (coverage_bounds(g, &base)?, coverage_bounds(g, &zero)?);
        same &= rel(a.lower, b.lower) && rel(a.upper, b.upper);
        same &= rel(coverage_lower_tractable(g, &base)?, coverage_lower_tractable(g, &zero)?);
        same &= rel(laplace_interference(g * 1e6, 800.0, &base)?, laplace_interference(g * 1e6, 800.0, &zero)?);
        same &= rel(nearest_distance_cdf(800.0, &base)?, nearest_distance_cdf(800.0, &zero)?);
    }
    let limited = base.with_min_elevation(25f64.to_radians());
    let reduces = visibility_probability(&limited)? < visibility_probability(&base)?
        && limited.cap()?.r_max < base.cap()?.r_max;
    Ok((same && reduces, format!("zero mask identical = {same}, 25 deg mask reduces = {reduces}")))
}

fn c12_derivatives() -> Check {
    let spec = tight();
    let c = fig1(4).with_path_loss_exponent(3.0);
    let cap = c.cap()?;
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut unif = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let r = cap.r_min + (0.8 * unif() + 0.05) * (cap.r_max - cap.r_min);
        let s = 10f64.powf(-1.0 + 2.0 * unif()) * r.powf(3.0);
        let d = laplace_derivatives(s, r, 3, &c, &spec)?;
        let f = |v: f64| laplace_interference_with(v, r, &c, &spec).unwrap_or(f64::NAN);
        let h = 0.01 * s;
        let fd = [
            f(s),
            (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h),
            (-f(s - 2.0 * h) + 16.0 * f(s - h) - 30.0 * f(s) + 16.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h * h),
            (f(s - 3.0 * h) - 8.0 * f(s - 2.0 * h) + 13.0 * f(s - h) - 13.0 * f(s + h) + 8.0 * f(s + 2.0 * h)
                - f(s + 3.0 * h))
                / (8.0 * h * h * h),
        ];
        for k in 0..=3 {
            worst = worst.max((d[k] - fd[k]).abs() / d[k].abs());
        }
    }
    Ok((worst <= 1e-4, format!("max rel err = {worst:.2e}")))
}

fn run_cli(args: &[&str], threads: usize) -> Result<Vec<u8>, Box<dyn Error>> {
    let out = Command::new(env!("CARGO_BIN_EXE_satcov")).arg("--threads").arg(threads.to_string()).args(args).output()?;
    if !out.status.success() {
        return Err(format!("satcov {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)).into());
    }
    Ok(out.stdout)
}

fn c13_determinism() -> Check {
    let dir = tempfile::tempdir()?;
    let snaps = dir.path().join("snaps.csv");
    let snaps_arg = path_arg(&snaps)?;
    run_cli(&["synth-snapshots", "--mean-count", "20", "--count", "40", "--seed", "3", "--out", &snaps_arg], 1)?;
    let commands: [&[&str]; 5] = [
        &["simulate", "--mean-count", "10", "--m", "2", "--trials", "20000", "--seed", "9"],
        &["simulate", "--mean-count", "10", "--mode", "bpp", "--n-fixed", "10", "--trials", "20000", "--noise"],
        &["ingest", "--input", &snaps_arg, "--observer-lat", "0", "--observer-lon", "0", "--resources", "2", "--trials-per-snapshot", "20"],
        &["reproduce", "fig4", "--trials", "5000", "--format", "json"],
        &["synth-snapshots", "--mean-count", "20", "--count", "10", "--seed", "4"],
    ];
    let mut identical = 0;
    for args in commands {
        let reference = run_cli(args, 1)?;
        if [2, 8].iter().map(|&t| run_cli(args, t)).collect::<Result<Vec<_>, _>>()?.iter().all(|o| *o == reference) {
            identical += 1;
        }
    }
    Ok((identical == commands.len(), format!("{identical}/{} commands byte-identical across 1, 2, 8 threads", commands.len())))
}

fn path_arg(p: &Path) -> Result<String, Box<dyn Error>> {
    p.to_str().map(str::to_owned).ok_or_else(|| "non-UTF-8 temp path".into())
}

fn main() {
    let checks: [Criterion; 13] = [
        ("simulation matches exact coverage for m in {1,2,4}", c1_simulation_matches_exact),
        ("kappa endpoints bracket exact coverage within 0.1", c2_bounds_bracket),
        ("tractable lower bound tightens with density", c3_tractable_tightens),
        ("closed-form and hypergeometric paths match quadrature", c4_closed_forms),
        ("nearest distance follows the truncated Rayleigh law", c5_nearest_distance),
        ("Laplace transform matches simulation", c6_laplace),
        ("closed-form optimal density matches grid search", c7_optimal_density),
        ("optimal mean count falls logarithmically with altitude", c8_tradeoff),
        ("PPP and BPP agree at N=10 and differ at N=2", c9_ppp_vs_bpp),
        ("noise changes the Monte Carlo curve by at most 0.01", c10_noise),
        ("zero elevation mask is the unrestricted model", c11_limited_visibility),
        ("Laplace derivatives match finite differences", c12_derivatives),
        ("stochastic commands are thread-count independent", c13_determinism),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let id = i + 1;
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let note = match (pass, known) {
            (false, true) => " [expected failure]",
            (true, true) => " [unexpected pass]",
            _ => "",
        };
        println!("{} {id:>2} {name}: {detail}{note}", if pass { "PASS" } else { "FAIL" });
        if !pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
