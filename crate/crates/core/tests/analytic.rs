use proptest::prelude::*;
use satcov::analytic::{
    analytic_curve, bound_curves, coverage_bounds, coverage_exact, coverage_lower_tractable, coverage_noise_limited,
    coverage_rayleigh_closed, laplace_derivatives, laplace_interference, laplace_interference_with,
    threshold_grid_db, visibility_probability, CoverageMethod,
};
use satcov::montecarlo::estimate_laplace;
use satcov::numerics::{eta_upper, eta_upper_closed, eta_upper_hypergeometric, log_grid, EtaArgs, QuadratureSpec};
use satcov::randomfield::{nearest_distance_cdf, RngSeed};
use satcov::{limited_visibility, NetworkConfig};

fn fig1(m: u32) -> NetworkConfig<f64> {
    NetworkConfig::with_altitude(500.0).with_nakagami_m(m).with_mean_count(10.0).unwrap()
}

fn grid() -> Vec<f64> {
    threshold_grid_db(-10.0, 20.0, 31).unwrap()
}

#[test]
fn laplace_matches_simulation() {
    let c = fig1(1);
    let cap = c.cap().unwrap();
    for (r, x) in [(cap.r_min + 100.0, 1.0), (900.0, 0.3), (1500.0, 3.0)] {
        let s = x * f64::powf(r, 2.0);
        let analytic = laplace_interference(s, r, &c).unwrap();
        let empirical = estimate_laplace(&c, r, s, 100_000, RngSeed::new(17)).unwrap();
        assert!((analytic - empirical).abs() <= 0.01 * analytic, "r {r}: {analytic} vs {empirical}");
    }
}

#[test]
fn bounds_bracket_exact() {
    for alpha in [2.0, 4.0] {
        let c = fig1(2).with_path_loss_exponent(alpha);
        for g in grid() {
            let exact = coverage_exact(g, &c).unwrap();
            let b = coverage_bounds(g, &c).unwrap();
            assert!(b.lower <= exact + 1e-9 && exact <= b.upper + 1e-9, "alpha {alpha} gamma {g}: {b:?} vs {exact}");
        }
    }
}

#[test]
fn tractable_lower_bound_tightens_with_density() {
    for alpha in [2.0, 4.0] {
        let mut gaps = Vec::new();
        for mean in [10.0, 30.0] {
            let c = NetworkConfig::with_altitude(500.0).with_path_loss_exponent(alpha).with_mean_count(mean).unwrap();
            let mut total = 0.0;
            for g in grid() {
                let exact = coverage_exact(g, &c).unwrap();
                let lower = coverage_lower_tractable(g, &c).unwrap();
                assert!(lower <= exact + 1e-9, "alpha {alpha} mean {mean} gamma {g}");
                total += exact - lower;
            }
            gaps.push(total / 31.0);
        }
        assert!(gaps[1] < gaps[0], "alpha {alpha}: {gaps:?}");
    }
}

#[test]
fn tractable_bound_below_exact_for_higher_m() {
    for m in [2, 4] {
        let c = fig1(m);
        for g in grid() {
            assert!(coverage_lower_tractable(g, &c).unwrap() <= coverage_exact(g, &c).unwrap() + 1e-9);
        }
    }
}

#[test]
fn closed_forms_match_quadrature() {
    let spec = QuadratureSpec::new(1e-15, 1e-13, 1000).unwrap();
    let xs: Vec<f64> = log_grid(1e-3, 1e3, 50).unwrap();
    for h in [300.0, 500.0, 1000.0] {
        for (alpha, m) in [(2.0, 1), (2.0, 2), (2.0, 4), (4.0, 1)] {
            let c = NetworkConfig::with_altitude(h).with_path_loss_exponent(alpha).with_nakagami_m(m);
            let args = EtaArgs::from_config(&c).unwrap();
            for &x in &xs {
                let closed = eta_upper_closed(0.1 * x, &args).unwrap();
                let quad = eta_upper(x, &args, &spec).unwrap();
                assert!((closed - quad).abs() <= 1e-8 * quad.abs(), "h {h} ({alpha},{m}) x {x}: {closed} vs {quad}");
            }
        }
    }
}

#[test]
fn hypergeometric_path_matches_quadrature() {
    let spec = QuadratureSpec::new(1e-15, 1e-13, 1000).unwrap();
    for alpha in [2.5, 3.0, 4.0, 5.0] {
        let c = fig1(1).with_path_loss_exponent(alpha);
        let args = EtaArgs::from_config(&c).unwrap();
        for g in grid() {
            let hyp = eta_upper_hypergeometric(0.1 * g, &args).unwrap();
            let quad = eta_upper(g, &args, &spec).unwrap();
            assert!((hyp - quad).abs() <= 1e-6 * quad, "alpha {alpha} gamma {g}: {hyp} vs {quad}");
        }
    }
}

#[test]
fn rayleigh_closed_equals_tractable_bound() {
    for alpha in [2.0, 3.0, 4.0] {
        let c = fig1(1).with_path_loss_exponent(alpha);
        for g in grid() {
            let a = coverage_rayleigh_closed(g, &c).unwrap();
            let b = coverage_lower_tractable(g, &c).unwrap();
            assert!((a - b).abs() <= 1e-7 * b.max(1e-12), "alpha {alpha} gamma {g}: {a} vs {b}");
        }
    }
}

#[test]
fn zero_elevation_is_the_unrestricted_model() {
    let base = fig1(2);
    let zero = base.with_min_elevation(0.0);
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    assert_eq!(base.cap().unwrap(), limited_visibility(&base, 0.0).unwrap());
    assert!(rel(visibility_probability(&base).unwrap(), visibility_probability(&zero).unwrap()));
    for g in [0.1, 1.0, 10.0] {
        assert!(rel(coverage_exact(g, &base).unwrap(), coverage_exact(g, &zero).unwrap()));
        assert!(rel(coverage_lower_tractable(g, &base).unwrap(), coverage_lower_tractable(g, &zero).unwrap()));
        assert!(rel(laplace_interference(g * 1e6, 800.0, &base).unwrap(), laplace_interference(g * 1e6, 800.0, &zero).unwrap()));
        assert!(rel(nearest_distance_cdf(800.0, &base).unwrap(), nearest_distance_cdf(800.0, &zero).unwrap()));
    }
    let limited = base.with_min_elevation(25f64.to_radians());
    assert!(visibility_probability(&limited).unwrap() < visibility_probability(&base).unwrap());
    assert!(limited.cap().unwrap().r_max < base.cap().unwrap().r_max);
}

#[test]
fn derivatives_match_finite_differences_at_random_points() {
    let spec = QuadratureSpec::new(1e-15, 1e-13, 1000).unwrap();
    let c = fig1(4).with_path_loss_exponent(3.0);
    let cap = c.cap().unwrap();
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut unif = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..10 {
        let r = cap.r_min + (0.8 * unif() + 0.05) * (cap.r_max - cap.r_min);
        let s = 10f64.powf(-1.0 + 2.0 * unif()) * r.powf(3.0);
        let d = laplace_derivatives(s, r, 3, &c, &spec).unwrap();
        let f = |v: f64| laplace_interference_with(v, r, &c, &spec).unwrap();
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
            assert!((d[k] - fd[k]).abs() <= 1e-4 * d[k].abs(), "k {k} at (s={s}, r={r}): {} vs {}", d[k], fd[k]);
        }
    }
}

#[test]
fn single_and_double_precision_agree() {
    let c64 = fig1(2);
    let c32 = NetworkConfig::<f32>::with_altitude(500.0).with_nakagami_m(2).with_mean_count(10.0).unwrap();
    for db in [-10.0f64, 0.0, 10.0, 20.0] {
        let g = 10f64.powf(db / 10.0);
        let a = coverage_exact(g, &c64).unwrap();
        let b = coverage_exact(g as f32, &c32).unwrap();
        assert!((a - f64::from(b)).abs() < 1e-3, "{db} dB: {a} vs {b}");
    }
}

#[test]
fn curves_are_monotone_and_ordered() {
    let g = threshold_grid_db(-10.0, 20.0, 16).unwrap();
    for m in [1, 2] {
        let c = fig1(m);
        let exact = analytic_curve(&c, &g, CoverageMethod::Exact, None).unwrap();
        assert!(exact.is_nonincreasing(1e-12));
        let approx = analytic_curve(&c, &g, CoverageMethod::ApproxKappa, None).unwrap();
        let (lo, hi) = bound_curves(&c, &g).unwrap();
        for i in 0..g.len() {
            assert!(lo.values[i] <= approx.values[i] + 1e-12 && approx.values[i] <= hi.values[i] + 1e-12);
        }
    }
    let rc = analytic_curve(&fig1(1), &g, CoverageMethod::RayleighClosed, None).unwrap();
    assert!(rc.is_nonincreasing(1e-12));
    assert!(analytic_curve(&fig1(1), &g, CoverageMethod::MonteCarlo, None).is_err());
}

#[test]
fn noise_limited_without_noise_is_visibility() {
    let c = fig1(2);
    let v = visibility_probability(&c).unwrap();
    assert!((coverage_noise_limited(3.0, &c).unwrap() - v).abs() < 1e-9);
    let noisy = c.with_normalized_noise(2.8e-8);
    assert!(coverage_noise_limited(100.0, &noisy).unwrap() < v);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_lies_between_bounds(h in 300.0f64..1500.0, mean in 1.0f64..40.0, db in -10.0f64..20.0, m in 1u32..4) {
        let c = NetworkConfig::with_altitude(h).with_nakagami_m(m).with_mean_count(mean).unwrap();
        let g = 10f64.powf(db / 10.0);
        let exact = coverage_exact(g, &c).unwrap();
        let b = coverage_bounds(g, &c).unwrap();
        prop_assert!(b.lower <= exact + 1e-8 && exact <= b.upper + 1e-8);
        prop_assert!(exact <= visibility_probability(&c).unwrap() + 1e-12);
    }

    #[test]
    fn exact_decreases_in_threshold(mean in 1.0f64..40.0, db in -10.0f64..19.0, alpha in 2.0f64..4.5) {
        let c = NetworkConfig::with_altitude(500.0).with_path_loss_exponent(alpha).with_mean_count(mean).unwrap();
        let g = 10f64.powf(db / 10.0);
        prop_assert!(coverage_exact(g * 1.26, &c).unwrap() <= coverage_exact(g, &c).unwrap() + 1e-10);
    }
}
