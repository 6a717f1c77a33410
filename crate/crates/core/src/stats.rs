//! Small statistical helpers: Wilson intervals, Kolmogorov-Smirnov and
//! chi-square goodness-of-fit tests.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Half-width of the 95% Wilson interval.
pub fn wilson_halfwidth(successes: u64, trials: u64) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials, Z95);
    0.5 * (hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom for chi-square tests; 0 for KS.
    pub dof: usize,
}

/// Asymptotic Kolmogorov survival function `Q(t) = 2 sum (-1)^(k-1) exp(-2 k^2 t^2)`.
fn kolmogorov_q(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
/// The p-value uses the Stephens finite-sample correction of the asymptotic law.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<TestResult> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("KS test needs at least one sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    Ok(TestResult {
        statistic: d,
        p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d),
        dof: 0,
    })
}

/// Chi-square goodness of fit. Adjacent bins are pooled left to right until
/// each pooled expected count reaches 5; a short remainder joins the last
/// pooled bin. `fitted` is the number of parameters estimated from the data.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], fitted: usize) -> Result<TestResult> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("observed and expected bins must match and be nonempty".into()));
    }
    if expected.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::InvalidArgument("expected counts must be nonnegative".into()));
    }
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        o_acc += o as f64;
        e_acc += e;
        if e_acc >= 5.0 {
            pooled.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if o_acc > 0.0 || e_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => pooled.push((o_acc, e_acc)),
        }
    }
    let mut stat = 0.0;
    for &(o, e) in &pooled {
        if e > 0.0 {
            stat += (o - e).powi(2) / e;
        } else if o > 0.0 {
            stat = f64::INFINITY;
        }
    }
    let dof = pooled.len().saturating_sub(1 + fitted);
    if dof == 0 {
        return Err(Error::Degenerate(format!(
            "chi-square test has no degrees of freedom ({} pooled bins, {fitted} fitted)",
            pooled.len()
        )));
    }
    let p = if stat.is_finite() {
        let chi = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        chi.sf(stat)
    } else {
        0.0
    };
    Ok(TestResult {
        statistic: stat,
        p_value: p,
        dof,
    })
}

/// Chi-square test of counts against Poisson(mean), with the upper tail
/// `P[X >= max]` folded into the last bin.
pub fn poisson_chi_square(counts: &[u64], mean: f64, fitted: usize) -> Result<TestResult> {
    if !(mean > 0.0) {
        return Err(Error::Degenerate(format!("Poisson mean must be positive, got {mean}")));
    }
    let n = counts.len() as f64;
    let max = counts.iter().copied().max().unwrap_or(0) as usize;
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    // extend the support a little past the data so the tail has room to pool
    let top = max.max((mean + 5.0 * mean.sqrt()).ceil() as usize) + 1;
    let mut observed = vec![0u64; top + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }
    let mut expected: Vec<f64> = (0..=top).map(|k| n * dist.pmf(k as u64)).collect();
    let head: f64 = expected[..top].iter().sum();
    expected[top] = (n - head).max(0.0);
    chi_square_gof(&observed, &expected, fitted)
}

/// Chi-square test that values in `[lo, hi)` are uniform over `bins` equal bins.
pub fn uniformity_chi_square(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<TestResult> {
    if bins < 2 || !(hi > lo) {
        return Err(Error::InvalidArgument("need at least 2 bins and hi > lo".into()));
    }
    let mut observed = vec![0u64; bins];
    for &v in values {
        let idx = (((v - lo) / (hi - lo)) * bins as f64).floor();
        let idx = (idx.max(0.0) as usize).min(bins - 1);
        observed[idx] += 1;
    }
    let e = values.len() as f64 / bins as f64;
    chi_square_gof(&observed, &vec![e; bins], 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn wilson_known_value() {
        // 50 of 100: center 0.5, half-width z sqrt(0.25/100 + z^2/40000) / (1 + z^2/100)
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert_relative_eq!(0.5 * (lo + hi), 0.5, epsilon = 1e-12);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (l0, h0) = wilson_interval(0, 100, Z95);
        assert!(l0.abs() < 1e-15);
        assert!(h0 > 0.0 && h0 < 0.05);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }

    #[test]
    fn kolmogorov_tail_values() {
        assert_relative_eq!(kolmogorov_q(1.36), 0.0494, epsilon = 5e-4);
        assert_relative_eq!(kolmogorov_q(1.63), 0.0098, epsilon = 5e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shifted() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.01);
        let shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        assert!(ks_test(&shifted, |x| x.clamp(0.0, 1.0)).unwrap().p_value < 1e-6);
        assert!(ks_test(&[], |x| x).is_err());
    }

    #[test]
    fn chi_square_pooling() {
        let obs = [1, 2, 10, 12, 3, 1];
        let exp = [1.0, 2.0, 10.0, 12.0, 3.0, 1.0];
        let r = chi_square_gof(&obs, &exp, 0).unwrap();
        assert_eq!(r.statistic, 0.0);
        // bins: [1+2+10], [12], [3+1] -> remainder 4 < 5 joins the last pooled bin
        assert_eq!(r.dof, 1);
        assert_relative_eq!(r.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn poisson_fit_detects_constant_counts() {
        let counts = vec![10u64; 200];
        assert!(poisson_chi_square(&counts, 10.0, 1).unwrap().p_value < 1e-6);
    }

    #[test]
    fn uniform_bins() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..36000).map(|_| rng.random::<f64>() * 360.0).collect();
        assert!(uniformity_chi_square(&xs, 0.0, 360.0, 36).unwrap().p_value > 0.01);
    }
}
