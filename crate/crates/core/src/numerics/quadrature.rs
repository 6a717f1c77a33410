//! Globally adaptive Gauss-Kronrod (10/21) quadrature.

#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_289_154_398,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::for_scalar::<f64>()
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) || max_subdivisions < 1 {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerances must be positive and subdivisions >= 1 \
                 (abs {abs_tol}, rel {rel_tol}, max {max_subdivisions})"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Defaults for scalar type `S`.
    pub fn for_scalar<S: Real>() -> Self {
        Self {
            abs_tol: S::QUAD_ABS_TOL,
            rel_tol: S::QUAD_REL_TOL,
            max_subdivisions: 200,
        }
    }

    /// One order of magnitude tighter, floored near the precision of `S`.
    pub fn tightened<S: Real>(&self) -> Self {
        let floor = 100.0 * S::epsilon().as_f64();
        Self {
            abs_tol: (self.abs_tol / 10.0).max(f64::MIN_POSITIVE),
            rel_tol: (self.rel_tol / 10.0).max(floor),
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<S> {
    pub value: S,
    pub abs_error: S,
    pub subdivisions: usize,
}

struct Segment<S> {
    a: S,
    b: S,
    value: S,
    error: S,
}

fn rescale_error<S: Real>(err: S, res_abs: S, res_asc: S) -> S {
    let mut err = err.abs();
    if res_asc != S::zero() && err != S::zero() {
        let scale = (S::lit(200.0) * err / res_asc).powf(S::lit(1.5));
        err = if scale < S::one() { res_asc * scale } else { res_asc };
    }
    let eps50 = S::lit(50.0) * S::epsilon();
    if res_abs > S::min_positive_value() / eps50 {
        err = err.max(eps50 * res_abs);
    }
    err
}

fn kronrod21<S: Real, F: FnMut(S) -> S>(f: &mut F, a: S, b: S) -> Result<(S, S)> {
    let half = S::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut res_k = S::lit(WGK[10]) * fc;
    let mut res_g = S::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [S::zero(); 10];
    let mut fv2 = [S::zero(); 10];
    for j in 0..10 {
        let dx = half_len * S::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = S::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + S::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::Domain(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let mean = res_k * half;
    let mut res_asc = S::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + S::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half_len.abs();
    let value = res_k * half_len;
    let err = rescale_error((res_k - res_g) * half_len, res_abs * h, res_asc * h);
    Ok((value, err))
}

/// Integrates `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol |I|)`. Fails with [`Error::NonConvergence`] rather
/// than returning an estimate that misses the tolerance.
pub fn integrate<S, F>(mut f: F, a: S, b: S, spec: &QuadratureSpec) -> Result<Integral<S>>
where
    S: Real,
    F: FnMut(S) -> S,
{
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("integration bounds must satisfy a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral {
            value: S::zero(),
            abs_error: S::zero(),
            subdivisions: 0,
        });
    }
    let abs_tol = S::lit(spec.abs_tol);
    let rel_tol = S::lit(spec.rel_tol);
    let (value, error) = kronrod21(&mut f, a, b)?;
    let mut segments = vec![Segment { a, b, value, error }];
    loop {
        let total: S = segments.iter().map(|s| s.value).sum();
        let total_err: S = segments.iter().map(|s| s.error).sum();
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Integral {
                value: total,
                abs_error: total_err,
                subdivisions: segments.len(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = &segments[worst];
        let mid = S::lit(0.5) * (seg.a + seg.b);
        let resolvable = mid > seg.a && mid < seg.b;
        if segments.len() >= spec.max_subdivisions || !resolvable {
            return Err(Error::NonConvergence {
                subdivisions: segments.len(),
                value: total.as_f64(),
                error: total_err.as_f64(),
            });
        }
        let (sa, sb) = (seg.a, seg.b);
        let (v1, e1) = kronrod21(&mut f, sa, mid)?;
        let (v2, e2) = kronrod21(&mut f, mid, sb)?;
        segments[worst] = Segment { a: sa, b: mid, value: v1, error: e1 };
        segments.push(Segment { a: mid, b: sb, value: v2, error: e2 });
    }
}

/// [`integrate`] for integrands that can fail. The first integrand error
/// aborts the integration and is returned unchanged.
pub fn integrate_fallible<S, F>(mut f: F, a: S, b: S, spec: &QuadratureSpec) -> Result<Integral<S>>
where
    S: Real,
    F: FnMut(S) -> Result<S>,
{
    let mut failure: Option<Error> = None;
    let out = integrate(
        |x| {
            if failure.is_some() {
                return S::zero();
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    S::zero()
                }
            }
        },
        a,
        b,
        spec,
    );
    match failure {
        Some(e) => Err(e),
        None => out,
    }
}
