//! Derivatives of `exp(g(s))` from the derivatives of `g`.

use crate::scalar::Real;

/// Given `g[j] = c^j g^(j)(s)` for `j = 0..=k`, returns `L[j] = c^j d^j/ds^j exp(g(s))`.
///
/// Uses `L_0 = exp(g_0)` and `L_n = sum_{j<n} C(n-1, j) L_j g_{n-j}`. The common
/// scale factor `c` (typically `s` itself) passes through unchanged, so callers
/// can work with dimensionless quantities.
pub fn exp_composite_derivatives<S: Real>(g: &[S]) -> Vec<S> {
    let mut out: Vec<S> = Vec::with_capacity(g.len());
    if g.is_empty() {
        return out;
    }
    out.push(g[0].exp());
    for n in 1..g.len() {
        let mut binom = S::one();
        let mut acc = S::zero();
        for j in 0..n {
            if j > 0 {
                binom = binom * S::lit((n - j) as f64) / S::lit(j as f64);
            }
            acc = acc + binom * out[j] * g[n - j];
        }
        out.push(acc);
    }
    out
}
