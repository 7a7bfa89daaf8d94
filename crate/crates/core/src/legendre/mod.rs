//! Legendre polynomials on [-1, 1].
//!
//! `P_n` denotes the standard polynomial with `P_n(1) = 1`; the orthonormal
//! variant `sqrt((2n+1)/2) * P_n` has unit norm under the Lebesgue measure.

mod quadrature;
mod series;

pub use quadrature::{gauss_legendre_rule, gauss_lobatto_rule, QuadratureRule, RuleKind};
pub use series::{LegendreSeries, Provenance};

use crate::error::{Error, Result};

/// Scale factor taking `P_n` to the orthonormal polynomial.
#[inline]
pub fn orthonormal_scale(n: usize) -> f64 {
    ((2 * n + 1) as f64 / 2.0).sqrt()
}

pub(crate) fn check_domain(x: f64) -> Result<()> {
    if x.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(x))
    }
}

/// Evaluates `P_n(x)`, or its orthonormal counterpart when `normalized` is set.
pub fn eval_legendre(n: usize, x: f64, normalized: bool) -> Result<f64> {
    check_domain(x)?;
    let p = legendre_pair(n, x).0;
    Ok(if normalized {
        orthonormal_scale(n) * p
    } else {
        p
    })
}

/// Returns `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
/// For `n == 0` the second entry is 0.
#[inline]
pub(crate) fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut curr = x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 * x * curr - k as f64 * prev) / (k + 1) as f64;
        prev = curr;
        curr = next;
    }
    (curr, prev)
}

/// `(P_n(x), P_n'(x))`, valid on the closed interval including the endpoints.
pub(crate) fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (p, pm1) = legendre_pair(n, x);
    let nf = n as f64;
    let one_minus = 1.0 - x * x;
    if one_minus.abs() < 1e-15 {
        let d = 0.5 * nf * (nf + 1.0);
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        return (p, sign * d);
    }
    (p, nf * (pm1 - x * p) / one_minus)
}

/// Orthonormal values `p̂_0(x), ..., p̂_n(x)` into `out` (length `n + 1`).
pub(crate) fn orthonormal_values(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut prev = 0.0;
    let mut curr = 1.0;
    out[0] = orthonormal_scale(0);
    for k in 0..out.len() - 1 {
        let next = ((2 * k + 1) as f64 * x * curr - k as f64 * prev) / (k + 1) as f64;
        prev = curr;
        curr = next;
        out[k + 1] = orthonormal_scale(k + 1) * curr;
    }
}
