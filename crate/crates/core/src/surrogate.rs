//! gPC surrogates of a scalar quantity of interest and their function-space
//! errors.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::legendre::{
    gauss_legendre_rule, orthonormal_values, LegendreSeries, Provenance, QuadratureRule, RuleKind,
};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar map on [-1, 1], optionally with its analytic derivative.
#[derive(Clone)]
pub struct QuantityOfInterest {
    pub id: String,
    eval: ScalarFn,
    deriv: Option<ScalarFn>,
    pub smoothness_note: String,
}

impl fmt::Debug for QuantityOfInterest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantityOfInterest")
            .field("id", &self.id)
            .field("has_deriv", &self.deriv.is_some())
            .finish()
    }
}

impl QuantityOfInterest {
    pub fn new(
        id: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: Option<ScalarFn>,
    ) -> Self {
        Self {
            id: id.into(),
            eval: Arc::new(eval),
            deriv,
            smoothness_note: String::new(),
        }
    }

    pub fn with_derivative(
        id: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(id, eval, Some(Arc::new(deriv)))
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.smoothness_note = note.into();
        self
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(x))
    }

    pub fn require_derivative(&self) -> Result<&ScalarFn> {
        self.deriv
            .as_ref()
            .ok_or_else(|| Error::MissingDerivative(self.id.clone()))
    }

    /// Evaluates at `x`, reporting non-finite output as an error.
    pub fn try_value(&self, x: f64) -> Result<f64> {
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                id: self.id.clone(),
                at: x,
            })
        }
    }

    /// Scans 10^4 uniform points and checks every value is finite.
    pub fn validate(&self) -> Result<()> {
        const SCAN: usize = 10_000;
        for i in 0..SCAN {
            let x = -1.0 + 2.0 * i as f64 / (SCAN - 1) as f64;
            self.try_value(x)?;
        }
        Ok(())
    }
}

/// Degree-`n` interpolant at the `n + 1` nodes of the chosen rule.
///
/// Coefficients are the discrete projections `sum_k f(x_k) p̂_j(x_k) w_k`,
/// divided by the discrete norm of `p̂_j`. The divisor is 1 for every mode
/// except the top Lobatto mode, whose norm the rule does not integrate exactly.
pub fn fit_collocation(f: &QuantityOfInterest, n: usize, kind: RuleKind) -> Result<LegendreSeries> {
    if n == 0 {
        return Err(invalid("collocation degree must be at least 1"));
    }
    let rule = QuadratureRule::build(kind, n + 1)?;
    let coeffs = discrete_projection(f, n, &rule, kind == RuleKind::GaussLobatto)?;
    Ok(LegendreSeries::new(
        coeffs,
        Provenance::Collocation {
            rule: kind,
            nodes: n + 1,
        },
    ))
}

/// Default quadrature order for Galerkin projection of degree `n`.
pub fn default_galerkin_order(n: usize) -> usize {
    2 * n + 64
}

/// L2 projection onto polynomials of degree `n`, with inner products taken by
/// a Gauss-Legendre rule of `quad_order` nodes.
pub fn fit_galerkin(
    f: &QuantityOfInterest,
    n: usize,
    quad_order: Option<usize>,
) -> Result<LegendreSeries> {
    if n == 0 {
        return Err(invalid("Galerkin degree must be at least 1"));
    }
    let quad_order = quad_order.unwrap_or_else(|| default_galerkin_order(n));
    if quad_order < n + 1 {
        return Err(invalid(format!(
            "quadrature order {quad_order} is below degree + 1 = {}",
            n + 1
        )));
    }
    let rule = gauss_legendre_rule(quad_order)?;
    let coeffs = discrete_projection(f, n, &rule, false)?;
    Ok(LegendreSeries::new(
        coeffs,
        Provenance::Galerkin { quad_order },
    ))
}

fn discrete_projection(
    f: &QuantityOfInterest,
    n: usize,
    rule: &QuadratureRule,
    normalize: bool,
) -> Result<Vec<f64>> {
    let mut coeffs = vec![0.0; n + 1];
    let mut norms = vec![0.0; n + 1];
    let mut basis = vec![0.0; n + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = f.try_value(x)?;
        orthonormal_values(x, &mut basis);
        for j in 0..=n {
            coeffs[j] += w * fx * basis[j];
            norms[j] += w * basis[j] * basis[j];
        }
    }
    if normalize {
        for (c, m) in coeffs.iter_mut().zip(&norms) {
            *c /= m;
        }
    }
    Ok(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L2,
    H1,
    C0,
    C1,
}

/// Error `||f - s||` in the requested norm.
///
/// L2 and H1 use a Gauss-Legendre rule of `resolution` nodes; C0 and C1 take
/// the maximum over `8 * resolution` uniform points and the same nodes.
pub fn error_norms(
    f: &QuantityOfInterest,
    s: &LegendreSeries,
    norm: Norm,
    resolution: usize,
) -> Result<f64> {
    let min_res = 2 * s.degree() + 16;
    if resolution < min_res {
        return Err(invalid(format!(
            "resolution {resolution} is below 2 * degree + 16 = {min_res}"
        )));
    }
    let deriv = match norm {
        Norm::H1 | Norm::C1 => Some(f.require_derivative()?.clone()),
        _ => None,
    };
    let rule = gauss_legendre_rule(resolution)?;
    let diff = |x: f64| -> Result<(f64, f64)> {
        let (g, dg) = s.eval_unchecked(x);
        let e0 = f.try_value(x)? - g;
        let e1 = deriv.as_ref().map_or(0.0, |d| d(x) - dg);
        Ok((e0, e1))
    };
    match norm {
        Norm::L2 | Norm::H1 => {
            let mut acc = 0.0;
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let (e0, e1) = diff(x)?;
                acc += w * (e0 * e0 + e1 * e1);
            }
            Ok(acc.sqrt())
        }
        Norm::C0 | Norm::C1 => {
            let scan = 8 * resolution;
            let uniform = (0..scan).map(|i| -1.0 + 2.0 * i as f64 / (scan - 1) as f64);
            let mut worst: f64 = 0.0;
            for x in uniform.chain(rule.nodes.iter().copied()) {
                let (e0, e1) = diff(x)?;
                worst = worst.max(e0.abs()).max(e1.abs());
            }
            Ok(worst)
        }
    }
}
