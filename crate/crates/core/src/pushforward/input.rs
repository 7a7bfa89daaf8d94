use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::legendre::gauss_legendre_rule;
use crate::surrogate::ScalarFn;

const MASS_ORDER: usize = 64;

/// Input probability density `r` on [-1, 1].
#[derive(Clone)]
pub struct InputDensity {
    pub id: String,
    r: ScalarFn,
    r_deriv: Option<ScalarFn>,
    cdf: Option<ScalarFn>,
    inverse_cdf: Option<ScalarFn>,
}

impl fmt::Debug for InputDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InputDensity")
            .field("id", &self.id)
            .finish()
    }
}

impl InputDensity {
    pub fn new(id: impl Into<String>, r: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            id: id.into(),
            r: Arc::new(r),
            r_deriv: None,
            cdf: None,
            inverse_cdf: None,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.r_deriv = Some(Arc::new(d));
        self
    }

    /// Closed-form `F(a) = ∫_{-1}^{a} r`.
    pub fn with_cdf(mut self, cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cdf = Some(Arc::new(cdf));
        self
    }

    pub fn with_inverse_cdf(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse_cdf = Some(Arc::new(inv));
        self
    }

    pub fn uniform() -> Self {
        Self::new("uniform", |_| 0.5)
            .with_derivative(|_| 0.0)
            .with_cdf(|a| 0.5 * (a + 1.0))
            .with_inverse_cdf(|u| 2.0 * u - 1.0)
    }

    pub fn is_uniform(&self) -> bool {
        self.id == "uniform"
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.r)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.r_deriv.as_ref().map(|d| d(x))
    }

    /// ρ([a, b]) for -1 ≤ a ≤ b ≤ 1.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.cdf {
            Some(cdf) => (cdf(b) - cdf(a)).max(0.0),
            None => {
                let rule = gauss_legendre_rule(MASS_ORDER).expect("fixed order");
                rule.integrate_on(a, b, |x| self.value(x))
            }
        }
    }

    pub fn cdf(&self, a: f64) -> f64 {
        self.mass(-1.0, a.clamp(-1.0, 1.0))
    }

    /// Inverse CDF of ρ for `u` in [0, 1].
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        if let Some(inv) = &self.inverse_cdf {
            return inv(u).clamp(-1.0, 1.0);
        }
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        let mut x = 2.0 * u - 1.0;
        for _ in 0..100 {
            let fx = self.cdf(x) - u;
            if fx == 0.0 {
                return x;
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let r = self.value(x);
            let newton = x - fx / r;
            x = if r > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-15 {
                break;
            }
        }
        x
    }

    /// Checks nonnegativity and unit mass with an order-128 rule.
    pub fn validate(&self) -> Result<()> {
        let rule = gauss_legendre_rule(128)?;
        if rule.nodes.iter().any(|&x| !(self.value(x) >= 0.0)) {
            return Err(invalid(format!("density `{}` is negative", self.id)));
        }
        let total = rule.integrate(|x| self.value(x));
        if (total - 1.0).abs() > 1e-10 {
            return Err(invalid(format!(
                "density `{}` integrates to {total}, not 1",
                self.id
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_fallback_matches_closed_form() {
        let closed = InputDensity::uniform();
        let generic = InputDensity::new("flat", |_| 0.5);
        for &(a, b) in &[(-1.0, 1.0), (-0.3, 0.8), (0.5, 0.5)] {
            assert!((closed.mass(a, b) - generic.mass(a, b)).abs() < 1e-14);
        }
        for &u in &[0.0, 0.1, 0.5, 0.93, 1.0] {
            assert!((generic.inverse_cdf(u) - closed.inverse_cdf(u)).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(InputDensity::new("bad", |_| 1.0).validate().is_err());
        assert!(InputDensity::uniform().validate().is_ok());
    }
}
