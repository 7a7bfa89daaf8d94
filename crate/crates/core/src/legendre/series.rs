use super::{check_domain, orthonormal_scale, RuleKind};
use crate::error::Result;

/// How a series was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Collocation { rule: RuleKind, nodes: usize },
    Galerkin { quad_order: usize },
    Manual,
}

/// Truncated expansion `sum_j c_j p̂_j(x)` in the orthonormal Legendre basis.
///
/// The standard-basis coefficients of the series and of its derivative are
/// cached at construction so that value and slope are both evaluated by
/// Clenshaw summation.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreSeries {
    coeffs: Vec<f64>,
    provenance: Provenance,
    standard: Vec<f64>,
    deriv_standard: Vec<f64>,
}

impl LegendreSeries {
    /// Builds a series from orthonormal coefficients. An empty vector is
    /// treated as the zero polynomial of degree 0.
    pub fn new(coeffs: Vec<f64>, provenance: Provenance) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        let standard: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * orthonormal_scale(j))
            .collect();
        let deriv_standard = differentiate(&standard);
        Self {
            coeffs,
            provenance,
            standard,
            deriv_standard,
        }
    }

    pub fn manual(coeffs: Vec<f64>) -> Self {
        Self::new(coeffs, Provenance::Manual)
    }

    /// Orthonormal series of a polynomial given by monomial coefficients
    /// `c0 + c1 x + c2 x^2 + ...`.
    pub fn from_monomial(monomial: &[f64]) -> Self {
        // Multiply by x repeatedly: x P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2k+1).
        let n = monomial.len().max(1);
        let mut standard = vec![0.0; n];
        let mut power = vec![0.0; n];
        power[0] = 1.0;
        for (deg, &c) in monomial.iter().enumerate() {
            if deg > 0 {
                let mut next = vec![0.0; n];
                for k in 0..deg {
                    let kf = k as f64;
                    let denom = 2.0 * kf + 1.0;
                    next[k + 1] += power[k] * (kf + 1.0) / denom;
                    if k > 0 {
                        next[k - 1] += power[k] * kf / denom;
                    }
                }
                power = next;
            }
            for k in 0..=deg {
                standard[k] += c * power[k];
            }
        }
        let coeffs = standard
            .iter()
            .enumerate()
            .map(|(j, a)| a / orthonormal_scale(j))
            .collect();
        Self::manual(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// L2([-1, 1]) norm, which is the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Value and exact derivative at `x` in [-1, 1].
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        clenshaw(&self.standard, x)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        clenshaw(&self.deriv_standard, x)
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> (f64, f64) {
        (self.value(x), self.derivative(x))
    }
}

/// Standard-basis coefficients of the derivative of `sum a_k P_k`.
fn differentiate(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n <= 1 {
        return vec![0.0];
    }
    // b_k = (2k+1) (a_{k+1} + b_{k+2} / (2k+5))
    let mut b = vec![0.0; n - 1];
    for k in (0..n - 1).rev() {
        let carry = if k + 2 < n - 1 {
            b[k + 2] / (2 * k + 5) as f64
        } else {
            0.0
        };
        b[k] = (2 * k + 1) as f64 * (a[k + 1] + carry);
    }
    b
}

/// Backward summation of `sum a_k P_k(x)`.
#[inline]
fn clenshaw(a: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (0..a.len()).rev() {
        let kf = k as f64;
        let alpha = (2.0 * kf + 1.0) * x / (kf + 1.0);
        let beta = -(kf + 1.0) / (kf + 2.0);
        let b0 = a[k] + alpha * b1 + beta * b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}
