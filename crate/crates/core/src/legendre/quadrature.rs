//! Gauss-Legendre and Gauss-Lobatto rules on [-1, 1] with Lebesgue weights.

use std::f64::consts::PI;

use super::{legendre_pair, legendre_with_derivative};
use crate::error::{invalid, Error, Result};

const MAX_ORDER: usize = 10_000;
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    GaussLegendre,
    GaussLobatto,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::GaussLegendre => "gauss_legendre",
            RuleKind::GaussLobatto => "gauss_lobatto",
        }
    }
}

impl std::str::FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_legendre" | "gl" | "legendre" => Ok(RuleKind::GaussLegendre),
            "gauss_lobatto" | "gll" | "lobatto" => Ok(RuleKind::GaussLobatto),
            other => Err(invalid(format!("unknown rule kind `{other}`"))),
        }
    }
}

/// Nodes (ascending) and weights of an interpolatory rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        match self.kind {
            RuleKind::GaussLegendre => 2 * self.order() - 1,
            RuleKind::GaussLobatto => 2 * self.order() - 3,
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrates over `[a, b]` by the affine change of variables.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|t| f(mid + half * t))
    }

    pub fn build(kind: RuleKind, order: usize) -> Result<Self> {
        match kind {
            RuleKind::GaussLegendre => gauss_legendre_rule(order),
            RuleKind::GaussLobatto => gauss_lobatto_rule(order),
        }
    }
}

/// Newton iteration from `x0`, returning the converged root.
fn newton(mut x: f64, step: impl Fn(f64) -> f64, index: usize, order: usize) -> Result<f64> {
    for _ in 0..NEWTON_MAX_ITER {
        let dx = step(x);
        x -= dx;
        if dx.abs() <= NEWTON_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { index, order })
}

/// Mirrors the nonnegative half of a symmetric rule into ascending order.
fn assemble_symmetric(kind: RuleKind, n: usize, half: Vec<(f64, f64)>) -> QuadratureRule {
    // `half` holds (node, weight) for node >= 0, descending from the largest.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for (i, &(x, w)) in half.iter().enumerate() {
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        kind,
        nodes,
        weights,
    }
}

/// N-point Gauss-Legendre rule: nodes are the roots of `P_N`.
pub fn gauss_legendre_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_ORDER {
        return Err(invalid(format!(
            "Gauss-Legendre order must lie in 1..={MAX_ORDER}, got {n}"
        )));
    }
    let nf = n as f64;
    let mut half = Vec::with_capacity(n.div_ceil(2));
    for k in 1..=n.div_ceil(2) {
        let guess = (PI * (k as f64 - 0.25) / (nf + 0.5)).cos();
        let x = if n % 2 == 1 && k == n.div_ceil(2) {
            0.0
        } else {
            newton(
                guess,
                |x| {
                    let (p, d) = legendre_with_derivative(n, x);
                    p / d
                },
                k - 1,
                n,
            )?
        };
        let (_, d) = legendre_with_derivative(n, x);
        half.push((x, 2.0 / ((1.0 - x * x) * d * d)));
    }
    Ok(assemble_symmetric(RuleKind::GaussLegendre, n, half))
}

/// N-point Gauss-Lobatto rule: ±1 plus the roots of `P_{N-1}'`.
pub fn gauss_lobatto_rule(n: usize) -> Result<QuadratureRule> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(invalid(format!(
            "Gauss-Lobatto order must lie in 2..={MAX_ORDER}, got {n}"
        )));
    }
    let m = n - 1;
    let mf = m as f64;
    let weight = |x: f64| {
        let p = legendre_pair(m, x).0;
        2.0 / (n as f64 * mf * p * p)
    };
    let mut half = Vec::with_capacity(n.div_ceil(2));
    half.push((1.0, weight(1.0)));
    for k in 1..n.div_ceil(2) {
        let guess = (PI * k as f64 / mf).cos();
        let x = if n % 2 == 1 && k == n / 2 {
            0.0
        } else {
            // (1 - x^2) P'' = 2x P' - m(m+1) P
            newton(
                guess,
                |x| {
                    let (p, d) = legendre_with_derivative(m, x);
                    let dd = (2.0 * x * d - mf * (mf + 1.0) * p) / (1.0 - x * x);
                    d / dd
                },
                k,
                n,
            )?
        };
        half.push((x, weight(x)));
    }
    Ok(assemble_symmetric(RuleKind::GaussLobatto, n, half))
}
