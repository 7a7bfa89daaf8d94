//! Distances between one-dimensional probability measures.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::legendre::gauss_legendre_rule;
use crate::pushforward::{
    cdf, pdf_side, quantiles, DensityGrid, InputDensity, Interval, PiecewiseMonotoneMap,
    PushforwardDensity, Side,
};

/// Allowed gap between the trapezoid and `2 - 2∫min` estimates of an L1
/// distance.
pub const L1_ESTIMATOR_AGREEMENT: f64 = 0.02;

/// A density on the real line that can be re-evaluated anywhere.
pub trait Density: Sync {
    fn support(&self) -> Interval;

    /// Value at `y`; `side` selects a one-sided limit at a breakpoint.
    fn value(&self, y: f64, side: Side) -> f64;

    /// Points at which the density is tabulated.
    fn nodes(&self) -> Vec<f64>;

    /// Points where the density may jump or blow up, including the support
    /// endpoints.
    fn breakpoints(&self) -> Vec<f64>;
}

impl Density for DensityGrid {
    fn support(&self) -> Interval {
        self.support
    }

    fn value(&self, y: f64, side: Side) -> f64 {
        self.value_at(y, side)
    }

    fn nodes(&self) -> Vec<f64> {
        let mut v = self.ys.clone();
        v.extend(self.breakpoints());
        v
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut v = vec![self.support.lo, self.support.hi];
        if let Some(edges) = &self.bin_edges {
            v.extend_from_slice(edges);
        }
        v.extend(self.ys.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]));
        v
    }
}

impl Density for PushforwardDensity<'_> {
    fn support(&self) -> Interval {
        self.pm.support()
    }

    fn value(&self, y: f64, side: Side) -> f64 {
        pdf_side(self.pm, self.rho, y, side)
    }

    fn nodes(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.pm.breakpoints()
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|y| y.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Integrals accumulated over a merged grid.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulated {
    power: f64,
    min: f64,
    mass_a: f64,
    mass_b: f64,
}

fn accumulate(a: &dyn Density, b: &dyn Density, q: f64) -> Accumulated {
    let breaks = sorted_unique([a.breakpoints(), b.breakpoints()].concat());
    let nodes = sorted_unique([a.nodes(), b.nodes(), breaks.clone()].concat());

    // (segment, y, side) triples; breakpoints appear once per adjacent segment
    let mut tasks: Vec<(usize, f64, Side)> = Vec::with_capacity(nodes.len() + breaks.len());
    for (s, w) in breaks.windows(2).enumerate() {
        let i0 = nodes.partition_point(|&y| y < w[0]);
        let i1 = nodes.partition_point(|&y| y <= w[1]);
        for &y in &nodes[i0..i1] {
            let side = if y == w[0] {
                Side::Right
            } else if y == w[1] {
                Side::Left
            } else {
                Side::Both
            };
            tasks.push((s, y, side));
        }
    }
    let values: Vec<(f64, f64)> = tasks
        .par_iter()
        .map(|&(_, y, side)| (a.value(y, side), b.value(y, side)))
        .collect();

    let mut acc = Accumulated::default();
    let mut prev: Option<(usize, f64, f64, f64)> = None;
    for (&(seg, y, _), &(va, vb)) in tasks.iter().zip(&values) {
        if !(va.is_finite() && vb.is_finite()) {
            continue;
        }
        if let Some((pseg, py, pa, pb)) = prev {
            if pseg == seg {
                let h = 0.5 * (y - py);
                acc.power += h * ((pa - pb).abs().powf(q) + (va - vb).abs().powf(q));
                acc.min += h * (pa.min(pb) + va.min(vb));
                acc.mass_a += h * (pa + va);
                acc.mass_b += h * (pb + vb);
            }
        }
        prev = Some((seg, y, va, vb));
    }
    acc
}

/// `(∫ |p_a - p_b|^q dy)^(1/q)` by the trapezoid rule on the merged nodes of
/// both densities over the union of their supports, each density taken as 0
/// outside its own support.
///
/// For `q = 1` the result is cross-checked against `2 - 2∫min(p_a, p_b)`.
pub fn lq_distance(a: &dyn Density, b: &dyn Density, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(invalid(format!("L^q exponent must be at least 1, got {q}")));
    }
    let acc = accumulate(a, b, q);
    if !(acc.mass_a > 0.0 && acc.mass_b > 0.0) {
        return Err(invalid("density with zero total mass"));
    }
    let dist = acc.power.powf(1.0 / q);
    if q == 1.0 {
        let min_form = 2.0 - 2.0 * acc.min;
        if (dist - min_form).abs() > L1_ESTIMATOR_AGREEMENT {
            return Err(Error::EstimatorDisagreement {
                trapezoid: dist,
                min_form,
            });
        }
    }
    Ok(dist)
}

/// [`lq_distance`] between two tabulated densities.
pub fn lq_density_distance(p: &DensityGrid, other: &DensityGrid, q: f64) -> Result<f64> {
    lq_distance(p, other, q)
}

/// L1 distance between a tabulated density and a histogram after averaging
/// the tabulated density over the histogram bins.
pub fn binned_l1_distance(grid: &DensityGrid, histogram: &DensityGrid) -> Result<f64> {
    let edges = histogram
        .bin_edges
        .as_ref()
        .ok_or_else(|| invalid("second argument is not a histogram"))?;
    let masses = grid.bin_masses(edges);
    let inside: f64 = masses.iter().sum();
    let outside = (grid.mass() - inside).max(0.0);
    Ok(masses
        .iter()
        .zip(edges.windows(2))
        .zip(&histogram.values)
        .map(|((m, e), h)| (m - h * (e[1] - e[0])).abs())
        .sum::<f64>()
        + outside)
}

/// Gauss-Legendre nodes and weights on [0, 1], in panels of 16 points.
pub fn transport_rule(quad_points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const PANEL: usize = 16;
    if quad_points < 64 {
        return Err(invalid(format!(
            "Wasserstein quadrature needs at least 64 points, got {quad_points}"
        )));
    }
    let panels = quad_points.div_ceil(PANEL);
    let rule = gauss_legendre_rule(PANEL)?;
    let h = 1.0 / panels as f64;
    let mut ts = Vec::with_capacity(panels * PANEL);
    let mut ws = Vec::with_capacity(panels * PANEL);
    for k in 0..panels {
        let mid = (k as f64 + 0.5) * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            ts.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    Ok((ts, ws))
}

/// `(Σ w_i |qa_i - qb_i|^p)^(1/p)`.
pub fn wasserstein_from_quantiles(qa: &[f64], qb: &[f64], weights: &[f64], p: f64) -> f64 {
    qa.iter()
        .zip(qb)
        .zip(weights)
        .map(|((a, b), w)| w * (a - b).abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Wasserstein-p distance `(∫_0^1 |Q_a(t) - Q_b(t)|^p dt)^(1/p)` between two
/// pushforwards of the same input density.
pub fn wasserstein(
    a: &PiecewiseMonotoneMap,
    b: &PiecewiseMonotoneMap,
    rho: &InputDensity,
    p: f64,
    quad_points: usize,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!(
            "Wasserstein order must be at least 1, got {p}"
        )));
    }
    let (ts, ws) = transport_rule(quad_points)?;
    let qa = quantiles(a, rho, &ts)?;
    let qb = quantiles(b, rho, &ts)?;
    Ok(wasserstein_from_quantiles(&qa, &qb, &ws, p))
}

const CDF_L1_TOL: f64 = 1e-11;

/// `∫ |F_a(y) - F_b(y)| dy` by adaptive Gauss-Legendre integration between
/// the breakpoints of both maps.
pub fn cdf_l1_distance(
    a: &PiecewiseMonotoneMap,
    b: &PiecewiseMonotoneMap,
    rho: &InputDensity,
) -> Result<f64> {
    let rule = gauss_legendre_rule(8)?;
    let breaks = sorted_unique([a.breakpoints(), b.breakpoints()].concat());
    let f = |y: f64| (cdf(a, rho, y) - cdf(b, rho, y)).abs();
    let mut pieces = Vec::new();
    for w in breaks.windows(2) {
        for k in 0..16 {
            let lo = w[0] + (w[1] - w[0]) * k as f64 / 16.0;
            let hi = w[0] + (w[1] - w[0]) * (k + 1) as f64 / 16.0;
            pieces.push((lo, hi));
        }
    }
    let tol = CDF_L1_TOL / pieces.len().max(1) as f64;
    let parts: Vec<f64> = pieces
        .par_iter()
        .map(|&(lo, hi)| {
            let whole = rule.integrate_on(lo, hi, f);
            adaptive(&rule, &f, lo, hi, whole, tol, 40)
        })
        .collect();
    // summed in order so the result does not depend on scheduling
    Ok(parts.iter().sum())
}

fn adaptive(
    rule: &crate::legendre::QuadratureRule,
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate_on(a, m, f);
    let right = rule.integrate_on(m, b, f);
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive(rule, f, a, m, left, 0.5 * tol, depth - 1)
        + adaptive(rule, f, m, b, right, 0.5 * tol, depth - 1)
}
