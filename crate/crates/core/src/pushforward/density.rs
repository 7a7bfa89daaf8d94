use rayon::prelude::*;

use super::decomposition::sort_dedup;
use super::{InputDensity, Interval, PiecewiseMonotoneMap};
use crate::error::{invalid, Result};

pub const DEFAULT_BASE_POINTS: usize = 2048;

/// Geometric refinement around critical images: 12 points per decade from
/// distance 1e-1 down to 1e-10.
const CLUSTER_PER_DECADE: usize = 12;
const CLUSTER_FIRST_DECADE: i32 = 1;
const CLUSTER_LAST_DECADE: i32 = 10;
const SINGULAR_EXCLUSION: f64 = 0.999e-10;

/// Which one-sided limit to take at a jump of the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Both,
}

fn branch_active(range: Interval, y: f64, side: Side) -> bool {
    match side {
        Side::Both => range.contains(y),
        Side::Left => range.lo < y && y <= range.hi,
        Side::Right => range.lo <= y && y < range.hi,
    }
}

/// Pushforward density at `y`; `+∞` within 1e-12 of a singular image.
pub fn pdf(pm: &PiecewiseMonotoneMap, rho: &InputDensity, y: f64) -> f64 {
    pdf_side(pm, rho, y, Side::Both)
}

/// One-sided variant of [`pdf`], used at branch-range endpoints.
pub fn pdf_side(pm: &PiecewiseMonotoneMap, rho: &InputDensity, y: f64, side: Side) -> f64 {
    if !pm.support().contains(y) {
        return 0.0;
    }
    if pm.is_near_singular(y) {
        return f64::INFINITY;
    }
    let map = pm.map();
    let mut total = 0.0;
    for b in pm.branches() {
        if branch_active(b.range(), y, side) {
            let x = b.invert(map, y);
            total += rho.value(x) / map.slope(x).abs();
        }
    }
    total
}

/// ρ-measure of `{x : f(x) ≤ y}`.
pub fn cdf(pm: &PiecewiseMonotoneMap, rho: &InputDensity, y: f64) -> f64 {
    cdf_and_pdf(pm, rho, y).0
}

fn cdf_and_pdf(pm: &PiecewiseMonotoneMap, rho: &InputDensity, y: f64) -> (f64, f64) {
    let map = pm.map();
    let mut mass = 0.0;
    let mut density = 0.0;
    for b in pm.branches() {
        let r = b.range();
        if y >= r.hi {
            mass += rho.mass(b.lo, b.hi);
        } else if y > r.lo {
            let x = b.invert(map, y);
            mass += if b.increasing {
                rho.mass(b.lo, x)
            } else {
                rho.mass(x, b.hi)
            };
            density += rho.value(x) / map.slope(x).abs();
        }
    }
    (mass.clamp(0.0, 1.0), density)
}

const QUANTILE_TOL: f64 = 1e-12;

/// Smallest `y` with `F(y) = t`, by safeguarded Newton iteration on the CDF.
pub fn quantile(pm: &PiecewiseMonotoneMap, rho: &InputDensity, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid(format!("quantile level {t} is outside (0, 1)")));
    }
    let s = pm.support();
    let (mut a, mut b) = (s.lo, s.hi);
    let mut y = a + t * (b - a);
    let mut last_step = b - a;
    for _ in 0..200 {
        let (f, p) = cdf_and_pdf(pm, rho, y);
        let g = f - t;
        if g.abs() <= QUANTILE_TOL {
            break;
        }
        if g < 0.0 {
            a = y;
        } else {
            b = y;
        }
        let newton = y - g / p;
        let step = if p.is_finite()
            && p > 0.0
            && newton > a
            && newton < b
            && (newton - y).abs() < 0.5 * last_step
        {
            newton - y
        } else {
            0.5 * (a + b) - y
        };
        last_step = step.abs();
        y += step;
        if b - a <= 2.0 * f64::EPSILON * y.abs().max(1.0) {
            break;
        }
    }
    Ok(y)
}

/// Quantiles at several levels, computed in parallel.
pub fn quantiles(pm: &PiecewiseMonotoneMap, rho: &InputDensity, ts: &[f64]) -> Result<Vec<f64>> {
    ts.par_iter().map(|&t| quantile(pm, rho, t)).collect()
}

/// Tabulated density on a nondecreasing grid.
///
/// Histogram grids carry their bin edges and are piecewise constant; all
/// other grids are read by linear interpolation, and a node listed twice
/// marks a jump (left limit first).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
    pub support: Interval,
    pub singular_points: Vec<f64>,
    pub bin_edges: Option<Vec<f64>>,
}

impl DensityGrid {
    /// Trapezoid mass, or the exact mass of a histogram.
    pub fn mass(&self) -> f64 {
        match &self.bin_edges {
            Some(edges) => edges
                .windows(2)
                .zip(&self.values)
                .map(|(e, v)| v * (e[1] - e[0]))
                .sum(),
            None => trapezoid(&self.ys, &self.values),
        }
    }

    pub fn mass_tolerance(&self) -> f64 {
        if self.singular_points.is_empty() {
            1e-6
        } else {
            0.02
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.values.iter().any(|v| !(*v >= 0.0)) {
            return Err(invalid("density grid has negative or NaN values"));
        }
        let m = self.mass();
        if (m - 1.0).abs() > self.mass_tolerance() {
            return Err(invalid(format!("density grid mass {m} is not 1")));
        }
        Ok(())
    }

    /// Value at `y`: 0 outside the support, interpolated (or binned) inside.
    pub fn value_at(&self, y: f64, side: Side) -> f64 {
        let s = self.support;
        let outside = match side {
            Side::Both => !s.contains(y),
            Side::Left => y <= s.lo || y > s.hi,
            Side::Right => y < s.lo || y >= s.hi,
        };
        if outside || self.ys.is_empty() {
            return 0.0;
        }
        if let Some(edges) = &self.bin_edges {
            let mut k = edges.partition_point(|&e| e <= y).saturating_sub(1);
            if side == Side::Left && k > 0 && edges[k] == y {
                k -= 1;
            }
            return self.values[k.min(self.values.len() - 1)];
        }
        let i0 = self.ys.partition_point(|&t| t < y);
        let i1 = self.ys.partition_point(|&t| t <= y);
        if i1 > i0 {
            // a node; repeated nodes carry the left and right limits of a jump
            return match side {
                Side::Right => self.values[i1 - 1],
                Side::Left | Side::Both => self.values[i0],
            };
        }
        if i0 == 0 {
            return self.values[0];
        }
        if i0 == self.ys.len() {
            return self.values[i0 - 1];
        }
        let (y0, y1) = (self.ys[i0 - 1], self.ys[i0]);
        let (v0, v1) = (self.values[i0 - 1], self.values[i0]);
        v0 + (v1 - v0) * (y - y0) / (y1 - y0)
    }

    /// Mass of the interpolated density inside each bin `[e_k, e_{k+1}]`.
    pub fn bin_masses(&self, edges: &[f64]) -> Vec<f64> {
        edges
            .windows(2)
            .map(|e| self.integrate_between(e[0], e[1]))
            .collect()
    }

    fn integrate_between(&self, a: f64, b: f64) -> f64 {
        let lo = a.max(self.support.lo);
        let hi = b.min(self.support.hi);
        if hi <= lo {
            return 0.0;
        }
        let mut pts = vec![lo];
        if self.bin_edges.is_none() {
            let i0 = self.ys.partition_point(|&t| t <= lo);
            let i1 = self.ys.partition_point(|&t| t < hi);
            pts.extend_from_slice(&self.ys[i0..i1]);
        } else if let Some(edges) = &self.bin_edges {
            pts.extend(edges.iter().copied().filter(|&e| e > lo && e < hi));
        }
        pts.push(hi);
        pts.windows(2)
            .map(|w| {
                let (l, r) = (w[0], w[1]);
                0.5 * (r - l) * (self.value_at(l, Side::Right) + self.value_at(r, Side::Left))
            })
            .sum()
    }
}

pub(crate) fn trapezoid(xs: &[f64], vs: &[f64]) -> f64 {
    xs.windows(2)
        .zip(vs.windows(2))
        .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
        .sum()
}

/// Tabulation points of the pushforward density: a uniform grid on the
/// support, every branch-range endpoint, and geometric clusters on both
/// sides of each critical image. Points within 1e-10 of a singular image are
/// left out.
pub fn grid_nodes(pm: &PiecewiseMonotoneMap, base_points: usize) -> Result<Vec<f64>> {
    if base_points < 64 {
        return Err(invalid(format!(
            "base grid needs at least 64 points, got {base_points}"
        )));
    }
    let s = pm.support();
    let mut ys: Vec<f64> = (0..base_points)
        .map(|i| {
            if i + 1 == base_points {
                s.hi
            } else {
                s.lo + s.width() * i as f64 / (base_points - 1) as f64
            }
        })
        .collect();
    ys.extend(pm.breakpoints());

    let mut centres: Vec<f64> = pm.critical().iter().map(|c| c.value).collect();
    centres.extend_from_slice(pm.singular_values());
    sort_dedup(&mut centres, 1e-14);
    let steps = (CLUSTER_LAST_DECADE - CLUSTER_FIRST_DECADE) as usize * CLUSTER_PER_DECADE;
    for &c in &centres {
        for k in 0..=steps {
            let d =
                10f64.powf(-(CLUSTER_FIRST_DECADE as f64) - k as f64 / CLUSTER_PER_DECADE as f64);
            ys.push(c - d);
            ys.push(c + d);
        }
    }
    ys.retain(|&y| {
        s.contains(y)
            && pm
                .singular_values()
                .iter()
                .all(|&v| (y - v).abs() >= SINGULAR_EXCLUSION)
    });
    sort_dedup(&mut ys, 0.0);
    Ok(ys)
}

/// Tabulates the pushforward density on [`grid_nodes`]. Where the density
/// jumps, the node is repeated with the left limit first.
pub fn pdf_grid(
    pm: &PiecewiseMonotoneMap,
    rho: &InputDensity,
    base_points: usize,
) -> Result<DensityGrid> {
    let nodes = grid_nodes(pm, base_points)?;
    let breaks = pm.breakpoints();
    let s = pm.support();
    let limits: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|&y| {
            if y > s.lo && y < s.hi && breaks.binary_search_by(|b| b.total_cmp(&y)).is_ok() {
                (
                    pdf_side(pm, rho, y, Side::Left),
                    pdf_side(pm, rho, y, Side::Right),
                )
            } else {
                let v = pdf(pm, rho, y);
                (v, v)
            }
        })
        .collect();
    let mut ys = Vec::with_capacity(nodes.len());
    let mut values = Vec::with_capacity(nodes.len());
    for (&y, &(l, r)) in nodes.iter().zip(&limits) {
        ys.push(y);
        values.push(l);
        if r != l {
            ys.push(y);
            values.push(r);
        }
    }
    Ok(DensityGrid {
        ys,
        values,
        support: s,
        singular_points: pm.singular_values().to_vec(),
        bin_edges: None,
    })
}

/// Exact pushforward density bundled with its tabulation points.
#[derive(Debug, Clone)]
pub struct PushforwardDensity<'a> {
    pub pm: &'a PiecewiseMonotoneMap,
    pub rho: &'a InputDensity,
    pub nodes: Vec<f64>,
}

impl<'a> PushforwardDensity<'a> {
    pub fn new(
        pm: &'a PiecewiseMonotoneMap,
        rho: &'a InputDensity,
        base_points: usize,
    ) -> Result<Self> {
        Ok(Self {
            pm,
            rho,
            nodes: grid_nodes(pm, base_points)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pushforward::{monotone_decomposition, DEFAULT_SCAN_RESOLUTION};
    use crate::registry;

    fn pm(id: &str) -> PiecewiseMonotoneMap {
        monotone_decomposition(registry::function(id).unwrap(), DEFAULT_SCAN_RESOLUTION).unwrap()
    }

    #[test]
    fn analytic_values() {
        let rho = InputDensity::uniform();
        assert!((pdf(&pm("identity"), &rho, 0.3) - 0.5).abs() < 1e-15);
        assert!((pdf(&pm("square"), &rho, 0.25) - 1.0).abs() < 1e-12);
        let affine = pm("affine:2,1");
        for &y in &[-1.0, -0.2, 1.7, 3.0] {
            assert!((pdf(&affine, &rho, y) - 0.25).abs() < 1e-15);
        }
        assert_eq!(pdf(&affine, &rho, 4.0), 0.0);
        assert_eq!(pdf(&pm("square"), &rho, 0.0), f64::INFINITY);
    }

    #[test]
    fn kink_density_is_bounded() {
        let rho = InputDensity::uniform();
        let p = pm("abs_shift");
        assert!(
            (pdf(&p, &rho, 0.0) - 1.0).abs() < 1e-12,
            "{} {:?}",
            pdf(&p, &rho, 0.0),
            p.branches()
        );
        assert!((pdf(&p, &rho, 0.2) - 1.0).abs() < 1e-12);
        assert!((pdf(&p, &rho, 1.0) - 0.5).abs() < 1e-12);
        assert!((pdf_side(&p, &rho, 0.5, Side::Right) - 0.5).abs() < 1e-12);
        assert!((pdf_side(&p, &rho, 0.5, Side::Left) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_examples() {
        let rho = InputDensity::uniform();
        assert!((cdf(&pm("identity"), &rho, 0.0) - 0.5).abs() < 1e-15);
        assert!((cdf(&pm("square"), &rho, 0.25) - 0.5).abs() < 1e-12);
        for id in ["sin20", "abs_cubed", "cubic_mono"] {
            let p = pm(id);
            assert_eq!(cdf(&p, &rho, p.support().lo - 1.0), 0.0);
            assert_eq!(cdf(&p, &rho, p.support().hi + 1.0), 1.0);
        }
    }

    #[test]
    fn quantile_examples() {
        let rho = InputDensity::uniform();
        assert!((quantile(&pm("identity"), &rho, 0.75).unwrap() - 0.5).abs() < 1e-10);
        assert!((quantile(&pm("square"), &rho, 0.5).unwrap() - 0.25).abs() < 1e-10);
        assert!(quantile(&pm("square"), &rho, 0.0).is_err());
        assert!(quantile(&pm("square"), &rho, 1.0).is_err());
        let p = pm("cubic_mono");
        for &y in &[-2.5, -0.3, 0.0, 1.1, 2.9] {
            let t = cdf(&p, &rho, y);
            assert!((quantile(&p, &rho, t).unwrap() - y).abs() < 1e-8);
        }
    }

    #[test]
    fn quantiles_are_monotone() {
        let rho = InputDensity::uniform();
        let p = pm("sin20");
        let ts: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        let qs = quantiles(&p, &rho, &ts).unwrap();
        assert!(qs.windows(2).all(|w| w[0] <= w[1]));
        for (t, q) in ts.iter().zip(&qs) {
            assert!((cdf(&p, &rho, *q) - t).abs() <= 1e-10);
        }
    }

    #[test]
    fn grids() {
        let rho = InputDensity::uniform();
        let g = pdf_grid(&pm("identity"), &rho, 256).unwrap();
        assert!(g.values.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        assert!(g.singular_points.is_empty());
        g.check_invariants().unwrap();

        let g = pdf_grid(&pm("square"), &rho, DEFAULT_BASE_POINTS).unwrap();
        let m = g.mass();
        assert!((0.98..=1.02).contains(&m), "{m}");
        g.check_invariants().unwrap();

        let g = pdf_grid(&pm("sin20"), &rho, DEFAULT_BASE_POINTS).unwrap();
        assert_eq!(g.singular_points.len(), 2);
        assert!((g.singular_points[0] + 1.0).abs() < 1e-14);
        assert!((g.singular_points[1] - 1.0).abs() < 1e-14);
        assert!(g.values.iter().all(|v| v.is_finite()));
        g.check_invariants().unwrap();

        assert!(pdf_grid(&pm("identity"), &rho, 10).is_err());
    }

    #[test]
    fn grid_interpolation_and_bins() {
        let g = DensityGrid {
            ys: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 1.0, 0.0],
            support: Interval::new(0.0, 2.0),
            singular_points: vec![],
            bin_edges: None,
        };
        assert_eq!(g.value_at(0.5, Side::Both), 0.5);
        assert_eq!(g.value_at(2.5, Side::Both), 0.0);
        assert!((g.mass() - 1.0).abs() < 1e-15);
        let m = g.bin_masses(&[0.0, 0.5, 1.0, 2.0]);
        assert!((m[0] - 0.125).abs() < 1e-15 && (m[1] - 0.375).abs() < 1e-15);
        assert!((m[2] - 0.5).abs() < 1e-15);
    }
}
