//! Pushforward measures `f_# ρ` of an input density through a scalar map.
//!
//! Densities are evaluated branch by branch from the change-of-variables sum
//! `p(y) = Σ_{f(x) = y} r(x) / |f'(x)|`.

mod decomposition;
mod density;
mod input;
mod sampling;

pub use decomposition::{
    monotone_decomposition, Branch, CriticalPoint, PiecewiseMonotoneMap, DEFAULT_SCAN_RESOLUTION,
};
pub use density::{
    cdf, grid_nodes, pdf, pdf_grid, pdf_side, quantile, quantiles, DensityGrid, PushforwardDensity,
    Side, DEFAULT_BASE_POINTS,
};
pub use input::InputDensity;
pub use sampling::{default_bins, histogram_density, sample_map, sample_pushforward};

use crate::legendre::LegendreSeries;
use crate::surrogate::QuantityOfInterest;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// A map to push a density through: either the quantity of interest itself
/// or one of its surrogates.
#[derive(Debug, Clone)]
pub enum Map {
    Function(QuantityOfInterest),
    Series(LegendreSeries),
}

impl Map {
    pub fn id(&self) -> String {
        match self {
            Map::Function(f) => f.id.clone(),
            Map::Series(s) => format!("series(degree {})", s.degree()),
        }
    }

    pub fn has_derivative(&self) -> bool {
        match self {
            Map::Function(f) => f.has_derivative(),
            Map::Series(_) => true,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Map::Function(f) => f.value(x),
            Map::Series(s) => s.value(x),
        }
    }

    /// Derivative at `x`; NaN when the map carries none.
    #[inline]
    pub fn slope(&self, x: f64) -> f64 {
        match self {
            Map::Function(f) => f.derivative(x).unwrap_or(f64::NAN),
            Map::Series(s) => s.derivative(x),
        }
    }

    #[inline]
    pub fn value_and_slope(&self, x: f64) -> (f64, f64) {
        match self {
            Map::Function(f) => (f.value(x), f.derivative(x).unwrap_or(f64::NAN)),
            Map::Series(s) => s.eval_unchecked(x),
        }
    }
}

impl From<QuantityOfInterest> for Map {
    fn from(f: QuantityOfInterest) -> Self {
        Map::Function(f)
    }
}

impl From<LegendreSeries> for Map {
    fn from(s: LegendreSeries) -> Self {
        Map::Series(s)
    }
}
