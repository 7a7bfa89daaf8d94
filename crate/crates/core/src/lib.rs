//! Legendre polynomial-chaos surrogates of scalar maps on [-1, 1] and the
//! exact densities of the random variables they push forward.
//!
//! The pieces, in the order data flows through them:
//!
//! - [`legendre`]: Legendre polynomials, Gauss rules, and series.
//! - [`surrogate`]: collocation and Galerkin fits of a [`QuantityOfInterest`].
//! - [`pushforward`]: monotone decomposition, pdf/cdf/quantiles, sampling.
//! - [`metrics`]: L^q and Wasserstein distances, rate fits.
//! - [`experiment`]: degree sweeps and the figure presets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod legendre;
pub mod metrics;
pub mod pushforward;
pub mod registry;
pub mod surrogate;

pub use error::{Error, Result};
pub use legendre::{
    gauss_legendre_rule, gauss_lobatto_rule, LegendreSeries, QuadratureRule, RuleKind,
};
pub use pushforward::{monotone_decomposition, InputDensity, PiecewiseMonotoneMap};
pub use surrogate::{fit_collocation, fit_galerkin, QuantityOfInterest};
