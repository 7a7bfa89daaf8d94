//! Distances between pushforward measures and convergence-rate analysis.

mod distance;
mod rate;

pub use distance::{
    binned_l1_distance, cdf_l1_distance, lq_density_distance, lq_distance, transport_rule,
    wasserstein, wasserstein_from_quantiles, Density, L1_ESTIMATOR_AGREEMENT,
};
pub use rate::{
    fit_rate, predicted_exponent, sigma_min, sobolev_rate, RateClaim, RateField, SweepRecord, FLOOR,
};
