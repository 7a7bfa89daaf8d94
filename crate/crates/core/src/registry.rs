//! Named quantities of interest and input densities shared by the library and
//! the command line.
//!
//! Functions: `sin20`, `abs_cubed`, `abs_shift`, `square`, `identity`,
//! `cubic_mono`, `affine:a,b` and `poly:c0,c1,...` (monomial coefficients).
//! Densities: `uniform`, `cosine`, `quadratic`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pushforward::InputDensity;
use crate::surrogate::QuantityOfInterest;

/// Names accepted by [`function`] without parameters.
pub const FUNCTION_NAMES: &[&str] = &[
    "sin20",
    "abs_cubed",
    "abs_shift",
    "square",
    "identity",
    "cubic_mono",
];

pub const DENSITY_NAMES: &[&str] = &["uniform", "cosine", "quadratic"];

fn parse_list(id: &str, body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::UnknownFunction(id.to_string()))
}

/// Resolves a registry function id.
pub fn function(id: &str) -> Result<QuantityOfInterest> {
    let qoi = match id {
        "sin20" => QuantityOfInterest::with_derivative(
            id,
            |x| (20.0 * x).sin(),
            |x| 20.0 * (20.0 * x).cos(),
        )
        .note("analytic"),
        "abs_cubed" => {
            QuantityOfInterest::with_derivative(id, |x| x.abs().powi(3), |x| 3.0 * x * x.abs())
                .note("in H^3 but not H^4; f'(0) = f''(0) = 0")
        }
        // derivative at the kink is taken from the right
        "abs_shift" => QuantityOfInterest::with_derivative(
            id,
            |x| (x - 0.5).abs(),
            |x| if x >= 0.5 { 1.0 } else { -1.0 },
        )
        .note("in H^1 but not H^2; kink at 0.5"),
        "square" => {
            QuantityOfInterest::with_derivative(id, |x| x * x, |x| 2.0 * x).note("polynomial")
        }
        "identity" => QuantityOfInterest::with_derivative(id, |x| x, |_| 1.0).note("polynomial"),
        "cubic_mono" => {
            QuantityOfInterest::with_derivative(id, |x| x * x * x + 2.0 * x, |x| 3.0 * x * x + 2.0)
                .note("polynomial, f' >= 2")
        }
        _ => {
            if let Some(body) = id.strip_prefix("affine:") {
                let p = parse_list(id, body)?;
                let [a, b] = p[..] else {
                    return Err(Error::UnknownFunction(id.to_string()));
                };
                QuantityOfInterest::with_derivative(id, move |x| a * x + b, move |_| a)
                    .note("polynomial")
            } else if let Some(body) = id.strip_prefix("poly:") {
                polynomial(id, parse_list(id, body)?)
            } else {
                return Err(Error::UnknownFunction(id.to_string()));
            }
        }
    };
    Ok(qoi)
}

/// Polynomial with monomial coefficients `c0 + c1 x + ...`.
pub fn polynomial(id: &str, coeffs: Vec<f64>) -> QuantityOfInterest {
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect();
    let horner = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
    QuantityOfInterest::with_derivative(id, move |x| horner(&coeffs, x), move |x| horner(&deriv, x))
        .note("polynomial")
}

/// Resolves a registry density id.
pub fn density(id: &str) -> Result<InputDensity> {
    match id {
        "uniform" => Ok(InputDensity::uniform()),
        "cosine" => Ok(InputDensity::new(id, |x| PI / 4.0 * (PI * x / 2.0).cos())
            .with_derivative(|x| -PI * PI / 8.0 * (PI * x / 2.0).sin())
            .with_cdf(|a| 0.5 * ((PI * a / 2.0).sin() + 1.0))
            .with_inverse_cdf(|u| 2.0 / PI * (2.0 * u - 1.0).clamp(-1.0, 1.0).asin())),
        "quadratic" => Ok(InputDensity::new(id, |x| 3.0 * (1.0 + x * x) / 8.0)
            .with_derivative(|x| 0.75 * x)
            .with_cdf(|a| (a * a * a + 3.0 * a + 4.0) / 8.0)
            .with_inverse_cdf(|u| {
                // a^3 + 3a = 8u - 4 has a single real root
                let q = 8.0 * u - 4.0;
                let s = (0.25 * q * q + 1.0).sqrt();
                (0.5 * q + s).cbrt() + (0.5 * q - s).cbrt()
            })),
        _ => Err(Error::UnknownDensity(id.to_string())),
    }
}
