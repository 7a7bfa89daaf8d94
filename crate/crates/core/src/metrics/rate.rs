//! Convergence-rate fits and theory-predicted exponents.

use crate::error::{invalid, Result};

/// Errors below this are treated as the machine-precision floor.
pub const FLOOR: f64 = 1e-12;

/// One row of a degree-vs-error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub degree: usize,
    pub l1_pdf_error: f64,
    pub l2_error: f64,
    pub h1_error: f64,
    pub wass1: f64,
    pub elapsed_s: f64,
}

impl SweepRecord {
    pub fn floored(&self) -> bool {
        self.l1_pdf_error < FLOOR
    }

    pub fn field(&self, field: RateField) -> f64 {
        match field {
            RateField::L1Pdf => self.l1_pdf_error,
            RateField::L2 => self.l2_error,
            RateField::H1 => self.h1_error,
            RateField::Wass1 => self.wass1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateField {
    L1Pdf,
    L2,
    H1,
    Wass1,
}

/// Least-squares fit of `error ≈ amplitude · n^exponent` over records with
/// degree in `[n_min, n_max]`. Returns `(amplitude, exponent)`.
pub fn fit_rate(
    records: &[SweepRecord],
    field: RateField,
    n_min: usize,
    n_max: usize,
) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| (n_min..=n_max).contains(&r.degree))
        .map(|r| (r.degree as f64, r.field(field)))
        .collect();
    if let Some(&(n, e)) = pts.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(invalid(format!("nonpositive error {e} at degree {n}")));
    }
    if pts.len() < 3 {
        return Err(invalid(format!(
            "rate fit needs at least 3 records in [{n_min}, {n_max}], got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|(n, e)| (n.ln(), e.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(((my - slope * mx).exp(), slope))
}

/// Which convergence bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateClaim {
    /// `‖f - g_n‖_{H^β} ≲ n^{-e(β, σ)}`
    Sobolev { beta: f64 },
    /// L1 density error for `|f'| > κ > 0` in one dimension.
    Monotone1D,
    /// L1 density error with critical points of order `k`.
    Singular1D { k: u32 },
    /// L1 density error in `d` dimensions through the C1 error.
    MultiD { d: u32 },
    /// Gauss-Lobatto interpolant, input density in `W^{m,1}`.
    TransportBound { m: u32 },
}

/// `e(β, σ) = σ + 1/2 - 2β`.
pub fn sobolev_rate(beta: f64, sigma: f64) -> f64 {
    sigma + 0.5 - 2.0 * beta
}

/// Minimal Sobolev index: `5.5 + d` for even `d`, `4.5 + d` for odd `d`.
pub fn sigma_min(d: u32) -> f64 {
    if d.is_multiple_of(2) {
        5.5 + d as f64
    } else {
        4.5 + d as f64
    }
}

/// Signed exponent of `n` in the bound named by `claim` for `f ∈ H^σ`.
///
/// `MultiD` uses `n^{-σ + σ_min - 2}`.
pub fn predicted_exponent(claim: RateClaim, sigma: f64) -> Result<f64> {
    if !(sigma >= 1.0) {
        return Err(invalid(format!("σ must be at least 1, got {sigma}")));
    }
    match claim {
        RateClaim::Sobolev { beta } => {
            if !(1.0..=sigma).contains(&beta) {
                return Err(invalid(format!("β must lie in [1, σ], got {beta}")));
            }
            Ok(-sobolev_rate(beta, sigma))
        }
        RateClaim::Monotone1D => Ok(1.5 - sigma),
        RateClaim::Singular1D { k } => {
            if k < 2 {
                return Err(invalid(format!(
                    "critical order k must be at least 2, got {k}"
                )));
            }
            Ok(-(2.0 * sigma - 3.0) / (2.0 * (2 * k + 1) as f64))
        }
        RateClaim::MultiD { d } => {
            if d < 1 {
                return Err(invalid("dimension must be at least 1"));
            }
            Ok(-sigma + sigma_min(d) - 2.0)
        }
        RateClaim::TransportBound { m } => {
            if m < 1 {
                return Err(invalid("m must be at least 1"));
            }
            let mf = m as f64;
            Ok(-mf / (mf + 1.0) * (sigma - 5.0 / 6.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(degree: usize, e: f64) -> SweepRecord {
        SweepRecord {
            degree,
            l1_pdf_error: e,
            l2_error: e,
            h1_error: e,
            wass1: e,
            elapsed_s: 0.0,
        }
    }

    #[test]
    fn exact_power_law() {
        let recs: Vec<_> = (8..=128)
            .map(|n| record(n, 5.0 * (n as f64).powi(-2)))
            .collect();
        let (a, s) = fit_rate(&recs, RateField::L1Pdf, 8, 128).unwrap();
        assert!(
            (a - 5.0).abs() < 1e-10 && (s + 2.0).abs() < 1e-10,
            "{a} {s}"
        );
    }

    #[test]
    fn fit_preconditions() {
        let recs = vec![record(10, 1.0), record(20, 0.5)];
        assert!(fit_rate(&recs, RateField::L2, 1, 100).is_err());
        let recs = vec![record(10, 1.0), record(20, 0.0), record(30, 0.1)];
        assert!(fit_rate(&recs, RateField::L2, 1, 100).is_err());
        // rows outside the window are ignored
        let recs = vec![
            record(2, 0.0),
            record(10, 1.0),
            record(20, 0.5),
            record(40, 0.25),
        ];
        let (_, s) = fit_rate(&recs, RateField::H1, 10, 40).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
    }

    #[test]
    fn predicted_exponents() {
        let eq = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(eq(
            predicted_exponent(RateClaim::Monotone1D, 6.0).unwrap(),
            -4.5
        ));
        assert!(eq(
            predicted_exponent(RateClaim::Singular1D { k: 2 }, 6.0).unwrap(),
            -0.9
        ));
        assert!(eq(
            predicted_exponent(RateClaim::MultiD { d: 1 }, 8.0).unwrap(),
            -4.5
        ));
        assert!(eq(
            predicted_exponent(RateClaim::MultiD { d: 2 }, 10.0).unwrap(),
            -4.5
        ));
        assert!(eq(
            predicted_exponent(RateClaim::TransportBound { m: 1 }, 6.0).unwrap(),
            -31.0 / 12.0
        ));
        assert!(eq(sobolev_rate(1.0, 6.0), 4.5));
        assert!(eq(
            predicted_exponent(RateClaim::Sobolev { beta: 1.0 }, 6.0).unwrap(),
            -4.5
        ));
    }

    #[test]
    fn predicted_exponent_preconditions() {
        assert!(predicted_exponent(RateClaim::Monotone1D, 0.5).is_err());
        assert!(predicted_exponent(RateClaim::Singular1D { k: 1 }, 6.0).is_err());
        assert!(predicted_exponent(RateClaim::MultiD { d: 0 }, 6.0).is_err());
        assert!(predicted_exponent(RateClaim::TransportBound { m: 0 }, 6.0).is_err());
        assert!(predicted_exponent(RateClaim::Sobolev { beta: 7.0 }, 6.0).is_err());
    }

    #[test]
    fn floor_flag() {
        assert!(record(50, 1e-13).floored());
        assert!(!record(50, 1e-11).floored());
    }
}
