//! Monte Carlo samples of a pushforward and their histogram.
//!
//! Sample `i` of task `t` under base seed `s` is `map(F_ρ^{-1}(u))`, where
//! `u` is the `i`-th `f64` drawn from ChaCha8 seeded by `seed_from_u64(s)`
//! on stream `t`. Each `f64` consumes two 32-bit words, so any chunk can be
//! generated independently by seeking to word `2 i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::density::DensityGrid;
use super::{InputDensity, Interval, Map, PiecewiseMonotoneMap};
use crate::error::{invalid, Result};

const CHUNK: usize = 1 << 16;

/// Samples of `f_# ρ` for task 0.
pub fn sample_pushforward(
    pm: &PiecewiseMonotoneMap,
    rho: &InputDensity,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    sample_map(pm.map(), rho, count, seed, 0)
}

/// Samples of `map_# ρ` on the given task stream.
pub fn sample_map(
    map: &Map,
    rho: &InputDensity,
    count: usize,
    seed: u64,
    task: u64,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(invalid("sample count must be positive"));
    }
    let uniform = rho.is_uniform();
    let mut out = vec![0.0; count];
    out.par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(task);
            rng.set_word_pos(2 * (c * CHUNK) as u128);
            for y in chunk.iter_mut() {
                let u: f64 = rng.gen();
                let x = if uniform {
                    2.0 * u - 1.0
                } else {
                    rho.inverse_cdf(u)
                };
                *y = map.value(x);
            }
        });
    Ok(out)
}

/// Bin count used when none is given: `round(count^(1/3))` clamped to
/// `[50, 2000]`.
pub fn default_bins(count: usize) -> usize {
    ((count as f64).cbrt().round() as usize).clamp(50, 2000)
}

/// Normalized histogram on `support` with `bins` equal bins. Samples outside
/// the support are counted in the end bins.
pub fn histogram_density(samples: &[f64], bins: usize, support: Interval) -> Result<DensityGrid> {
    if samples.is_empty() {
        return Err(invalid("histogram of an empty sample"));
    }
    if bins < 2 {
        return Err(invalid(format!(
            "histogram needs at least 2 bins, got {bins}"
        )));
    }
    if !(support.width() > 0.0) {
        return Err(invalid("histogram support has zero width"));
    }
    let width = support.width() / bins as f64;
    let mut counts = vec![0u64; bins];
    for &y in samples {
        let k = ((y - support.lo) / width).floor();
        let k = if k.is_nan() {
            0
        } else {
            (k.max(0.0) as usize).min(bins - 1)
        };
        counts[k] += 1;
    }
    let edges: Vec<f64> = (0..=bins)
        .map(|k| {
            if k == bins {
                support.hi
            } else {
                support.lo + k as f64 * width
            }
        })
        .collect();
    let ys = edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
    let norm = samples.len() as f64;
    let values = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (norm * (e[1] - e[0])))
        .collect();
    Ok(DensityGrid {
        ys,
        values,
        support,
        singular_points: Vec::new(),
        bin_edges: Some(edges),
    })
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
    fn identity_sample_mean() {
        let s =
            sample_pushforward(&pm("identity"), &InputDensity::uniform(), 1_000_000, 7).unwrap();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!(mean.abs() <= 0.002, "{mean}");
    }

    #[test]
    fn deterministic_and_chunk_invariant() {
        let rho = InputDensity::uniform();
        let p = pm("sin20");
        let a = sample_pushforward(&p, &rho, 200_000, 42).unwrap();
        let b = sample_pushforward(&p, &rho, 200_000, 42).unwrap();
        assert_eq!(a, b);
        // a shorter run is a prefix of a longer one
        let c = sample_pushforward(&p, &rho, 70_000, 42).unwrap();
        assert_eq!(&a[..70_000], &c[..]);
        let d = sample_pushforward(&p, &rho, 1000, 43).unwrap();
        assert_ne!(&a[..1000], &d[..]);
        let e = sample_map(p.map(), &rho, 1000, 42, 1).unwrap();
        assert_ne!(&a[..1000], &e[..]);
    }

    #[test]
    fn square_fraction_below_quarter() {
        let s = sample_pushforward(&pm("square"), &InputDensity::uniform(), 1_000_000, 3).unwrap();
        let frac = s.iter().filter(|&&y| y <= 0.25).count() as f64 / s.len() as f64;
        assert!((0.498..=0.502).contains(&frac), "{frac}");
    }

    #[test]
    fn non_uniform_input_uses_inverse_cdf() {
        let rho = registry::density("cosine").unwrap();
        let s = sample_pushforward(&pm("identity"), &rho, 400_000, 5).unwrap();
        // P(|x| <= 1/2) = sin(π/4)
        let frac = s.iter().filter(|y| y.abs() <= 0.5).count() as f64 / s.len() as f64;
        assert!(
            (frac - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.003,
            "{frac}"
        );
    }

    #[test]
    fn uniform_histogram_bins() {
        let s =
            sample_pushforward(&pm("identity"), &InputDensity::uniform(), 1_000_000, 11).unwrap();
        let h = histogram_density(&s, 100, Interval::new(-1.0, 1.0)).unwrap();
        assert!(h.values.iter().all(|v| (0.45..=0.55).contains(v)));
        assert!((h.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_fills_one_bin() {
        let h = histogram_density(&[0.3; 50], 10, Interval::new(0.0, 1.0)).unwrap();
        let nonzero: Vec<f64> = h.values.iter().copied().filter(|&v| v > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert!((nonzero[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_preconditions() {
        assert!(histogram_density(&[], 10, Interval::new(0.0, 1.0)).is_err());
        assert!(histogram_density(&[0.1], 1, Interval::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn max_deviation_scales_like_inverse_sqrt_count() {
        let rho = InputDensity::uniform();
        let p = pm("identity");
        let support = Interval::new(-1.0, 1.0);
        let max_dev = |count: usize, seed: u64| {
            let s = sample_pushforward(&p, &rho, count, seed).unwrap();
            let h = histogram_density(&s, 100, support).unwrap();
            h.values.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max)
        };
        let (mut small, mut large) = (0.0, 0.0);
        for seed in 0..5 {
            small += max_dev(100_000, 100 + seed);
            large += max_dev(200_000, 200 + seed);
        }
        let ratio = small / large;
        assert!((1.1..=1.9).contains(&ratio), "{ratio}");
    }

    #[test]
    fn default_bin_rule() {
        assert_eq!(default_bins(1000), 50);
        assert_eq!(default_bins(1_000_000), 100);
        assert_eq!(default_bins(usize::MAX / 2), 2000);
    }
}
