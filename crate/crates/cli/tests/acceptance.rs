//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gpc_density::experiment::{format_g17, reproduce, Figure, ReproduceOptions};
use gpc_density::metrics::{
    binned_l1_distance, cdf_l1_distance, lq_distance, predicted_exponent, sobolev_rate,
    wasserstein, RateClaim,
};
use gpc_density::pushforward::{
    histogram_density, pdf, pdf_grid, sample_pushforward, Map, PushforwardDensity,
    DEFAULT_SCAN_RESOLUTION,
};
use gpc_density::{
    fit_collocation, fit_galerkin, gauss_legendre_rule, gauss_lobatto_rule, monotone_decomposition,
    registry, InputDensity, LegendreSeries, PiecewiseMonotoneMap, QuadratureRule,
    QuantityOfInterest, RuleKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QUADRATURE_CASES: usize = 200;
const QUADRATURE_ORDERS: [usize; 4] = [2, 5, 16, 64];
const QUADRATURE_REL_TOL: f64 = 1e-11;
const CLOSED_FORM_TOL: f64 = 1e-12;

const RECOVERY_CASES: usize = 50;
const RECOVERY_COEFF_TOL: f64 = 1e-10;
const RECOVERY_L1_TOL: f64 = 1e-8;

const FIG1_LIMIT: Duration = Duration::from_secs(90);
const FIG2_LIMIT: Duration = Duration::from_secs(60);
const FIG3_LIMIT: Duration = Duration::from_secs(60);

const ANALYTIC_TOL: f64 = 1e-8;
const HISTOGRAM_SAMPLES: usize = 1_000_000;
const HISTOGRAM_BINS: usize = 200;
const HISTOGRAM_GAP: f64 = 0.05;

const TRANSLATION_TOL: f64 = 1e-8;
const QUANTILE_CDF_TOL: f64 = 1e-5;
const W2_PAIRS: usize = 50;
const W2_SLACK: f64 = 1e-6;
const MONOTONE_P_TOL: f64 = 1e-6;
const TRANSPORT_POINTS: usize = 512;

const EXPONENT_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pm(f: impl Into<Map>) -> PiecewiseMonotoneMap {
    monotone_decomposition(f, DEFAULT_SCAN_RESOLUTION).unwrap()
}

fn series_qoi(c: &[f64]) -> QuantityOfInterest {
    let s = LegendreSeries::manual(c.to_vec());
    let d = s.clone();
    QuantityOfInterest::with_derivative("series", move |x| s.value(x), move |x| d.derivative(x))
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn monomial_integral(c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, a)| 2.0 * a / (k as f64 + 1.0))
        .sum()
}

fn worst_quadrature_error(rng: &mut ChaCha8Rng, rule: &QuadratureRule, max_degree: usize) -> f64 {
    (0..QUADRATURE_CASES)
        .map(|_| {
            let d = rng.gen_range(0..=max_degree);
            let c: Vec<f64> = (0..=d).map(|_| rng.gen_range(0.0..1.0)).collect();
            let exact = monomial_integral(&c);
            (rule.integrate(|x| horner(&c, x)) - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

fn closed_forms_hold(rule: &QuadratureRule, x: &[f64], w: &[f64]) -> bool {
    rule.nodes.len() == x.len()
        && rule
            .nodes
            .iter()
            .zip(x)
            .all(|(a, b)| (a - b).abs() <= CLOSED_FORM_TOL)
        && rule
            .weights
            .iter()
            .zip(w)
            .all(|(a, b)| (a - b).abs() <= CLOSED_FORM_TOL)
}

fn quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_gl: f64 = 0.0;
    let mut worst_gll: f64 = 0.0;
    for n in QUADRATURE_ORDERS {
        let gl = gauss_legendre_rule(n).unwrap();
        let gll = gauss_lobatto_rule(n).unwrap();
        worst_gl = worst_gl.max(worst_quadrature_error(&mut rng, &gl, 2 * n - 1));
        worst_gll = worst_gll.max(worst_quadrature_error(&mut rng, &gll, 2 * n - 3));
    }
    let s3 = 1.0 / 3f64.sqrt();
    let t = 0.6f64.sqrt();
    let s5 = 1.0 / 5f64.sqrt();
    let closed = closed_forms_hold(&gauss_legendre_rule(1).unwrap(), &[0.0], &[2.0])
        && closed_forms_hold(&gauss_legendre_rule(2).unwrap(), &[-s3, s3], &[1.0, 1.0])
        && closed_forms_hold(
            &gauss_legendre_rule(3).unwrap(),
            &[-t, 0.0, t],
            &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
        )
        && closed_forms_hold(&gauss_lobatto_rule(2).unwrap(), &[-1.0, 1.0], &[1.0, 1.0])
        && closed_forms_hold(
            &gauss_lobatto_rule(3).unwrap(),
            &[-1.0, 0.0, 1.0],
            &[1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
        )
        && closed_forms_hold(
            &gauss_lobatto_rule(4).unwrap(),
            &[-1.0, -s5, s5, 1.0],
            &[1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0],
        );
    outcome(
        worst_gl <= QUADRATURE_REL_TOL && worst_gll <= QUADRATURE_REL_TOL && closed,
        format!("worst rel err GL {worst_gl:.3e}, GLL {worst_gll:.3e}; closed forms {closed}"),
    )
}

fn exact_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = InputDensity::uniform();
    let (mut worst_c, mut worst_l1): (f64, f64) = (0.0, 0.0);
    for _ in 0..RECOVERY_CASES {
        let d = rng.gen_range(1..=8);
        let c: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = d + rng.gen_range(0..4);
        let f = series_qoi(&c);
        let exact = pm(f.clone());
        let pe = PushforwardDensity::new(&exact, &rho, 2048).unwrap();
        for g in [
            fit_collocation(&f, n, RuleKind::GaussLegendre).unwrap(),
            fit_galerkin(&f, n, None).unwrap(),
        ] {
            for (j, a) in g.coeffs().iter().enumerate() {
                worst_c = worst_c.max((a - c.get(j).unwrap_or(&0.0)).abs());
            }
            let pg = pm(g);
            let dg = PushforwardDensity::new(&pg, &rho, 2048).unwrap();
            worst_l1 = worst_l1.max(lq_distance(&pe, &dg, 1.0).unwrap());
        }
    }
    outcome(
        worst_c <= RECOVERY_COEFF_TOL && worst_l1 <= RECOVERY_L1_TOL,
        format!("worst coefficient error {worst_c:.3e}, worst l1 {worst_l1:.3e}"),
    )
}

fn figure(fig: Figure, limit: Duration) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let opts = ReproduceOptions {
        no_timing: true,
        ..ReproduceOptions::default()
    };
    let start = Instant::now();
    let rep = reproduce(fig, dir.path(), &opts).unwrap();
    let elapsed = start.elapsed();
    let mut detail = format!(
        "{:.1} s (limit {} s); fit {} n^{}",
        elapsed.as_secs_f64(),
        limit.as_secs(),
        format_g17(rep.fit.0),
        format_g17(rep.fit.1)
    );
    for c in &rep.checks {
        detail.push_str(&format!(
            "\n    {} {}: measured {} expected {}",
            if c.pass { "pass" } else { "fail" },
            c.name,
            format_g17(c.measured),
            c.expected
        ));
    }
    outcome(rep.passed() && elapsed <= limit, detail)
}

fn pushforward() -> Outcome {
    let rho = InputDensity::uniform();
    let mut analytic: f64 = 0.0;
    let identity = pm(registry::function("identity").unwrap());
    let affine = pm(registry::function("affine:2,1").unwrap());
    let square = pm(registry::function("square").unwrap());
    for y in [-0.9, -0.3, 0.0, 0.4, 0.95] {
        analytic = analytic.max((pdf(&identity, &rho, y) - 0.5).abs());
    }
    for y in [-0.5, 0.0, 1.0, 2.9] {
        analytic = analytic.max((pdf(&affine, &rho, y) - 0.25).abs());
    }
    analytic = analytic.max((pdf(&square, &rho, 0.25) - 1.0).abs());
    for y in [0.01, 0.2, 0.64, 0.99] {
        analytic = analytic.max((pdf(&square, &rho, y) - 0.5 / y.sqrt()).abs());
    }
    let mut worst_gap: f64 = 0.0;
    let mut worst_id = "";
    for (i, id) in registry::FUNCTION_NAMES.iter().enumerate() {
        let p = pm(registry::function(id).unwrap());
        let samples = sample_pushforward(&p, &rho, HISTOGRAM_SAMPLES, 7 + i as u64).unwrap();
        let hist = histogram_density(&samples, HISTOGRAM_BINS, p.support()).unwrap();
        let grid = pdf_grid(&p, &rho, 2048).unwrap();
        let gap = binned_l1_distance(&grid, &hist).unwrap();
        if gap > worst_gap {
            worst_gap = gap;
            worst_id = id;
        }
    }
    outcome(
        analytic <= ANALYTIC_TOL && worst_gap <= HISTOGRAM_GAP,
        format!("analytic err {analytic:.3e}; worst histogram gap {worst_gap:.4} ({worst_id})"),
    )
}

fn transport() -> Outcome {
    let rho = InputDensity::uniform();
    let named = |id: &str| pm(registry::function(id).unwrap());
    let shift = wasserstein(
        &named("identity"),
        &named("affine:1,0.1"),
        &rho,
        1.0,
        TRANSPORT_POINTS,
    )
    .unwrap();
    let shift_err = (shift - 0.1).abs();

    let pairs = [
        ("identity", "cubic_mono"),
        ("sin20", "square"),
        ("abs_shift", "square"),
        ("abs_cubed", "identity"),
        ("sin20", "abs_shift"),
        ("affine:0.5,0.2", "cubic_mono"),
    ];
    let (mut identity_gap, mut p_violation): (f64, f64) = (0.0, 0.0);
    for (a, b) in pairs {
        let (pa, pb) = (named(a), named(b));
        let w: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 4.0]
            .iter()
            .map(|&p| wasserstein(&pa, &pb, &rho, p, TRANSPORT_POINTS).unwrap())
            .collect();
        identity_gap = identity_gap.max((w[0] - cdf_l1_distance(&pa, &pb, &rho).unwrap()).abs());
        for k in 1..w.len() {
            p_violation = p_violation.max(w[k - 1] - w[k]);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut w2_excess = f64::NEG_INFINITY;
    for _ in 0..W2_PAIRS {
        let mut draw = || -> Vec<f64> {
            let d = rng.gen_range(1..=8);
            (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let (cf, cg) = (draw(), draw());
        let len = cf.len().max(cg.len());
        // orthonormal coefficients; ρ = 1/2 halves the squared distance
        let l2 = ((0..len)
            .map(|j| (cf.get(j).unwrap_or(&0.0) - cg.get(j).unwrap_or(&0.0)).powi(2))
            .sum::<f64>()
            / 2.0)
            .sqrt();
        let w2 = wasserstein(
            &pm(series_qoi(&cf)),
            &pm(series_qoi(&cg)),
            &rho,
            2.0,
            TRANSPORT_POINTS,
        )
        .unwrap();
        w2_excess = w2_excess.max(w2 - l2);
    }
    outcome(
        shift_err <= TRANSLATION_TOL
            && identity_gap <= QUANTILE_CDF_TOL
            && w2_excess <= W2_SLACK
            && p_violation <= MONOTONE_P_TOL,
        format!(
            "translation err {shift_err:.3e}; W1 vs cdf gap {identity_gap:.3e}; \
             max W2 - L2 {w2_excess:.3e}; max W_p decrease {p_violation:.3e}"
        ),
    )
}

fn exponents() -> Outcome {
    let cases = [
        (
            predicted_exponent(RateClaim::Monotone1D, 6.0).unwrap(),
            -4.5,
        ),
        (
            predicted_exponent(RateClaim::Singular1D { k: 2 }, 6.0).unwrap(),
            -0.9,
        ),
        (
            predicted_exponent(RateClaim::TransportBound { m: 1 }, 6.0).unwrap(),
            -31.0 / 12.0,
        ),
        (sobolev_rate(1.0, 6.0), 4.5),
    ];
    let worst = cases.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let shown: Vec<String> = cases.iter().map(|(a, _)| format_g17(*a)).collect();
    outcome(
        worst <= EXPONENT_TOL,
        format!("{} (worst err {worst:.1e})", shown.join(", ")),
    )
}

fn determinism() -> Outcome {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_gpcd"))
            .args(["reproduce", "fig2", "--no-timing", "--out"])
            .arg(dir.path())
            .output()
            .unwrap()
            .status;
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        (status.code(), files)
    };
    let (a, b) = (run(), run());
    let names: Vec<&str> = a.1.iter().map(|(n, _)| n.as_str()).collect();
    outcome(
        !a.1.is_empty() && a.1 == b.1,
        format!(
            "exit codes {:?}/{:?}; compared {}",
            a.0,
            b.0,
            names.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 quadrature exactness", quadrature),
        ("2 exact recovery", exact_recovery),
        ("3 fig1 sin(20a)", || figure(Figure::Fig1, FIG1_LIMIT)),
        ("4 fig2 |a|^3", || figure(Figure::Fig2, FIG2_LIMIT)),
        ("5 fig3 |a-0.5|", || figure(Figure::Fig3, FIG3_LIMIT)),
        ("6 pushforward correctness", pushforward),
        ("7 transport properties", transport),
        ("8 predicted exponents", exponents),
        ("9 determinism", determinism),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        println!(
            "{} {name} [{:.1} s]: {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of 9 criteria passed in {:.1} s",
        9 - failed,
        total.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
