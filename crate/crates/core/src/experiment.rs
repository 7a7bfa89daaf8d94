//! Degree sweeps, their CSV form, and the three figure presets.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::legendre::{LegendreSeries, RuleKind};
use crate::metrics::{
    binned_l1_distance, fit_rate, lq_distance, transport_rule, wasserstein_from_quantiles,
    RateField, SweepRecord,
};
use crate::pushforward::{
    default_bins, histogram_density, monotone_decomposition, pdf_grid, quantiles, sample_map,
    InputDensity, PiecewiseMonotoneMap, PushforwardDensity, DEFAULT_BASE_POINTS,
    DEFAULT_SCAN_RESOLUTION,
};
use crate::registry;
use crate::surrogate::{error_norms, fit_collocation, fit_galerkin, Norm, QuantityOfInterest};

pub const CSV_HEADER: &str = "n,l1_pdf_error,l2_error,h1_error,wass1,elapsed_s";
pub const MIN_MC_COUNT: usize = 1000;
pub const WASSERSTEIN_POINTS: usize = 512;
const NORM_RESOLUTION: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CollocationGl,
    CollocationGll,
    Galerkin,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::CollocationGl => "collocation_gl",
            Method::CollocationGll => "collocation_gll",
            Method::Galerkin => "galerkin",
        }
    }

    pub fn fit(self, f: &QuantityOfInterest, n: usize) -> Result<LegendreSeries> {
        match self {
            Method::CollocationGl => fit_collocation(f, n, RuleKind::GaussLegendre),
            Method::CollocationGll => fit_collocation(f, n, RuleKind::GaussLobatto),
            Method::Galerkin => fit_galerkin(f, n, None),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collocation_gl" | "collocation" => Ok(Method::CollocationGl),
            "collocation_gll" | "lobatto" => Ok(Method::CollocationGll),
            "galerkin" => Ok(Method::Galerkin),
            _ => Err(invalid(format!("unknown method `{s}`"))),
        }
    }
}

/// Parses a degree list: comma-separated items, each `n`, `a..b` or
/// `a..b:stride` (inclusive). The result must be nonempty, at least 1 and
/// strictly ascending.
pub fn parse_degrees(text: &str) -> Result<Vec<usize>> {
    let bad = || invalid(format!("bad degree list `{text}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let mut out = Vec::new();
    for item in text.split(',').filter(|t| !t.trim().is_empty()) {
        match item.split_once("..") {
            Some((a, rest)) => {
                let (b, stride) = match rest.split_once(':') {
                    Some((b, s)) => (num(b)?, num(s)?),
                    None => (num(rest)?, 1),
                };
                if stride == 0 {
                    return Err(bad());
                }
                out.extend((num(a)?..=b).step_by(stride));
            }
            None => out.push(num(item)?),
        }
    }
    check_degrees(&out)?;
    Ok(out)
}

fn check_degrees(d: &[usize]) -> Result<()> {
    if d.is_empty() {
        return Err(invalid("degree list is empty"));
    }
    if d[0] == 0 {
        return Err(invalid("degrees must be at least 1"));
    }
    if d.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("degrees must be strictly ascending"));
    }
    Ok(())
}

/// Everything needed to run one convergence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub function: String,
    pub density: String,
    pub method: Method,
    pub degrees: Vec<usize>,
    pub grid_points: usize,
    /// Monte Carlo samples per degree for the histogram oracle; none skips it.
    pub mc_count: Option<usize>,
    pub mc_seed: u64,
    pub bins: Option<usize>,
    pub out: Option<PathBuf>,
    pub no_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            function: "sin20".into(),
            density: "uniform".into(),
            method: Method::CollocationGl,
            degrees: (2..=40).step_by(2).collect(),
            grid_points: DEFAULT_BASE_POINTS,
            mc_count: None,
            mc_seed: 0,
            bins: None,
            out: None,
            no_timing: false,
        }
    }
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    if let Ok(n) = value.parse::<usize>() {
        return Ok(n);
    }
    // accept 1e6 and the like
    match value.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e18 => Ok(x as usize),
        _ => Err(invalid(format!(
            "`{key}` expects a nonnegative integer, got `{value}`"
        ))),
    }
}

impl SweepConfig {
    /// Sets one field by its key; `-` and `_` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "function" => self.function = value.to_string(),
            "density" => self.density = value.to_string(),
            "method" => self.method = value.parse()?,
            "degrees" => self.degrees = parse_degrees(value)?,
            "grid_points" => self.grid_points = parse_count(key, value)?,
            "mc_count" => self.mc_count = Some(parse_count(key, value)?),
            "mc_seed" => self.mc_seed = parse_count(key, value)? as u64,
            "bins" => self.bins = Some(parse_count(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "no_timing" => {
                self.no_timing = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => {
                        return Err(invalid(format!(
                            "`{key}` expects true or false, got `{value}`"
                        )))
                    }
                }
            }
            other => return Err(invalid(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        check_degrees(&self.degrees)?;
        if self.grid_points < 64 {
            return Err(invalid(format!(
                "grid_points must be at least 64, got {}",
                self.grid_points
            )));
        }
        if let Some(c) = self.mc_count {
            if c < MIN_MC_COUNT {
                return Err(invalid(format!(
                    "mc_count must be at least {MIN_MC_COUNT}, got {c}"
                )));
            }
        }
        if let Some(b) = self.bins {
            if b < 2 {
                return Err(invalid(format!("bins must be at least 2, got {b}")));
            }
        }
        Ok(())
    }
}

/// The exact side of a sweep, shared by every degree.
struct Reference {
    f: QuantityOfInterest,
    rho: InputDensity,
    pm: PiecewiseMonotoneMap,
    weights: Vec<f64>,
    nodes: Vec<f64>,
    quantiles: Vec<f64>,
}

impl Reference {
    fn new(function: &str, density: &str) -> Result<Self> {
        let f = registry::function(function)?;
        let rho = registry::density(density)?;
        let pm = monotone_decomposition(f.clone(), DEFAULT_SCAN_RESOLUTION)?;
        let (nodes, weights) = transport_rule(WASSERSTEIN_POINTS)?;
        let quantiles = quantiles(&pm, &rho, &nodes)?;
        Ok(Self {
            f,
            rho,
            pm,
            weights,
            nodes,
            quantiles,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Binned L1 gap between each surrogate density and its histogram, when
    /// the Monte Carlo oracle ran.
    pub oracle_gaps: Option<Vec<f64>>,
}

fn at_stage(degree: usize, stage: &'static str) -> impl FnOnce(Error) -> Error {
    move |e| Error::Stage {
        degree,
        stage,
        source: Box::new(e),
    }
}

fn sweep_degree(r: &Reference, cfg: &SweepConfig, n: usize) -> Result<(SweepRecord, Option<f64>)> {
    let start = Instant::now();
    let g = cfg.method.fit(&r.f, n).map_err(at_stage(n, "fit"))?;
    let pm = monotone_decomposition(g.clone(), DEFAULT_SCAN_RESOLUTION)
        .map_err(at_stage(n, "decomposition"))?;

    let exact =
        PushforwardDensity::new(&r.pm, &r.rho, cfg.grid_points).map_err(at_stage(n, "grid"))?;
    let approx =
        PushforwardDensity::new(&pm, &r.rho, cfg.grid_points).map_err(at_stage(n, "grid"))?;
    let l1 = lq_distance(&exact, &approx, 1.0).map_err(at_stage(n, "l1"))?;

    let resolution = NORM_RESOLUTION.max(2 * n + 16);
    let l2 = error_norms(&r.f, &g, Norm::L2, resolution).map_err(at_stage(n, "norms"))?;
    let h1 = error_norms(&r.f, &g, Norm::H1, resolution).map_err(at_stage(n, "norms"))?;

    let q = quantiles(&pm, &r.rho, &r.nodes).map_err(at_stage(n, "wasserstein"))?;
    let wass1 = wasserstein_from_quantiles(&r.quantiles, &q, &r.weights, 1.0);
    let elapsed = start.elapsed().as_secs_f64();

    let gap = match cfg.mc_count {
        Some(count) => {
            let oracle = || -> Result<f64> {
                let samples = sample_map(pm.map(), &r.rho, count, cfg.mc_seed, n as u64)?;
                let bins = cfg.bins.unwrap_or_else(|| default_bins(count));
                let hist = histogram_density(&samples, bins, pm.support())?;
                binned_l1_distance(&pdf_grid(&pm, &r.rho, cfg.grid_points)?, &hist)
            };
            Some(oracle().map_err(at_stage(n, "oracle"))?)
        }
        None => None,
    };

    let record = SweepRecord {
        degree: n,
        l1_pdf_error: l1,
        l2_error: l2,
        h1_error: h1,
        wass1,
        elapsed_s: if cfg.no_timing { 0.0 } else { elapsed },
    };
    Ok((record, gap))
}

/// Runs every degree of the sweep (in parallel) and writes the CSV to
/// `cfg.out` when set. Records come back in ascending degree.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let reference = Reference::new(&cfg.function, &cfg.density)?;
    let rows: Vec<(SweepRecord, Option<f64>)> = cfg
        .degrees
        .par_iter()
        .map(|&n| sweep_degree(&reference, cfg, n))
        .collect::<Result<_>>()?;
    let (records, gaps): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let oracle_gaps = cfg
        .mc_count
        .map(|_| gaps.into_iter().flatten().collect::<Vec<f64>>());
    if let Some(path) = &cfg.out {
        std::fs::write(path, sweep_csv(&records))?;
        if let Some(g) = &oracle_gaps {
            std::fs::write(oracle_path(path), oracle_csv(&records, g))?;
        }
    }
    Ok(SweepOutput {
        records,
        oracle_gaps,
    })
}

/// `results.csv` → `results.oracle.csv`.
pub fn oracle_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.oracle.csv"))
}

/// `x` with 17 significant digits in the shortest of fixed or exponent
/// notation, trailing zeros removed, like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (16 - exp) as usize, x))
    }
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.degree,
            format_g17(r.l1_pdf_error),
            format_g17(r.l2_error),
            format_g17(r.h1_error),
            format_g17(r.wass1),
            format_g17(r.elapsed_s)
        );
    }
    s
}

fn oracle_csv(records: &[SweepRecord], gaps: &[f64]) -> String {
    let mut s = String::from("n,histogram_l1_gap\n");
    for (r, g) in records.iter().zip(gaps) {
        let _ = writeln!(s, "{},{}", r.degree, format_g17(*g));
    }
    s
}

/// Reads back a CSV written by [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(invalid("missing sweep CSV header"));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let bad = || invalid(format!("bad sweep CSV row `{line}`"));
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(bad());
            }
            let x = |i: usize| cols[i].parse::<f64>().map_err(|_| bad());
            Ok(SweepRecord {
                degree: cols[0].parse().map_err(|_| bad())?,
                l1_pdf_error: x(1)?,
                l2_error: x(2)?,
                h1_error: x(3)?,
                wass1: x(4)?,
                elapsed_s: x(5)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            _ => Err(invalid(format!(
                "unknown figure `{s}`; expected fig1, fig2 or fig3"
            ))),
        }
    }
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }

    pub fn function(self) -> &'static str {
        match self {
            Figure::Fig1 => "sin20",
            Figure::Fig2 => "abs_cubed",
            Figure::Fig3 => "abs_shift",
        }
    }

    pub fn degrees(self) -> Vec<usize> {
        match self {
            Figure::Fig1 => (2..=100).step_by(2).collect(),
            Figure::Fig2 | Figure::Fig3 => (4..=128).step_by(2).collect(),
        }
    }

    /// Degree window of the rate fit.
    pub fn window(self) -> (usize, usize) {
        match self {
            Figure::Fig1 => (34, 60),
            Figure::Fig2 | Figure::Fig3 => (10, 100),
        }
    }

    /// Degrees whose densities are written out.
    pub fn showcase(self) -> [usize; 2] {
        [10, 50]
    }

    pub fn config(self) -> SweepConfig {
        SweepConfig {
            function: self.function().into(),
            density: "uniform".into(),
            method: Method::CollocationGl,
            degrees: self.degrees(),
            ..SweepConfig::default()
        }
    }
}

/// `(amplitude, exponent)` of the L1 density error over the figure's window,
/// ignoring rows at the machine-precision floor.
pub fn figure_fit(figure: Figure, records: &[SweepRecord]) -> Result<(f64, f64)> {
    let kept: Vec<SweepRecord> = records.iter().filter(|r| !r.floored()).copied().collect();
    let (lo, hi) = figure.window();
    fit_rate(&kept, RateField::L1Pdf, lo, hi)
}

/// One acceptance band of a figure and whether the measurement falls in it.
#[derive(Debug, Clone, PartialEq)]
pub struct BandCheck {
    pub name: String,
    pub measured: f64,
    pub expected: String,
    pub pass: bool,
}

impl BandCheck {
    fn new(name: &str, measured: f64, expected: &str, pass: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: expected.into(),
            pass,
        }
    }
}

fn l1_at(records: &[SweepRecord], n: usize) -> f64 {
    records
        .iter()
        .find(|r| r.degree == n)
        .map_or(f64::NAN, |r| r.l1_pdf_error)
}

fn l1_over(records: &[SweepRecord], lo: usize, hi: usize) -> impl Iterator<Item = f64> + '_ {
    records
        .iter()
        .filter(move |r| (lo..=hi).contains(&r.degree))
        .map(|r| r.l1_pdf_error)
}

/// Checks the figure's acceptance bands against a sweep and its fit.
pub fn figure_checks(figure: Figure, records: &[SweepRecord], fit: (f64, f64)) -> Vec<BandCheck> {
    let (amplitude, exponent) = fit;
    match figure {
        Figure::Fig1 => {
            let early = l1_over(records, 1, 30).fold(f64::INFINITY, f64::min);
            let at50 = l1_at(records, 50);
            let best = l1_over(records, 50, 80).fold(f64::INFINITY, f64::min);
            let decades = (l1_at(records, 34) / l1_at(records, 70)).log10();
            vec![
                BandCheck::new("min l1_pdf_error over n <= 30", early, "> 0.1", early > 0.1),
                BandCheck::new("l1_pdf_error at n = 50", at50, "< 1e-3", at50 < 1e-3),
                BandCheck::new(
                    "min l1_pdf_error over n in [50, 80]",
                    best,
                    "< 1e-6",
                    best < 1e-6,
                ),
                BandCheck::new(
                    "decades of decrease from n = 34 to n = 70",
                    decades,
                    ">= 8",
                    decades >= 8.0,
                ),
            ]
        }
        Figure::Fig2 => vec![
            BandCheck::new(
                "fitted exponent over n in [10, 100]",
                exponent,
                "in [-1.69, -1.19]",
                (-1.69..=-1.19).contains(&exponent),
            ),
            BandCheck::new(
                "fitted amplitude",
                amplitude,
                "in [1.31, 5.24]",
                (1.31..=5.24).contains(&amplitude),
            ),
        ],
        Figure::Fig3 => vec![BandCheck::new(
            "fitted exponent over n in [10, 100]",
            exponent,
            "in [-1.03, -0.53]",
            (-1.03..=-0.53).contains(&exponent),
        )],
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub grid_points: usize,
    pub mc_count: usize,
    pub mc_seed: u64,
    pub bins: Option<usize>,
    pub no_timing: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_BASE_POINTS,
            mc_count: 1_000_000,
            mc_seed: 0,
            bins: None,
            no_timing: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub records: Vec<SweepRecord>,
    pub fit: (f64, f64),
    pub checks: Vec<BandCheck>,
    pub files: Vec<PathBuf>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs a figure preset and writes into `out_dir`: `<fig>_sweep.csv`,
/// `<fig>_densities.csv`, `fit.txt` and the gnuplot script `<fig>.gp`.
pub fn reproduce(figure: Figure, out_dir: &Path, opts: &ReproduceOptions) -> Result<Reproduction> {
    if opts.mc_count < MIN_MC_COUNT {
        return Err(invalid(format!(
            "mc_count must be at least {MIN_MC_COUNT}, got {}",
            opts.mc_count
        )));
    }
    std::fs::create_dir_all(out_dir)?;
    let cfg = SweepConfig {
        grid_points: opts.grid_points,
        no_timing: opts.no_timing,
        ..figure.config()
    };
    let records = run_sweep(&cfg)?.records;
    let fit = figure_fit(figure, &records)?;
    let checks = figure_checks(figure, &records, fit);

    let name = figure.name();
    let sweep_path = out_dir.join(format!("{name}_sweep.csv"));
    std::fs::write(&sweep_path, sweep_csv(&records))?;

    let densities_path = out_dir.join(format!("{name}_densities.csv"));
    std::fs::write(&densities_path, densities_csv(figure, &cfg, opts)?)?;

    let (lo, hi) = figure.window();
    let fit_path = out_dir.join("fit.txt");
    std::fs::write(
        &fit_path,
        format!(
            "amplitude = {}\nexponent = {}\nwindow = {lo} {hi}\n",
            format_g17(fit.0),
            format_g17(fit.1)
        ),
    )?;

    let script_path = out_dir.join(format!("{name}.gp"));
    std::fs::write(&script_path, plot_script(figure, fit))?;

    Ok(Reproduction {
        records,
        fit,
        checks,
        files: vec![sweep_path, densities_path, fit_path, script_path],
    })
}

/// Long-format densities: `curve,n,y,density` with curves `exact` (n = 0),
/// `surrogate` and `histogram` at the showcased degrees.
fn densities_csv(figure: Figure, cfg: &SweepConfig, opts: &ReproduceOptions) -> Result<String> {
    let f = registry::function(&cfg.function)?;
    let rho = registry::density(&cfg.density)?;
    let mut s = String::from("curve,n,y,density\n");
    let mut push = |curve: &str, n: usize, ys: &[f64], vs: &[f64]| {
        for (y, v) in ys.iter().zip(vs) {
            let _ = writeln!(s, "{curve},{n},{},{}", format_g17(*y), format_g17(*v));
        }
    };
    let pm = monotone_decomposition(f.clone(), DEFAULT_SCAN_RESOLUTION)?;
    let exact = pdf_grid(&pm, &rho, opts.grid_points)?;
    push("exact", 0, &exact.ys, &exact.values);
    for n in figure.showcase() {
        let g = cfg.method.fit(&f, n).map_err(at_stage(n, "fit"))?;
        let pm = monotone_decomposition(g, DEFAULT_SCAN_RESOLUTION)
            .map_err(at_stage(n, "decomposition"))?;
        let grid = pdf_grid(&pm, &rho, opts.grid_points).map_err(at_stage(n, "grid"))?;
        push("surrogate", n, &grid.ys, &grid.values);
        let samples = sample_map(pm.map(), &rho, opts.mc_count, opts.mc_seed, n as u64)
            .map_err(at_stage(n, "oracle"))?;
        let bins = opts.bins.unwrap_or_else(|| default_bins(opts.mc_count));
        let hist =
            histogram_density(&samples, bins, pm.support()).map_err(at_stage(n, "oracle"))?;
        push("histogram", n, &hist.ys, &hist.values);
    }
    Ok(s)
}

fn plot_script(figure: Figure, fit: (f64, f64)) -> String {
    let name = figure.name();
    let [a, b] = figure.showcase();
    format!(
        "# gnuplot script; run from the output directory\n\
         set datafile separator ','\n\
         set terminal pngcairo size 1200,450\n\
         set output '{name}.png'\n\
         set multiplot layout 1,2\n\
         set title 'densities'\n\
         set xlabel 'y'\n\
         set yrange [0:*]\n\
         plot '< grep \"^exact,\" {name}_densities.csv' using 3:4 with lines lc 'black' title 'exact', \\\n\
         \x20    '< grep \"^surrogate,{a},\" {name}_densities.csv' using 3:4 with points pt 7 ps 0.3 lc 'red' title 'n = {a}', \\\n\
         \x20    '< grep \"^surrogate,{b},\" {name}_densities.csv' using 3:4 with lines dt 4 lc 'blue' title 'n = {b}'\n\
         set title 'L1 density error'\n\
         set xlabel 'n'\n\
         set logscale y\n\
         set format y '10^{{%L}}'\n\
         set yrange [*:*]\n\
         plot '{name}_sweep.csv' using 1:2 every ::1 with linespoints pt 7 title 'error', \\\n\
         \x20    {} * x**({}) with lines dt 2 title 'fit'\n\
         unset multiplot\n",
        format_g17(fit.0),
        format_g17(fit.1)
    )
}
