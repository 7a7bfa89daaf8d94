//! `gpcd`: command-line front end for gpc-density.
//!
//! Exit codes: 0 success, 2 usage or registry error, 3 numerical failure,
//! 4 figure acceptance band violated.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gpc_density::experiment::{
    format_g17, reproduce, run_sweep, sweep_csv, Figure, ReproduceOptions, SweepConfig,
};
use gpc_density::metrics::{cdf_l1_distance, lq_distance, wasserstein};
use gpc_density::pushforward::{
    default_bins, histogram_density, monotone_decomposition, pdf_grid, sample_pushforward,
    PushforwardDensity, DEFAULT_SCAN_RESOLUTION,
};
use gpc_density::{registry, Error, QuadratureRule, RuleKind};

#[derive(Parser)]
#[command(
    name = "gpcd",
    version,
    about = "Pushforward densities of Legendre gPC surrogates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the nodes and weights of a Gauss rule as `k,node,weight`.
    Nodes {
        /// gauss_legendre or gauss_lobatto
        kind: String,
        /// Number of nodes
        n: usize,
    },
    /// Print surrogate coefficients as `n,j,coefficient`.
    Fit(Shared),
    /// Tabulate a pushforward density as `y,density`.
    Pdf(Shared),
    /// Distances between the exact and surrogate pushforwards.
    Compare(Shared),
    /// Run a degree sweep and write the error table.
    Sweep(Shared),
    /// Regenerate a figure's data, fit and plot script.
    Reproduce {
        /// fig1, fig2 or fig3
        figure: String,
        #[command(flatten)]
        shared: Shared,
    },
}

#[derive(Args, Default)]
struct Shared {
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    density: Option<String>,
    /// collocation_gl, collocation_gll or galerkin
    #[arg(long)]
    method: Option<String>,
    /// List such as `10,50` or range such as `2..100:2`
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    grid_points: Option<String>,
    #[arg(long)]
    mc_count: Option<String>,
    #[arg(long)]
    mc_seed: Option<String>,
    #[arg(long)]
    bins: Option<String>,
    /// Output file (or directory for `reproduce`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 in the elapsed_s column
    #[arg(long)]
    no_timing: bool,
}

impl Shared {
    fn config(&self) -> Result<SweepConfig, Error> {
        let mut cfg = SweepConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let flags = [
            ("function", &self.function),
            ("density", &self.density),
            ("method", &self.method),
            ("degrees", &self.degrees),
            ("grid_points", &self.grid_points),
            ("mc_count", &self.mc_count),
            ("mc_seed", &self.mc_seed),
            ("bins", &self.bins),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if self.no_timing {
            cfg.no_timing = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn explicit_degrees(&self) -> bool {
        self.degrees.is_some()
            || self.config.as_ref().is_some_and(|p| {
                std::fs::read_to_string(p).is_ok_and(|t| {
                    t.lines().any(|l| {
                        l.split('#')
                            .next()
                            .unwrap_or("")
                            .trim_start()
                            .starts_with("degrees")
                    })
                })
            })
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    Band(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::UnknownFunction(_)
            | Error::UnknownDensity(_)
            | Error::Domain(_)
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn nodes(kind: &str, n: usize) -> Result<(), Failure> {
    let kind: RuleKind = kind.parse()?;
    let rule = QuadratureRule::build(kind, n)?;
    let mut s = String::from("k,node,weight\n");
    for (k, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let _ = writeln!(s, "{},{},{}", k + 1, format_g17(*x), format_g17(*w));
    }
    print!("{s}");
    Ok(())
}

fn fit(shared: &Shared) -> Result<(), Failure> {
    let cfg = shared.config()?;
    let f = registry::function(&cfg.function)?;
    let mut s = String::from("n,j,coefficient\n");
    for &n in &cfg.degrees {
        let g = cfg.method.fit(&f, n)?;
        for (j, c) in g.coeffs().iter().enumerate() {
            let _ = writeln!(s, "{n},{j},{}", format_g17(*c));
        }
    }
    emit(&cfg.out, &s)
}

/// Density of the exact map, or of the surrogate when `--degrees` names
/// exactly one degree. With `--mc-count` a histogram column is added.
fn pdf(shared: &Shared) -> Result<(), Failure> {
    let cfg = shared.config()?;
    let f = registry::function(&cfg.function)?;
    let rho = registry::density(&cfg.density)?;
    let pm = if shared.explicit_degrees() {
        let [n] = cfg.degrees[..] else {
            return Err(Failure::Usage("`pdf` takes a single degree".into()));
        };
        monotone_decomposition(cfg.method.fit(&f, n)?, DEFAULT_SCAN_RESOLUTION)?
    } else {
        monotone_decomposition(f, DEFAULT_SCAN_RESOLUTION)?
    };
    let grid = pdf_grid(&pm, &rho, cfg.grid_points)?;
    let mut s = String::new();
    match cfg.mc_count {
        Some(count) => {
            let samples = sample_pushforward(&pm, &rho, count, cfg.mc_seed)?;
            let bins = cfg.bins.unwrap_or_else(|| default_bins(count));
            let hist = histogram_density(&samples, bins, pm.support())?;
            s.push_str("y,density,histogram\n");
            for (y, v) in grid.ys.iter().zip(&grid.values) {
                let h = hist.value_at(*y, gpc_density::pushforward::Side::Both);
                let _ = writeln!(s, "{},{},{}", format_g17(*y), format_g17(*v), format_g17(h));
            }
        }
        None => {
            s.push_str("y,density\n");
            for (y, v) in grid.ys.iter().zip(&grid.values) {
                let _ = writeln!(s, "{},{}", format_g17(*y), format_g17(*v));
            }
        }
    }
    emit(&cfg.out, &s)
}

fn compare(shared: &Shared) -> Result<(), Failure> {
    let cfg = shared.config()?;
    let f = registry::function(&cfg.function)?;
    let rho = registry::density(&cfg.density)?;
    let exact = monotone_decomposition(f.clone(), DEFAULT_SCAN_RESOLUTION)?;
    let pe = PushforwardDensity::new(&exact, &rho, cfg.grid_points)?;
    let mut s = String::from("n,l1_pdf_error,l2_pdf_error,wass1,wass2,cdf_l1\n");
    for &n in &cfg.degrees {
        let stage = |stage: &'static str| {
            move |e: Error| Error::Stage {
                degree: n,
                stage,
                source: Box::new(e),
            }
        };
        let g = cfg.method.fit(&f, n).map_err(stage("fit"))?;
        let pm =
            monotone_decomposition(g, DEFAULT_SCAN_RESOLUTION).map_err(stage("decomposition"))?;
        let pg = PushforwardDensity::new(&pm, &rho, cfg.grid_points).map_err(stage("grid"))?;
        let l1 = lq_distance(&pe, &pg, 1.0).map_err(stage("l1"))?;
        let l2 = lq_distance(&pe, &pg, 2.0).map_err(stage("l2"))?;
        let w1 = wasserstein(&exact, &pm, &rho, 1.0, 512).map_err(stage("wasserstein"))?;
        let w2 = wasserstein(&exact, &pm, &rho, 2.0, 512).map_err(stage("wasserstein"))?;
        let c1 = cdf_l1_distance(&exact, &pm, &rho).map_err(stage("cdf"))?;
        let _ = writeln!(
            s,
            "{n},{},{},{},{},{}",
            format_g17(l1),
            format_g17(l2),
            format_g17(w1),
            format_g17(w2),
            format_g17(c1)
        );
    }
    emit(&cfg.out, &s)
}

fn sweep(shared: &Shared) -> Result<(), Failure> {
    let mut cfg = shared.config()?;
    let out = cfg.out.take();
    let result = run_sweep(&SweepConfig {
        out: out.clone(),
        ..cfg
    })?;
    if out.is_none() {
        print!("{}", sweep_csv(&result.records));
    }
    Ok(())
}

fn reproduce_cmd(figure: &str, shared: &Shared) -> Result<(), Failure> {
    let figure: Figure = figure.parse()?;
    let cfg = shared.config()?;
    let defaults = ReproduceOptions::default();
    let opts = ReproduceOptions {
        grid_points: cfg.grid_points,
        mc_count: cfg.mc_count.unwrap_or(defaults.mc_count),
        mc_seed: cfg.mc_seed,
        bins: cfg.bins,
        no_timing: cfg.no_timing,
    };
    let out_dir = cfg.out.unwrap_or_else(|| PathBuf::from(figure.name()));
    let rep = reproduce(figure, &out_dir, &opts)?;
    println!(
        "{}: amplitude {} exponent {}",
        figure.name(),
        format_g17(rep.fit.0),
        format_g17(rep.fit.1)
    );
    for c in &rep.checks {
        println!(
            "{} {}: measured {} expected {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            format_g17(c.measured),
            c.expected
        );
    }
    for f in &rep.files {
        println!("wrote {}", f.display());
    }
    if rep.passed() {
        Ok(())
    } else {
        let failed: Vec<String> = rep
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| {
                format!(
                    "{} = {} (expected {})",
                    c.name,
                    format_g17(c.measured),
                    c.expected
                )
            })
            .collect();
        Err(Failure::Band(failed.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Nodes { kind, n } => nodes(kind, *n),
        Command::Fit(s) => fit(s),
        Command::Pdf(s) => pdf(s),
        Command::Compare(s) => compare(s),
        Command::Sweep(s) => sweep(s),
        Command::Reproduce { figure, shared } => reproduce_cmd(figure, shared),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Band(m)) => {
            eprintln!("acceptance band violated: {m}");
            ExitCode::from(4)
        }
    }
}
