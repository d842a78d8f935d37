use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use blocksvd::io::{coeffs_from_json, report_to_json};
use blocksvd::sim::{
    concentration_diag, monte_carlo, rate_slope, ExperimentConfig, NoiseMode, Problem, ProblemSpec, RatePoint,
    SampleSize, SeedSpec,
};
use blocksvd::sphere::{synthesize, SpherePoint, SphericalCoeffs};
use blocksvd::torus::synthesize_1d;
use blocksvd::{gaussian_bump_coeffs, power_law_signal, Error, TorusCoeffs};
use clap::{Args, Parser, Subcommand};

/// δ values of the reference sphere table.
const TABLE_DELTAS: [f64; 5] = [0.0, 1e-3, 3e-3, 5e-3, 1e-2];

#[derive(Parser)]
#[command(name = "blocksvd", version, about = "Blockwise-SVD deconvolution with a noisy operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one replicate and print the estimator report as JSON.
    Simulate {
        #[command(flatten)]
        overrides: Overrides,
        /// Replicate index used to derive the noise stream.
        #[arg(long, default_value_t = 0)]
        replicate: u64,
    },
    /// Monte-Carlo risk over the δ grid as CSV (delta,mean,std,replicates).
    Mc {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Least-squares slope of log risk against log δ from a CSV file.
    Slope {
        /// CSV with a `delta` column and a `risk` or `mean` column.
        input: PathBuf,
    },
    /// Mean error, spread and ratio to δ = 0 for the spherical Laplace model.
    SphereTable {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluate a function from its coefficients on a grid, as CSV.
    Synth {
        #[command(subcommand)]
        domain: SynthDomain,
    },
    /// Concentration summaries of scaled Gaussian block norms, as JSON.
    Diag {
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SynthDomain {
    /// Columns theta,phi,value. Defaults to the reference Gaussian bump.
    Sphere {
        /// Coefficient document of a spherical structure.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        l_max: usize,
        #[arg(long, default_value_t = 64)]
        n_theta: usize,
        #[arg(long, default_value_t = 128)]
        n_phi: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Columns x,value on `[0, 1)`. Defaults to the power-law signal.
    Torus {
        /// Coefficient document of a circular structure with d = 1.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        k_max: usize,
        #[arg(long, default_value_t = 5.0)]
        s_exponent: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// One or more comma-separated noise levels replacing the δ grid.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Sample size; `inf` removes the signal noise.
    #[arg(long)]
    n: Option<SampleSize>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseMode>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_noise(s: &str) -> Result<NoiseMode, String> {
    match s {
        "real" => Ok(NoiseMode::Real),
        "complex" => Ok(NoiseMode::Complex),
        _ => Err(format!("unknown noise mode {s:?} (real, complex)")),
    }
}

impl Overrides {
    fn resolve(&self, default: impl FnOnce() -> ExperimentConfig) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json(&read(path)?)?,
            None => default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(r) = self.replicates {
            cfg.replicates = r;
        }
        if let Some(d) = &self.delta {
            cfg.delta_grid = d.clone();
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(nu) = self.nu {
            cfg.problem = cfg.problem.with_nu(nu)?;
        }
        if let Some(l) = self.lambda0 {
            cfg.lambda0 = l;
        }
        if let Some(m) = self.mu0 {
            cfg.mu0 = m;
        }
        if let Some(mode) = self.noise {
            cfg.noise = mode;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_circular() -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSpec::CircularPowerLaw { s_exponent: 5.0, nu: 1.0, k_max: 1000 },
        delta_grid: blocksvd::sim::log_grid(1e-4, 1e-2, 6),
        n: SampleSize::INFINITE,
        replicates: 200,
        lambda0: 1.0,
        mu0: 0.0,
        l_override: None,
        noise: NoiseMode::default(),
        master_seed: 0,
    }
}

fn default_sphere_table() -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSpec::SphericalLaplace { l_max: 30 },
        delta_grid: TABLE_DELTAS.to_vec(),
        n: SampleSize(1e8),
        replicates: 300,
        lambda0: 1.0,
        mu0: 1.0,
        l_override: None,
        noise: NoiseMode::default(),
        master_seed: 0,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())).into())
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> anyhow::Result<R> {
    match threads {
        None => Ok(f()),
        Some(0) => bail!(Error::Config("threads must be positive".into())),
        Some(t) => Ok(rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(f)),
    }
}

fn read_rate_points(text: &str) -> anyhow::Result<Vec<RatePoint>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> =
        lines.next().ok_or_else(|| Error::Config("empty CSV".into()))?.split(',').map(str::trim).collect();
    let col = |names: &[&str]| header.iter().position(|h| names.contains(h));
    let (Some(di), Some(ri)) = (col(&["delta"]), col(&["risk", "mean"])) else {
        bail!(Error::Config("CSV needs a delta column and a risk or mean column".into()));
    };
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |j: usize| -> anyhow::Result<f64> {
                fields
                    .get(j)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Config(format!("line {}: bad number", i + 2)).into())
            };
            Ok((get(di)?, get(ri)?))
        })
        .filter(|p| !matches!(p, Ok((d, _)) if *d == 0.0))
        .map(|p| p.and_then(|(d, r)| Ok(RatePoint::new(d, r)?)))
        .collect()
}

fn sphere_table_csv(cfg: &ExperimentConfig, threads: Option<usize>) -> anyhow::Result<String> {
    let summary = monte_carlo::<f64>(cfg, threads)?;
    let base = summary.rows.iter().find(|r| r.delta == 0.0).map(|r| r.mean);
    let mut out = String::from("row");
    for r in &summary.rows {
        out.push_str(&format!(",{}", r.delta));
    }
    out.push('\n');
    let mut line = |name: &str, value: &dyn Fn(&blocksvd::sim::RiskRow) -> f64| {
        out.push_str(name);
        for r in &summary.rows {
            out.push_str(&format!(",{}", value(r)));
        }
        out.push('\n');
    };
    line("mean_error", &|r| r.mean);
    line("std_dev", &|r| r.std);
    if let Some(b) = base {
        line("ratio_to_delta0", &|r| r.mean / b);
    }
    Ok(out)
}

fn synth_sphere(coeffs: Option<&Path>, l_max: usize, n_theta: usize, n_phi: usize) -> anyhow::Result<String> {
    if n_theta < 2 || n_phi == 0 {
        bail!(Error::Config("grid needs n_theta >= 2 and n_phi >= 1".into()));
    }
    let f = match coeffs {
        Some(path) => SphericalCoeffs::new(coeffs_from_json::<f64>(&read(path)?)?, true)?,
        None => gaussian_bump_coeffs::<f64>(l_max)?,
    };
    let pi = std::f64::consts::PI;
    let grid: Vec<SpherePoint<f64>> = (0..n_theta)
        .flat_map(|i| {
            (0..n_phi).map(move |j| SpherePoint {
                theta: pi * i as f64 / (n_theta - 1) as f64,
                phi: 2.0 * pi * j as f64 / n_phi as f64,
            })
        })
        .collect();
    let values = synthesize(&f, &grid)?;
    let mut out = String::from("theta,phi,value\n");
    for (p, v) in grid.iter().zip(values) {
        out.push_str(&format!("{},{},{}\n", p.theta, p.phi, v));
    }
    Ok(out)
}

fn synth_torus(coeffs: Option<&Path>, k_max: usize, s: f64, grid: usize) -> anyhow::Result<String> {
    let f = match coeffs {
        Some(path) => TorusCoeffs::new(coeffs_from_json::<f64>(&read(path)?)?, true)?,
        None => power_law_signal(s, k_max)?,
    };
    let values = synthesize_1d(&f, grid)?;
    let mut out = String::from("x,value\n");
    for (j, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", j as f64 / grid as f64, v));
    }
    Ok(out)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { overrides, replicate } => {
            let cfg = overrides.resolve(default_circular)?;
            let delta = cfg.delta_grid[0];
            let problem = Problem::<f64>::new(&cfg)?;
            let report = problem.estimate(delta, &SeedSpec::new(cfg.master_seed, replicate))?;
            emit(overrides.out.as_deref(), &(report_to_json(&report)? + "\n"))
        }
        Command::Mc { overrides } => {
            let cfg = overrides.resolve(default_circular)?;
            let summary = monte_carlo::<f64>(&cfg, overrides.threads)?;
            emit(overrides.out.as_deref(), &summary.to_csv())
        }
        Command::Slope { input } => {
            let points = read_rate_points(&read(&input)?)?;
            println!("{}", rate_slope(&points)?);
            Ok(())
        }
        Command::SphereTable { overrides } => {
            let cfg = overrides.resolve(default_sphere_table)?;
            emit(overrides.out.as_deref(), &sphere_table_csv(&cfg, overrides.threads)?)
        }
        Command::Synth { domain } => match domain {
            SynthDomain::Sphere { coeffs, l_max, n_theta, n_phi, out } => {
                emit(out.as_deref(), &synth_sphere(coeffs.as_deref(), l_max, n_theta, n_phi)?)
            }
            SynthDomain::Torus { coeffs, k_max, s_exponent, grid, out } => {
                emit(out.as_deref(), &synth_torus(coeffs.as_deref(), k_max, s_exponent, grid)?)
            }
        },
        Command::Diag { size, trials, seed, threads, out } => {
            let summary = with_threads(threads, || concentration_diag(size, trials, seed))??;
            emit(out.as_deref(), &(serde_json::to_string_pretty(&summary)? + "\n"))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(_) => 2,
        None => 2,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
