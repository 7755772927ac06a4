//! Command-line front end for the synchrosqueezing pipeline.
//!
//! Subcommands: `simulate`, `analyze`, `bootstrap`, `threshold`. Every
//! seeded run is bit-reproducible and independent of `--jobs`. Exit
//! codes: 0 success, 2 configuration error (message names the field),
//! 3 numeric failure (message names the pipeline stage).

mod config;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ConfigFile, MapName, RunConfig, WindowName};

/// Failure classes mapped to exit codes 2 (config) and 3 (numeric).
#[derive(Debug)]
pub enum CliError {
    Config { field: String, msg: String },
    Stage {
        stage: &'static str,
        source: sstuq::Error,
    },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { field, msg } => write!(f, "config error: {field}: {msg}"),
            CliError::Stage { stage, source } => write!(f, "error at stage {stage}: {source}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Stage { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sstuq",
    version,
    about = "STFT synchrosqueezing with bootstrap uncertainty quantification"
)]
struct Cli {
    /// Base seed for simulation and bootstrap stages
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores); outputs never depend on this
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory, created if absent
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// key=value config file; explicit flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a simulated series (locally stationary noise or an
    /// amplitude/frequency-modulated signal) and write it as CSV
    Simulate(SimArgs),
    /// Run STFT, synchrosqueezing, ridge extraction, and reconstruction
    Analyze(PipeArgs),
    /// Bootstrap pointwise confidence bands for |SST| (optionally plus a
    /// noise threshold surface)
    Bootstrap(BootArgs),
    /// Estimate a noise threshold and apply it to the observed SST
    Threshold(BootArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SimModel {
    /// Time-varying AR(2) noise with a cosine envelope
    Null,
    /// Smooth random amplitude- and frequency-modulated cosine
    Ahm,
}

impl SimModel {
    fn as_str(self) -> &'static str {
        match self {
            SimModel::Null => "null",
            SimModel::Ahm => "ahm",
        }
    }
}

#[derive(Args)]
struct SimArgs {
    /// Which generator to run
    #[arg(value_enum)]
    model: SimModel,
    /// Series length
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct PipeArgs {
    /// Input series CSV: `time_s,value`, or a bare `value` column with --rate
    #[arg(long)]
    input: Option<PathBuf>,
    /// Simulate the input instead of reading a file
    #[arg(long, value_enum, conflicts_with = "input")]
    simulate: Option<SimModel>,
    /// Length of the simulated input
    #[arg(long)]
    n: Option<usize>,
    /// Sampling rate in Hz, required for single-column input files
    #[arg(long)]
    rate: Option<f64>,
    /// Window family
    #[arg(long, value_enum)]
    window: Option<WindowName>,
    /// Window half-support in seconds
    #[arg(long)]
    beta_s: Option<f64>,
    /// Relative standard deviation of the truncated Gaussian window
    #[arg(long)]
    gauss_s: Option<f64>,
    /// Top analysis frequency in Hz (default: Nyquist)
    #[arg(long)]
    c_max: Option<f64>,
    /// Analysis frequency bin count (default: max(32, n/3))
    #[arg(long)]
    bins: Option<usize>,
    /// Squeeze kernel bandwidth alpha (default: (delta_r/2)^2)
    #[arg(long)]
    sst_alpha: Option<f64>,
    /// Fixed suppression level nu (default: data-driven off-ridge quantile)
    #[arg(long)]
    nu: Option<f64>,
    /// Off-ridge |V| quantile for the data-driven nu
    #[arg(long)]
    nu_quantile: Option<f64>,
    /// Ridge smoothness penalty lambda
    #[arg(long)]
    lambda: Option<f64>,
    /// Reconstruction band halfwidth in Hz (default: 3 analysis bins)
    #[arg(long)]
    delta_r: Option<f64>,
    /// Also write PNG rasters
    #[arg(long)]
    emit_png: bool,
    /// Skip ridge extraction and reconstruction
    #[arg(long)]
    skip_recon: bool,
    /// Raster intensity map
    #[arg(long, value_enum)]
    raster_map: Option<MapName>,
}

#[derive(Args)]
struct BootArgs {
    #[command(flatten)]
    pipe: PipeArgs,
    /// tvAR order b of the residual noise model
    #[arg(long)]
    order_b: Option<usize>,
    /// Basis order m per lag
    #[arg(long)]
    basis_m: Option<usize>,
    /// Half window of the local innovation-scale estimate
    #[arg(long)]
    half_window: Option<usize>,
    /// Bootstrap replicate count M
    #[arg(long)]
    m_boot: Option<usize>,
    /// Band/threshold level alpha
    #[arg(long)]
    alpha_level: Option<f64>,
    /// Coarse time nodes for the bootstrap grid
    #[arg(long)]
    coarse_times: Option<usize>,
    /// Coarse frequency nodes for the bootstrap grid
    #[arg(long)]
    coarse_freqs: Option<usize>,
    /// Assume no deterministic component; model the input directly
    #[arg(long)]
    assume_null: bool,
    /// Also estimate and write the noise threshold surface
    #[arg(long)]
    emit_threshold: bool,
}

fn check(ok: bool, field: &str, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config {
            field: field.into(),
            msg: msg.into(),
        })
    }
}

/// Merges flags over the config file over defaults into a [`RunConfig`]
/// and validates every parameter domain, naming the offending field.
fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let (subcommand, sim, pipe, boot): (
        &'static str,
        Option<&SimArgs>,
        Option<&PipeArgs>,
        Option<&BootArgs>,
    ) = match &cli.cmd {
        Cmd::Simulate(s) => ("simulate", Some(s), None, None),
        Cmd::Analyze(p) => ("analyze", None, Some(p), None),
        Cmd::Bootstrap(b) => ("bootstrap", None, Some(&b.pipe), Some(b)),
        Cmd::Threshold(b) => ("threshold", None, Some(&b.pipe), Some(b)),
    };

    let seed = file.resolve(cli.seed, "seed")?.unwrap_or(0);
    let jobs = file.resolve(cli.jobs, "jobs")?.unwrap_or(0);
    let out_dir = file
        .resolve(cli.out_dir.clone(), "out-dir")?
        .unwrap_or_else(|| PathBuf::from("out"));

    let sim_model = match (sim, pipe) {
        (Some(s), _) => Some(s.model),
        (None, Some(p)) => p.simulate,
        _ => None,
    };
    let n_flag = sim.and_then(|s| s.n).or(pipe.and_then(|p| p.n));
    let sim_n = file.resolve(n_flag, "n")?.unwrap_or(config::DEFAULT_SIM_N);

    let rate_flag = file.resolve(pipe.and_then(|p| p.rate), "rate")?;
    if let Some(r) = rate_flag {
        check(r > 0.0 && r.is_finite(), "rate", "must be positive")?;
    }
    let window = file
        .resolve(pipe.and_then(|p| p.window), "window")?
        .unwrap_or(WindowName::Bump);
    let beta_s = file
        .resolve(pipe.and_then(|p| p.beta_s), "beta-s")?
        .unwrap_or(config::DEFAULT_BETA_S);
    check(beta_s > 0.0 && beta_s.is_finite(), "beta-s", "must be positive")?;
    let gauss_s = file
        .resolve(pipe.and_then(|p| p.gauss_s), "gauss-s")?
        .unwrap_or(config::DEFAULT_GAUSS_S);
    check(
        gauss_s > 0.0 && gauss_s <= 0.5,
        "gauss-s",
        "must lie in (0, 0.5]",
    )?;
    let c_max_flag = file.resolve(pipe.and_then(|p| p.c_max), "c-max")?;
    if let Some(c) = c_max_flag {
        check(c > 0.0 && c.is_finite(), "c-max", "must be positive")?;
    }
    let bins_flag = file.resolve(pipe.and_then(|p| p.bins), "bins")?;
    if let Some(d) = bins_flag {
        check(d >= 2, "bins", "need at least 2 analysis bins")?;
    }
    let sst_alpha_flag = file.resolve(pipe.and_then(|p| p.sst_alpha), "sst-alpha")?;
    if let Some(a) = sst_alpha_flag {
        check(a > 0.0 && a.is_finite(), "sst-alpha", "must be positive")?;
    }
    let nu_flag = file.resolve(pipe.and_then(|p| p.nu), "nu")?;
    if let Some(v) = nu_flag {
        check(v >= 0.0 && v.is_finite(), "nu", "must be non-negative")?;
    }
    let nu_quantile = file
        .resolve(pipe.and_then(|p| p.nu_quantile), "nu-quantile")?
        .unwrap_or(config::DEFAULT_NU_QUANTILE);
    check(
        nu_quantile > 0.0 && nu_quantile < 1.0,
        "nu-quantile",
        "must lie in (0, 1)",
    )?;
    let lambda = file
        .resolve(pipe.and_then(|p| p.lambda), "lambda")?
        .unwrap_or(config::DEFAULT_LAMBDA);
    check(lambda >= 0.0 && lambda.is_finite(), "lambda", "must be non-negative")?;
    let delta_r_flag = file.resolve(pipe.and_then(|p| p.delta_r), "delta-r")?;
    if let Some(d) = delta_r_flag {
        check(d > 0.0 && d.is_finite(), "delta-r", "must be positive")?;
    }
    let raster_map = file
        .resolve(pipe.and_then(|p| p.raster_map), "raster-map")?
        .unwrap_or(MapName::Log1p);

    let order_b = file
        .resolve(boot.and_then(|b| b.order_b), "order-b")?
        .unwrap_or(config::DEFAULT_ORDER_B);
    check(order_b >= 1, "order-b", "must be at least 1")?;
    let basis_m = file
        .resolve(boot.and_then(|b| b.basis_m), "basis-m")?
        .unwrap_or(config::DEFAULT_BASIS_M);
    check(basis_m >= 1, "basis-m", "must be at least 1")?;
    let half_window = file
        .resolve(boot.and_then(|b| b.half_window), "half-window")?
        .unwrap_or(config::DEFAULT_HALF_WINDOW);
    check(half_window >= 1, "half-window", "must be at least 1")?;
    let m_boot = file
        .resolve(boot.and_then(|b| b.m_boot), "m-boot")?
        .unwrap_or(config::DEFAULT_M_BOOT);
    if boot.is_some() {
        check(m_boot >= 40, "m-boot", "need at least 40 replicates")?;
    }
    let alpha_level = file
        .resolve(boot.and_then(|b| b.alpha_level), "alpha-level")?
        .unwrap_or(config::DEFAULT_ALPHA_LEVEL);
    check(
        alpha_level > 0.0 && alpha_level < 1.0,
        "alpha-level",
        "must lie in (0, 1)",
    )?;
    let coarse_times = file
        .resolve(boot.and_then(|b| b.coarse_times), "coarse-times")?
        .unwrap_or(config::DEFAULT_COARSE_NODES);
    let coarse_freqs = file
        .resolve(boot.and_then(|b| b.coarse_freqs), "coarse-freqs")?
        .unwrap_or(config::DEFAULT_COARSE_NODES);

    Ok(RunConfig {
        subcommand,
        seed,
        jobs,
        out_dir,
        input: pipe.and_then(|p| p.input.clone()),
        simulate: sim_model.map(SimModel::as_str),
        sim_n,
        rate_flag,
        window,
        beta_s,
        gauss_s,
        c_max_flag,
        bins_flag,
        sst_alpha_flag,
        nu_flag,
        nu_quantile,
        lambda,
        delta_r_flag,
        order_b,
        basis_m,
        half_window,
        m_boot,
        alpha_level,
        coarse_times,
        coarse_freqs,
        assume_null: boot.is_some_and(|b| b.assume_null),
        emit_png: pipe.is_some_and(|p| p.emit_png),
        emit_threshold: boot.is_some_and(|b| b.emit_threshold),
        skip_recon: pipe.is_some_and(|p| p.skip_recon),
        raster_map,
    })
}

#[cfg(feature = "parallel")]
fn init_jobs(jobs: usize) -> Result<(), CliError> {
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config {
                field: "jobs".into(),
                msg: e.to_string(),
            })?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_jobs(_jobs: usize) -> Result<(), CliError> {
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    init_jobs(cfg.jobs)?;
    match cfg.subcommand {
        "simulate" => run::cmd_simulate(&cfg),
        "analyze" => run::cmd_analyze(&cfg),
        "bootstrap" => run::cmd_bootstrap(&cfg),
        "threshold" => run::cmd_threshold(&cfg),
        other => unreachable!("unknown subcommand {other}"),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
