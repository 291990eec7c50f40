use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use axang_core::controllers::{check_gains_axis_angle, check_shaping, Sigma};
use axang_core::dynamics::{BodyState, ConstantAttitude};
use axang_core::sim::{run_episode, SimError};
use axang_core::so3::AxisAngle;
use clap::{Parser, Subcommand};

use crate::config::{parse_controllers, BenchConfig, ConfigError};
use crate::figdata;
use crate::grid::{build_grid, cell_axis, GridError};
use crate::output::{
    self, trajectory_file, CellAxis, OutputError, RunRecord, AGGREGATE_FILE, EPISODES_FILE, RUN_FILE,
};
use crate::sweep::{aggregate, run_sweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAULT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "axang", version, about = "Attitude-control tumble-recovery benchmark")]
pub struct Cli {
    /// TOML config; defaults reproduce the published setup
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps (default: available cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,
    /// Comma-separated subset of tau_b,tau_g,tau_gamma
    #[arg(long, global = true, value_delimiter = ',')]
    pub controllers: Option<Vec<String>>,
    /// Comma-separated initial rotations in degrees
    #[arg(long, global = true, value_delimiter = ',')]
    pub theta0: Option<Vec<f64>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one initial condition per controller and write its trajectory
    Episode {
        /// Signed angular-rate magnitude along u0, rad/s
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<f64>,
        /// Fixed direction (1 or -1) instead of predictive selection
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<i8>,
    },
    /// Run the initial-condition grid and write per-cell statistics
    Sweep,
    /// Check the axis-angle gains and the shaping function
    Certify,
    /// Emit figure series from stored sweep and episode output
    Figdata {
        /// Directory holding sweep/episode output (default: --out)
        #[arg(long)]
        results: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("grid: {0}")]
    Grid(#[from] GridError),
    #[error("integration fault: {0}")]
    Fault(#[from] SimError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Grid(_) => EXIT_CONFIG,
            CliError::Fault(_) => EXIT_FAULT,
            CliError::Output(_) | CliError::Other(_) => EXIT_FAILURE,
        }
    }
}

fn load(cli: &Cli) -> Result<BenchConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn workers(cli: &Cli) -> usize {
    cli.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs the parsed command, writing human-readable output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Episode { omega, sigma } => episode(cli, *omega, *sigma, out),
        Command::Sweep => sweep(cli, out),
        Command::Certify => certify(cli, out),
        Command::Figdata { results } => figdata(cli, results.as_deref().unwrap_or(&cli.out), out),
    }
}

/// Parses `args`, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Other(e.to_string()))
}

fn episode(cli: &Cli, omega: Option<f64>, sigma: Option<i8>, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = load(cli)?;
    if let Some(list) = &cli.theta0 {
        match list.as_slice() {
            [t] => cfg.episode.theta0_deg = *t,
            _ => return Err(ConfigError::Invalid("episode takes a single --theta0".into()).into()),
        }
    }
    if let Some(c) = &cli.controllers {
        cfg.episode.controllers = c.clone();
    }
    if let Some(w) = omega {
        cfg.episode.omega_mag = w;
    }
    if sigma.is_some() {
        cfg.episode.sigma = sigma;
    }
    let setup = cfg.resolve()?;
    let laws = cfg.episode_controllers()?;
    let fixed = cfg.episode_sigma()?;
    let theta0 = cfg.episode.theta0_deg;
    if !(theta0 >= 0.0 && theta0 < 360.0) {
        return Err(ConfigError::Invalid(format!("episode.theta0_deg {theta0} outside [0, 360)")).into());
    }
    if !cfg.episode.omega_mag.is_finite() {
        return Err(ConfigError::Invalid("episode.omega_mag must be finite".into()).into());
    }
    let axis = cfg.episode_axis()?.unwrap_or_else(|| cell_axis(cfg.seed, theta0));
    let s0 = BodyState::from_axis_angle(
        &AxisAngle::new(axis, theta0.to_radians()).expect("unit axis"),
        axis * cfg.episode.omega_mag,
    );

    say(out, format_args!(
        "theta0 = {theta0} deg, omega0 = {} rad/s along u0 = [{:.6}, {:.6}, {:.6}]",
        cfg.episode.omega_mag, axis.x, axis.y, axis.z
    ))?;
    for law in laws {
        let t0 = Instant::now();
        let res = run_episode(&s0, &ConstantAttitude::default(), &setup.controller(law, fixed), &setup.inertia, &setup.sim)?;
        let elapsed = t0.elapsed();
        let path = cli.out.join(trajectory_file(law));
        output::write_trajectory(&path, &res.trajectory)?;
        let ts = res.settling_time.map_or("never".to_string(), |t| format!("{t:.4} s"));
        let sigma = res.sigma.map_or("n/a".to_string(), |s: Sigma| s.to_string());
        say(out, format_args!(
            "{:<9} sigma={sigma:<3} t_s={ts:<9} Lambda={:.4e} N*m*s  theta_e(0)={:.1} deg  [{:.0} ms] -> {}",
            law.name(),
            res.effort,
            res.initial_error_angle.to_degrees(),
            elapsed.as_secs_f64() * 1e3,
            path.display()
        ))?;
    }
    Ok(())
}

fn sweep(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = load(cli)?;
    if let Some(t) = &cli.theta0 {
        cfg.sweep.theta0_deg = t.clone();
    }
    if let Some(c) = &cli.controllers {
        cfg.sweep.controllers = c.clone();
    }
    let setup = cfg.resolve()?;
    let laws = parse_controllers(&cfg.sweep.controllers)?;
    let grid = build_grid(&cfg.sweep.theta0_deg, &cfg.sweep.omega_mag, &laws, cfg.seed)?;
    let n_workers = workers(cli);
    say(out, format_args!("running {} episodes on {n_workers} worker(s)", grid.len()))?;

    let t0 = Instant::now();
    let records = run_sweep(&grid, &setup, n_workers).map_err(|e| CliError::Other(e.to_string()))?;
    let elapsed = t0.elapsed().as_secs_f64();
    let rows = aggregate(&records);
    let n_failed = records.iter().filter(|r| r.outcome.is_err()).count();

    output::write_aggregate(&cli.out.join(AGGREGATE_FILE), &rows)?;
    output::write_episodes(&cli.out.join(EPISODES_FILE), &records)?;
    let run = RunRecord {
        tool: "axang".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: axang_core::VERSION.into(),
        seed: cfg.seed,
        config_sha256: cfg.hash(),
        sd_convention: "sample standard deviation (n - 1)".into(),
        n_episodes: records.len(),
        n_failed,
        controllers: laws.iter().map(|l| l.name().to_string()).collect(),
        theta0_deg: cfg.sweep.theta0_deg.clone(),
        omega_mag: cfg.sweep.omega_mag.clone(),
        cell_axes: cfg
            .sweep
            .theta0_deg
            .iter()
            .map(|&t| CellAxis { theta0_deg: t, u0: cell_axis(cfg.seed, t).to_array() })
            .collect(),
        config: cfg.clone(),
    };
    output::write_json(&cli.out.join(RUN_FILE), &run)?;

    say(out, format_args!("{:<10} {:>9} {:>10} {:>10} {:>12} {:>12} {:>6}", "controller", "theta0", "mean_ts", "sd_ts", "mean_lambda", "sd_lambda", "failed"))?;
    let opt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |x| format!("{x:.p$}"));
    let sci = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4e}"));
    for r in &rows {
        say(out, format_args!(
            "{:<10} {:>9} {:>10} {:>10} {:>12} {:>12} {:>6}",
            r.controller.name(),
            r.theta0_deg,
            opt(r.mean_ts, 4),
            opt(r.sd_ts, 4),
            sci(r.mean_lambda),
            sci(r.sd_lambda),
            r.n_failed
        ))?;
    }
    say(out, format_args!(
        "{} episodes, {n_failed} failed, {elapsed:.1} s; wrote {}",
        records.len(),
        cli.out.display()
    ))
}

fn certify(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(cli)?;
    let aa = &cfg.axis_angle;
    let cert = check_gains_axis_angle(&aa.gains()).map_err(ConfigError::from)?;
    let gamma = aa.gamma().map_err(ConfigError::from)?;
    let shaping = check_shaping(&gamma);
    let bound = 0.25 * aa.k_delta * aa.k_omega;

    say(out, format_args!("gains: k_alpha = {}, k_delta = {}, k_omega = {}", aa.k_alpha, aa.k_delta, aa.k_omega))?;
    say(out, format_args!("W = [[{}, {}],", cert.w[0][0], cert.w[0][1]))?;
    say(out, format_args!("     [{}, {}]]", cert.w[1][0], cert.w[1][1]))?;
    say(out, format_args!("det W = {}", cert.det_w))?;
    say(out, format_args!(
        "k_alpha > k_delta*k_omega/4: {} > {bound} is {}",
        aa.k_alpha,
        aa.k_alpha > bound
    ))?;
    say(out, format_args!("W positive definite: {}", cert.pd))?;
    say(out, format_args!("V quadratic-part eigenvalues: {}, {}", cert.v_eigenvalues[0], cert.v_eigenvalues[1]))?;
    say(out, format_args!(
        "gamma: gamma(0) = {}, strictly increasing: {}, sign condition: {}, max derivative error: {:.2e}, integral >= 0: {}",
        shaping.value_at_zero,
        shaping.strictly_increasing,
        shaping.sign_condition,
        shaping.max_derivative_error,
        shaping.integral_nonnegative
    ))?;
    let pass = cert.pd && shaping.passed();
    say(out, format_args!("verdict: {}", if pass { "PASS" } else { "FAIL" }))?;
    if pass {
        Ok(())
    } else {
        Err(ConfigError::Invalid("gains or shaping function not certified".into()).into())
    }
}

fn figdata(cli: &Cli, results: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(cli)?;
    let gamma = cfg.axis_angle.gamma().map_err(ConfigError::from)?;
    let written = figdata::emit(results, &cli.out, &gamma)?;
    for p in &written {
        say(out, format_args!("wrote {}", p.display()))?;
    }
    if written.len() == 1 {
        say(out, format_args!(
            "note: no {} or trajectory_*.csv in {}; run `sweep` and `episode` first",
            AGGREGATE_FILE,
            results.display()
        ))?;
    }
    Ok(())
}
