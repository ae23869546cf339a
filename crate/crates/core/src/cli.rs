//! Command-line front end: config loading, subcommand dispatch and CSV
//! emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytic::{self, Region};
use crate::mc;
use crate::params::{db_to_linear, NetworkConfig, NetworkParams, TierParams};
use crate::specfun::QuadratureSpec;
use crate::sweep::{self, McConfig, Scheme, SearchConfig, ALL_SCHEMES};

/// Errors mapped to distinct exit codes: 2 config, 3 computation, 4 I/O.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Compute(m) | CliError::Io(m) => m,
        }
    }
}

impl From<sweep::SweepError> for CliError {
    fn from(e: sweep::SweepError) -> Self {
        match e {
            sweep::SweepError::Invalid(m) => CliError::Config(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<crate::specfun::QuadError> for CliError {
    fn from(e: crate::specfun::QuadError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<mc::McError> for CliError {
    fn from(e: mc::McError) -> Self {
        match e {
            mc::McError::Invalid(m) => CliError::Config(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "hetcov",
    about = "Two-tier cellular coverage probability with distance-based femtocell activation",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Network parameters come from exactly one source: a JSON config file or
/// the full set of inline flags.
#[derive(Args, Debug)]
struct NetworkSource {
    /// JSON config file (keys: macro_tx_dbm, femto_tx_dbm,
    /// macro_density_per_km2, femto_density_per_km2, alpha,
    /// pathloss_const_db, noise_dbm, inner_radius_m)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    macro_tx_dbm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    femto_tx_dbm: Option<f64>,
    #[arg(long)]
    macro_density_per_km2: Option<f64>,
    #[arg(long)]
    femto_density_per_km2: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pathloss_const_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    noise_dbm: Option<f64>,
    #[arg(long)]
    inner_radius_m: Option<f64>,
}

impl NetworkSource {
    fn resolve(&self) -> Result<NetworkParams, CliError> {
        let inline = [
            self.macro_tx_dbm,
            self.femto_tx_dbm,
            self.macro_density_per_km2,
            self.femto_density_per_km2,
            self.alpha,
            self.pathloss_const_db,
            self.noise_dbm,
            self.inner_radius_m,
        ];
        match (&self.config, inline.iter().any(Option::is_some)) {
            (Some(path), false) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Io(format!("cannot read config {}: {e}", path.display()))
                })?;
                NetworkConfig::from_json(&text)
                    .and_then(NetworkConfig::into_params)
                    .map_err(|e| CliError::Config(e.to_string()))
            }
            (Some(_), true) => Err(CliError::Config(
                "give either --config or inline network flags, not both".into(),
            )),
            (None, _) => {
                if inline.iter().all(Option::is_some) {
                    NetworkParams::new(
                        TierParams {
                            tx_power_dbm: self.macro_tx_dbm.unwrap(),
                            density_per_m2: self.macro_density_per_km2.unwrap() / 1e6,
                        },
                        TierParams {
                            tx_power_dbm: self.femto_tx_dbm.unwrap(),
                            density_per_m2: self.femto_density_per_km2.unwrap() / 1e6,
                        },
                        self.alpha.unwrap(),
                        self.pathloss_const_db.unwrap(),
                        self.noise_dbm.unwrap(),
                        self.inner_radius_m.unwrap(),
                    )
                    .map_err(|e| CliError::Config(e.to_string()))
                } else {
                    Err(CliError::Config(
                        "network parameters missing: pass --config or all inline flags".into(),
                    ))
                }
            }
        }
    }
}

#[derive(Args, Debug)]
struct ThresholdGrid {
    /// Lowest SINR threshold in dB
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    t_min: f64,
    /// Highest SINR threshold in dB
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    t_max: f64,
    /// Threshold step in dB
    #[arg(long, default_value_t = 1.0)]
    t_step: f64,
}

impl ThresholdGrid {
    fn build(&self) -> Result<Vec<f64>, CliError> {
        build_grid(self.t_min, self.t_max, self.t_step, "threshold")
    }
}

#[derive(Args, Debug)]
struct RadiusGrid {
    /// Smallest inner radius in meters
    #[arg(long, default_value_t = 0.0)]
    d_min: f64,
    /// Largest inner radius in meters
    #[arg(long, default_value_t = 1000.0)]
    d_max: f64,
    /// Radius step in meters
    #[arg(long, default_value_t = 25.0)]
    d_step: f64,
}

impl RadiusGrid {
    fn build(&self) -> Result<Vec<f64>, CliError> {
        build_grid(self.d_min, self.d_max, self.d_step, "radius")
    }
}

fn build_grid(min: f64, max: f64, step: f64, name: &str) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !min.is_finite() || !max.is_finite() || max < min {
        return Err(CliError::Config(format!(
            "invalid {name} grid: min {min}, max {max}, step {step}"
        )));
    }
    let n = ((max - min) / step).round() as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| min + i as f64 * step)
        .filter(|v| *v <= max + step * 1e-9)
        .collect();
    if grid.is_empty() {
        return Err(CliError::Config(format!("{name} grid is empty")));
    }
    Ok(grid)
}

const DEFAULT_SEED: u64 = 42;

fn resolve_seed(seed: Option<u64>) -> u64 {
    let s = seed.unwrap_or(DEFAULT_SEED);
    eprintln!("seed: {s}");
    s
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic coverage/CDF curves over an SINR threshold grid
    Analytic {
        #[command(flatten)]
        network: NetworkSource,
        #[command(flatten)]
        grid: ThresholdGrid,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo coverage estimates over an SINR threshold grid
    Simulate {
        #[command(flatten)]
        network: NetworkSource,
        #[command(flatten)]
        grid: ThresholdGrid,
        #[arg(long)]
        out: PathBuf,
        /// RNG seed (default 42, echoed to stderr)
        #[arg(long)]
        seed: Option<u64>,
        /// Number of realizations
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Analytic coverage versus inner-region radius at one threshold
    SweepD {
        #[command(flatten)]
        network: NetworkSource,
        #[command(flatten)]
        grid: RadiusGrid,
        /// SINR threshold in dB
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t_db: f64,
        #[arg(long)]
        out: PathBuf,
        /// Attach a Monte Carlo series
        #[arg(long)]
        mc: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Optimal inner-region radius per SINR threshold
    OptimalD {
        #[command(flatten)]
        network: NetworkSource,
        #[command(flatten)]
        grid: ThresholdGrid,
        #[arg(long)]
        out: PathBuf,
    },
    /// Three-scheme comparison table (analytic and Monte Carlo)
    Compare {
        #[command(flatten)]
        network: NetworkSource,
        /// SINR threshold in dB
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t_db: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    /// Dump one realization's BS locations and activation states
    RegionMap {
        #[command(flatten)]
        network: NetworkSource,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic { network, grid, out } => cmd_analytic(&network, &grid, &out),
        Command::Simulate {
            network,
            grid,
            out,
            seed,
            n,
        } => cmd_simulate(&network, &grid, &out, seed, n),
        Command::SweepD {
            network,
            grid,
            t_db,
            out,
            mc,
            seed,
            n,
        } => cmd_sweep_d(&network, &grid, t_db, &out, mc, seed, n),
        Command::OptimalD { network, grid, out } => cmd_optimal_d(&network, &grid, &out),
        Command::Compare {
            network,
            t_db,
            out,
            seed,
            n,
        } => cmd_compare(&network, t_db, &out, seed, n),
        Command::RegionMap { network, out, seed } => cmd_region_map(&network, &out, seed),
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn cmd_analytic(network: &NetworkSource, grid: &ThresholdGrid, out: &Path) -> Result<(), CliError> {
    let p = network.resolve()?;
    let t_grid = grid.build()?;
    let spec = QuadratureSpec::default();

    let mut csv = String::from("threshold_db,region,scheme,coverage,cdf\n");
    for &t_db in &t_grid {
        let t_lin = db_to_linear(t_db);
        for scheme in &ALL_SCHEMES {
            let sp = scheme.apply(&p);
            let d = sp.derive();
            for region in [Region::Inner, Region::Outer, Region::Overall] {
                let value = if *scheme == Scheme::CoverageOriented && sp.inner_radius_m > 0.0 {
                    match region {
                        Region::Inner => analytic::coverage_inner(t_lin, &d, &spec)?,
                        Region::Outer => analytic::coverage_outer(t_lin, &d, &spec)?,
                        Region::Overall => analytic::coverage_overall(t_lin, &d, &spec)?,
                    }
                } else {
                    // No inner region: conditional and overall coverage
                    // coincide with the uniform value.
                    analytic::coverage_uniform(t_lin, &d, &spec)?
                };
                let _ = writeln!(
                    csv,
                    "{t_db},{},{},{value:.6},{:.6}",
                    region.as_str(),
                    scheme.as_str(),
                    1.0 - value
                );
            }
        }
    }
    write_file(out, &csv)
}

fn cmd_simulate(
    network: &NetworkSource,
    grid: &ThresholdGrid,
    out: &Path,
    seed: Option<u64>,
    n: usize,
) -> Result<(), CliError> {
    let p = network.resolve()?;
    let t_grid = grid.build()?;
    let seed = resolve_seed(seed);
    let estimates = mc::estimate_coverage(&p, &t_grid, n, seed)?;

    let mut csv = String::from("threshold_db,region,coverage,std_err,n_samples\n");
    for e in &estimates {
        let mut row = |region: Region, est: &mc::McEstimate| {
            let _ = writeln!(
                csv,
                "{},{},{:.6},{:.6},{}",
                e.threshold_db,
                region.as_str(),
                est.value,
                est.std_err,
                est.n_samples
            );
        };
        row(Region::Overall, &e.overall);
        if let Some(est) = &e.inner {
            row(Region::Inner, est);
        }
        if let Some(est) = &e.outer {
            row(Region::Outer, est);
        }
    }
    write_file(out, &csv)
}

fn sweep_to_csv(res: &sweep::SweepResult) -> String {
    let mut csv = String::from("axis,series,value,std_err\n");
    for series in &res.series {
        for (axis, point) in res.axis_values.iter().zip(&series.points) {
            let _ = writeln!(
                csv,
                "{axis},{},{:.6},{:.6}",
                series.name, point.value, point.std_err
            );
        }
    }
    csv
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep_d(
    network: &NetworkSource,
    grid: &RadiusGrid,
    t_db: f64,
    out: &Path,
    mc: bool,
    seed: Option<u64>,
    n: usize,
) -> Result<(), CliError> {
    let p = network.resolve()?;
    let d_grid = grid.build()?;
    let mc_cfg = mc.then(|| McConfig {
        n_realizations: n,
        base_seed: resolve_seed(seed),
    });
    let res = sweep::sweep_d(&p, &d_grid, t_db, mc_cfg.as_ref())?;
    write_file(out, &sweep_to_csv(&res))
}

fn cmd_optimal_d(network: &NetworkSource, grid: &ThresholdGrid, out: &Path) -> Result<(), CliError> {
    let p = network.resolve()?;
    let t_grid = grid.build()?;
    let cfg = SearchConfig::for_params(&p);

    let mut csv = String::from("threshold_db,d_star_m,coverage,boundary\n");
    for &t_db in &t_grid {
        let opt = sweep::optimal_d(&p, t_db, &cfg)?;
        let _ = writeln!(
            csv,
            "{t_db},{:.3},{:.6},{}",
            opt.d_star_m, opt.coverage_at_star, opt.boundary
        );
    }
    write_file(out, &csv)
}

fn cmd_compare(
    network: &NetworkSource,
    t_db: f64,
    out: &Path,
    seed: Option<u64>,
    n: usize,
) -> Result<(), CliError> {
    let p = network.resolve()?;
    let mc_cfg = McConfig {
        n_realizations: n,
        base_seed: resolve_seed(seed),
    };
    let rows = sweep::compare_schemes(&p, t_db, &mc_cfg)?;

    let mut csv = String::from("scheme,analytic,mc,mc_std_err\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{:.6},{:.6},{:.6}",
            r.scheme.as_str(),
            r.analytic,
            r.mc_value,
            r.mc_std_err
        );
    }
    write_file(out, &csv)
}

fn cmd_region_map(network: &NetworkSource, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let p = network.resolve()?;
    let seed = resolve_seed(seed);
    let real = mc::realization_for_map(&p, seed);

    let mut csv = String::from("kind,x_m,y_m\n");
    let _ = writeln!(csv, "origin,0.000,0.000");
    for pt in &real.macro_pattern.points {
        let _ = writeln!(csv, "macro,{:.3},{:.3}", pt[0], pt[1]);
    }
    for (pt, active) in real.femto_pattern.points.iter().zip(&real.femto_active) {
        let kind = if *active { "femto_active" } else { "femto_inactive" };
        let _ = writeln!(csv, "{kind},{:.3},{:.3}", pt[0], pt[1]);
    }
    write_file(out, &csv)
}
