//! `casimir`: zero-temperature Casimir pressures between layered stacks.
//!
//! Every subcommand is driven by a config file (see `configs/` in the
//! repository for annotated examples). Errors print exactly one line to
//! stderr; exit status is 0 on success, 1 on a computation or input error,
//! and 2 on bad command-line usage.

use std::error::Error as StdError;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use casimir::materials::{kk_to_imaginary_axis, load_optical_table, KkSettings, TableFormat};
use casimir::materials::{HighEndTail, LowEndExtrapolation};
use casimir::scenarios::{SolveVariable, SweepResult};
use casimir::{build_scenario, casimir_pressure, run_sweep, solve_for_target, SweepAxis};

use casimir_cli::config::{
    build_scenario_spec, build_sweep_spec, parse_config, resolve_named_material, ConfigError,
    RunConfig,
};
use casimir_cli::csv::{sci, write_sweep_csv, CsvError};
use casimir_cli::svg::{render_svg, PlotColumn, PlotSeries, PlotSpec, PlotError};

/// The only environment the tool reads: an override for the worker-thread
/// count, mainly for reproducibility checks.
const WORKERS_ENV: &str = "CASIMIR_WORKERS";

#[derive(Debug, Error)]
enum CliError {
    #[error("could not read config `{path}`: {source}")]
    ReadConfig {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("could not write `{path}`: {source}")]
    WriteOutput {
        path: String,
        source: std::io::Error,
    },
    #[error("{WORKERS_ENV} must be a positive integer, got `{value}`")]
    BadWorkerCount { value: String },
    #[error("could not configure the worker pool: {0}")]
    Pool(String),
    #[error("nothing to do: pass --csv or --svg, or set them in [output]")]
    NoOutput,
    #[error("{message}")]
    Invalid { message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error(transparent)]
    Scenario(#[from] casimir::ScenarioError),
    #[error(transparent)]
    Material(#[from] casimir::MaterialError),
}

#[derive(Parser)]
#[command(
    name = "casimir",
    version,
    about = "Zero-temperature Casimir pressure between planar layered stacks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pressure and reduction factor at a single separation.
    Force(ForceArgs),
    /// Sweep one axis and write CSV and/or SVG reports.
    Sweep(SweepArgs),
    /// Tabulate a named material's permittivity on the imaginary axis.
    Material(MaterialArgs),
    /// Transform a measured absorption table to the imaginary axis.
    Kk(KkArgs),
    /// Find the porosity or thickness that hits a target reduction factor.
    Solve(SolveArgs),
}

#[derive(Args)]
struct ForceArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Surface-to-surface separation in nm.
    #[arg(long)]
    gap_nm: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides the [output] section.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG destination; overrides the [output] section.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct MaterialArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Material name from the config (or a built-in: silica, gold, vacuum).
    #[arg(long)]
    name: String,
    /// Lowest photon energy in eV.
    #[arg(long, default_value_t = 1e-3)]
    xi_min_ev: f64,
    /// Highest photon energy in eV.
    #[arg(long, default_value_t = 1e3)]
    xi_max_ev: f64,
    /// Number of log-spaced samples.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormatArg {
    Eps2,
    Nk,
}

#[derive(Clone, Copy, ValueEnum)]
enum LowEndArg {
    Linear,
    Truncate,
}

#[derive(Clone, Copy, ValueEnum)]
enum HighEndArg {
    InverseCube,
    Truncate,
}

#[derive(Args)]
struct KkArgs {
    /// Absorption table: `energy_eV,eps2` or `energy_eV,n,k` lines.
    #[arg(long)]
    table: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormatArg::Eps2)]
    format: TableFormatArg,
    /// Continuation below the first tabulated energy.
    #[arg(long, value_enum, default_value_t = LowEndArg::Linear)]
    low_end: LowEndArg,
    /// Continuation above the last tabulated energy.
    #[arg(long, value_enum, default_value_t = HighEndArg::InverseCube)]
    high_end: HighEndArg,
    /// Lowest imaginary-axis energy in eV.
    #[arg(long, default_value_t = 1e-3)]
    xi_min_ev: f64,
    /// Highest imaginary-axis energy in eV.
    #[arg(long, default_value_t = 1e3)]
    xi_max_ev: f64,
    /// Number of log-spaced samples.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveVariableArg {
    Porosity,
    Thickness,
}

#[derive(Args)]
struct SolveArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    variable: SolveVariableArg,
    /// Reduction factor to hit, strictly between 0 and 1.
    #[arg(long)]
    target_fr: f64,
    /// Lower bracket endpoint (porosity, or thickness in nm).
    #[arg(long)]
    lo: f64,
    /// Upper bracket endpoint.
    #[arg(long)]
    hi: f64,
    /// Separation in nm; defaults to the config's sweep gap.
    #[arg(long)]
    gap_nm: Option<f64>,
    /// Absolute tolerance on the achieved reduction factor; the bisection
    /// also stops when the bracket collapses to floating-point width.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => match err.kind() {
            // Help and version go to stdout with status 0; clap handles both.
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => err.exit(),
            _ => {
                let message = err.to_string();
                let first = message
                    .lines()
                    .find(|line| !line.trim().is_empty())
                    .unwrap_or("error: invalid usage");
                eprintln!("{}", first.trim());
                std::process::exit(2);
            }
        },
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {}", error_chain(&err));
        std::process::exit(1);
    }
}

/// Flattens an error and its sources into one line.
fn error_chain(err: &dyn StdError) -> String {
    let mut text = err.to_string();
    let mut source = err.source();
    while let Some(cause) = source {
        let rendered = cause.to_string();
        // thiserror #[error("... {source}")] patterns already inline the
        // cause; skip duplicates so the line stays readable.
        if !text.contains(&rendered) {
            text.push_str(": ");
            text.push_str(&rendered);
        }
        source = cause.source();
    }
    text.replace('\n', " ")
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    match cli.command {
        Command::Force(args) => run_force(args),
        Command::Sweep(args) => run_sweep_command(args),
        Command::Material(args) => run_material(args),
        Command::Kk(args) => run_kk(args),
        Command::Solve(args) => run_solve(args),
    }
}

fn configure_workers() -> Result<(), CliError> {
    let value = match std::env::var(WORKERS_ENV) {
        Ok(value) => value,
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(raw)) => {
            return Err(CliError::BadWorkerCount {
                value: raw.to_string_lossy().into_owned(),
            })
        }
    };
    let workers: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::BadWorkerCount {
            value: value.clone(),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|err| CliError::Pool(err.to_string()))?;
    Ok(())
}

fn load_config(path: &Path) -> Result<(RunConfig, PathBuf), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.display().to_string(),
        source,
    })?;
    let config = parse_config(&text).map_err(|source| CliError::Config {
        path: path.display().to_string(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok((config, base_dir))
}

fn config_err(path: &Path) -> impl Fn(ConfigError) -> CliError + '_ {
    move |source| CliError::Config {
        path: path.display().to_string(),
        source,
    }
}

fn run_force(args: ForceArgs) -> Result<(), CliError> {
    let (config, base_dir) = load_config(&args.config)?;
    let spec = build_scenario_spec(&config, &base_dir).map_err(config_err(&args.config))?;
    let gap = build_scenario(&spec, args.gap_nm)?;
    let result = casimir_pressure(&gap, &config.quadrature).map_err(casimir::ScenarioError::from)?;
    println!("pressure_Pa = {}", sci(result.pressure_pa));
    println!("ideal_pressure_Pa = {}", sci(result.ideal_pressure_pa));
    println!("reduction_factor = {}", sci(result.reduction_factor));
    println!("rel_err_estimate = {}", sci(result.diagnostics.rel_err_estimate));
    println!(
        "quadrature_nodes = {} {}",
        result.diagnostics.xi_nodes, result.diagnostics.q_nodes
    );
    Ok(())
}

fn axis_label(axis: SweepAxis) -> (&'static str, bool) {
    match axis {
        SweepAxis::Separation => ("separation L (nm)", true),
        SweepAxis::Thickness => ("film thickness D (nm)", false),
        SweepAxis::Porosity => ("porosity", false),
    }
}

/// Renders into memory first so a failed render never leaves a truncated
/// file behind.
fn write_file<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
{
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    let io_err = |source| CliError::WriteOutput {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    fs::write(path, &bytes).map_err(io_err)?;
    Ok(())
}

fn run_sweep_command(args: SweepArgs) -> Result<(), CliError> {
    let (config, base_dir) = load_config(&args.config)?;
    let sweep = build_sweep_spec(&config, &base_dir).map_err(config_err(&args.config))?;
    // Input paths (tables) resolve against the config file; output paths
    // resolve against the working directory, like in any build tool.
    let csv_path = args.csv.or_else(|| config.output.csv.clone().map(PathBuf::from));
    let svg_path = args.svg.or_else(|| config.output.svg.clone().map(PathBuf::from));
    if csv_path.is_none() && svg_path.is_none() {
        return Err(CliError::NoOutput);
    }

    let result = run_sweep(&sweep)?;

    if let Some(path) = &csv_path {
        write_file(path, |out| Ok(write_sweep_csv(&result, out)?))?;
        println!("wrote {} ({} rows)", path.display(), result.rows.len());
    }
    if let Some(path) = &svg_path {
        let (label, log_x) = axis_label(result.axis);
        let plot = PlotSpec::reduction_plot(
            label,
            log_x,
            vec![PlotSeries {
                label: "reduction factor".into(),
                source: 0,
                column: PlotColumn::ReductionFactor,
            }],
        );
        let results: [&SweepResult; 1] = [&result];
        write_file(path, |out| Ok(render_svg(&results, &plot, out)?))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn write_permittivity_table<W: Write, E>(
    out: &mut W,
    xi_min_ev: f64,
    xi_max_ev: f64,
    points: usize,
    mut eval: E,
) -> Result<(), CliError>
where
    E: FnMut(f64) -> Result<f64, casimir::MaterialError>,
{
    let mut text = String::with_capacity(32 * (points + 1));
    text.push_str("xi_eV,eps\n");
    let step = if points > 1 {
        (xi_max_ev / xi_min_ev).ln() / (points as f64 - 1.0)
    } else {
        0.0
    };
    for i in 0..points {
        let xi = xi_min_ev * (step * i as f64).exp();
        let eps = eval(xi)?;
        text.push_str(&sci(xi));
        text.push(',');
        text.push_str(&sci(eps));
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Grid bounds shared by `material` and `kk`.
fn check_grid_request(xi_min_ev: f64, xi_max_ev: f64, points: usize) -> Result<(), CliError> {
    if !(xi_min_ev > 0.0 && xi_max_ev > xi_min_ev) || points < 2 {
        return Err(CliError::Invalid {
            message: "need 0 < --xi-min-ev < --xi-max-ev and --points >= 2".into(),
        });
    }
    Ok(())
}

fn emit<F>(out: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
{
    match out {
        Some(path) => write_file(path, write),
        None => {
            let mut bytes = Vec::new();
            write(&mut bytes)?;
            std::io::stdout().lock().write_all(&bytes)?;
            Ok(())
        }
    }
}

fn run_material(args: MaterialArgs) -> Result<(), CliError> {
    check_grid_request(args.xi_min_ev, args.xi_max_ev, args.points)?;
    let (config, base_dir) = load_config(&args.config)?;
    let model = resolve_named_material(&config, &base_dir, &args.name)
        .map_err(config_err(&args.config))?;
    emit(args.out.as_deref(), |out| {
        write_permittivity_table(out, args.xi_min_ev, args.xi_max_ev, args.points, |xi| {
            model.eval(xi)
        })
    })
}

fn run_kk(args: KkArgs) -> Result<(), CliError> {
    check_grid_request(args.xi_min_ev, args.xi_max_ev, args.points)?;
    let format = match args.format {
        TableFormatArg::Eps2 => TableFormat::Eps2,
        TableFormatArg::Nk => TableFormat::Nk,
    };
    let settings = KkSettings {
        low_end: match args.low_end {
            LowEndArg::Linear => LowEndExtrapolation::LinearToZero,
            LowEndArg::Truncate => LowEndExtrapolation::Truncate,
        },
        high_end: match args.high_end {
            HighEndArg::InverseCube => HighEndTail::InverseCube,
            HighEndArg::Truncate => HighEndTail::Truncate,
        },
    };
    let file = fs::File::open(&args.table).map_err(|source| CliError::ReadConfig {
        path: args.table.display().to_string(),
        source,
    })?;
    let table = load_optical_table(std::io::BufReader::new(file), format)?;
    emit(args.out.as_deref(), |out| {
        write_permittivity_table(out, args.xi_min_ev, args.xi_max_ev, args.points, |xi| {
            kk_to_imaginary_axis(&table, xi, &settings)
        })
    })
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let (config, base_dir) = load_config(&args.config)?;
    let spec = build_scenario_spec(&config, &base_dir).map_err(config_err(&args.config))?;
    let gap_nm = args.gap_nm.unwrap_or(config.sweep.gap_nm);
    let (variable, name) = match args.variable {
        SolveVariableArg::Porosity => (SolveVariable::Porosity, "porosity"),
        SolveVariableArg::Thickness => (SolveVariable::Thickness, "thickness_nm"),
    };
    let solution = solve_for_target(
        variable,
        args.target_fr,
        (args.lo, args.hi),
        &spec,
        gap_nm,
        &config.quadrature,
        args.tol,
    )?;
    println!("{name} = {}", sci(solution.value));
    println!("reduction_factor = {}", sci(solution.reduction_factor));
    println!("evaluations = {}", solution.evaluations);
    Ok(())
}
