//! `evoclass` — simulate and analyze the co-evolution of classifier
//! institutions and strategic users.
//!
//! Exit codes: 0 success, 2 config/validation error, 3 numerical-instability
//! error, 4 I/O error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evoclass::{
    annotate_trajectory, basin_sizes, check_low_dominance, cycle_census, enumerate_fixed_points,
    integrate, load_config, sweep_basins, Error, PopulationState, Report, ReportFormat, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "evoclass",
    version,
    about = "Replicator-dynamics engine for strategic classification scenarios",
    after_help = "Parameters come from --config (TOML); omitted keys take the default \
                  parameter set (lambda=50, rho=10, b=50, c_F=1, c_I=5, p_G=0.5, r=1). \
                  Flags override config values."
)]
struct Cli {
    /// TOML config file with scenario and parameters.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format (default: csv for simulate/sweep, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for grid/census runs ("auto" or a count).
    #[arg(long, global = true, default_value = "auto")]
    threads: String,

    /// Seed override for the cycle census.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and emit it as a time series.
    Simulate(SimulateArgs),
    /// Enumerate fixed points with eigenvalues and classifications.
    Stability,
    /// Measure basin-of-attraction sizes over an initial-condition grid.
    Basins(BasinsArgs),
    /// Basin sizes over a (rho/lambda, r) parameter grid.
    Sweep(SweepArgs),
    /// Detect cycles from seeded random initial conditions.
    Cycles(CyclesArgs),
    /// Verify that the lenient boundary is dominated in the extended game.
    Dominance,
}

#[derive(Args)]
struct SimulateArgs {
    /// Initial fraction of Medium institutions.
    #[arg(long, default_value_t = 0.5)]
    x0: f64,
    /// Initial fraction of Good users playing NotAdapt.
    #[arg(long, default_value_t = 0.5)]
    yg0: f64,
    /// Initial fraction of Bad users playing Fake.
    #[arg(long, default_value_t = 0.5)]
    yb0: f64,
    #[arg(long, value_name = "TIME")]
    t_end: Option<f64>,
    #[arg(long, value_name = "STEP")]
    dt: Option<f64>,
    /// Record every n-th integration step.
    #[arg(long, value_name = "N")]
    record_every: Option<usize>,
    /// Append tp,tn,fp,fn,social_cost columns.
    #[arg(long)]
    metrics: bool,
}

#[derive(Args)]
struct BasinsArgs {
    /// Grid points per axis (n^3 initial conditions).
    #[arg(long, value_name = "N")]
    grid_n: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated rho/lambda ratios, e.g. 0.2,0.3,0.4.
    #[arg(long, value_name = "LIST")]
    ratios: String,
    /// Comma-separated institution rates, e.g. 1,2,5.
    #[arg(long, value_name = "LIST")]
    rates: String,
}

#[derive(Args)]
struct CyclesArgs {
    /// Number of random initial conditions.
    #[arg(long, value_name = "N")]
    n_random: Option<usize>,
    #[arg(long, value_name = "TIME")]
    t_end: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::InvalidParameters(_)
                | Error::InvalidArgument(_)
                | Error::UnsupportedScenario(_)
                | Error::ConfigParse { .. }
                | Error::ConfigValidation(_) => 2,
                Error::StepInstability { .. } => 3,
                Error::Io { .. } => 4,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    configure_threads(&cli.threads)?;

    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let params = config.params()?;
    let scenario = config.scenario()?;
    let seed = cli.seed.unwrap_or(config.seed);
    let out = cli.out.clone().or_else(|| config.out.clone());

    match cli.command {
        Command::Simulate(args) => {
            let state0 = PopulationState::new(args.x0, args.yg0, args.yb0)?;
            let t_end = args.t_end.unwrap_or(config.t_end);
            let dt = args.dt.unwrap_or(config.dt);
            let record_every = args.record_every.unwrap_or(config.record_every);
            let traj = integrate(&state0, &scenario, &params, t_end, dt, record_every)?;
            let format = cli.format.map(Into::into).unwrap_or(ReportFormat::Csv);
            if args.metrics {
                let annotated = annotate_trajectory(&traj);
                write_report(&Report::AnnotatedTrajectory(&annotated), format, &out)
            } else {
                write_report(&Report::Trajectory(&traj), format, &out)
            }
        }
        Command::Stability => {
            let points = enumerate_fixed_points(&scenario, &params);
            let format = cli.format.map(Into::into).unwrap_or(ReportFormat::Json);
            write_report(&Report::FixedPoints(&points), format, &out)
        }
        Command::Basins(args) => {
            let n = args.grid_n.unwrap_or(config.n_per_axis);
            let report = basin_sizes(&scenario, &params, n, config.t_end, config.dt)?;
            let format = cli.format.map(Into::into).unwrap_or(ReportFormat::Json);
            write_report(&Report::Basin(&report), format, &out)
        }
        Command::Sweep(args) => {
            let ratios = parse_list(&args.ratios, "--ratios")?;
            let rates = parse_list(&args.rates, "--rates")?;
            let report = sweep_basins(
                &scenario,
                &params,
                &ratios,
                &rates,
                config.n_per_axis,
                config.t_end,
                config.dt,
            )?;
            let format = cli.format.map(Into::into).unwrap_or(ReportFormat::Csv);
            write_report(&Report::Sweep(&report), format, &out)
        }
        Command::Cycles(args) => {
            let n_random = args.n_random.unwrap_or(config.n_random);
            let t_end = args.t_end.unwrap_or(50.0);
            let census = cycle_census(&scenario, &params, n_random, seed, t_end, config.dt)?;
            let format = cli.format.map(Into::into).unwrap_or(ReportFormat::Json);
            write_report(&Report::Census(&census), format, &out)
        }
        Command::Dominance => {
            let report = check_low_dominance(&scenario, &params)?;
            let format = cli.format.map(Into::into).unwrap_or(ReportFormat::Json);
            write_report(&Report::Dominance(&report), format, &out)
        }
    }
}

fn configure_threads(threads: &str) -> Result<(), Error> {
    if threads == "auto" {
        return Ok(());
    }
    let n: usize = threads
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("--threads expects \"auto\" or a count, got {threads:?}")))?;
    if n == 0 {
        return Err(Error::InvalidArgument("--threads must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("{flag}: {s:?} is not a number")))
        })
        .collect()
}

fn write_report(report: &Report, format: ReportFormat, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => evoclass::emit_report(report, format, path),
        None => {
            let bytes = evoclass::render_report(report, format);
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}
