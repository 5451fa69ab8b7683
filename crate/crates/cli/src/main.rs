//! Command-line front end: single-point bound evaluation, raw outage
//! tails, Monte Carlo simulation, parameter sweeps (CSV), and the inverse
//! planner.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 numeric domain
//! error, 3 planner target infeasible.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use perbound::{
    estimate_per, minimize_bound, plan_parameters, preset, run_sweep, CodeParams, Error,
    Estimator, FreeParameter, LinkConfig, OutageModelKind, PlanQuery, PowerMode, Probability,
    SimSpec, SweepSpec,
};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "perbound",
    version,
    about = "Packet-error-rate bounds and link simulation for multichannel Rayleigh fading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the PER upper bound for one configuration (JSON output).
    Bound(BoundArgs),
    /// Evaluate one outage tail value Pr(Z_L < z).
    Outage(OutageArgs),
    /// Estimate the PER by seeded Monte Carlo (JSON output).
    Simulate(SimulateArgs),
    /// Run a parameter sweep and emit CSV.
    Sweep(SweepArgs),
    /// Find the smallest diversity order or SNR meeting a PER target (JSON output).
    Plan(PlanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Exact,
    Chernoff,
    Corrected,
    Asymptotic,
}

impl From<ModelArg> for OutageModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Exact => OutageModelKind::Exact,
            ModelArg::Chernoff => OutageModelKind::ChernoffU,
            ModelArg::Corrected => OutageModelKind::CorrectedB,
            ModelArg::Asymptotic => OutageModelKind::AsymptoticSeries,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Analytic,
    Bernoulli,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Analytic => Estimator::AnalyticAverage,
            EstimatorArg::Bernoulli => Estimator::Bernoulli,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FreeArg {
    MinBins,
    MinSnrDb,
}

#[derive(Clone, Copy, ValueEnum)]
enum PowerModeArg {
    PerBin,
    Total,
}

impl From<PowerModeArg> for PowerMode {
    fn from(p: PowerModeArg) -> Self {
        match p {
            PowerModeArg::PerBin => PowerMode::PerBinFixed,
            PowerModeArg::Total => PowerMode::TotalFixed,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct ConfigArgs {
    /// Codeword length in symbols.
    #[arg(long, default_value_t = 4096)]
    n: u32,
    /// Code rate, bits per symbol.
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Number of combined frequency/time bins.
    #[arg(long, default_value_t = 4)]
    bins: u32,
    /// Per-bin SNR in dB.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Mean per-branch channel power.
    #[arg(long, default_value_t = 1.0)]
    sigma_h2: f64,
}

impl ConfigArgs {
    fn link(&self) -> Result<LinkConfig, Error> {
        LinkConfig::new(self.bins, self.sigma_h2, self.snr_db)
    }

    fn code(&self) -> Result<CodeParams, Error> {
        CodeParams::new(self.n, self.rate)
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Outage tail model for the bound.
    #[arg(long, value_enum, default_value_t = ModelArg::Corrected)]
    model: ModelArg,
}

#[derive(Args)]
struct OutageArgs {
    /// Number of combined bins.
    #[arg(long, default_value_t = 4)]
    bins: u32,
    /// Normalized tail argument.
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    /// Tail model to evaluate.
    #[arg(long, value_enum, default_value_t = ModelArg::Exact)]
    model: ModelArg,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Number of Monte Carlo trials.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    /// RNG seed; fixed seed means bit-identical results.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker count; never affects the estimate.
    #[arg(long, default_value_t = 1)]
    shards: u32,
    /// Estimator variant.
    #[arg(long, value_enum, default_value_t = EstimatorArg::Analytic)]
    estimator: EstimatorArg,
}

#[derive(Args)]
struct SweepArgs {
    /// Built-in sweep: fig1..fig5.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<String>,
    /// JSON sweep spec file.
    #[arg(long)]
    spec: Option<std::path::PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Override the spec's simulation trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Override the spec's simulation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the spec's simulation shard count.
    #[arg(long)]
    shards: Option<u32>,
    /// Override the spec's estimator.
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    /// Override the spec's SNR interpretation when bins vary.
    #[arg(long, value_enum)]
    power_mode: Option<PowerModeArg>,
}

#[derive(Args)]
struct PlanArgs {
    /// Target packet error rate in (0, 1).
    #[arg(long)]
    target_per: f64,
    /// Which parameter to search.
    #[arg(long, value_enum)]
    free: FreeArg,
    /// Search range lower end (bins or dB).
    #[arg(long, allow_negative_numbers = true)]
    lo: f64,
    /// Search range upper end (bins or dB).
    #[arg(long, allow_negative_numbers = true)]
    hi: f64,
    #[command(flatten)]
    config: ConfigArgs,
    /// Outage tail model for the bound.
    #[arg(long, value_enum, default_value_t = ModelArg::Corrected)]
    model: ModelArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Overflow(_) | Error::Convergence(_) => 2,
        Error::InvalidConfig(_) | Error::Parse(_) => 1,
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Bound(args) => {
            let result = minimize_bound(&args.config.code()?, &args.config.link()?, args.model.into())?;
            println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Outage(args) => {
            let p = match args.model.into() {
                OutageModelKind::Exact => perbound::outage::outage_exact(args.bins, args.z)?,
                OutageModelKind::ChernoffU => perbound::outage::chernoff_bound(args.bins, args.z)?,
                OutageModelKind::CorrectedB => perbound::outage::corrected_bound(args.bins, args.z)?,
                OutageModelKind::AsymptoticSeries => {
                    perbound::outage::outage_series_leading(args.bins, args.z)?
                }
            };
            println!("{p}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => {
            let spec = SimSpec {
                link: args.config.link()?,
                code: args.config.code()?,
                trials: args.trials,
                seed: args.seed,
                estimator: args.estimator.into(),
                shards: args.shards,
            };
            let est = estimate_per(&spec)?;
            println!("{}", serde_json::to_string_pretty(&est).expect("serializable"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => run_sweep_command(args),
        Command::Plan(args) => {
            let query = PlanQuery {
                target_per: Probability::new(args.target_per)?,
                free: match args.free {
                    FreeArg::MinBins => FreeParameter::MinBins,
                    FreeArg::MinSnrDb => FreeParameter::MinSnrDb,
                },
                lo: args.lo,
                hi: args.hi,
                link: args.config.link()?,
                code: args.config.code()?,
                model: args.model.into(),
            };
            let outcome = plan_parameters(&query)?;
            println!("{}", serde_json::to_string_pretty(&outcome).expect("serializable"));
            if outcome.feasible {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn run_sweep_command(args: SweepArgs) -> Result<ExitCode, Error> {
    let mut spec: SweepSpec = if let Some(name) = &args.preset {
        preset(name)?
    } else {
        let path = args.spec.as_ref().expect("clap enforces preset|spec");
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad sweep spec: {e}")))?
    };
    if args.trials.is_some() {
        spec.sim.trials = args.trials;
    }
    if args.seed.is_some() {
        spec.sim.seed = args.seed;
    }
    if args.shards.is_some() {
        spec.sim.shards = args.shards;
    }
    if let Some(est) = args.estimator {
        spec.sim.estimator = Some(est.into());
    }
    if let Some(mode) = args.power_mode {
        spec.power_mode = mode.into();
    }

    let table = run_sweep(&spec)?;
    let csv = table.to_csv();
    match &args.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}
