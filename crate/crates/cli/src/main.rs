use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gln_resonance_cli::{run, CliError, Experiment, ExperimentConfig, WeightShape};

#[derive(Parser)]
#[command(
    name = "glnres",
    version,
    about = "Short exponential sums of GL(n) coefficients against their resonance main terms, as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalised coefficients of the built-in form of rank n.
    Coeffs(Flags),
    /// Linearly twisted weighted sums against the resonant main term.
    Resonance(Flags),
    /// Sums twisted by e(n (dm)^{1/n}) against their main term.
    Nonlinear(Flags),
    /// Contour oracle of the Voronoi kernel against its leading form.
    Kernel(Flags),
    /// Large values of unweighted twisted and plain window sums.
    OmegaScan(Flags),
    /// Dual coefficients recovered from resonant sums.
    Recover(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum Weight {
    Bump,
    Plateau,
}

#[derive(Args)]
struct Flags {
    /// `key = value` file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    /// Window start; repeat for a grid.
    #[arg(long = "M")]
    m: Vec<f64>,
    /// Window length exponent, Δ = ⌊M^γ⌋.
    #[arg(long)]
    gamma: Option<f64>,
    /// Dual index; repeat for a grid.
    #[arg(long)]
    d: Vec<u64>,
    /// Kernel argument for `kernel`; repeat for a grid.
    #[arg(long)]
    y: Vec<f64>,
    #[arg(long, value_enum)]
    weight: Option<Weight>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// File caching the tau table between runs.
    #[arg(long)]
    tau_cache: Option<PathBuf>,
    /// For n = 2, fail unless every row matches the main-term phase.
    #[arg(long)]
    assume_maass_phase: bool,
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::Coeffs(f) => (Experiment::Coeffs, f),
            Command::Resonance(f) => (Experiment::Resonance, f),
            Command::Nonlinear(f) => (Experiment::Nonlinear, f),
            Command::Kernel(f) => (Experiment::Kernel, f),
            Command::OmegaScan(f) => (Experiment::OmegaScan, f),
            Command::Recover(f) => (Experiment::Recover, f),
        }
    }
}

fn config(experiment: Experiment, flags: Flags) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::from_file(path, experiment)?,
        None => ExperimentConfig::new(experiment),
    };
    cfg.experiment = experiment;
    if let Some(n) = flags.n {
        cfg.n_rank = n;
    }
    if !flags.m.is_empty() {
        cfg.m_list = flags.m;
    }
    if let Some(g) = flags.gamma {
        cfg.gamma = g;
    }
    if !flags.d.is_empty() {
        cfg.d_list = flags.d;
    }
    if !flags.y.is_empty() {
        cfg.y_list = flags.y;
    }
    if let Some(w) = flags.weight {
        cfg.weight = match w {
            Weight::Bump => WeightShape::Bump,
            Weight::Plateau => WeightShape::Plateau,
        };
    }
    if flags.out.is_some() {
        cfg.out = flags.out;
    }
    if let Some(t) = flags.threads {
        cfg.threads = t;
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if flags.tau_cache.is_some() {
        cfg.tau_cache = flags.tau_cache;
    }
    cfg.assume_maass_phase |= flags.assume_maass_phase;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (experiment, flags) = cli.command.split();
    let result = config(experiment, flags)
        .and_then(|cfg| run(&cfg).and_then(|report| report.write(cfg.out.as_deref())));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("glnres: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
