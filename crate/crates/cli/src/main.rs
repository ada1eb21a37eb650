//! `qwire`: spectra, single-run channel reports, figure-class sweeps and the
//! invariant suite for the thermalizing transfer chain.

mod commands;
mod config;
mod error;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{read_config_file, EngineChoice, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "qwire", version, about = "Thermalizing spin-chain wire: encodings, fidelities and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Single-particle energies and mode amplitudes
    Spectrum,
    /// Pauli transfer matrix, fidelity and populations for one configuration
    Fidelity,
    /// F_c − F_a over a (beta, gamma_tau) grid
    Sweep,
    /// Gamma_tau at which each scheme's fidelity crosses the target, per beta
    Threshold,
    /// Collision exponents a1, a2 (omega = inf, uniform rates)
    Fit,
    /// Run the invariant suite for N = 2..8
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Fidelity => "fidelity",
            Command::Sweep => "sweep",
            Command::Threshold => "threshold",
            Command::Fit => "fit",
            Command::Verify => "verify",
        }
    }
}

#[derive(Args, Default)]
struct Flags {
    /// key=value configuration file (command-line flags take precedence)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// a | c | both
    #[arg(long, global = true)]
    scheme: Option<String>,
    /// Chain length
    #[arg(long, global = true)]
    n: Option<String>,
    /// Coupling scale J (default pi)
    #[arg(long, global = true)]
    j: Option<String>,
    /// Zeeman term: a real number, Kpi, or inf
    #[arg(long, global = true)]
    omega: Option<String>,
    /// Inverse temperature (finite omega)
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Rescaled inverse temperature omega*beta (omega = inf)
    #[arg(long = "beta-prime", global = true, allow_hyphen_values = true)]
    beta_prime: Option<String>,
    /// uniform | quadratic | list:w1,w2,...
    #[arg(long, global = true)]
    rates: Option<String>,
    /// Rate scale
    #[arg(long, global = true)]
    gamma: Option<String>,
    /// Axes, e.g. beta=0:4:20,gamma_tau=0:1.5:20,gamma_t=log:0.01:0.1:12
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<String>,
    /// Seed for Haar-average sampling
    #[arg(long, global = true)]
    seed: Option<String>,
    /// rk4 | exact
    #[arg(long, global = true)]
    engine: Option<String>,
    /// Figure preset: fig1 .. fig6
    #[arg(long, global = true)]
    regime: Option<String>,
    /// Evolution time (default: the transfer time)
    #[arg(long, global = true)]
    time: Option<String>,
    /// Threshold fidelity (default 2/3)
    #[arg(long, global = true)]
    target: Option<String>,
    /// Samples for the Haar-average cross-check
    #[arg(long = "haar-samples", global = true)]
    haar_samples: Option<String>,
    /// Shift added to one diagonal entry of the single-particle Hamiltonian
    #[arg(long = "perturb-spectrum", global = true, hide = true, allow_hyphen_values = true)]
    perturb_spectrum: Option<f64>,
}

impl Flags {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("scheme", self.scheme.clone()),
            ("n", self.n.clone()),
            ("j", self.j.clone()),
            ("omega", self.omega.clone()),
            ("beta", self.beta.clone()),
            ("beta_prime", self.beta_prime.clone()),
            ("rates", self.rates.clone()),
            ("gamma", self.gamma.clone()),
            ("grid", self.grid.clone()),
            ("jobs", self.jobs.clone()),
            ("seed", self.seed.clone()),
            ("engine", self.engine.clone()),
            ("regime", self.regime.clone()),
            ("time", self.time.clone()),
            ("target", self.target.clone()),
            ("haar_samples", self.haar_samples.clone()),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))).collect()
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.flags.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let default_engine = match cli.command {
        Command::Fidelity => EngineChoice::Rk4,
        _ => EngineChoice::Exact,
    };
    let cfg = RunConfig::resolve(file, cli.flags.overrides(), default_engine)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    let perturb = cli.flags.perturb_spectrum.unwrap_or(0.0);
    let name = cli.command.name();
    match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, name, perturb),
        Command::Fidelity => commands::fidelity(&cfg, name),
        Command::Sweep => commands::sweep(&cfg, name),
        Command::Threshold => commands::threshold(&cfg, name),
        Command::Fit => commands::fit(&cfg, name),
        Command::Verify => commands::verify(&cfg, perturb),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwire: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
