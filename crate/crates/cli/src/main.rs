use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use snwit::commands::{self, cmd_bounds, cmd_coeffs, cmd_osc, cmd_witness};
use snwit::ensemble::{self, EnsembleConfig};
use snwit::io::{builtin, read_matrix, read_operator, read_state};
use snwit::CliError;
use snwit_core::qstate::{BipartiteState, MixingWeights};
use snwit_core::{CoefficientOptions, WitnessMethod};

#[derive(Debug, Parser)]
#[command(name = "snwit", version, about = "Schmidt-number witnesses from operator Schmidt coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// rho0, rho_family:k, maxmixed:d or maxent:d
    #[arg(long)]
    builtin: Option<String>,
    /// State file (JSON with dimA, dimB, matrix)
    #[arg(long)]
    input: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<BipartiteState, CliError> {
        match (&self.builtin, &self.input) {
            (Some(name), _) => builtin(name),
            (None, Some(path)) => read_state(path),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the operator Schmidt coefficients of a state
    Osc {
        #[command(flatten)]
        source: Source,
        /// Also write index,mu as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Witness coefficients lambda, theta, zeta, eta, P for order k
    Coeffs {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Also run the numeric maximiser when an exact value exists
        #[arg(long)]
        numeric: bool,
        /// Write the coefficients as a CSV row
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficients of the rho_family(2..=5) states as CSV
    Table1 {
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficients of seeded random mixed states, one CSV row per sample
    Ensemble {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long = "pure-count", default_value_t = 2000)]
        pure_count: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Worker threads; 0 uses every core. Output does not depend on it.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Mix states of Schmidt rank at most this instead of Haar pure states
        #[arg(long = "schmidt-rank")]
        schmidt_rank: Option<usize>,
        /// Flat-Dirichlet mixing weights instead of equal weights
        #[arg(long, conflicts_with = "schmidt_rank")]
        dirichlet: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perron root and the four row-sum bounds of a nonnegative matrix
    Bounds {
        /// Matrix file (JSON with rows, cols, entries)
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate c*I - X on a test state
    #[command(group(ArgGroup::new("target_src").required(true).args(["target", "target_builtin"])))]
    #[command(group(ArgGroup::new("test_src").required(true).args(["test", "test_builtin"])))]
    Witness {
        /// Target operator X (Hermitian; need not be a state)
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long = "target-builtin")]
        target_builtin: Option<String>,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long = "test-builtin")]
        test_builtin: Option<String>,
        /// Arrangement order; the witness targets Schmidt number k + 1
        #[arg(long)]
        k: usize,
        /// lambda, theta, zeta, eta, P, mu1 or fixed:<c>
        #[arg(long, default_value = "lambda", value_parser = parse_method)]
        method: WitnessMethod,
    },
}

fn parse_method(s: &str) -> Result<WitnessMethod, String> {
    s.parse().map_err(|e: snwit_core::Error| e.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn csv_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn either(
    path: &Option<PathBuf>,
    name: &Option<String>,
    load: fn(&Path) -> Result<BipartiteState, CliError>,
) -> Result<BipartiteState, CliError> {
    match (path, name) {
        (Some(p), _) => load(p),
        (None, Some(n)) => builtin(n),
        (None, None) => unreachable!("clap enforces one source"),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Osc { source, out } => {
            let state = source.load()?;
            let csv = out.as_deref().map(create).transpose()?;
            cmd_osc(&state, &mut stdout, csv)
        }
        Command::Coeffs { source, k, seed, restarts, numeric, out } => {
            let state = source.load()?;
            let csv = out.as_deref().map(create).transpose()?;
            let opts = CoefficientOptions { with_numeric: numeric, restarts };
            cmd_coeffs(&state, k, &opts, seed, &mut stdout, csv).map(drop)
        }
        Command::Table1 { restarts, out } => {
            drop(stdout);
            let rows = commands::table1(restarts)?;
            commands::write_table1(&rows, csv_sink(&out)?)
        }
        Command::Ensemble { k, dim, pure_count, samples, seed, restarts, threads, schmidt_rank, dirichlet, out } => {
            drop(stdout);
            let cfg = EnsembleConfig {
                k,
                dim,
                n_pure: pure_count,
                samples,
                seed,
                restarts,
                threads,
                schmidt_rank,
                weights: if dirichlet { MixingWeights::FlatDirichlet } else { MixingWeights::Equal },
            };
            // Open the output first so a bad path fails before the computation.
            let sink = csv_sink(&out)?;
            let records = ensemble::run_ensemble(&cfg)?;
            ensemble::write_csv(&records, sink)
        }
        Command::Bounds { input } => cmd_bounds(&read_matrix(&input)?, &mut stdout),
        Command::Witness { target, target_builtin, test, test_builtin, k, method } => {
            let x = either(&target, &target_builtin, read_operator)?;
            let rho = either(&test, &test_builtin, read_state)?;
            cmd_witness(&x, &rho, k, method, &mut stdout).map(drop)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed downstream pipe (`| head`) is not a failure.
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("snwit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
