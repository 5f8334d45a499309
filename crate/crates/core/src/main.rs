use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdisp::cli::{self, Format, Level, RunOptions, RunRecord, StateSpec};
use qdisp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qdisp",
    version,
    about = "Joint displacement estimation: reproduction and analysis tool"
)]
struct Cli {
    /// Fock-space truncation; each command picks a default when omitted.
    #[arg(long, global = true)]
    dim: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,

    /// Write the record here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Promote failed closed-form cross-checks to errors.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce one of the reference experiments.
    #[command(subcommand)]
    Repro(Repro),
    /// Build a pure probe with the given covariance matrix.
    Purify {
        /// Covariance entries xx,xp,px,pp.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, required = true)]
        sigma: Vec<f64>,
        /// Fock level of the seed superposition.
        #[arg(long)]
        n_fock: Option<usize>,
    },
    /// Analyze a probe described by a JSON state spec file.
    Analyze { file: PathBuf },
    /// Run the cross-validation suite.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Bias one reference value; the suite must then fail.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Subcommand)]
enum Repro {
    /// Fock ladder |0>..|n_max>.
    Fock {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Balanced mixture of two orthogonally squeezed vacua.
    SqueezedMixture {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        r: Vec<f64>,
    },
    /// Vacuum / single-photon mixtures.
    VacuumOne(LambdaGrid),
    /// Photon-added thermal states.
    PhotonAddedThermal {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        lambda: Vec<f64>,
    },
}

#[derive(Args)]
struct LambdaGrid {
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "points")]
    lambda: Vec<f64>,
    /// Uniform grid on [0, 1].
    #[arg(long, default_value_t = 21)]
    points: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn run(cli: &Cli) -> Result<RunRecord> {
    let opts = RunOptions { strict: cli.strict };
    let dim = cli.dim;
    match &cli.command {
        Command::Repro(Repro::Fock { n_max }) => cli::repro_fock(*n_max, dim, &opts),
        Command::Repro(Repro::SqueezedMixture { r }) => {
            let grid = if r.is_empty() {
                cli::DEFAULT_SQUEEZE_GRID.to_vec()
            } else {
                r.clone()
            };
            cli::repro_squeezed_mixture(&grid, dim, &opts)
        }
        Command::Repro(Repro::VacuumOne(g)) => {
            let grid = if g.lambda.is_empty() {
                cli::uniform_grid(g.points)
            } else {
                g.lambda.clone()
            };
            cli::repro_vacuum_one(&grid, dim, &opts)
        }
        Command::Repro(Repro::PhotonAddedThermal { lambda }) => {
            let grid = if lambda.is_empty() {
                (1..=9).map(|k| k as f64 / 10.0).collect()
            } else {
                lambda.clone()
            };
            cli::repro_photon_added_thermal(&grid, dim, &opts)
        }
        Command::Purify { sigma, n_fock } => cli::purify(sigma, dim, *n_fock, &opts),
        Command::Analyze { file } => {
            let spec = read_spec(file)?;
            cli::analyze_spec(&spec, dim, &opts)
        }
        Command::Validate { level, inject_fault } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let checks = cli::run_validation(level, *inject_fault);
            eprint!("{}", cli::render_table(&checks));
            cli::validation_record(level, &checks)
        }
    }
}

fn read_spec(path: &Path) -> Result<StateSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, record: &RunRecord) -> Result<()> {
    let text = record.render(cli.format.into())?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|record| emit(&cli, &record).map(|()| record.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qdisp: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qdisp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
