use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use shelfsearch::montecarlo::Distribution;
use shelfsearch::report::{self, Level};
use shelfsearch::{Model, PrecisionConfig};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "shelfsearch", version, about = "Optimal cleanup sizes for search with cleanup")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and approximate optima for n = 1..=n_max, as CSV.
    Table {
        #[arg(long, default_value_t = 35)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = ModelArg::M4)]
        model: ModelArg,
        #[command(flatten)]
        common: Common,
    },
    /// Cost curve over m = 1..=n, as CSV.
    Curve {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModelArg::M4)]
        model: ModelArg,
        /// Include the exact cost and its parts.
        #[arg(long)]
        exact: bool,
        /// Include the approximate cost (m4 only).
        #[arg(long)]
        approx: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Minimizing pile size and the minimal cost.
    Optimal {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModelArg::M4)]
        model: ModelArg,
        /// Minimize the approximate cost instead (m4 only).
        #[arg(long)]
        approx: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of the per-search cost.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value_t = ModelArg::M4)]
        model: ModelArg,
        /// uniform | zipf:s=<x> | skewed:r=<i>,eps=<x> | custom:<path>
        #[arg(long, default_value = "uniform")]
        dist: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Relative tolerance for the series and closed-form evaluations.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> PrecisionConfig {
        PrecisionConfig { tol: self.tol, ..PrecisionConfig::default() }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModelArg {
    M1,
    M2,
    M3,
    M4,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::M1 => Model::M1,
            ModelArg::M2 => Model::M2,
            ModelArg::M3 => Model::M3,
            ModelArg::M4 => Model::M4,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LevelArg {
    Quick,
    Full,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Quick => Level::Quick,
            LevelArg::Full => Level::Full,
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Table { n_max, model, common } => {
            let csv = report::table_csv(n_max, model.into(), &common.config())?;
            emit(&common.out, &csv)?;
        }
        Command::Curve { n, model, exact, approx, common } => {
            let model: Model = model.into();
            // Without flags: everything defined for the model.
            let (exact, approx) = if exact || approx { (exact, approx) } else { (true, model == Model::M4) };
            let csv = report::curve_csv(n, model, exact, approx, &common.config())?;
            emit(&common.out, &csv)?;
        }
        Command::Optimal { n, model, approx, common } => {
            let line = report::optimal_line(n, model.into(), approx, &common.config())?;
            emit(&common.out, &line)?;
        }
        Command::Simulate { n, m, model, dist, trials, seed, common } => {
            let dist = Distribution::parse(&dist, n)?;
            let text = report::simulate_report(n, m, model.into(), &dist, trials, seed)?;
            emit(&common.out, &text)?;
        }
        Command::Verify { level, common } => {
            let r = report::run_verify(level.into(), &common.config())?;
            emit(&common.out, &r.to_string())?;
            if !r.passed() {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<shelfsearch::Error>() {
                Some(e) if e.is_numeric() => EXIT_NUMERIC,
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}
