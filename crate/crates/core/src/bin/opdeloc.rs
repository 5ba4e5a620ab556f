use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opdeloc::cli::{
    cmd_battery, cmd_ck_curves, cmd_ratio_scaling, cmd_validate, Config, ValidationSuite,
};

#[derive(Parser)]
#[command(name = "opdeloc", about = "Operator delocalization experiments", version)]
struct Args {
    /// TOML config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Realization count override.
    #[arg(long, global = true)]
    realizations: Option<usize>,

    /// Rayon worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble-averaged K-complexity curves per model and operator size.
    CkCurves,
    /// Delocalization ratio R(L) per model.
    RatioScaling,
    /// Maximum charging power per model, axis, and L.
    Battery,
    /// Run a validation suite (star | oracle); exit code 1 on failure.
    Validate { suite: ValidationSuiteArg },
}

#[derive(Clone, Copy)]
struct ValidationSuiteArg(ValidationSuite);

impl std::str::FromStr for ValidationSuiteArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<ValidationSuite>()
            .map(ValidationSuiteArg)
            .map_err(|e| e.to_string())
    }
}

fn run(args: Args) -> opdeloc::Result<ExitCode> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| opdeloc::Error::InvalidParameter(e.to_string()))?;
    }

    let mut cfg = match &args.config {
        Some(path) => Config::parse(&fs::read_to_string(path)?)?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = args.realizations {
        cfg.realizations = n;
    }

    let write = |name: &str, payload: &str| -> opdeloc::Result<()> {
        fs::create_dir_all(&args.out)?;
        let path = args.out.join(name);
        fs::write(&path, payload)?;
        println!("wrote {}", path.display());
        Ok(())
    };

    match args.command {
        Command::CkCurves => {
            write("ck_curves.csv", &cmd_ck_curves(&cfg)?)?;
        }
        Command::RatioScaling => {
            write("ratio_scaling.csv", &cmd_ratio_scaling(&cfg)?)?;
        }
        Command::Battery => {
            write("battery.csv", &cmd_battery(&cfg)?)?;
        }
        Command::Validate { suite } => {
            let (report, pass) = cmd_validate(suite.0, &cfg)?;
            print!("{report}");
            if !pass {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
