use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbounds_cli::{
    bound, figure1, figure2, figure2_fidelity, heisenberg, load_model, validate, BoundConfig, CliError, CliResult,
    CsvTable, Figure1Config, Figure2Config, Method, Sweep,
};

#[derive(Parser, Debug)]
#[command(name = "qbounds", version, about = "Bayesian quantum estimation error bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Qubit benchmark: MMSE, QWWB, QZZB and QCRB against the energy gap E.
    Figure1 {
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        /// Divide every bound by the prior variance.
        #[arg(long)]
        normalized: bool,
        /// Comma-separated energies instead of the default log grid.
        #[arg(long, value_delimiter = ',')]
        energies: Option<Vec<f64>>,
        /// Also optimize the QWWB exponent over a 21-point grid.
        #[arg(long)]
        optimize_s: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bosonic benchmark: QWWB, QZZB and QCRB against the probe count, plus the fidelity inset.
    Figure2 {
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long = "M", default_value_t = 10)]
        levels: u32,
        /// Comma-separated probe counts instead of the default grid.
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<u32>>,
        #[arg(long)]
        optimize_s: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fidelity inset output; defaults to `<out stem>_fidelity.csv` next to --out.
        #[arg(long)]
        fidelity_out: Option<PathBuf>,
    },
    /// One bound of a model file, optionally swept.
    Bound {
        #[arg(long)]
        model: PathBuf,
        /// qwwb, qzzb, qcrb, mmse or generic-ww.
        #[arg(long)]
        method: Method,
        /// Test-point displacement; repeat for several generic-ww test points.
        #[arg(long)]
        h: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        /// VAR=a:b:n, VAR=a:b:n:log or VAR=v1,v2,... with VAR one of h, s, E, nu, sigma.
        #[arg(long)]
        sweep: Option<Sweep>,
        #[arg(long)]
        optimize_s: bool,
        /// Grid size for generic-ww with a Gaussian prior.
        #[arg(long, default_value_t = 2001)]
        grid_points: usize,
        /// Grid half-width in prior standard deviations.
        #[arg(long, default_value_t = 8.0)]
        half_width: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heisenberg-limit constants of a model file.
    Heisenberg {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs every property suite and prints one JSON record per suite.
    Validate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn emit(table: &CsvTable, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => table.write_to(path),
        None => std::io::stdout()
            .write_all(table.render().as_bytes())
            .map_err(|e| CliError::Config(format!("stdout: {e}"))),
    }
}

fn fidelity_path(out: Option<&Path>, explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| {
        let out = out?;
        let stem = out.file_stem()?.to_string_lossy().into_owned();
        Some(out.with_file_name(format!("{stem}_fidelity.csv")))
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Figure1 {
            sigma,
            normalized,
            energies,
            optimize_s,
            out,
        } => {
            let cfg = Figure1Config {
                sigma,
                energies,
                normalized,
                optimize_s,
            };
            emit(&figure1(&cfg)?, out.as_deref())
        }
        Command::Figure2 {
            sigma,
            epsilon,
            levels,
            nu,
            optimize_s,
            out,
            fidelity_out,
        } => {
            let cfg = Figure2Config {
                sigma,
                epsilon,
                levels,
                nus: nu,
                optimize_s,
            };
            emit(&figure2(&cfg)?, out.as_deref())?;
            match fidelity_path(out.as_deref(), fidelity_out) {
                Some(path) => figure2_fidelity(&cfg)?.write_to(&path),
                None => {
                    log::info!("fidelity inset skipped; pass --out or --fidelity-out to write it");
                    Ok(())
                }
            }
        }
        Command::Bound {
            model,
            method,
            h,
            s,
            sweep,
            optimize_s,
            grid_points,
            half_width,
            out,
        } => {
            let file = load_model(&model)?;
            let cfg = BoundConfig {
                method,
                h,
                s,
                sweep,
                optimize_s,
                grid_points,
                half_width,
            };
            emit(&bound(&file, &model.display().to_string(), &cfg)?, out.as_deref())
        }
        Command::Heisenberg { model, out } => {
            let file = load_model(&model)?;
            emit(&heisenberg(&file, &model.display().to_string())?, out.as_deref())
        }
        Command::Validate { seed } => {
            let (results, outcome) = match validate(seed) {
                Ok(r) => (r, Ok(())),
                Err(CliError::Validation(r)) => {
                    let failed = r.iter().filter(|s| !s.passed).cloned().collect();
                    (r, Err(CliError::Validation(failed)))
                }
                Err(e) => return Err(e),
            };
            for r in &results {
                println!(
                    "{}",
                    serde_json::to_string(r).map_err(|e| CliError::Config(e.to_string()))?
                );
            }
            outcome
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qbounds: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
