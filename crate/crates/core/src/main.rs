use aerosym::aero::{
    equivalency_defect, fit_sin2_family, fit_tan_family, parse_samples, AeroError, AeroModel,
    ModelCard,
};
use aerosym::sim::{
    csv_string, gnuplot_script, run_scenario, run_sweep, RunStatus, Scenario, SimError, SweepConfig,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "aerosym",
    version,
    about = "Velocity-control simulator for vehicles with spherically-equivalent aerodynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its summary (and optionally the full log).
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write run.csv and a gnuplot script.
        #[arg(long)]
        csv: bool,
    },
    /// Fit a coefficient family to alpha_deg,cd,cl samples and write a model card.
    Fit {
        #[arg(long, value_enum)]
        family: Family,
        samples: PathBuf,
        /// Upper bound of the pre-stall range for the tan family.
        #[arg(long, default_value_t = 89.0)]
        alpha_max: f64,
        /// k_a stored in the card (kg/m).
        #[arg(long, default_value_t = 1.0)]
        k_a: f64,
        #[arg(long, default_value = "model_card.json")]
        out: PathBuf,
    },
    /// Report the equivalency defect and C_D0 of a model card.
    CheckEquivalency {
        card: PathBuf,
        #[arg(long, default_value_t = 179)]
        grid: usize,
    },
    /// Monte-Carlo study of the domain of attraction around a scenario.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        ic_samples: usize,
        #[arg(long)]
        theta_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest initial velocity error (m/s).
        #[arg(long, default_value_t = 5.0)]
        speed_max: f64,
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Write the per-sample report here as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Sin2,
    Tan,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "config",
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "numerical",
            message: message.into(),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) => Failure::config(e.to_string()),
            SimError::NumericalDivergence { .. } => Failure::numerical(e.to_string()),
        }
    }
}

impl From<AeroError> for Failure {
    fn from(e: AeroError) -> Self {
        match e {
            AeroError::SingularFit { .. } => Failure::numerical(e.to_string()),
            _ => Failure::config(e.to_string()),
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::config(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AEROSYM_LOG_LEVEL", "warn"))
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!(
                "{}",
                json!({"error": f.kind, "message": f.message, "exit_code": f.code})
            );
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate { scenario, out, csv } => simulate(&scenario, &out, csv),
        Command::Fit {
            family,
            samples,
            alpha_max,
            k_a,
            out,
        } => fit(family, &samples, alpha_max, k_a, &out),
        Command::CheckEquivalency { card, grid } => check_equivalency(&card, grid),
        Command::Sweep {
            scenario,
            ic_samples,
            theta_max,
            seed,
            speed_max,
            parallelism,
            out,
        } => {
            let base = Scenario::load(&scenario)?;
            let config = SweepConfig {
                samples: ic_samples,
                theta_max: theta_max.to_radians(),
                speed_max,
                seed,
            };
            let report = run_sweep(&base, &config, parallelism)?;
            if let Some(path) = out {
                fs::write(
                    &path,
                    serde_json::to_string_pretty(&report).expect("report serializes"),
                )
                .map_err(io_error(&path))?;
            }
            println!(
                "{}",
                json!({
                    "samples": report.samples,
                    "converged": report.converged,
                    "convergence_fraction": report.convergence_fraction,
                })
            );
            Ok(())
        }
    }
}

fn simulate(path: &Path, out: &Path, csv: bool) -> Result<(), Failure> {
    let scenario = Scenario::load(path)?;
    let log = run_scenario(&scenario)?;
    fs::create_dir_all(out).map_err(io_error(out))?;
    let summary = serde_json::to_string_pretty(&log.summary).expect("summary serializes");
    let summary_path = out.join("summary.json");
    fs::write(&summary_path, &summary).map_err(io_error(&summary_path))?;
    if csv {
        let csv_path = out.join("run.csv");
        fs::write(&csv_path, csv_string(&log)).map_err(io_error(&csv_path))?;
        let gp_path = out.join("run.gp");
        fs::write(&gp_path, gnuplot_script("run.csv", &scenario.name))
            .map_err(io_error(&gp_path))?;
    }
    println!("{summary}");
    match log.summary.status {
        RunStatus::Completed => Ok(()),
        status => Err(Failure::numerical(format!("run stopped early: {status:?}"))),
    }
}

fn fit(
    family: Family,
    samples: &Path,
    alpha_max: f64,
    k_a: f64,
    out: &Path,
) -> Result<(), Failure> {
    let file = fs::File::open(samples).map_err(io_error(samples))?;
    let samples = parse_samples(file)?;
    let (model, residuals, report) = match family {
        Family::Sin2 => {
            let f = fit_sin2_family(&samples)?;
            let report = json!({"family": "sin2", "c0": f.c0, "c1": f.c1, "cd0": f.c0 + 2.0 * f.c1,
                "cd_rms": f.residuals.cd_rms, "cl_rms": f.residuals.cl_rms});
            (AeroModel::sin2(k_a, f.c0, f.c1), f.residuals, report)
        }
        Family::Tan => {
            let f = fit_tan_family(&samples, alpha_max.to_radians())?;
            let report = json!({"family": "tan", "c0_bar": f.c0_bar, "c1_bar": f.c1_bar,
                "cd0": f.c0_bar + f.c1_bar, "cd_rms": f.residuals.cd_rms, "cl_rms": f.residuals.cl_rms});
            (AeroModel::tan(k_a, f.c0_bar, f.c1_bar), f.residuals, report)
        }
    };
    let model = model?;
    let card = ModelCard::from_model(&model, Some(residuals));
    fs::write(out, card.to_json_pretty()).map_err(io_error(out))?;
    println!("{report}");
    Ok(())
}

fn check_equivalency(path: &Path, grid: usize) -> Result<(), Failure> {
    if grid == 0 {
        return Err(Failure::config("--grid must be positive"));
    }
    let bytes = fs::read(path).map_err(io_error(path))?;
    let model = ModelCard::from_json_slice(&bytes)?.to_model()?;
    let (start, end) = (1f64.to_radians(), 179f64.to_radians());
    let alphas: Vec<f64> = (0..grid)
        .map(|i| {
            if grid == 1 {
                start
            } else {
                start + (end - start) * i as f64 / (grid - 1) as f64
            }
        })
        .filter(|a| model.cd(*a).is_ok())
        .collect();
    let check = equivalency_defect(&model, &alphas)?;
    println!(
        "{}",
        json!({
            "grid_points": alphas.len(),
            "defect": check.defect,
            "cd0": check.cd0,
            "equivalent": model.cd0().is_some(),
        })
    );
    Ok(())
}
