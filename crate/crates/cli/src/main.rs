//! `occupancy`: command-line access to the occupancy planner.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 validation grid failed.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use occupancy::scenario::{self, frontier_report};
use occupancy::validation::{run_validation, ValidationManifest};
use occupancy::{trajectory_two_group, BetaPreset, InfectionEstimator, OrganizationParams};

#[derive(Parser)]
#[command(
    name = "occupancy",
    version,
    about = "Pareto-optimal workplace occupancy under epidemic risk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Day-by-day infection probabilities for one occupancy level.
    Trajectory {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1.0)]
        occup: f64,
        /// Days to simulate; defaults to the test interval.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Pareto-optimal occupancy strategies.
    Pareto {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the recursion with the agent-based simulation over a grid.
    Validate {
        /// JSON manifest; the built-in grid when omitted.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Run count; repeat to compare several.
        #[arg(long)]
        runs: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run a table of scenarios and write one frontier per row.
    Scenarios {
        /// Scenario CSV; the fifteen reference settings when omitted.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "present_arrival")]
        estimator: InfectionEstimator,
    },
    /// Print the reference scenario table as CSV.
    Table,
    /// Unfiltered objective curves for weekly and fortnightly testing.
    Intervals {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 100)]
    n: u32,
    #[arg(long, default_value_t = 50)]
    nv: u32,
    #[arg(long, default_value_t = 0.04)]
    beta_u: f64,
    /// Defaults to `(1 - vaccine efficacy) * beta_u`.
    #[arg(long)]
    beta_v: Option<f64>,
    /// delta, omicron, office_low or office_high; overrides --beta-u.
    #[arg(long)]
    beta_preset: Option<BetaPreset>,
    #[arg(long, default_value_t = 0.8)]
    vaccine_efficacy: f64,
    #[arg(long, default_value_t = 0.6)]
    prod: f64,
    #[arg(long, default_value_t = 7)]
    tau: u32,
    #[arg(long, default_value_t = 5.0)]
    contact_base: f64,
    #[arg(long, default_value_t = 0.10)]
    contact_slope: f64,
    #[arg(long, default_value_t = 500.0)]
    incidence: f64,
    #[arg(long, default_value_t = 0.0)]
    occupancy_threshold: f64,
    #[arg(long, default_value = "present_arrival")]
    estimator: InfectionEstimator,
}

impl ParamArgs {
    fn params(&self) -> OrganizationParams {
        let beta_u = self.beta_preset.map_or(self.beta_u, BetaPreset::beta);
        OrganizationParams {
            n: self.n,
            n_v: self.nv,
            beta_u,
            beta_v: self.beta_v.unwrap_or((1.0 - self.vaccine_efficacy) * beta_u),
            prod: self.prod,
            tau: self.tau,
            contact_base: self.contact_base,
            contact_slope: self.contact_slope,
            incidence_7day: self.incidence,
            occupancy_threshold: self.occupancy_threshold,
            estimator: self.estimator,
            ..Default::default()
        }
    }
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<occupancy::Error> for Failure {
    fn from(e: occupancy::Error) -> Self {
        Failure {
            code: 2,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            occupancy::io::write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Trajectory {
            params,
            occup,
            horizon,
            format,
        } => {
            let p = params.params();
            let t = trajectory_two_group(&p, occup, horizon.unwrap_or(p.tau as usize))?;
            let text = match format {
                Format::Json => json(&t)?,
                Format::Csv => {
                    let mut s = String::from("day,p_u,p_v,expected_infected\n");
                    for d in 0..=t.horizon {
                        s += &format!("{d},{},{},{}\n", t.p_u[d], t.p_v[d], t.expected_infected[d]);
                    }
                    s
                }
            };
            emit(None, &text)?;
        }
        Command::Pareto { params, format, out } => {
            let report = frontier_report(&params.params())?;
            let text = match format {
                Format::Json => json(&report)?,
                Format::Csv => report.frontier.to_csv_string(report.params.n)?,
            };
            if let Some(d) = &report.frontier.diagnostic {
                eprintln!("{d}");
            }
            emit(out.as_ref(), &text)?;
        }
        Command::Validate {
            manifest,
            runs,
            seed,
            report,
            format,
        } => {
            let mut m = match manifest {
                Some(path) => ValidationManifest::load(&path)?,
                None => ValidationManifest::default(),
            };
            if let Some(seed) = seed {
                m.seed = seed;
            }
            let r = run_validation(&m, &runs)?;
            let text = match format {
                Format::Json => json(&r)?,
                Format::Csv => r.to_csv_string()?,
            };
            emit(report.as_ref(), &text)?;
            if report.is_some() {
                eprintln!("validation {}", if r.passed { "passed" } else { "failed" });
            }
            if !r.passed {
                return Err(Failure {
                    code: 3,
                    error: anyhow::anyhow!("MAPE above {} in at least one gated row", m.mape_threshold),
                });
            }
        }
        Command::Scenarios { table, out, estimator } => {
            let rows = match table {
                Some(path) => scenario::load_table(&path)?,
                None => scenario::reference_table(),
            };
            let results = scenario::run_all(&rows, estimator, Some(&out))?;
            eprintln!("wrote {} scenarios to {}", results.len(), out.display());
        }
        Command::Table => emit(None, &scenario::table_to_csv(&scenario::reference_table())?)?,
        Command::Intervals { format } => {
            let curves = scenario::interval_comparison_curves(&scenario::interval_comparison_params())?;
            let text = match format {
                Format::Json => json(&curves)?,
                Format::Csv => {
                    let mut s = String::from("tau,occup,expected_infections,productivity\n");
                    for c in &curves {
                        for i in 0..c.occup.len() {
                            s += &format!(
                                "{},{},{},{}\n",
                                c.tau, c.occup[i], c.expected_infections[i], c.productivity[i]
                            );
                        }
                    }
                    s
                }
            };
            emit(None, &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
