//! `rwpost`: random-weighting posterior approximation experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical or fit failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rwpost::harness::{
    emit_report, run_convergence, run_suite, simulate_table, ExperimentConfig, ReportFormat,
    SimulateConfig, Suite, ThetaMode, YGrid,
};
use rwpost::rwapprox::DEFAULT_DRAWS;
use rwpost::Error;

#[derive(Parser)]
#[command(name = "rwpost", version, about = "Random-weighting approximation of standardized posteriors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GridArgs {
    /// Lower end of the y-grid
    #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
    y_lo: f64,
    /// Upper end of the y-grid
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    y_hi: f64,
    /// Spacing of the y-grid
    #[arg(long, default_value_t = 0.01)]
    y_step: f64,
}

impl GridArgs {
    fn grid(&self) -> YGrid {
        YGrid {
            lo: self.y_lo,
            hi: self.y_hi,
            step: self.y_step,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// CDF table `y,F_rw,F_oracle,F_thm1,F_thm2` for one data set
    Simulate {
        /// Model id: `normal[:variance]` or `exp`
        #[arg(long)]
        model: String,
        /// Prior id, e.g. `trunc-normal:0,1,-10,10`, `trunc-gamma:2,1,0,50`, `bump:-3,3`
        #[arg(long)]
        prior: String,
        /// True parameter, or `from-prior`
        #[arg(long, default_value = "from-prior", allow_hyphen_values = true)]
        theta: String,
        /// Sample size
        #[arg(long)]
        n: usize,
        /// Number of weight draws B
        #[arg(long, default_value_t = DEFAULT_DRAWS)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Convergence experiment over an n-grid with data replications
    Convergence {
        #[arg(long)]
        model: String,
        #[arg(long)]
        prior: String,
        /// True parameter, or `from-prior`
        #[arg(long, default_value = "from-prior", allow_hyphen_values = true)]
        theta: String,
        /// Comma-separated ascending sample sizes
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        /// Data replications per n
        #[arg(long, default_value_t = 20)]
        data_reps: usize,
        /// Number of weight draws B per replication
        #[arg(long, default_value_t = DEFAULT_DRAWS)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `csv` or `json`
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Built-in property suites
    Check {
        /// `weights`, `expansion`, `oracle` or `all`
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn io_error(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Simulate {
            model,
            prior,
            theta,
            n,
            reps,
            seed,
            out,
            grid,
        } => {
            let config = SimulateConfig {
                model_id: model,
                prior_id: prior,
                theta_true: theta.parse::<ThetaMode>()?,
                n,
                mc_draws: reps,
                master_seed: seed,
                y_grid: grid.grid(),
            };
            let table = simulate_table(&config)?;
            std::fs::write(&out, table.to_csv()).map_err(|e| io_error(&out, e))?;
            eprintln!(
                "theta_true = {}, theta_hat = {}, {} rows written to {}",
                table.theta_true,
                table.theta_hat,
                table.rows.len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence {
            model,
            prior,
            theta,
            n_grid,
            data_reps,
            reps,
            seed,
            format,
            out,
            grid,
        } => {
            let format = format.parse::<ReportFormat>()?;
            let config = ExperimentConfig {
                model_id: model,
                prior_id: prior,
                theta_true: theta.parse::<ThetaMode>()?,
                n_grid,
                data_reps,
                mc_draws: reps,
                master_seed: seed,
                y_grid: grid.grid(),
                output_path: Some(out.display().to_string()),
            };
            let report = run_convergence(&config)?;
            emit_report(&report, format, &out)?;
            for s in &report.summaries {
                let show = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x:.5}"));
                eprintln!(
                    "n = {:>6}: completed {:>3}, skipped {:>3}, median sqrt(n)*D = {}, IQR = {}",
                    s.n,
                    s.completed,
                    s.skipped,
                    show(s.median_sqrtn_d),
                    show(s.iqr_sqrtn_d)
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { suite } => {
            let outcomes = run_suite(suite.parse::<Suite>()?);
            let mut all = true;
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                all &= o.passed;
            }
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
