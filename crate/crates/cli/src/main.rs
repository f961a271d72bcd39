use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use daflab_cli::config::parse_config;
use daflab_cli::legendre::{cmd_legendre_check, LegendreArgs};
use daflab_cli::runner::cmd_run;
use daflab_cli::sweep::cmd_sweep;
use daflab_cli::verify::{cmd_verify_algebra, VerifyArgs};

/// Numerical laboratory for the dual anomaly flow: identity verification,
/// reduced flow runs, parameter sweeps and Legendre duality checks.
#[derive(Parser)]
#[command(name = "daflab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// output directory for artifacts
    #[arg(long, default_value = "daflab-out")]
    out: PathBuf,
    /// replace existing artifacts in the output directory
    #[arg(long)]
    overwrite: bool,
    /// RNG seed override
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pointwise identity suite and write a structured report.
    VerifyAlgebra {
        #[command(flatten)]
        common: CommonArgs,
        /// complex dimensions to test, comma separated
        #[arg(long, default_value = "3,4,5,6", value_delimiter = ',')]
        n_list: Vec<u8>,
        /// random draws per (identity, n)
        #[arg(long, default_value_t = 200)]
        seeds: u32,
        /// residual tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// test hook: flip the named identity's sign (forces a failure)
        #[arg(long, hide = true)]
        flip: Option<String>,
    },
    /// Integrate one configured flow and write trajectory.csv + summary.json.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// experiment configuration file
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a parameter sweep of independent runs.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// experiment configuration file with a [sweep] section
        #[arg(long)]
        config: PathBuf,
    },
    /// Legendre involution and duality-residual study.
    LegendreCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// spatial dimensions of the duality grid
        #[arg(long, default_value_t = 2)]
        dims: usize,
        /// grid points per axis
        #[arg(long, default_value_t = 32)]
        grid_n: usize,
        /// amplitude sweep, comma separated
        #[arg(long, default_value = "0.02,0.01,0.005", value_delimiter = ',')]
        eps: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // configuration/schema problems exit 2, runtime problems exit 1
            if e.downcast_ref::<daflab_cli::ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::VerifyAlgebra {
            common,
            n_list,
            seeds,
            tol,
            flip,
        } => {
            let args = VerifyArgs {
                n_list,
                seeds,
                tolerance: tol,
                flip,
            };
            let report = cmd_verify_algebra(&args, &common.out, common.overwrite)?;
            for o in &report.outcomes {
                println!(
                    "{:<34} n={} seeds={} max_residual={:.3e} {}",
                    o.name,
                    o.n,
                    o.seeds,
                    o.max_residual,
                    if o.passed { "ok" } else { "FAIL" }
                );
            }
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                let failed = report.first_failure().expect("non-passing report");
                eprintln!("identity check failed: {} (n={})", failed.name, failed.n);
                Ok(ExitCode::from(1))
            }
        }
        Command::Run { common, config } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = parse_config(&text)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            let out_dir = cfg.out_dir.clone().unwrap_or(common.out);
            let outcome = cmd_run(&cfg, &out_dir, common.overwrite)?;
            println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { common, config } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = parse_config(&text)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            let out_dir = cfg.out_dir.clone().unwrap_or(common.out);
            let all_ok = cmd_sweep(&cfg, &out_dir, common.overwrite)?;
            println!(
                "sweep finished; index at {}",
                out_dir.join("index.json").display()
            );
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::LegendreCheck {
            common,
            dims,
            grid_n,
            eps,
        } => {
            let args = LegendreArgs {
                dims,
                grid_n,
                eps,
                ..Default::default()
            };
            let report = cmd_legendre_check(&args, &common.out, common.overwrite)?;
            println!(
                "involution O(h²): {}  exponents: kahler_ricci {:.3}, anomaly_pair {:.3}",
                report.involution_second_order,
                report.kahler_ricci_exponent,
                report.anomaly_exponent
            );
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
