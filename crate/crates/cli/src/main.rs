//! `osc`: thresholds, shooting diagrams, minimization and certificates for
//! `−Δ_p u = λ f(u)` from a JSON run config.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Context, Finished, Overrides};
use error::CliError;
use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "osc", version, about = "Oscillating-nonlinearity toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Run config (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; defaults to `output.dir` of the config, then `.`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Target values of λ for crossing counts.
    #[arg(long, global = true, value_delimiter = ',', value_name = "v[,v...]")]
    lambda_star: Option<Vec<f64>>,
    /// Scan points, or trajectory samples for the shooting commands.
    #[arg(long, global = true, value_name = "n")]
    points: Option<usize>,
    /// Seed for the randomized spot checks; recorded in every report.
    #[arg(long, global = true, default_value_t = 0, value_name = "n")]
    seed: u64,
    #[arg(long, global = true, value_name = "x")]
    tol_ode: Option<f64>,
    /// Worker threads for parallel scans.
    #[arg(long, global = true, value_name = "n")]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Args)]
struct ShootArgs {
    /// Initial height `u(0)`.
    #[arg(long)]
    c: Option<f64>,
    /// Equation parameter used while shooting.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeros, primitive samples, limit estimates and thresholds.
    Analyze,
    /// One p-Laplacian radial trajectory.
    Shoot(ShootArgs),
    /// One Pucci radial trajectory.
    PucciShoot(ShootArgs),
    /// Bifurcation scan over the configured heights.
    Diagram,
    /// Truncated-energy minimizers for n = 1..=k.
    Minimize,
    /// Nonexistence certificate, optionally checked against a diagram.
    Certify,
}

fn run(cli: Cli) -> Result<Finished, CliError> {
    let c = cli.common;
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(CliError::during("thread pool setup"))?;
    }
    let path = c.config.ok_or_else(|| CliError::config("--config PATH is required"))?;
    let loaded = config::load(&path)?;
    let out = match (c.out, &loaded.config.output.dir) {
        (Some(dir), _) => dir,
        (None, Some(dir)) => loaded.resolve(dir),
        (None, None) => PathBuf::from("."),
    };
    let shoot_args = match cli.command {
        Command::Shoot(a) | Command::PucciShoot(a) => Some(a),
        _ => None,
    };
    let overrides = Overrides {
        lambda_star: c.lambda_star,
        points: c.points,
        tol_ode: c.tol_ode,
        c: shoot_args.and_then(|a| a.c),
        lambda: shoot_args.and_then(|a| a.lambda),
    };
    let ctx = Context::new(loaded, OutDir(out), c.seed, overrides)?;
    match cli.command {
        Command::Analyze => commands::cmd_analyze(&ctx),
        Command::Shoot(_) => commands::cmd_shoot(&ctx),
        Command::PucciShoot(_) => commands::cmd_pucci_shoot(&ctx),
        Command::Diagram => commands::cmd_diagram(&ctx),
        Command::Minimize => commands::cmd_minimize(&ctx),
        Command::Certify => commands::cmd_certify(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(done) => {
            for path in &done.written {
                println!("wrote {}", path.display());
            }
            if done.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                for v in &done.violations {
                    eprintln!("property violation: {v}");
                }
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("osc: {e}");
            e.exit_code()
        }
    }
}
