//! Command-line experiment runner for the `robin-lab` library.

mod config;
mod domain;
mod error;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use config::{parse_config, Experiment, ExperimentConfig, KEYS, MAX_LEVELS, MIN_GRID};
pub use domain::{parse_domain, parse_family, read_polygon};
pub use error::{CliError, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_RUNTIME, EXIT_USAGE};
pub use run::{run, Outcome};

#[derive(Debug, Parser)]
#[command(name = "robin-lab", version, about = "Robin torsion experiments: solve, compare, converge, probe rigidity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mesh and solve one domain.
    Solve(Flags),
    /// Solve, rearrange and run every comparison check.
    Compare(Flags),
    /// Uniform refinement study.
    Convergence(Flags),
    /// Deficit table over a family of domains.
    RigiditySweep(Flags),
}

/// Shared flags. Values are kept as text so errors can quote them.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// disk:R | ellipse:a,b | rect:w,h | polygon:@file | perturbed_disk:R,eps,k
    #[arg(long)]
    pub domain: Option<String>,
    /// `;`-separated domains; numeric arguments may be ranges lo:hi:n
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
    #[arg(long = "t-grid", allow_hyphen_values = true)]
    pub t_grid: Option<String>,
    #[arg(long = "s-grid", allow_hyphen_values = true)]
    pub s_grid: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long = "tol-scale", allow_hyphen_values = true)]
    pub tol_scale: Option<String>,
    /// Reserved; currently unused.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Flags {
    pub fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("domain", self.domain.clone()),
            ("family", self.family.clone()),
            ("beta", self.beta.clone()),
            ("h", self.h.clone()),
            ("levels", self.levels.clone()),
            ("t_grid", self.t_grid.clone()),
            ("s_grid", self.s_grid.clone()),
            ("out", self.out.clone()),
            ("tol_scale", self.tol_scale.clone()),
            ("seed", self.seed.clone()),
        ]
    }
}

impl Command {
    pub fn config(&self) -> Result<ExperimentConfig, CliError> {
        let (kind, flags) = match self {
            Command::Solve(f) => (Experiment::Solve, f),
            Command::Compare(f) => (Experiment::Compare, f),
            Command::Convergence(f) => (Experiment::Convergence, f),
            Command::RigiditySweep(f) => (Experiment::RigiditySweep, f),
        };
        parse_config(kind, &flags.pairs(), flags.config.as_deref())
    }
}

/// Parses `args`, runs the command, prints a one-line JSON summary on
/// stdout and returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            if code != EXIT_PASS {
                println!("{}", json!({"status": "usage_error", "message": e.kind().to_string()}));
            }
            return code;
        }
    };
    let result = cli.command.config().and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            let failed: Vec<_> = outcome
                .report
                .failures()
                .map(|c| json!({"name": c.name, "anchor": c.anchor, "residual": c.residual, "tol": c.tol}))
                .collect();
            let status = if failed.is_empty() { "pass" } else { "fail" };
            println!(
                "{}",
                json!({
                    "status": status,
                    "experiment": cfg.experiment.to_string(),
                    "out": cfg.out.display().to_string(),
                    "checks": outcome.report.checks.len(),
                    "failed": failed,
                })
            );
            if failed.is_empty() {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", json!({"status": e.kind(), "message": e.to_string()}));
            e.exit_code()
        }
    }
}
