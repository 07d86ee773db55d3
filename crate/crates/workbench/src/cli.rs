//! Command-line flags.

use std::path::PathBuf;

use clap::Parser;

use crate::error::RunError;
use crate::spec::{parse_runspec, CommandName, Format, Overrides, ParseError, RunSpec};

/// Correlation-function Bell inequalities: classical bounds, facets and
/// quantum violations with multiport beamsplitters.
#[derive(Debug, Parser)]
#[command(name = "quditbell", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandName,
    /// TOML run specification; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of parties.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of outcomes per measurement.
    #[arg(long)]
    pub d: Option<usize>,
    /// multipartite or bipartite-legacy.
    #[arg(long)]
    pub family: Option<String>,
    /// e.g. ghz-qubit:1/4pi, ghz-qutrit (angles free), w-state, ghz-max,
    /// amplitudes:000=0.7071,111=0.7071.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<String>,
    /// optimize, bloch, or phase vectors like `0,-1/12pi;0,1/4pi;...` (one per party and setting).
    #[arg(long, allow_hyphen_values = true)]
    pub phases: Option<String>,
    /// Sweep points separated by `;`, coordinates by `,`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Bell value for `threshold`.
    #[arg(long, allow_hyphen_values = true)]
    pub violation: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Largest number of deterministic strategies to enumerate.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Leave wall-clock and thread-count fields out of the report.
    #[arg(long)]
    pub no_timestamp: bool,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            command: Some(self.command),
            n: self.n,
            d: self.d,
            family: self.family.clone(),
            state: self.state.clone(),
            phases: self.phases.clone(),
            grid: self.grid.clone(),
            violation: self.violation,
            seed: self.seed,
            starts: self.starts,
            tol: self.tol,
            max_iterations: self.max_iterations,
            threads: self.threads,
            budget: self.budget,
            out: self.out.clone(),
            format: self.format,
            no_timestamp: self.no_timestamp,
        }
    }

    pub fn resolve(&self) -> Result<RunSpec, RunError> {
        let text = match &self.config {
            Some(path) => Some(std::fs::read_to_string(path).map_err(|e| ParseError {
                location: path.display().to_string(),
                message: e.to_string(),
            })?),
            None => None,
        };
        Ok(parse_runspec(text.as_deref(), &self.overrides())?)
    }
}

/// Parses, runs and writes the report; returns the process exit status.
pub fn main_with(cli: Cli) -> i32 {
    let outcome = cli.resolve().and_then(|spec| {
        let doc = crate::run::run(&spec)?;
        match &spec.output.path {
            Some(path) => std::fs::write(path, doc)?,
            None => print!("{doc}"),
        }
        Ok(())
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
