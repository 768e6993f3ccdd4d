use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvlab_core::report::{self, cmd_catalog, cmd_curvature, cmd_scan, cmd_verify, cmd_validate};
use curvlab_core::{Outcome, RunOptions, RunReport, SearchBudget};

/// Curvature experiments on Cheeger-stretched metrics of compact Lie groups.
#[derive(Parser, Debug)]
#[command(name = "curvlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// RNG seed.
    #[arg(long, env = "CURVLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for algebra identities.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in (g, h) pairs.
    Catalog {
        #[command(flatten)]
        common: Common,
    },
    /// Check the Lie algebra identities and biinvariance of Q.
    Validate {
        /// Catalog id, algebra name (so4, su3, su2+su2) or JSON file.
        #[arg(long, alias = "algebra")]
        pair: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sectional curvature of one plane.
    Curvature {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        t: f64,
        /// JSON file {"u": [...], "v": [...]}.
        #[arg(long)]
        plane: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum curvature numerator over random planes.
    Scan {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the stretch theorem on a grid of t values.
    Verify {
        #[arg(long)]
        pair: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        t_grid: Vec<f64>,
        /// Conjugation attempts per t.
        #[arg(long)]
        budget: Option<usize>,
        /// Random planes scanned per t.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> curvlab_core::Result<(RunReport, Outcome, Option<PathBuf>)> {
    let opts = |c: &Common| RunOptions { seed: c.seed, tolerance: c.tolerance };
    let (report, outcome, common) = match &cli.command {
        Command::Catalog { common } => (cmd_catalog(&opts(common))?, Outcome::Pass, common),
        Command::Validate { pair, common } => {
            let (r, o) = cmd_validate(pair, &opts(common))?;
            (r, o, common)
        }
        Command::Curvature { pair, t, plane, common } => {
            let (r, o) = cmd_curvature(pair, *t, plane, &opts(common))?;
            (r, o, common)
        }
        Command::Scan { pair, t, samples, common } => {
            let (r, o) = cmd_scan(pair, *t, *samples, &opts(common))?;
            (r, o, common)
        }
        Command::Verify { pair, t_grid, budget, samples, common } => {
            let mut b = SearchBudget::default();
            if let Some(a) = budget {
                b.attempts = *a;
            }
            if let Some(s) = samples {
                b.samples = *s;
            }
            let (r, o) = cmd_verify(pair, t_grid, &b, &opts(common))?;
            (r, o, common)
        }
    };
    Ok((report, outcome, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli).and_then(|(r, o, out)| {
        let text = report::to_report_json(&r)?;
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(o)
    }) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
