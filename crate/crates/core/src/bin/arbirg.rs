//! Command-line front end for the experiment harness.
//!
//! Exit status: 0 when nothing failed and nothing was flagged, 1 when a
//! report flagged a violation (or a run aborted), 2 on an error.

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arbirg::harness::{
    bounds_for_experiment, compare_report, read_aggregates, run_diagnostics, run_experiment, write_outputs,
    write_svgs, DiagOptions, ExperimentConfig,
};
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "arbirg", version, about = "Randomized block iteratively regularized gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file and write its CSV output.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-cell SVG charts.
        #[arg(long)]
        svg: bool,
    },
    /// Compare each solver against the `sr` baseline of its cell.
    Compare {
        dir: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Check recorded curves against the theoretical rate bounds.
    Bounds { dir: PathBuf, config: PathBuf },
    /// Harmonic-sum, sampling-error-moment and Tikhonov-step diagnostics.
    Diag {
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 100_000)]
        draws: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Also write the table to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Clean,
    Flagged,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, svg } => run(&config, out, svg),
        Command::Compare { dir, svg } => compare(&dir, svg),
        Command::Bounds { dir, config } => bounds(&dir, &config),
        Command::Diag {
            points,
            draws,
            seed,
            out,
        } => diag(
            DiagOptions {
                moment_points: points,
                moment_draws: draws,
                seed,
                ..DiagOptions::default()
            },
            out.as_deref(),
        ),
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Flagged) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type CliResult = Result<Outcome, Box<dyn std::error::Error>>;

fn print_csv<T: Serialize>(rows: &[T], also_to: Option<&Path>) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(io::stdout());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    if let Some(path) = also_to {
        let mut w = csv::Writer::from_path(path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn run(config: &Path, out: Option<PathBuf>, svg: bool) -> CliResult {
    let cfg = ExperimentConfig::from_path(config)?;
    let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
    let result = run_experiment(&cfg)?;
    let files = write_outputs(&result, &dir)?;
    eprintln!("{}: {} runs, {} files under {}", result.problem_name, result.runs.len(), files.len(), dir.display());
    if svg {
        write_svgs(&result.aggregates, &dir.join("svg"))?;
    }
    let mut aborted = 0;
    for r in result.aborted_runs() {
        aborted += 1;
        eprintln!("aborted: {} {} rep {}", r.solver, r.cell, r.replication);
    }
    Ok(if aborted == 0 { Outcome::Clean } else { Outcome::Flagged })
}

fn compare(dir: &Path, svg: bool) -> CliResult {
    let curves = read_aggregates(dir)?;
    let rows = compare_report(&curves)?;
    print_csv(&rows, Some(&dir.join("compare.csv")))?;
    if svg {
        write_svgs(&curves, &dir.join("svg"))?;
    }
    let losing = rows.iter().filter(|r| !r.dominates).count();
    let aborted = curves.iter().map(|c| c.aborted.len()).sum::<usize>();
    if losing > 0 {
        eprintln!("{losing} of {} comparisons without dominance", rows.len());
    }
    Ok(if losing == 0 && aborted == 0 { Outcome::Clean } else { Outcome::Flagged })
}

fn bounds(dir: &Path, config: &Path) -> CliResult {
    let cfg = ExperimentConfig::from_path(config)?;
    let curves = read_aggregates(dir)?;
    let rows = bounds_for_experiment(&cfg, &curves)?;
    print_csv(&rows, Some(&dir.join("bounds.csv")))?;
    let flagged = rows.iter().filter(|r| r.subopt_violation || r.gap_violation).count();
    if flagged > 0 {
        eprintln!("{flagged} of {} checkpoints exceed a bound by more than 3 standard errors", rows.len());
    }
    Ok(if flagged == 0 { Outcome::Clean } else { Outcome::Flagged })
}

#[derive(Serialize)]
struct DiagRow {
    name: String,
    passed: bool,
    detail: String,
}

fn diag(opts: DiagOptions, out: Option<&Path>) -> CliResult {
    let outcomes = run_diagnostics(&opts)?;
    let rows: Vec<DiagRow> = outcomes
        .iter()
        .map(|o| DiagRow {
            name: o.name.clone(),
            passed: o.passed,
            detail: o.detail.clone(),
        })
        .collect();
    print_csv(&rows, out)?;
    Ok(if outcomes.iter().all(|o| o.passed) {
        Outcome::Clean
    } else {
        Outcome::Flagged
    })
}
