//! The experiment harness driven from a TOML description: replicated runs
//! with derived seeds, CSV output, the comparison report and SVG charts.

use arbirg::harness::{compare_report, run_experiment, write_outputs, write_svgs, ExperimentConfig};

const CONFIG: &str = r#"
name = "cournot-small"
replications = 4
master_seed = 1
checkpoints = 20
record_wall_clock = false

[problem]
kind = "cournot_paper"
seed = 7

[budget]
full_map_equivalents = 2000

[gap]
n_samples = 300
n_restarts = 2
ascent_iters = 50

[[cells]]
gamma0 = 1.0
eta0 = 0.1

[[solvers]]
kind = "arbirg"
b = 0.25
r = 0.0

[[solvers]]
kind = "sr"
regularizer = "identity"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let result = run_experiment(&cfg)?;
    let dir = std::env::temp_dir().join("arbirg-example");
    let files = write_outputs(&result, &dir)?;
    let charts = write_svgs(&result.aggregates, &dir.join("svg"))?;
    println!("wrote {} CSV/TOML files and {} charts under {}", files.len(), charts.len(), dir.display());
    for row in compare_report(&result.aggregates)? {
        println!(
            "{} vs {} in {}: final {} {:.3e} vs {:.3e}, dominates = {}",
            row.solver, row.baseline, row.cell, row.accuracy_metric, row.final_accuracy, row.baseline_final_accuracy, row.dominates
        );
    }
    Ok(())
}
