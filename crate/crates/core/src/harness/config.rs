//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! name = "cournot"
//! replications = 25
//! master_seed = 2024
//! output_dir = "out/cournot"
//! workers = 0                 # 0: one per core
//! record_wall_clock = true
//! checkpoints = 200           # snapshots per run on the common budget grid
//! estimate_gap = true         # only takes effect when X is bounded
//!
//! [problem]
//! kind = "cournot_paper"      # cournot | l1_box | strongly_convex | degenerate_face | scalar_tikhonov
//! seed = 7
//!
//! [budget]
//! full_map_equivalents = 20000
//! wall_seconds = 60           # optional
//!
//! [gap]                       # optional; defaults apply when omitted
//! n_samples = 2000
//!
//! [[cells]]
//! gamma0 = 0.1
//! eta0 = 0.1
//!
//! [[solvers]]
//! kind = "arbirg"
//! b = 0.25
//! r = 0.0
//!
//! [[solvers]]
//! kind = "sr"
//! regularizer = "identity"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::GapEstimatorConfig;
use crate::problem::{InitialPoint, ProblemSpec};
use crate::problems::{
    build_cournot, degenerate_face_instance, paper_cournot_instance, random_l1_box_instance_sized,
    random_strongly_convex_instance, scalar_tikhonov_instance, CournotParams,
};
use crate::schedule::{Schedule, ScheduleMode};
use crate::solvers::{Regularizer, SrConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads for replications; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_true")]
    pub record_wall_clock: bool,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    /// Fixed starting point; the default draws a projected standard normal.
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    pub problem: ProblemConfig,
    pub budget: BudgetConfig,
    #[serde(default = "default_true")]
    pub estimate_gap: bool,
    #[serde(default)]
    pub gap: Option<GapEstimatorConfig>,
    pub cells: Vec<CellConfig>,
    pub solvers: Vec<SolverConfig>,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_replications() -> u64 {
    25
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_true() -> bool {
    true
}
fn default_checkpoints() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    CournotPaper {
        #[serde(default)]
        seed: u64,
    },
    Cournot(CournotParams),
    L1Box {
        #[serde(default)]
        seed: u64,
        #[serde(default = "l1_m")]
        m: usize,
        #[serde(default = "l1_n")]
        n: usize,
        #[serde(default = "l1_block")]
        block_dim: usize,
    },
    StronglyConvex {
        #[serde(default)]
        seed: u64,
    },
    DegenerateFace,
    ScalarTikhonov,
}

fn l1_m() -> usize {
    3
}
fn l1_n() -> usize {
    8
}
fn l1_block() -> usize {
    2
}

impl ProblemConfig {
    pub fn build(&self) -> Result<ProblemSpec> {
        Ok(match self {
            ProblemConfig::CournotPaper { seed } => paper_cournot_instance(*seed),
            ProblemConfig::Cournot(params) => build_cournot(params.clone())?,
            ProblemConfig::L1Box { seed, m, n, block_dim } => {
                if *block_dim == 0 || n % block_dim != 0 || *m == 0 || m >= n {
                    return Err(Error::Config(format!(
                        "l1_box needs 0 < m < n and block_dim dividing n (m={m}, n={n}, block_dim={block_dim})"
                    )));
                }
                random_l1_box_instance_sized(*seed, *m, *n, *block_dim)
            }
            ProblemConfig::StronglyConvex { seed } => random_strongly_convex_instance(*seed),
            ProblemConfig::DegenerateFace => degenerate_face_instance(),
            ProblemConfig::ScalarTikhonov => scalar_tikhonov_instance(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub full_map_equivalents: Option<f64>,
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub id: Option<String>,
    pub gamma0: f64,
    pub eta0: f64,
}

impl CellConfig {
    pub fn label(&self) -> String {
        self.id
            .clone()
            .unwrap_or_else(|| format!("g{}-e{}", self.gamma0, self.eta0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    Arbirg {
        label: Option<String>,
        #[serde(default)]
        mode: ScheduleMode,
        /// Step decay exponent; fixed to 0.5 in bounded mode.
        a: Option<f64>,
        b: f64,
        #[serde(default)]
        r: f64,
    },
    Sr {
        label: Option<String>,
        #[serde(default = "sr_rho")]
        rho: f64,
        #[serde(default)]
        regularizer: Regularizer,
        #[serde(default = "sr_tol_floor")]
        tol_floor: f64,
        #[serde(default = "sr_tol_factor")]
        tol_factor: f64,
        #[serde(default = "sr_inner")]
        inner_max_iters: u64,
    },
}

fn sr_rho() -> f64 {
    0.5
}
fn sr_tol_floor() -> f64 {
    1e-8
}
fn sr_tol_factor() -> f64 {
    0.1
}
fn sr_inner() -> u64 {
    100_000
}

/// A solver instantiated for one cell.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverPlan {
    Arbirg(Schedule),
    Sr(SrConfig),
}

impl SolverConfig {
    pub fn label(&self) -> String {
        match self {
            SolverConfig::Arbirg { label: Some(l), .. } | SolverConfig::Sr { label: Some(l), .. } => l.clone(),
            SolverConfig::Arbirg { r, .. } => format!("arbirg-r{r}"),
            SolverConfig::Sr { .. } => "sr".into(),
        }
    }

    pub fn is_arbirg(&self) -> bool {
        matches!(self, SolverConfig::Arbirg { .. })
    }

    pub fn plan(&self, cell: &CellConfig) -> Result<SolverPlan> {
        match self {
            SolverConfig::Arbirg { mode, a, b, r, .. } => {
                let s = match mode {
                    ScheduleMode::BoundedX => {
                        if a.is_some_and(|a| a != 0.5) {
                            return Err(Error::Config("bounded_x mode fixes a = 0.5".into()));
                        }
                        Schedule::bounded(cell.gamma0, cell.eta0, *b, *r)
                    }
                    ScheduleMode::UnboundedX => {
                        let a = a.ok_or_else(|| Error::Config("unbounded_x mode needs `a`".into()))?;
                        Schedule::unbounded(cell.gamma0, cell.eta0, a, *b, *r)
                    }
                };
                s.validate().into_result()?;
                Ok(SolverPlan::Arbirg(s))
            }
            SolverConfig::Sr {
                rho,
                regularizer,
                tol_floor,
                tol_factor,
                inner_max_iters,
                ..
            } => {
                let mut c = SrConfig::new(cell.eta0).with_regularizer(*regularizer);
                c.rho = *rho;
                c.tol_floor = *tol_floor;
                c.tol_factor = *tol_factor;
                c.inner_max_iters = *inner_max_iters;
                Ok(SolverPlan::Sr(c))
            }
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn initial_point(&self) -> InitialPoint {
        match &self.initial {
            Some(x) => InitialPoint::Fixed(x.clone()),
            None => InitialPoint::ProjectedNormal,
        }
    }

    /// Checks everything that can be checked without running: counts,
    /// budgets, schedules, unique labels.
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        let b = &self.budget;
        if b.full_map_equivalents.is_none() && b.wall_seconds.is_none() {
            return Err(Error::Config("budget needs full_map_equivalents and/or wall_seconds".into()));
        }
        if b.full_map_equivalents.is_some_and(|e| !(e > 0.0)) || b.wall_seconds.is_some_and(|w| !(w > 0.0)) {
            return Err(Error::Config("budgets must be positive".into()));
        }
        if self.checkpoints < 2 {
            return Err(Error::Config("checkpoints must be at least 2".into()));
        }
        if self.cells.is_empty() || self.solvers.is_empty() {
            return Err(Error::Config("at least one cell and one solver are required".into()));
        }
        if let Some(g) = &self.gap {
            g.validate()?;
        }
        let mut labels: Vec<String> = self.solvers.iter().map(SolverConfig::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("solver labels must be unique".into()));
        }
        let mut cells: Vec<String> = self.cells.iter().map(CellConfig::label).collect();
        cells.sort();
        if cells.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("cell ids must be unique".into()));
        }
        for cell in &self.cells {
            for s in &self.solvers {
                s.plan(cell)
                    .map_err(|e| Error::Config(format!("{} in cell {}: {e}", s.label(), cell.label())))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        name = "demo"
        replications = 2
        master_seed = 9
        [problem]
        kind = "cournot_paper"
        seed = 3
        [budget]
        full_map_equivalents = 100
        [[cells]]
        gamma0 = 0.1
        eta0 = 1.0
        [[solvers]]
        kind = "arbirg"
        b = 0.25
        [[solvers]]
        kind = "sr"
        regularizer = "identity"
    "#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.replications, 2);
        assert_eq!(cfg.cells[0].label(), "g0.1-e1");
        assert_eq!(cfg.solvers[0].label(), "arbirg-r0");
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_schedule() {
        let bad = SAMPLE.replace("b = 0.25", "b = 0.7");
        assert!(matches!(ExperimentConfig::from_toml_str(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_zero_replications() {
        let bad = SAMPLE.replace("replications = 2", "replications = 0");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
    }
}
