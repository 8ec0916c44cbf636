//! Experiment matrices: a TOML grid of solver configurations crossed with a
//! set of instances, executed on a worker pool with rows streamed to a
//! crash-safe CSV sink.

use std::panic::AssertUnwindSafe;
use std::sync::mpsc;
use std::time::Duration;

use mmtsp_core::construct::ConstructionMethod;
use mmtsp_core::model::Instance;
use mmtsp_core::neighborhoods::{
    FixedReturnSort, GroupInsertionMethod, MultiSwapConfig, MultiSwapStructure, SwitchSwapConfig,
    VehicleSortMetric,
};
use mmtsp_core::solver::{solve, SolverConfig};
use mmtsp_core::tourkit::TourOptimizerBudget;
use serde::Deserialize;
use thiserror::Error;

use crate::results::{ResultRow, RowStatus};

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("grid file: {0}")]
    Grid(#[from] toml::de::Error),
    #[error("grid defines no configs")]
    EmptyGrid,
    #[error("config {label}: {message}")]
    BadConfig { label: String, message: String },
}

/// One grid cell's solver settings, as written in the TOML grid file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub label: String,
    #[serde(default = "default_construction")]
    pub construction: String,
    #[serde(default = "default_metric")]
    pub metric: String,
    #[serde(default = "default_top_vehicles")]
    pub top_vehicles: usize,
    #[serde(default = "default_multiswap")]
    pub multiswap: String,
    #[serde(default = "default_group_size")]
    pub group_size: usize,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    #[serde(default = "default_fixed_sort")]
    pub fixed_sort: String,
    #[serde(default = "default_group_insertion")]
    pub group_insertion: String,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_time_limit")]
    pub time_limit_s: u64,
}

fn default_construction() -> String {
    "recursive".into()
}
fn default_metric() -> String {
    "insertion".into()
}
fn default_top_vehicles() -> usize {
    2
}
fn default_multiswap() -> String {
    "fixed".into()
}
fn default_group_size() -> usize {
    2
}
fn default_candidates() -> usize {
    20
}
fn default_fixed_sort() -> String {
    "insertion".into()
}
fn default_group_insertion() -> String {
    "group-edge".into()
}
fn default_runs() -> usize {
    3
}
fn default_time_limit() -> u64 {
    3600
}

pub fn parse_construction(s: &str) -> Result<ConstructionMethod, String> {
    match s {
        "recursive" => Ok(ConstructionMethod::RecursiveInsertion),
        "balance" => Ok(ConstructionMethod::BalancedAssignment),
        other => Err(format!("unknown construction {other:?} (recursive|balance)")),
    }
}

pub fn parse_metric(s: &str) -> Result<VehicleSortMetric, String> {
    match s {
        "insertion" => Ok(VehicleSortMetric::LeastInsertionCost),
        "estimated" => Ok(VehicleSortMetric::LeastEstimatedTour),
        "actual" => Ok(VehicleSortMetric::LeastActualTour),
        other => Err(format!("unknown metric {other:?} (insertion|estimated|actual)")),
    }
}

pub fn parse_fixed_sort(s: &str) -> Result<FixedReturnSort, String> {
    match s {
        "insertion" => Ok(FixedReturnSort::InsertionCost),
        "savings-minus-insertion" => Ok(FixedReturnSort::SavingsMinusInsertion),
        other => Err(format!(
            "unknown fixed sort {other:?} (insertion|savings-minus-insertion)"
        )),
    }
}

pub fn parse_group_insertion(s: &str) -> Result<GroupInsertionMethod, String> {
    match s {
        "group-edge" => Ok(GroupInsertionMethod::GroupEdge),
        "recursive" => Ok(GroupInsertionMethod::Recursive),
        other => Err(format!(
            "unknown group insertion {other:?} (group-edge|recursive)"
        )),
    }
}

/// Builds the multi-target swap configuration named by the CLI-style strings;
/// `off` disables the neighborhood.
pub fn parse_multiswap(
    kind: &str,
    group_size: usize,
    candidates: usize,
    fixed_sort: FixedReturnSort,
    group_insertion: GroupInsertionMethod,
) -> Result<Option<MultiSwapConfig>, String> {
    let structure = match kind {
        "off" => return Ok(None),
        "fixed" => MultiSwapStructure::Fixed,
        "variable" => MultiSwapStructure::Variable,
        other => Err(format!("unknown multiswap {other:?} (off|fixed|variable)"))?,
    };
    if group_size < 2 {
        return Err("group size must be at least 2".into());
    }
    if candidates < 1 {
        return Err("candidate cap must be at least 1".into());
    }
    Ok(Some(MultiSwapConfig {
        structure,
        group_size,
        n_candidates: candidates,
        fixed_sort,
        variable_insertion: group_insertion,
    }))
}

impl ConfigSpec {
    pub fn to_solver_config(&self, rng_seed: u64) -> Result<SolverConfig, MatrixError> {
        let bad = |message: String| MatrixError::BadConfig {
            label: self.label.clone(),
            message,
        };
        if self.top_vehicles < 1 {
            return Err(bad("top_vehicles must be at least 1".into()));
        }
        if self.runs < 1 {
            return Err(bad("runs must be at least 1".into()));
        }
        Ok(SolverConfig {
            construction: parse_construction(&self.construction).map_err(&bad)?,
            switch_swap: SwitchSwapConfig {
                metric: parse_metric(&self.metric).map_err(&bad)?,
                n_vehicles: self.top_vehicles,
            },
            multiswap: parse_multiswap(
                &self.multiswap,
                self.group_size,
                self.candidates,
                parse_fixed_sort(&self.fixed_sort).map_err(&bad)?,
                parse_group_insertion(&self.group_insertion).map_err(&bad)?,
            )
            .map_err(&bad)?,
            perturb_attempts: 5,
            runs: self.runs,
            rng_seed,
            time_limit: Duration::from_secs(self.time_limit_s),
            tour_budget: TourOptimizerBudget::default(),
        })
    }
}

#[derive(Debug, Deserialize)]
struct GridFile {
    #[serde(rename = "config")]
    configs: Vec<ConfigSpec>,
}

pub fn parse_grid(text: &str) -> Result<Vec<ConfigSpec>, MatrixError> {
    let grid: GridFile = toml::from_str(text)?;
    if grid.configs.is_empty() {
        return Err(MatrixError::EmptyGrid);
    }
    Ok(grid.configs)
}

/// Stable per-cell seed from the matrix seed, instance name, and config label.
pub fn cell_seed(matrix_seed: u64, instance: &str, config: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&matrix_seed.to_le_bytes());
    eat(instance.as_bytes());
    eat(&[0]);
    eat(config.as_bytes());
    h
}

/// Runs every (instance, config) cell on a worker pool, invoking `sink` from
/// a single thread as cells complete. Panicking cells become error rows and
/// the matrix continues.
pub fn run_matrix(
    instances: &[Instance],
    configs: &[ConfigSpec],
    matrix_seed: u64,
    jobs: usize,
    mut sink: impl FnMut(&ResultRow),
) -> Result<Vec<ResultRow>, MatrixError> {
    // Validate configs upfront so bad grids fail before any solving.
    for spec in configs {
        spec.to_solver_config(0)?;
    }

    let cells: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).map(move |c| (i, c)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let (tx, rx) = mpsc::channel::<ResultRow>();

    let mut rows = Vec::with_capacity(cells.len());
    pool.in_place_scope(|scope| {
        for &(i, c) in &cells {
            let tx = tx.clone();
            let inst = &instances[i];
            let spec = &configs[c];
            scope.spawn(move |_| {
                let row = run_cell(inst, spec, matrix_seed);
                let _ = tx.send(row);
            });
        }
        drop(tx);
        while let Ok(row) = rx.recv() {
            sink(&row);
            rows.push(row);
        }
    });
    Ok(rows)
}

fn run_cell(inst: &Instance, spec: &ConfigSpec, matrix_seed: u64) -> ResultRow {
    let seed = cell_seed(matrix_seed, inst.name(), &spec.label);
    let cfg = spec
        .to_solver_config(seed)
        .expect("configs validated upfront");
    let started = std::time::Instant::now();
    let outcome = std::panic::catch_unwind(AssertUnwindSafe(|| solve(inst, &cfg)));
    let wall_s = started.elapsed().as_secs_f64();
    match outcome {
        Ok(result) => {
            let truncated = result.records.iter().any(|r| r.truncated);
            ResultRow {
                instance: inst.name().to_string(),
                config: spec.label.clone(),
                objective: Some(result.best.objective),
                wall_s,
                seed,
                runs: cfg.runs as u32,
                status: if truncated {
                    RowStatus::Truncated
                } else {
                    RowStatus::Ok
                },
            }
        }
        Err(_) => ResultRow {
            instance: inst.name().to_string(),
            config: spec.label.clone(),
            objective: None,
            wall_s,
            seed,
            runs: cfg.runs as u32,
            status: RowStatus::Error,
        },
    }
}
