use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mmtsp_core::instgen::generate_suite;
use mmtsp_core::model::{validate_solution, Instance, Point, VehicleSpec};
use mmtsp_core::oracle::{brute_force_minmax, OracleLimit};
use mmtsp_core::solver::{solve, SolverConfig};
use mmtsp_core::tourkit::TourOptimizerBudget;
use mmtsp_harness::format::{parse_instance_file, write_instance_file};
use mmtsp_harness::matrix::{self, parse_grid, run_matrix};
use mmtsp_harness::results::{
    self, compare_to_reference, emit_plot_data, print_summary, read_rows, write_comparison_csv,
    write_plot_csv, GroupBy, PlotValue, ReferenceTable, ResultRow, ResultSink, RowStatus,
};

#[derive(Parser)]
#[command(
    name = "mmtsp",
    about = "Min-max multi-depot mTSP solver and benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file with the three-stage heuristic.
    Solve(SolveArgs),
    /// Generate a heterogeneous benchmark suite from base instances.
    Generate(GenerateArgs),
    /// Run a grid of configurations over a set of instances.
    Matrix(MatrixArgs),
    /// Compare a results CSV against a reference table.
    Compare(CompareArgs),
    /// Exactly solve a tiny instance by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Aggregate a results CSV into box-plot-ready records.
    Plot(PlotArgs),
}

#[derive(Args)]
struct SolverFlags {
    /// Construction method for the initial solution.
    #[arg(long, default_value = "recursive", value_parser = ["recursive", "balance"])]
    construction: String,
    /// Vehicle-ranking metric for the switch and swap neighborhoods.
    #[arg(long, default_value = "insertion", value_parser = ["insertion", "estimated", "actual"])]
    metric: String,
    /// Vehicles tried per candidate target in the switch/swap neighborhoods.
    #[arg(long, default_value_t = 2)]
    top_vehicles: usize,
    /// Multi-target swap neighborhood flavor.
    #[arg(long, default_value = "fixed", value_parser = ["off", "fixed", "variable"])]
    multiswap: String,
    /// Group size (fixed) or bound (variable) for the multi-target swap.
    #[arg(long, default_value_t = 2)]
    group_size: usize,
    /// Return-candidate cap for the multi-target swap.
    #[arg(long, default_value_t = 20)]
    candidates: usize,
    /// Return-candidate ranking in the fixed-structure multi-target swap.
    #[arg(long, default_value = "insertion", value_parser = ["insertion", "savings-minus-insertion"])]
    fixed_sort: String,
    /// Group insertion method in the variable-structure multi-target swap.
    #[arg(long, default_value = "group-edge", value_parser = ["group-edge", "recursive"])]
    group_insertion: String,
    /// Independent seeded runs; the best result is kept.
    #[arg(long, default_value_t = 3)]
    runs: usize,
    /// Wall-clock cap per run, in seconds.
    #[arg(long, default_value_t = 3600)]
    time_limit: u64,
}

impl SolverFlags {
    fn to_config(&self, seed: u64) -> Result<SolverConfig> {
        let err = |m: String| anyhow::anyhow!(m);
        Ok(SolverConfig {
            construction: matrix::parse_construction(&self.construction).map_err(err)?,
            switch_swap: mmtsp_core::neighborhoods::SwitchSwapConfig {
                metric: matrix::parse_metric(&self.metric).map_err(err)?,
                n_vehicles: self.top_vehicles.max(1),
            },
            multiswap: matrix::parse_multiswap(
                &self.multiswap,
                self.group_size,
                self.candidates,
                matrix::parse_fixed_sort(&self.fixed_sort).map_err(err)?,
                matrix::parse_group_insertion(&self.group_insertion).map_err(err)?,
            )
            .map_err(err)?,
            perturb_attempts: 5,
            runs: self.runs.max(1),
            rng_seed: seed,
            time_limit: Duration::from_secs(self.time_limit),
            tour_budget: TourOptimizerBudget::default(),
        })
    }

    fn label(&self) -> String {
        let ms = if self.multiswap == "off" {
            "off".to_string()
        } else {
            format!("{}-m{}-c{}", self.multiswap, self.group_size, self.candidates)
        };
        format!(
            "{}-{}-n{}-ms:{}",
            self.construction, self.metric, self.top_vehicles, ms
        )
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file to solve.
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    flags: SolverFlags,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Append the result row to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print each vehicle's visiting order.
    #[arg(long)]
    print_tours: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// Base instance files to expand into heterogeneous variants.
    #[arg(long, num_args = 1.., conflicts_with = "random_bases")]
    bases: Vec<PathBuf>,
    /// Synthesize this many random base instances instead of reading files.
    #[arg(long)]
    random_bases: Option<usize>,
    /// Seed for speeds and synthetic bases.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the generated instance files.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct MatrixArgs {
    /// TOML grid of solver configurations.
    #[arg(long)]
    grid: PathBuf,
    /// Instance files forming the rows of the matrix.
    #[arg(long, num_args = 1..)]
    instances: Vec<PathBuf>,
    /// Results CSV (appended to, crash-safe).
    #[arg(long)]
    out: PathBuf,
    /// Matrix seed; per-cell seeds derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))]
    jobs: usize,
    /// Reference table for the deviation summary.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Exit nonzero if any cell errored.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Results CSV produced by `solve --out` or `matrix`.
    #[arg(long)]
    results: PathBuf,
    /// Reference CSV with columns instance,objective,time_s.
    #[arg(long)]
    reference: PathBuf,
    /// Write per-instance comparison rows to this CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file to solve exactly.
    #[arg(long)]
    instance: PathBuf,
    /// Cap on free (unassigned) targets.
    #[arg(long, default_value_t = 10)]
    max_free: usize,
    /// Cap on any vehicle's target count.
    #[arg(long, default_value_t = 13)]
    max_per_vehicle: usize,
}

#[derive(ValueEnum, Clone, Copy)]
enum PlotGroup {
    Config,
    Instance,
}

#[derive(ValueEnum, Clone, Copy)]
enum PlotMetric {
    Objective,
    Wall,
    Deviation,
}

#[derive(Args)]
struct PlotArgs {
    /// Results CSV to aggregate.
    #[arg(long)]
    results: PathBuf,
    #[arg(long, value_enum, default_value_t = PlotGroup::Config)]
    group_by: PlotGroup,
    #[arg(long, value_enum, default_value_t = PlotMetric::Deviation)]
    value: PlotMetric,
    /// Reference table (required for deviation plots).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Output CSV of per-group quartile records.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => cmd_solve(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let inst = parse_instance_file(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let cfg = args.flags.to_config(args.seed)?;
    let started = std::time::Instant::now();
    let result = solve(&inst, &cfg);
    let wall_s = started.elapsed().as_secs_f64();

    let report = validate_solution(&inst, &result.best);
    if !report.is_ok() {
        bail!("solver produced an infeasible solution: {:?}", report.violations);
    }
    let truncated = result.records.iter().any(|r| r.truncated);

    println!(
        "{}: objective {:.6} in {:.2}s over {} run(s){}",
        inst.name(),
        result.best.objective,
        wall_s,
        result.records.len(),
        if truncated { " [truncated]" } else { "" }
    );
    for record in &result.records {
        let stages: Vec<String> = record
            .trace
            .iter()
            .map(|t| format!("{} {:.4}", t.stage, t.objective))
            .collect();
        println!(
            "  seed {:>20}  objective {:.6}  wall {:.2}s  [{}]",
            record.seed,
            record.objective,
            record.wall.as_secs_f64(),
            stages.join(" -> ")
        );
    }
    if args.print_tours {
        for tour in &result.best.tours {
            println!(
                "  vehicle {} (cost {:.6}): {:?}",
                tour.vehicle, tour.cost, tour.order
            );
        }
    }

    if let Some(out) = args.out {
        let row = ResultRow {
            instance: inst.name().to_string(),
            config: args.flags.label(),
            objective: Some(result.best.objective),
            wall_s,
            seed: args.seed,
            runs: cfg.runs as u32,
            status: if truncated {
                RowStatus::Truncated
            } else {
                RowStatus::Ok
            },
        };
        ResultSink::append(&out)?.write(&row)?;
        println!("appended result row to {}", out.display());
    }
    Ok(())
}

/// Synthetic base instances spanning small to desk-scale shapes.
fn synthetic_bases(count: usize, seed: u64) -> Vec<Instance> {
    use rand::prelude::*;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let shapes = [
        (10, 3),
        (20, 3),
        (40, 5),
        (60, 5),
        (80, 8),
        (100, 10),
        (150, 10),
        (200, 15),
        (300, 15),
        (400, 20),
        (500, 20),
    ];
    (0..count)
        .map(|i| {
            let (n, k) = shapes[i % shapes.len()];
            let span = 100.0;
            let targets: Vec<Point> = (0..n)
                .map(|_| Point::new(rng.random_range(0.0..span), rng.random_range(0.0..span)))
                .collect();
            let vehicles: Vec<VehicleSpec> = (0..k)
                .map(|_| {
                    VehicleSpec::new(
                        Point::new(rng.random_range(0.0..span), rng.random_range(0.0..span)),
                        1.0,
                        vec![],
                    )
                })
                .collect();
            Instance::new(format!("MM{}", i + 1), targets, vehicles).expect("valid base")
        })
        .collect()
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let bases: Vec<Instance> = if let Some(count) = args.random_bases {
        synthetic_bases(count, args.seed)
    } else if !args.bases.is_empty() {
        let mut out = Vec::new();
        for path in &args.bases {
            match parse_instance_file(path) {
                Ok(inst) => out.push(inst),
                Err(err) => eprintln!("skipping {}: {err}", path.display()),
            }
        }
        out
    } else {
        bail!("provide --bases files or --random-bases N");
    };
    if bases.is_empty() {
        bail!("no readable base instances");
    }

    std::fs::create_dir_all(&args.out_dir)?;
    let suite = generate_suite(&bases, args.seed);
    for err in &suite.errors {
        eprintln!("warning: {err}");
    }
    for inst in &suite.instances {
        let path = args.out_dir.join(format!("{}.mmtsp", inst.name()));
        write_instance_file(inst, &path)?;
    }
    println!(
        "wrote {} instances from {} bases into {}",
        suite.instances.len(),
        bases.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn load_instances(paths: &[PathBuf]) -> Result<Vec<Instance>> {
    let mut instances = Vec::with_capacity(paths.len());
    for path in paths {
        instances.push(
            parse_instance_file(path)
                .with_context(|| format!("reading {}", path.display()))?,
        );
    }
    Ok(instances)
}

fn load_reference(path: &Path) -> Result<ReferenceTable> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "reference".into());
    Ok(ReferenceTable::from_csv_path(&name, path)?)
}

fn cmd_matrix(args: MatrixArgs) -> Result<()> {
    let grid_text = std::fs::read_to_string(&args.grid)
        .with_context(|| format!("reading {}", args.grid.display()))?;
    let configs = parse_grid(&grid_text)?;
    let instances = load_instances(&args.instances)?;
    let reference = args.reference.as_deref().map(load_reference).transpose()?;

    let mut sink = ResultSink::append(&args.out)?;
    println!(
        "running {} instances x {} configs on {} workers (seed {})",
        instances.len(),
        configs.len(),
        args.jobs,
        args.seed
    );
    let rows = run_matrix(&instances, &configs, args.seed, args.jobs, |row| {
        let objective = row
            .objective
            .map(|o| format!("{o:.6}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "  {} / {}: {} ({:.2}s, {})",
            row.instance, row.config, objective, row.wall_s, row.status
        );
        sink.write(row).expect("writing result row");
    })?;

    print_summary(&mut std::io::stdout(), &rows, reference.as_ref())?;
    let errors = rows.iter().filter(|r| r.status == RowStatus::Error).count();
    if errors > 0 {
        eprintln!("{errors} cell(s) errored");
        if args.strict {
            std::process::exit(1);
        }
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let rows = read_rows(&args.results)?;
    let reference = load_reference(&args.reference)?;
    let report = compare_to_reference(&rows, &reference)?;
    println!(
        "vs {}: better on {}, equal on {}, worse on {} of {} instances",
        reference.name,
        report.better,
        report.equal,
        report.worse,
        report.rows.len()
    );
    let devs: Vec<f64> = report.rows.iter().map(|r| r.deviation_pct).collect();
    if let Some(s) = results::summary_stats(&devs) {
        println!(
            "deviation%: min {:.2}  max {:.2}  mean {:.2}  median {:.2}",
            s.min, s.max, s.mean, s.median
        );
    }
    if let Some(out) = args.out {
        write_comparison_csv(&report, &out)?;
        println!("wrote per-instance comparison to {}", out.display());
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let inst = parse_instance_file(&args.instance)?;
    let limit = OracleLimit {
        max_free_targets: args.max_free,
        max_per_vehicle: args.max_per_vehicle,
    };
    let started = std::time::Instant::now();
    let out = brute_force_minmax(&inst, &limit)?;
    println!(
        "{}: optimal objective {:.6} in {:.2}s",
        inst.name(),
        out.objective,
        started.elapsed().as_secs_f64()
    );
    for tour in &out.solution.tours {
        println!(
            "  vehicle {} (cost {:.6}): {:?}",
            tour.vehicle, tour.cost, tour.order
        );
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let rows = read_rows(&args.results)?;
    let reference = args.reference.as_deref().map(load_reference).transpose()?;
    let group_by = match args.group_by {
        PlotGroup::Config => GroupBy::Config,
        PlotGroup::Instance => GroupBy::Instance,
    };
    let value = match args.value {
        PlotMetric::Objective => PlotValue::Objective,
        PlotMetric::Wall => PlotValue::WallSeconds,
        PlotMetric::Deviation => PlotValue::DeviationPct,
    };
    let records = emit_plot_data(&rows, group_by, value, reference.as_ref())?;
    write_plot_csv(&records, &args.out)?;
    println!("wrote {} plot group(s) to {}", records.len(), args.out.display());
    Ok(())
}
