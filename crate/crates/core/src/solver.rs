//! Stage orchestration: construction, the neighborhood cascade, depot
//! perturbation to escape local minima, repeated seeded runs, and run
//! bookkeeping.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::{balanced_assignment_construct, recursive_insertion, ConstructionMethod};
use crate::model::{Instance, Point, Solution, Tour};
use crate::neighborhoods::{
    neighborhood_multiswap_fixed, neighborhood_multiswap_variable, neighborhood_swap,
    neighborhood_switch, MoveOutcome, MultiSwapConfig, MultiSwapStructure, SwitchSwapConfig,
};
use crate::tourkit::{optimize_tour, TourOptimizerBudget};

/// Angle added to each depot's perturbation direction on every retry.
pub const PERTURBATION_STEP_DEGREES: f64 = 144.0;

/// Full parameter set for [`solve`]. Defaults: recursive-insertion
/// construction, the least-insertion-cost metric over the top two vehicles,
/// the fixed-structure multi-target swap with pairs and twenty candidates,
/// three runs, and an hour cap per run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub construction: ConstructionMethod,
    pub switch_swap: SwitchSwapConfig,
    pub multiswap: Option<MultiSwapConfig>,
    /// Perturbation attempts per round before the heuristic stops.
    pub perturb_attempts: usize,
    /// Independent seeded runs; the best result is returned.
    pub runs: usize,
    pub rng_seed: u64,
    pub time_limit: Duration,
    pub tour_budget: TourOptimizerBudget,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            construction: ConstructionMethod::RecursiveInsertion,
            switch_swap: SwitchSwapConfig::default(),
            multiswap: Some(MultiSwapConfig::default()),
            perturb_attempts: 5,
            runs: 3,
            rng_seed: 0,
            time_limit: Duration::from_secs(3600),
            tour_budget: TourOptimizerBudget::default(),
        }
    }
}

/// Pipeline stage that produced a trace entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageTag {
    Construction,
    LocalSearch,
    Perturbation,
}

impl std::fmt::Display for StageTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StageTag::Construction => write!(f, "construction"),
            StageTag::LocalSearch => write!(f, "local-search"),
            StageTag::Perturbation => write!(f, "perturbation"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub stage: StageTag,
    pub objective: f64,
    pub elapsed: Duration,
}

/// Bookkeeping for one seeded run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub instance: String,
    pub objective: f64,
    pub wall: Duration,
    pub trace: Vec<TraceEntry>,
    pub seed: u64,
    /// Set when the run stopped on the time limit rather than convergence.
    pub truncated: bool,
}

/// Outcome of [`solve`]: the best solution over all runs plus per-run records.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best: Solution,
    pub records: Vec<RunRecord>,
}

fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}

/// Runs the neighborhood cascade to a joint local optimum: the switch
/// neighborhood to exhaustion, then one swap attempt (restarting the cascade
/// on success), then the configured multi-target swap (likewise restarting).
pub fn local_search(sol: &Solution, inst: &Instance, cfg: &SolverConfig) -> Solution {
    let mut truncated = false;
    local_search_inner(sol.clone(), inst, cfg, None, &mut truncated)
}

fn local_search_inner(
    mut sol: Solution,
    inst: &Instance,
    cfg: &SolverConfig,
    deadline: Option<Instant>,
    truncated: &mut bool,
) -> Solution {
    loop {
        if past(deadline) {
            *truncated = true;
            return sol;
        }
        loop {
            let out = neighborhood_switch(&sol, inst, &cfg.switch_swap, &cfg.tour_budget);
            if !out.improved {
                break;
            }
            sol = out.solution;
            if past(deadline) {
                *truncated = true;
                return sol;
            }
        }
        let out = neighborhood_swap(&sol, inst, &cfg.switch_swap, &cfg.tour_budget);
        if out.improved {
            sol = out.solution;
            continue;
        }
        if let Some(ms) = &cfg.multiswap {
            let out = match ms.structure {
                MultiSwapStructure::Fixed => {
                    neighborhood_multiswap_fixed(&sol, inst, ms, &cfg.tour_budget)
                }
                MultiSwapStructure::Variable => {
                    neighborhood_multiswap_variable(&sol, inst, ms, &cfg.tour_budget)
                }
            };
            if out.improved {
                sol = out.solution;
                continue;
            }
        }
        return sol;
    }
}

/// Depot displaced by the average time of its two tour-end edges, along
/// `angle`. An empty tour leaves the depot in place.
pub fn perturb_depot(inst: &Instance, tour: &Tour, angle: f64) -> Point {
    let spec = inst.vehicle(tour.vehicle);
    let Some((&first, _)) = tour.order.split_first() else {
        return spec.depot;
    };
    let last = *tour.order.last().unwrap();
    let radius = 0.5 * (inst.dist_dt(tour.vehicle, last) + inst.dist_dt(tour.vehicle, first))
        / spec.speed;
    Point::new(
        spec.depot.x + radius * angle.cos(),
        spec.depot.y + radius * angle.sin(),
    )
}

/// One attempt of a perturbation round, for trace inspection.
#[derive(Debug, Clone)]
pub struct PerturbationAttempt {
    /// Displacement angle used for each vehicle, in radians.
    pub angles: Vec<f64>,
    /// True-graph objective of the candidate built from this attempt.
    pub candidate_objective: f64,
    pub improved: bool,
}

/// One perturbation round: draw a random base angle per vehicle, then up to
/// `perturb_attempts` times displace every depot (stepping the angle by 144
/// degrees per retry), rebuild the incumbent allocation on the displaced
/// graph, locally optimize there, map the allocation back to the true depots,
/// and accept the first strict improvement.
pub fn perturbation_round<R: Rng>(
    sol: &Solution,
    inst: &Instance,
    cfg: &SolverConfig,
    rng: &mut R,
) -> MoveOutcome {
    let mut truncated = false;
    perturbation_round_inner(sol, inst, cfg, rng, None, None, &mut truncated)
}

/// [`perturbation_round`] with every attempt recorded into `attempts`.
pub fn perturbation_round_traced<R: Rng>(
    sol: &Solution,
    inst: &Instance,
    cfg: &SolverConfig,
    rng: &mut R,
    attempts: &mut Vec<PerturbationAttempt>,
) -> MoveOutcome {
    let mut truncated = false;
    perturbation_round_inner(sol, inst, cfg, rng, None, Some(attempts), &mut truncated)
}

fn perturbation_round_inner<R: Rng>(
    sol: &Solution,
    inst: &Instance,
    cfg: &SolverConfig,
    rng: &mut R,
    deadline: Option<Instant>,
    mut attempts: Option<&mut Vec<PerturbationAttempt>>,
    truncated: &mut bool,
) -> MoveOutcome {
    let k = inst.num_vehicles();
    let base: Vec<f64> = (0..k)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let step = PERTURBATION_STEP_DEGREES.to_radians();

    for attempt in 0..cfg.perturb_attempts.max(1) {
        if past(deadline) {
            *truncated = true;
            break;
        }
        let angles: Vec<f64> = base
            .iter()
            .map(|&theta| theta + attempt as f64 * step)
            .collect();
        let depots: Vec<Point> = (0..k)
            .map(|j| perturb_depot(inst, &sol.tours[j], angles[j]))
            .collect();
        let displaced = inst
            .with_depots(&depots)
            .expect("displaced depots stay finite");

        // Same allocation, tours rebuilt and optimized on the displaced graph.
        let rebuilt: Vec<Tour> = sol
            .tours
            .iter()
            .map(|t| {
                let mut tour = Tour::new(&displaced, t.vehicle, t.order.clone());
                optimize_tour(&displaced, &mut tour, &cfg.tour_budget);
                tour
            })
            .collect();
        let displaced_sol = local_search_inner(
            Solution::from_tours(rebuilt),
            &displaced,
            cfg,
            deadline,
            truncated,
        );

        // Map the allocation back onto the true depots.
        let true_tours: Vec<Tour> = displaced_sol
            .tours
            .iter()
            .map(|t| {
                let mut tour = Tour::new(inst, t.vehicle, t.order.clone());
                optimize_tour(inst, &mut tour, &cfg.tour_budget);
                tour
            })
            .collect();
        let candidate = Solution::from_tours(true_tours);
        let improved = candidate.objective < sol.objective;
        if let Some(log) = attempts.as_deref_mut() {
            log.push(PerturbationAttempt {
                angles,
                candidate_objective: candidate.objective,
                improved,
            });
        }
        if improved {
            return MoveOutcome {
                improved: true,
                solution: candidate,
            };
        }
    }
    MoveOutcome {
        improved: false,
        solution: sol.clone(),
    }
}

/// Decorrelates per-run RNG streams from the base seed.
fn derive_run_seed(base: u64, run: usize) -> u64 {
    let mut z = base.wrapping_add((run as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Full heuristic: for each seeded run, construct, locally optimize, and
/// alternate perturbation rounds with local search until a round exhausts all
/// attempts without improvement or the time limit passes. Returns the best
/// solution across runs. Deterministic for a fixed `(instance, config)`.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> SolveResult {
    solve_with_observer(inst, cfg, &mut |_, _| {})
}

/// [`solve`] invoking `observe` with every new incumbent as it is accepted.
pub fn solve_with_observer(
    inst: &Instance,
    cfg: &SolverConfig,
    observe: &mut dyn FnMut(StageTag, &Solution),
) -> SolveResult {
    let mut best: Option<Solution> = None;
    let mut records = Vec::with_capacity(cfg.runs.max(1));

    for run in 0..cfg.runs.max(1) {
        let started = Instant::now();
        let deadline = started.checked_add(cfg.time_limit);
        let seed = derive_run_seed(cfg.rng_seed, run);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut trace = Vec::new();
        let mut truncated = false;

        let mut sol = match cfg.construction {
            ConstructionMethod::RecursiveInsertion => recursive_insertion(inst, &cfg.tour_budget),
            ConstructionMethod::BalancedAssignment => {
                balanced_assignment_construct(inst, &cfg.tour_budget)
            }
        };
        observe(StageTag::Construction, &sol);
        trace.push(TraceEntry {
            stage: StageTag::Construction,
            objective: sol.objective,
            elapsed: started.elapsed(),
        });

        sol = local_search_inner(sol, inst, cfg, deadline, &mut truncated);
        observe(StageTag::LocalSearch, &sol);
        trace.push(TraceEntry {
            stage: StageTag::LocalSearch,
            objective: sol.objective,
            elapsed: started.elapsed(),
        });

        loop {
            if past(deadline) {
                truncated = true;
                break;
            }
            let out = perturbation_round_inner(
                &sol, inst, cfg, &mut rng, deadline, None, &mut truncated,
            );
            if !out.improved {
                break;
            }
            sol = out.solution;
            observe(StageTag::Perturbation, &sol);
            trace.push(TraceEntry {
                stage: StageTag::Perturbation,
                objective: sol.objective,
                elapsed: started.elapsed(),
            });
            sol = local_search_inner(sol, inst, cfg, deadline, &mut truncated);
            observe(StageTag::LocalSearch, &sol);
            trace.push(TraceEntry {
                stage: StageTag::LocalSearch,
                objective: sol.objective,
                elapsed: started.elapsed(),
            });
        }

        records.push(RunRecord {
            instance: inst.name().to_string(),
            objective: sol.objective,
            wall: started.elapsed(),
            trace,
            seed,
            truncated,
        });
        if best.as_ref().is_none_or(|b| sol.objective < b.objective) {
            best = Some(sol);
        }
    }

    SolveResult {
        best: best.expect("at least one run"),
        records,
    }
}
