//! Solver library for the min-max multi-depot multiple traveling salesman
//! problem with heterogeneous vehicles: each vehicle has its own depot, speed,
//! and possibly a set of targets only it may visit, and the longest tour time
//! is minimized.
//!
//! The solver runs in three stages: an initial feasible construction
//! ([`construct`]), a local search cascading through three neighborhoods that
//! unload the busiest vehicle ([`neighborhoods`]), and a depot-perturbation
//! escape from local minima ([`solver`]). Tours are improved with the
//! deterministic 2-opt/Or-opt optimizer in [`tourkit`], which also provides
//! an exact dynamic-programming solver backing the [`oracle`] used to certify
//! optimality on small instances. [`instgen`] expands base instances into the
//! heterogeneous benchmark suite.

pub mod construct;
pub mod instgen;
pub mod model;
pub mod neighborhoods;
pub mod oracle;
pub mod solver;
pub mod tourkit;
mod transport;

pub use construct::{
    balanced_assignment_construct, insertion_cost_single, recursive_insertion, ConstructionMethod,
};
pub use model::{
    edge_cost, tour_cost, validate_solution, Instance, ModelError, Point, Solution, Tour,
    VehicleSpec,
};
pub use oracle::{brute_force_minmax, OracleLimit};
pub use solver::{solve, RunRecord, SolveResult, SolverConfig};
pub use tourkit::{exact_tsp_held_karp, optimize_tour, TourOptimizerBudget};
