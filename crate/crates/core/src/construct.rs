//! Initial feasible solutions: recursive cheapest insertion, and a balanced
//! assignment that spreads free targets over vehicles in proportion to speed
//! before building tours.

use thiserror::Error;

use crate::model::{Instance, Solution, Tour};
use crate::tourkit::{nn_construct, optimize_tour, TourOptimizerBudget};
use crate::transport::assign_min_cost;

#[derive(Debug, Error, PartialEq)]
pub enum MoveError {
    #[error("target {0} is already in the tour")]
    AlreadyInTour(usize),
    #[error("target {0} is not in the tour")]
    NotInTour(usize),
    #[error("group is empty")]
    EmptyGroup,
    #[error("group of {got} is below the minimum size of {min}")]
    GroupTooSmall { got: usize, min: usize },
    #[error("group members must be consecutive in the tour, allowing only required-target gaps")]
    NonConsecutiveGroup,
}

/// Which stage-1 method builds the starting solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstructionMethod {
    /// Grow tours one cheapest target at a time, always feeding the vehicle
    /// with the least tour cost.
    #[default]
    RecursiveInsertion,
    /// Assign free targets up front, balancing counts by vehicle speed at
    /// minimum depot-distance cost, then build each tour.
    BalancedAssignment,
}

/// Cheapest way to splice `target` into the closed tour: the minimum over all
/// tour edges of the detour time, plus the slot index achieving it. For an
/// empty tour this is the out-and-back cost at slot 0. Slot `p` inserts the
/// target between `order[p-1]` and `order[p]`, with the depot at both ends.
pub fn insertion_cost_single(
    inst: &Instance,
    target: usize,
    tour: &Tour,
    ) -> Result<(f64, usize), MoveError> {
    if tour.order.contains(&target) {
        return Err(MoveError::AlreadyInTour(target));
    }
    Ok(insertion_cost_unchecked(inst, target, tour.vehicle, &tour.order))
}

/// Core of [`insertion_cost_single`] without the membership check; also used
/// on scratch orders inside the neighborhood searches.
pub(crate) fn insertion_cost_unchecked(
    inst: &Instance,
    target: usize,
    vehicle: usize,
    order: &[usize],
) -> (f64, usize) {
    let speed = inst.vehicle(vehicle).speed;
    if order.is_empty() {
        return (2.0 * inst.dist_dt(vehicle, target) / speed, 0);
    }
    let n = order.len();
    let mut best = f64::INFINITY;
    let mut best_slot = 0;
    for slot in 0..=n {
        let to_head = if slot == 0 {
            inst.dist_dt(vehicle, target)
        } else {
            inst.dist_tt(order[slot - 1], target)
        };
        let to_tail = if slot == n {
            inst.dist_dt(vehicle, target)
        } else {
            inst.dist_tt(target, order[slot])
        };
        let base = match (slot == 0, slot == n) {
            (true, true) => 0.0,
            (true, false) => inst.dist_dt(vehicle, order[0]),
            (false, true) => inst.dist_dt(vehicle, order[n - 1]),
            (false, false) => inst.dist_tt(order[slot - 1], order[slot]),
        };
        let cost = (to_head + to_tail - base) / speed;
        if cost < best {
            best = cost;
            best_slot = slot;
        }
    }
    (best, best_slot)
}

/// Stage-1 construction by recursive insertion: seed every vehicle with its
/// required targets, then repeatedly hand the globally cheapest free target
/// to the vehicle with the least tour cost, and finally optimize every tour.
pub fn recursive_insertion(inst: &Instance, budget: &TourOptimizerBudget) -> Solution {
    let mut tours = seed_required_tours(inst, budget);
    let mut free = inst.free_targets();

    while !free.is_empty() {
        // Least-cost vehicle; ties go to the lower index.
        let mut vehicle = 0;
        for i in 1..tours.len() {
            if tours[i].cost < tours[vehicle].cost {
                vehicle = i;
            }
        }
        // Globally cheapest (target, slot) for that vehicle; ties go to the
        // lower target id, then the lower slot (the scan order guarantees it).
        let mut best_idx = 0;
        let mut best_cost = f64::INFINITY;
        let mut best_slot = 0;
        for (idx, &t) in free.iter().enumerate() {
            let (cost, slot) =
                insertion_cost_unchecked(inst, t, vehicle, &tours[vehicle].order);
            if cost < best_cost {
                best_cost = cost;
                best_idx = idx;
                best_slot = slot;
            }
        }
        let target = free.remove(best_idx);
        tours[vehicle].order.insert(best_slot, target);
        tours[vehicle].cost += best_cost;
    }

    for tour in &mut tours {
        optimize_tour(inst, tour, budget);
    }
    Solution::from_tours(tours)
}

/// Stage-1 construction by balanced assignment: free targets are allocated to
/// vehicles at minimum total depot-distance cost subject to speed-weighted
/// quotas, then each tour is built and optimized.
pub fn balanced_assignment_construct(inst: &Instance, budget: &TourOptimizerBudget) -> Solution {
    let free = inst.free_targets();
    let quotas = speed_quotas(
        free.len(),
        &inst.vehicles().iter().map(|v| v.speed).collect::<Vec<_>>(),
    );
    let costs: Vec<Vec<f64>> = free
        .iter()
        .map(|&t| {
            (0..inst.num_vehicles())
                .map(|j| inst.dist_dt(j, t) / inst.vehicle(j).speed)
                .collect()
        })
        .collect();
    let assignment = assign_min_cost(&costs, &quotas);

    let mut per_vehicle: Vec<Vec<usize>> = (0..inst.num_vehicles())
        .map(|j| inst.vehicle(j).required.clone())
        .collect();
    for (idx, &j) in assignment.iter().enumerate() {
        per_vehicle[j].push(free[idx]);
    }

    let mut tours = Vec::with_capacity(inst.num_vehicles());
    for (j, targets) in per_vehicle.iter().enumerate() {
        let mut tour = nn_construct(inst, j, targets);
        optimize_tour(inst, &mut tour, budget);
        tours.push(tour);
    }
    Solution::from_tours(tours)
}

/// Per-vehicle target quotas proportional to speed, rounded by largest
/// remainder so they sum to `free_count`. Remainder ties go to the lower
/// vehicle index.
pub fn speed_quotas(free_count: usize, speeds: &[f64]) -> Vec<usize> {
    let total: f64 = speeds.iter().sum();
    let shares: Vec<f64> = speeds
        .iter()
        .map(|v| free_count as f64 * v / total)
        .collect();
    let mut quotas: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let assigned: usize = quotas.iter().sum();
    let mut order: Vec<usize> = (0..speeds.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &j in order.iter().take(free_count - assigned) {
        quotas[j] += 1;
    }
    quotas
}

fn seed_required_tours(inst: &Instance, budget: &TourOptimizerBudget) -> Vec<Tour> {
    (0..inst.num_vehicles())
        .map(|j| {
            let mut tour = nn_construct(inst, j, &inst.vehicle(j).required);
            optimize_tour(inst, &mut tour, budget);
            tour
        })
        .collect()
}
