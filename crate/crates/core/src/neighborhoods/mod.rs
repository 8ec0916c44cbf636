//! Stage-2 local search primitives: savings/insertion metrics and the three
//! neighborhoods that unload the maximal vehicle (single-target switch,
//! single-target swap, and fixed- or variable-structure multi-target swap).
//!
//! Every neighborhood evaluates candidate moves with tracked proxy costs
//! (savings and insertion deltas, plus 2-opt deltas in the multi-target
//! case) and only runs the full tour optimizer once a candidate strictly
//! beats the incumbent objective. A move accepted on proxy costs therefore
//! always yields a strictly better solution after re-optimization.

mod multiswap;
mod switch_swap;

pub use multiswap::{
    group_insertion_cost, group_savings, neighborhood_multiswap_fixed,
    neighborhood_multiswap_fixed_probed, neighborhood_multiswap_variable,
    neighborhood_multiswap_variable_probed, recursive_group_insertion,
    recursive_group_insertion_cost, removal_ratio, GroupOrientation,
};
pub use switch_swap::{
    neighborhood_swap, neighborhood_swap_probed, neighborhood_switch, neighborhood_switch_probed,
};

use crate::construct::{insertion_cost_unchecked, MoveError};
use crate::model::{Instance, Solution, Tour};

/// How candidate vehicles are ranked when moving a target off the maximal
/// vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VehicleSortMetric {
    /// Ascending current tour cost.
    LeastActualTour,
    /// Ascending cost of inserting the candidate target.
    #[default]
    LeastInsertionCost,
    /// Ascending estimated tour cost after the insertion.
    LeastEstimatedTour,
}

/// Parameters for the switch and swap neighborhoods.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSwapConfig {
    pub metric: VehicleSortMetric,
    /// Number of top-ranked vehicles tried per candidate target.
    pub n_vehicles: usize,
}

impl Default for SwitchSwapConfig {
    fn default() -> Self {
        SwitchSwapConfig {
            metric: VehicleSortMetric::LeastInsertionCost,
            n_vehicles: 2,
        }
    }
}

/// Multi-target swap flavor: exchange groups of exactly `group_size` (against
/// `group_size - 1` or `group_size`), or groups of any size up to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiSwapStructure {
    Fixed,
    Variable,
}

/// Ranking of the return candidates in the fixed-structure neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FixedReturnSort {
    /// Ascending cost of inserting into the maximal vehicle.
    #[default]
    InsertionCost,
    /// Descending (savings in the donor minus insertion into the maximal).
    SavingsMinusInsertion,
}

/// How a target group is priced into (and spliced into) the receiving tour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupInsertionMethod {
    /// As one oriented block between two tour vertices.
    #[default]
    GroupEdge,
    /// One member at a time, each at its own cheapest slot.
    Recursive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiSwapConfig {
    pub structure: MultiSwapStructure,
    /// Group size (fixed) or group size bound (variable); at least 2.
    pub group_size: usize,
    /// Cap on return candidates examined per outgoing group.
    pub n_candidates: usize,
    pub fixed_sort: FixedReturnSort,
    pub variable_insertion: GroupInsertionMethod,
}

impl Default for MultiSwapConfig {
    fn default() -> Self {
        MultiSwapConfig {
            structure: MultiSwapStructure::Fixed,
            group_size: 2,
            n_candidates: 20,
            fixed_sort: FixedReturnSort::InsertionCost,
            variable_insertion: GroupInsertionMethod::GroupEdge,
        }
    }
}

/// Result of one neighborhood exploration. When `improved` is set the
/// solution is a strictly better incumbent; otherwise it is the input.
#[derive(Debug, Clone)]
pub struct MoveOutcome {
    pub improved: bool,
    pub solution: Solution,
}

impl MoveOutcome {
    fn unchanged(sol: &Solution) -> Self {
        MoveOutcome {
            improved: false,
            solution: sol.clone(),
        }
    }

    fn improved(solution: Solution) -> Self {
        MoveOutcome {
            improved: true,
            solution,
        }
    }
}

/// Receives every tentative per-tour cost estimate a neighborhood evaluates,
/// paired with the tentative visiting order it describes. Lets tests check
/// the tracked proxy costs against from-scratch recomputation.
pub trait ProbeSink {
    fn enabled(&self) -> bool {
        true
    }
    fn record(&mut self, vehicle: usize, order: &[usize], tracked_cost: f64);
}

/// Sink that ignores all probes; the tentative orders are then never
/// materialized on the fast path.
pub struct NoProbe;

impl ProbeSink for NoProbe {
    fn enabled(&self) -> bool {
        false
    }
    fn record(&mut self, _vehicle: usize, _order: &[usize], _tracked_cost: f64) {}
}

/// One recorded tentative evaluation.
#[derive(Debug, Clone)]
pub struct Probe {
    pub vehicle: usize,
    pub order: Vec<usize>,
    pub tracked_cost: f64,
}

/// Sink that collects every probe.
#[derive(Debug, Default)]
pub struct ProbeLog {
    pub probes: Vec<Probe>,
}

impl ProbeSink for ProbeLog {
    fn record(&mut self, vehicle: usize, order: &[usize], tracked_cost: f64) {
        self.probes.push(Probe {
            vehicle,
            order: order.to_vec(),
            tracked_cost,
        });
    }
}

/// Tour-time decrease from removing `target` and reconnecting its neighbors
/// directly; the depot counts as a neighbor at the tour ends.
pub fn savings(inst: &Instance, target: usize, tour: &Tour) -> Result<f64, MoveError> {
    let pos = tour
        .order
        .iter()
        .position(|&t| t == target)
        .ok_or(MoveError::NotInTour(target))?;
    Ok(savings_at(inst, tour.vehicle, &tour.order, pos))
}

/// Savings of removing the target at `pos` from `order`.
pub(crate) fn savings_at(inst: &Instance, vehicle: usize, order: &[usize], pos: usize) -> f64 {
    let t = order[pos];
    let speed = inst.vehicle(vehicle).speed;
    let to_prev = if pos == 0 {
        inst.dist_dt(vehicle, t)
    } else {
        inst.dist_tt(order[pos - 1], t)
    };
    let to_next = if pos + 1 == order.len() {
        inst.dist_dt(vehicle, t)
    } else {
        inst.dist_tt(t, order[pos + 1])
    };
    let bridge = match (pos == 0, pos + 1 == order.len()) {
        (true, true) => 0.0,
        (true, false) => inst.dist_dt(vehicle, order[1]),
        (false, true) => inst.dist_dt(vehicle, order[pos - 1]),
        (false, false) => inst.dist_tt(order[pos - 1], order[pos + 1]),
    };
    (to_prev + to_next - bridge) / speed
}

/// Estimated tour time after inserting a target with the given insertion cost.
pub fn estimated_cost_after_insert(prev_cost: f64, insertion_cost: f64) -> f64 {
    prev_cost + insertion_cost
}

/// Estimated tour time after removing a target with the given savings.
pub fn estimated_cost_after_remove(prev_cost: f64, savings: f64) -> f64 {
    prev_cost - savings
}

/// Ranks all vehicles except `exclude` for receiving `target`, ascending by
/// the chosen metric with ties broken by vehicle id.
pub fn sort_vehicles(
    inst: &Instance,
    metric: VehicleSortMetric,
    target: usize,
    sol: &Solution,
    exclude: usize,
) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = sol
        .tours
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != exclude)
        .map(|(j, tour)| {
            let key = match metric {
                VehicleSortMetric::LeastActualTour => tour.cost,
                VehicleSortMetric::LeastInsertionCost => {
                    insertion_cost_unchecked(inst, target, j, &tour.order).0
                }
                VehicleSortMetric::LeastEstimatedTour => estimated_cost_after_insert(
                    tour.cost,
                    insertion_cost_unchecked(inst, target, j, &tour.order).0,
                ),
            };
            (key, j)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, j)| j).collect()
}

/// Removable targets of the tour (those not required for its vehicle),
/// sorted by decreasing savings with ties to the lower target id.
pub(crate) fn removable_by_savings(inst: &Instance, tour: &Tour) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = tour
        .order
        .iter()
        .enumerate()
        .filter(|&(_, &t)| !inst.is_required(tour.vehicle, t))
        .map(|(pos, &t)| (t, savings_at(inst, tour.vehicle, &tour.order, pos)))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Largest cached tour cost over all vehicles other than `a` and `b`.
pub(crate) fn max_other_cost(sol: &Solution, a: usize, b: usize) -> f64 {
    sol.tours
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != a && j != b)
        .map(|(_, t)| t.cost)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Point, VehicleSpec};

    fn line_instance() -> Instance {
        Instance::new(
            "t",
            vec![
                Point::new(0.0, 3.0),
                Point::new(4.0, 0.0),
                Point::new(8.0, 0.0),
            ],
            vec![
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                VehicleSpec::new(Point::new(0.0, 0.0), 2.0, vec![]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn savings_345_triangle() {
        // Neighbors (0,0)-depot and (4,0); removing (0,3) saves 3 + 5 - 4.
        let inst = line_instance();
        let tour = Tour::new(&inst, 0, vec![0, 1]);
        let s = savings(&inst, 0, &tour).unwrap();
        assert!((s - 4.0).abs() < 1e-12);
        let tour_fast = Tour::new(&inst, 1, vec![0, 1]);
        let s2 = savings(&inst, 0, &tour_fast).unwrap();
        assert!((s2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn savings_collinear_target_is_zero() {
        let inst = line_instance();
        let tour = Tour::new(&inst, 0, vec![1, 2]);
        // (4,0) lies on the segment depot-(8,0).
        let s = savings(&inst, 1, &tour).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn savings_rejects_absent_target() {
        let inst = line_instance();
        let tour = Tour::new(&inst, 0, vec![1]);
        assert_eq!(savings(&inst, 0, &tour).unwrap_err(), MoveError::NotInTour(0));
    }

    #[test]
    fn savings_equals_removal_delta() {
        let inst = line_instance();
        let tour = Tour::new(&inst, 0, vec![0, 1, 2]);
        for (pos, &t) in tour.order.iter().enumerate() {
            let s = savings(&inst, t, &tour).unwrap();
            let mut without = tour.order.clone();
            without.remove(pos);
            let delta = tour.cost - inst.tour_time(0, &without);
            assert!((s - delta).abs() < 1e-9);
        }
    }

    #[test]
    fn estimated_cost_helpers() {
        assert_eq!(estimated_cost_after_insert(10.0, 0.0), 10.0);
        assert_eq!(estimated_cost_after_insert(10.0, 2.5), 12.5);
        assert_eq!(estimated_cost_after_remove(10.0, 0.0), 10.0);
        assert_eq!(estimated_cost_after_remove(10.0, 2.5), 7.5);
    }

    #[test]
    fn estimates_match_physical_edit() {
        let inst = line_instance();
        let tour = Tour::new(&inst, 0, vec![0, 1, 2]);
        let s = savings(&inst, 1, &tour).unwrap();
        let removed = estimated_cost_after_remove(tour.cost, s);
        assert!((removed - inst.tour_time(0, &[0, 2])).abs() < 1e-9);

        let short = Tour::new(&inst, 0, vec![0, 2]);
        let (ins, slot) = crate::construct::insertion_cost_single(&inst, 1, &short).unwrap();
        let mut order = short.order.clone();
        order.insert(slot, 1);
        let inserted = estimated_cost_after_insert(short.cost, ins);
        assert!((inserted - inst.tour_time(0, &order)).abs() < 1e-9);
    }

    #[test]
    fn sort_vehicles_by_actual_cost() {
        let inst = Instance::new(
            "t",
            vec![
                Point::new(5.0, 0.0),
                Point::new(3.0, 0.0),
                Point::new(100.0, 0.0),
            ],
            vec![
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
            ],
        )
        .unwrap();
        let sol = Solution::from_tours(vec![
            Tour::new(&inst, 0, vec![0]), // cost 10
            Tour::new(&inst, 1, vec![1]), // cost 6
            Tour::new(&inst, 2, vec![2]), // cost 200, maximal
        ]);
        let order = sort_vehicles(&inst, VehicleSortMetric::LeastActualTour, 0, &sol, 2);
        assert_eq!(order, vec![1, 0]);
    }

    #[test]
    fn sort_vehicles_tie_breaks_by_id() {
        let inst = Instance::new(
            "t",
            vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(5.0, 5.0)],
            vec![
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
            ],
        )
        .unwrap();
        // Identical (empty) tours for vehicles 1 and 2.
        let sol = Solution::from_tours(vec![
            Tour::new(&inst, 0, vec![0, 1, 2]),
            Tour::empty(1),
            Tour::empty(2),
        ]);
        for metric in [
            VehicleSortMetric::LeastActualTour,
            VehicleSortMetric::LeastInsertionCost,
            VehicleSortMetric::LeastEstimatedTour,
        ] {
            assert_eq!(sort_vehicles(&inst, metric, 0, &sol, 0), vec![1, 2]);
        }
    }

    #[test]
    fn sort_vehicles_by_insertion_cost_matches_brute_force() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let pts: Vec<Point> = (0..9)
                .map(|_| Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)))
                .collect();
            let vehicles: Vec<VehicleSpec> = (0..4)
                .map(|_| {
                    VehicleSpec::new(
                        Point::new(rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)),
                        [1.0, 1.5, 2.0][rng.random_range(0..3)],
                        vec![],
                    )
                })
                .collect();
            let inst = Instance::new("r", pts, vehicles).unwrap();
            let sol = Solution::from_tours(vec![
                Tour::new(&inst, 0, vec![0, 1]),
                Tour::new(&inst, 1, vec![2, 3]),
                Tour::new(&inst, 2, vec![4, 5]),
                Tour::new(&inst, 3, vec![6, 7]),
            ]);
            let maximal = sol.maximal_vehicle();
            let ranked =
                sort_vehicles(&inst, VehicleSortMetric::LeastInsertionCost, 8, &sol, maximal);
            let mut expect: Vec<(f64, usize)> = (0..4)
                .filter(|&j| j != maximal)
                .map(|j| {
                    (
                        crate::construct::insertion_cost_single(&inst, 8, &sol.tours[j])
                            .unwrap()
                            .0,
                        j,
                    )
                })
                .collect();
            expect.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let expect: Vec<usize> = expect.into_iter().map(|(_, j)| j).collect();
            assert_eq!(ranked, expect);
        }
    }
}
