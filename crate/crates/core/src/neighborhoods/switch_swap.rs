//! Neighborhood 1 (target switch) and neighborhood 2 (target swap).

use crate::construct::insertion_cost_unchecked;
use crate::model::{Instance, Solution};
use crate::tourkit::{optimize_tour, TourOptimizerBudget};

use super::{
    estimated_cost_after_insert, estimated_cost_after_remove, max_other_cost, removable_by_savings,
    savings_at, sort_vehicles, MoveOutcome, NoProbe, ProbeSink, SwitchSwapConfig,
};

/// Tries to move one target off the maximal vehicle into another vehicle.
///
/// Removable targets are visited in decreasing-savings order; for each, the
/// top `n_vehicles` receivers under the configured metric are tried. The
/// first candidate whose estimated objective strictly beats the incumbent is
/// applied, and both touched tours are re-optimized.
pub fn neighborhood_switch(
    sol: &Solution,
    inst: &Instance,
    cfg: &SwitchSwapConfig,
    budget: &TourOptimizerBudget,
) -> MoveOutcome {
    neighborhood_switch_probed(sol, inst, cfg, budget, &mut NoProbe)
}

/// [`neighborhood_switch`] with every tentative estimate reported to `sink`.
pub fn neighborhood_switch_probed(
    sol: &Solution,
    inst: &Instance,
    cfg: &SwitchSwapConfig,
    budget: &TourOptimizerBudget,
    sink: &mut dyn ProbeSink,
) -> MoveOutcome {
    let maximal = sol.maximal_vehicle();
    let tour_i = &sol.tours[maximal];

    for (target, sav) in removable_by_savings(inst, tour_i) {
        let est_i = estimated_cost_after_remove(tour_i.cost, sav);
        let receivers = sort_vehicles(inst, cfg.metric, target, sol, maximal);
        for &j in receivers.iter().take(cfg.n_vehicles) {
            let tour_j = &sol.tours[j];
            let (ins, slot) = insertion_cost_unchecked(inst, target, j, &tour_j.order);
            let est_j = estimated_cost_after_insert(tour_j.cost, ins);
            if sink.enabled() {
                let pos = tour_i.order.iter().position(|&t| t == target).unwrap();
                let mut without = tour_i.order.clone();
                without.remove(pos);
                sink.record(maximal, &without, est_i);
                let mut with = tour_j.order.clone();
                with.insert(slot, target);
                sink.record(j, &with, est_j);
            }
            let estimated_objective = est_i.max(est_j).max(max_other_cost(sol, maximal, j));
            if estimated_objective < sol.objective {
                let mut tours = sol.tours.clone();
                let pos = tours[maximal].order.iter().position(|&t| t == target).unwrap();
                tours[maximal].order.remove(pos);
                tours[maximal].cost = est_i;
                tours[j].order.insert(slot, target);
                tours[j].cost = est_j;
                optimize_tour(inst, &mut tours[maximal], budget);
                optimize_tour(inst, &mut tours[j], budget);
                return MoveOutcome::improved(Solution::from_tours(tours));
            }
        }
    }
    MoveOutcome::unchanged(sol)
}

/// Tries to exchange one target of the maximal vehicle against one target of
/// another vehicle.
///
/// Only vehicles covering at least one non-required target are eligible. For
/// each candidate receiver, the outgoing target is tentatively inserted at
/// its cheapest slot, the receiver's removable targets are ranked by their
/// insertion cost into the shortened maximal tour, and candidates are scanned
/// until one strictly improves the estimated objective. A receiver is
/// abandoned outright when even its cheapest return candidate costs the
/// maximal vehicle more than the outgoing target saved.
pub fn neighborhood_swap(
    sol: &Solution,
    inst: &Instance,
    cfg: &SwitchSwapConfig,
    budget: &TourOptimizerBudget,
) -> MoveOutcome {
    neighborhood_swap_probed(sol, inst, cfg, budget, &mut NoProbe)
}

/// [`neighborhood_swap`] with every tentative estimate reported to `sink`.
pub fn neighborhood_swap_probed(
    sol: &Solution,
    inst: &Instance,
    cfg: &SwitchSwapConfig,
    budget: &TourOptimizerBudget,
    sink: &mut dyn ProbeSink,
) -> MoveOutcome {
    let maximal = sol.maximal_vehicle();
    let tour_i = &sol.tours[maximal];

    for (target, sav_t) in removable_by_savings(inst, tour_i) {
        let pos = tour_i.order.iter().position(|&t| t == target).unwrap();
        let mut reduced_i = tour_i.order.clone();
        reduced_i.remove(pos);
        let reduced_i_cost = estimated_cost_after_remove(tour_i.cost, sav_t);

        let eligible: Vec<usize> = sort_vehicles(inst, cfg.metric, target, sol, maximal)
            .into_iter()
            .filter(|&j| {
                sol.tours[j]
                    .order
                    .iter()
                    .any(|&t| !inst.is_required(j, t))
            })
            .collect();

        for &j in eligible.iter().take(cfg.n_vehicles) {
            let tour_j = &sol.tours[j];
            let (ins_t, slot_t) = insertion_cost_unchecked(inst, target, j, &tour_j.order);
            let mut extended_j = tour_j.order.clone();
            extended_j.insert(slot_t, target);
            let extended_j_cost = estimated_cost_after_insert(tour_j.cost, ins_t);

            // Return candidates: everything in the receiver except the target
            // just parked there and the receiver's own required targets,
            // ranked by insertion cost into the shortened maximal tour.
            let mut candidates: Vec<(usize, f64, usize)> = extended_j
                .iter()
                .filter(|&&t| t != target && !inst.is_required(j, t))
                .map(|&t| {
                    let (ins, slot) = insertion_cost_unchecked(inst, t, maximal, &reduced_i);
                    (t, ins, slot)
                })
                .collect();
            candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

            for &(back, ins_back, slot_back) in &candidates {
                // A return that costs the maximal vehicle more than the
                // removal saved cannot improve, and candidates are sorted by
                // that cost: abandon this receiver.
                if sav_t < ins_back {
                    break;
                }
                let est_i = reduced_i_cost + ins_back;
                let back_pos = extended_j.iter().position(|&t| t == back).unwrap();
                let sav_back = savings_at(inst, j, &extended_j, back_pos);
                let est_j = estimated_cost_after_remove(extended_j_cost, sav_back);

                if sink.enabled() {
                    let mut tentative_i = reduced_i.clone();
                    tentative_i.insert(slot_back, back);
                    sink.record(maximal, &tentative_i, est_i);
                    let mut tentative_j = extended_j.clone();
                    tentative_j.remove(back_pos);
                    sink.record(j, &tentative_j, est_j);
                }

                let estimated_objective = est_i.max(est_j).max(max_other_cost(sol, maximal, j));
                if estimated_objective < sol.objective {
                    let mut tours = sol.tours.clone();
                    let mut new_i = reduced_i.clone();
                    new_i.insert(slot_back, back);
                    tours[maximal].order = new_i;
                    tours[maximal].cost = est_i;
                    let mut new_j = extended_j.clone();
                    new_j.remove(back_pos);
                    tours[j].order = new_j;
                    tours[j].cost = est_j;
                    optimize_tour(inst, &mut tours[maximal], budget);
                    optimize_tour(inst, &mut tours[j], budget);
                    return MoveOutcome::improved(Solution::from_tours(tours));
                }
            }
        }
    }
    MoveOutcome::unchanged(sol)
}
