//! Neighborhood 3: multi-target swap, exchanging consecutive target groups
//! between the maximal vehicle and one other vehicle.
//!
//! Groups are runs of non-required targets that are adjacent in the tour or
//! separated only by required targets (which stay in place when the group is
//! spliced out). Groups never wrap across the depot.

use crate::construct::{insertion_cost_unchecked, MoveError};
use crate::model::{Instance, Solution, Tour};
use crate::tourkit::{optimize_tour, two_opt_pass, TourOptimizerBudget};

use super::{
    max_other_cost, savings_at, GroupInsertionMethod, MoveOutcome, MultiSwapConfig,
    MultiSwapStructure, NoProbe, ProbeSink,
};

/// Direction in which a group is spliced between two tour vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOrientation {
    Forward,
    Reverse,
}

/// Positions of `group` members within `order`, sorted ascending. Fails when
/// a member is missing or the members are not consecutive modulo positions
/// accepted by `may_gap`.
fn group_positions(
    order: &[usize],
    group: &[usize],
    may_gap: impl Fn(usize) -> bool,
) -> Result<Vec<usize>, MoveError> {
    if group.is_empty() {
        return Err(MoveError::EmptyGroup);
    }
    let mut positions = Vec::with_capacity(group.len());
    for &t in group {
        let pos = order
            .iter()
            .position(|&x| x == t)
            .ok_or(MoveError::NotInTour(t))?;
        positions.push(pos);
    }
    positions.sort_unstable();
    for w in positions.windows(2) {
        if order[w[0] + 1..w[1]].iter().any(|&t| !may_gap(t)) {
            return Err(MoveError::NonConsecutiveGroup);
        }
    }
    Ok(positions)
}

/// Tour-time decrease from removing a consecutive group, computed by summing
/// single-target savings as the members are peeled off one after the other.
/// The result does not depend on the removal order.
pub fn group_savings(inst: &Instance, group: &[usize], tour: &Tour) -> Result<f64, MoveError> {
    group_positions(&tour.order, group, |t| {
        inst.is_required(tour.vehicle, t)
    })?;
    Ok(sequential_removal_savings(
        inst,
        tour.vehicle,
        &tour.order,
        group,
    ))
}

/// Sum of single-target savings, removing `group` members one at a time in
/// the given order from a scratch copy of `order`.
pub(crate) fn sequential_removal_savings(
    inst: &Instance,
    vehicle: usize,
    order: &[usize],
    group: &[usize],
) -> f64 {
    let mut scratch: Vec<usize> = order.to_vec();
    let mut total = 0.0;
    for &t in group {
        let pos = scratch.iter().position(|&x| x == t).expect("member present");
        total += savings_at(inst, vehicle, &scratch, pos);
        scratch.remove(pos);
    }
    total
}

/// Minimum cost of splicing an ordered group into the closed tour, over all
/// slots and both orientations. Returns `(cost, slot, orientation)`; the
/// forward orientation wins ties.
pub fn group_insertion_cost(
    inst: &Instance,
    group: &[usize],
    tour: &Tour,
) -> Result<(f64, usize, GroupOrientation), MoveError> {
    if group.is_empty() {
        return Err(MoveError::EmptyGroup);
    }
    for &t in group {
        if tour.order.contains(&t) {
            return Err(MoveError::AlreadyInTour(t));
        }
    }
    Ok(group_insertion_eval(inst, tour.vehicle, &tour.order, group))
}

pub(crate) fn group_insertion_eval(
    inst: &Instance,
    vehicle: usize,
    order: &[usize],
    group: &[usize],
) -> (f64, usize, GroupOrientation) {
    let speed = inst.vehicle(vehicle).speed;
    let d = |a: Option<usize>, b: Option<usize>| -> f64 {
        match (a, b) {
            (None, None) => 0.0,
            (None, Some(t)) | (Some(t), None) => inst.dist_dt(vehicle, t),
            (Some(p), Some(q)) => inst.dist_tt(p, q),
        }
    };
    let chain: f64 = group.windows(2).map(|w| inst.dist_tt(w[0], w[1])).sum();
    let first = group[0];
    let last = group[group.len() - 1];

    let mut best = f64::INFINITY;
    let mut best_slot = 0;
    let mut best_orientation = GroupOrientation::Forward;
    for slot in 0..=order.len() {
        let a = if slot == 0 { None } else { Some(order[slot - 1]) };
        let b = if slot == order.len() { None } else { Some(order[slot]) };
        let base = d(a, b);
        let forward = (d(a, Some(first)) + chain + d(Some(last), b) - base) / speed;
        if forward < best {
            best = forward;
            best_slot = slot;
            best_orientation = GroupOrientation::Forward;
        }
        let reverse = (d(a, Some(last)) + chain + d(Some(first), b) - base) / speed;
        if reverse < best {
            best = reverse;
            best_slot = slot;
            best_orientation = GroupOrientation::Reverse;
        }
    }
    (best, best_slot, best_orientation)
}

/// Entry-plus-exit edge length of a consecutive group divided by its internal
/// path length; dimensionless, so vehicle speed cancels. Detour-like clusters
/// score high. A group of coincident points yields infinity.
pub fn removal_ratio(inst: &Instance, group: &[usize], tour: &Tour) -> Result<f64, MoveError> {
    if group.len() < 2 {
        return Err(MoveError::GroupTooSmall {
            got: group.len(),
            min: 2,
        });
    }
    let positions = group_positions(&tour.order, group, |t| {
        inst.is_required(tour.vehicle, t)
    })?;
    Ok(removal_ratio_at(inst, tour.vehicle, &tour.order, &positions))
}

fn removal_ratio_at(
    inst: &Instance,
    vehicle: usize,
    order: &[usize],
    positions: &[usize],
) -> f64 {
    let first_pos = positions[0];
    let last_pos = positions[positions.len() - 1];
    let entry = if first_pos == 0 {
        inst.dist_dt(vehicle, order[first_pos])
    } else {
        inst.dist_tt(order[first_pos - 1], order[first_pos])
    };
    let exit = if last_pos + 1 == order.len() {
        inst.dist_dt(vehicle, order[last_pos])
    } else {
        inst.dist_tt(order[last_pos], order[last_pos + 1])
    };
    let internal: f64 = positions
        .windows(2)
        .map(|w| inst.dist_tt(order[w[0]], order[w[1]]))
        .sum();
    if internal == 0.0 {
        return f64::INFINITY;
    }
    (entry + exit) / internal
}

/// Cost of inserting the group one member at a time, each at its cheapest
/// slot in the evolving tour. Returns the new order and the accumulated cost.
pub fn recursive_group_insertion(
    inst: &Instance,
    group: &[usize],
    tour: &Tour,
) -> (Vec<usize>, f64) {
    recursive_insert_eval(inst, tour.vehicle, &tour.order, group)
}

/// Accumulated cost of [`recursive_group_insertion`].
pub fn recursive_group_insertion_cost(inst: &Instance, group: &[usize], tour: &Tour) -> f64 {
    recursive_insert_eval(inst, tour.vehicle, &tour.order, group).1
}

fn recursive_insert_eval(
    inst: &Instance,
    vehicle: usize,
    order: &[usize],
    group: &[usize],
) -> (Vec<usize>, f64) {
    let mut scratch: Vec<usize> = order.to_vec();
    let mut total = 0.0;
    for &t in group {
        let (cost, slot) = insertion_cost_unchecked(inst, t, vehicle, &scratch);
        scratch.insert(slot, t);
        total += cost;
    }
    (scratch, total)
}

/// Consecutive groups (ids in tour order) of each size in `sizes`, skipping
/// excluded targets, which may also sit inside a group's span.
fn enumerate_groups(
    order: &[usize],
    sizes: std::ops::RangeInclusive<usize>,
    excluded: impl Fn(usize) -> bool,
) -> Vec<Vec<usize>> {
    let eligible: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&t| !excluded(t))
        .collect();
    let mut out = Vec::new();
    for size in sizes {
        if size == 0 || size > eligible.len() {
            continue;
        }
        for window in eligible.windows(size) {
            out.push(window.to_vec());
        }
    }
    out
}

fn remove_group(tour: &mut Tour, group: &[usize], delta: f64) {
    for &t in group {
        let pos = tour.order.iter().position(|&x| x == t).expect("member present");
        tour.order.remove(pos);
    }
    tour.cost -= delta;
}

fn splice_group(tour: &mut Tour, group: &[usize], slot: usize, orientation: GroupOrientation, delta: f64) {
    match orientation {
        GroupOrientation::Forward => {
            tour.order.splice(slot..slot, group.iter().copied());
        }
        GroupOrientation::Reverse => {
            tour.order.splice(slot..slot, group.iter().rev().copied());
        }
    }
    tour.cost += delta;
}

/// Prices a group into a tour under the configured method and returns the
/// resulting order plus the cost delta.
fn price_group_insertion(
    inst: &Instance,
    method: GroupInsertionMethod,
    vehicle: usize,
    order: &[usize],
    group: &[usize],
) -> (Vec<usize>, f64) {
    match method {
        GroupInsertionMethod::GroupEdge => {
            let (cost, slot, orientation) = group_insertion_eval(inst, vehicle, order, group);
            let mut new_order = order.to_vec();
            match orientation {
                GroupOrientation::Forward => {
                    new_order.splice(slot..slot, group.iter().copied());
                }
                GroupOrientation::Reverse => {
                    new_order.splice(slot..slot, group.iter().rev().copied());
                }
            }
            (new_order, cost)
        }
        GroupInsertionMethod::Recursive => recursive_insert_eval(inst, vehicle, order, group),
    }
}

struct ReturnCandidate {
    ids: Vec<usize>,
    savings: f64,
    insertion: f64,
    new_maximal_order: Vec<usize>,
}

/// Evaluates return candidates one by one: apply the exchange to scratch
/// copies, improve both with a 2-opt pass, and accept as soon as the tracked
/// estimated objective strictly beats the incumbent.
#[allow(clippy::too_many_arguments)]
fn scan_return_candidates(
    inst: &Instance,
    sol: &Solution,
    maximal: usize,
    receiver: usize,
    scratch_maximal: &Tour,
    scratch_receiver: &Tour,
    candidates: &[ReturnCandidate],
    cap: usize,
    budget: &TourOptimizerBudget,
    sink: &mut dyn ProbeSink,
) -> Option<Solution> {
    let others = max_other_cost(sol, maximal, receiver);
    for cand in candidates.iter().take(cap) {
        let mut cand_i = Tour {
            vehicle: maximal,
            order: cand.new_maximal_order.clone(),
            cost: scratch_maximal.cost + cand.insertion,
        };
        let mut cand_j = scratch_receiver.clone();
        remove_group(&mut cand_j, &cand.ids, cand.savings);
        two_opt_pass(inst, &mut cand_i);
        two_opt_pass(inst, &mut cand_j);
        if sink.enabled() {
            sink.record(maximal, &cand_i.order, cand_i.cost);
            sink.record(receiver, &cand_j.order, cand_j.cost);
        }
        let estimated_objective = cand_i.cost.max(cand_j.cost).max(others);
        if estimated_objective < sol.objective {
            optimize_tour(inst, &mut cand_i, budget);
            optimize_tour(inst, &mut cand_j, budget);
            let mut tours = sol.tours.clone();
            tours[maximal] = cand_i;
            tours[receiver] = cand_j;
            return Some(Solution::from_tours(tours));
        }
    }
    None
}

/// Fixed-structure multi-target swap: groups of exactly `group_size` leave
/// the maximal vehicle, and groups of `group_size - 1` or `group_size` come
/// back from the single receiver with the cheapest group insertion cost.
pub fn neighborhood_multiswap_fixed(
    sol: &Solution,
    inst: &Instance,
    cfg: &MultiSwapConfig,
    budget: &TourOptimizerBudget,
) -> MoveOutcome {
    neighborhood_multiswap_fixed_probed(sol, inst, cfg, budget, &mut NoProbe)
}

/// [`neighborhood_multiswap_fixed`] with tentative estimates reported to `sink`.
pub fn neighborhood_multiswap_fixed_probed(
    sol: &Solution,
    inst: &Instance,
    cfg: &MultiSwapConfig,
    budget: &TourOptimizerBudget,
    sink: &mut dyn ProbeSink,
) -> MoveOutcome {
    debug_assert_eq!(cfg.structure, MultiSwapStructure::Fixed);
    debug_assert!(cfg.group_size >= 2);
    let m = cfg.group_size;
    let maximal = sol.maximal_vehicle();
    let tour_i = &sol.tours[maximal];

    let mut outgoing: Vec<(Vec<usize>, f64)> =
        enumerate_groups(&tour_i.order, m..=m, |t| inst.is_required(maximal, t))
            .into_iter()
            .map(|ids| {
                let sav = sequential_removal_savings(inst, maximal, &tour_i.order, &ids);
                (ids, sav)
            })
            .collect();
    outgoing.sort_by(|a, b| b.1.total_cmp(&a.1));

    for (group, group_sav) in &outgoing {
        // Receiver: cheapest group insertion cost among vehicles that still
        // have enough removable targets to give back.
        let mut receiver: Option<(f64, usize, usize, GroupOrientation)> = None;
        for (j, tour_j) in sol.tours.iter().enumerate() {
            if j == maximal {
                continue;
            }
            let removable = tour_j
                .order
                .iter()
                .filter(|&&t| !inst.is_required(j, t))
                .count();
            if removable < m - 1 {
                continue;
            }
            let (cost, slot, orientation) =
                group_insertion_eval(inst, j, &tour_j.order, group);
            if receiver.is_none() || cost < receiver.as_ref().unwrap().0 {
                receiver = Some((cost, j, slot, orientation));
            }
        }
        let Some((ins_cost, j, slot, orientation)) = receiver else {
            continue;
        };

        let mut scratch_i = tour_i.clone();
        remove_group(&mut scratch_i, group, *group_sav);
        let mut scratch_j = sol.tours[j].clone();
        splice_group(&mut scratch_j, group, slot, orientation, ins_cost);
        two_opt_pass(inst, &mut scratch_i);
        two_opt_pass(inst, &mut scratch_j);
        if sink.enabled() {
            sink.record(maximal, &scratch_i.order, scratch_i.cost);
            sink.record(j, &scratch_j.order, scratch_j.cost);
        }

        let mut candidates: Vec<ReturnCandidate> = enumerate_groups(
            &scratch_j.order,
            m - 1..=m,
            |t| inst.is_required(j, t) || group.contains(&t),
        )
        .into_iter()
        .map(|ids| {
            let savings = sequential_removal_savings(inst, j, &scratch_j.order, &ids);
            let (new_maximal_order, insertion) = price_group_insertion(
                inst,
                GroupInsertionMethod::GroupEdge,
                maximal,
                &scratch_i.order,
                &ids,
            );
            ReturnCandidate {
                ids,
                savings,
                insertion,
                new_maximal_order,
            }
        })
        .collect();
        match cfg.fixed_sort {
            super::FixedReturnSort::InsertionCost => {
                candidates.sort_by(|a, b| a.insertion.total_cmp(&b.insertion));
            }
            super::FixedReturnSort::SavingsMinusInsertion => {
                candidates.sort_by(|a, b| {
                    (b.savings - b.insertion).total_cmp(&(a.savings - a.insertion))
                });
            }
        }

        if let Some(solution) = scan_return_candidates(
            inst,
            sol,
            maximal,
            j,
            &scratch_i,
            &scratch_j,
            &candidates,
            cfg.n_candidates,
            budget,
            sink,
        ) {
            return MoveOutcome::improved(solution);
        }
    }
    MoveOutcome::unchanged(sol)
}

/// Variable-structure multi-target swap: groups of sizes 2..=`group_size`
/// leave the maximal vehicle, ranked by removal ratio; groups of sizes
/// 1..=`group_size` come back, ranked by their savings-to-insertion ratio.
pub fn neighborhood_multiswap_variable(
    sol: &Solution,
    inst: &Instance,
    cfg: &MultiSwapConfig,
    budget: &TourOptimizerBudget,
) -> MoveOutcome {
    neighborhood_multiswap_variable_probed(sol, inst, cfg, budget, &mut NoProbe)
}

/// [`neighborhood_multiswap_variable`] with tentative estimates reported to `sink`.
pub fn neighborhood_multiswap_variable_probed(
    sol: &Solution,
    inst: &Instance,
    cfg: &MultiSwapConfig,
    budget: &TourOptimizerBudget,
    sink: &mut dyn ProbeSink,
) -> MoveOutcome {
    debug_assert_eq!(cfg.structure, MultiSwapStructure::Variable);
    debug_assert!(cfg.group_size >= 2);
    let m = cfg.group_size;
    let maximal = sol.maximal_vehicle();
    let tour_i = &sol.tours[maximal];

    let required_positions = |order: &[usize], ids: &[usize]| -> Vec<usize> {
        let mut positions: Vec<usize> = ids
            .iter()
            .map(|&t| order.iter().position(|&x| x == t).unwrap())
            .collect();
        positions.sort_unstable();
        positions
    };

    let mut outgoing: Vec<(Vec<usize>, f64)> =
        enumerate_groups(&tour_i.order, 2..=m, |t| inst.is_required(maximal, t))
            .into_iter()
            .map(|ids| {
                let positions = required_positions(&tour_i.order, &ids);
                let ratio = removal_ratio_at(inst, maximal, &tour_i.order, &positions);
                (ids, ratio)
            })
            .collect();
    outgoing.sort_by(|a, b| b.1.total_cmp(&a.1));

    for (group, _) in &outgoing {
        // Receiver: cheapest insertion under the configured method, among
        // vehicles with at least one removable target to give back.
        let mut receiver: Option<(f64, usize, Vec<usize>)> = None;
        for (j, tour_j) in sol.tours.iter().enumerate() {
            if j == maximal {
                continue;
            }
            if !tour_j.order.iter().any(|&t| !inst.is_required(j, t)) {
                continue;
            }
            let (new_order, cost) =
                price_group_insertion(inst, cfg.variable_insertion, j, &tour_j.order, group);
            if receiver.is_none() || cost < receiver.as_ref().unwrap().0 {
                receiver = Some((cost, j, new_order));
            }
        }
        let Some((ins_cost, j, new_j_order)) = receiver else {
            continue;
        };

        let group_sav = sequential_removal_savings(inst, maximal, &tour_i.order, group);
        let mut scratch_i = tour_i.clone();
        remove_group(&mut scratch_i, group, group_sav);
        let mut scratch_j = Tour {
            vehicle: j,
            order: new_j_order,
            cost: sol.tours[j].cost + ins_cost,
        };
        two_opt_pass(inst, &mut scratch_i);
        two_opt_pass(inst, &mut scratch_j);
        if sink.enabled() {
            sink.record(maximal, &scratch_i.order, scratch_i.cost);
            sink.record(j, &scratch_j.order, scratch_j.cost);
        }

        let mut candidates: Vec<(ReturnCandidate, f64)> = enumerate_groups(
            &scratch_j.order,
            1..=m,
            |t| inst.is_required(j, t) || group.contains(&t),
        )
        .into_iter()
        .map(|ids| {
            let savings = sequential_removal_savings(inst, j, &scratch_j.order, &ids);
            let (new_maximal_order, insertion) = price_group_insertion(
                inst,
                cfg.variable_insertion,
                maximal,
                &scratch_i.order,
                &ids,
            );
            let ratio = if insertion == 0.0 {
                f64::INFINITY
            } else {
                savings / insertion
            };
            (
                ReturnCandidate {
                    ids,
                    savings,
                    insertion,
                    new_maximal_order,
                },
                ratio,
            )
        })
        .collect();
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
        let candidates: Vec<ReturnCandidate> =
            candidates.into_iter().map(|(c, _)| c).collect();

        if let Some(solution) = scan_return_candidates(
            inst,
            sol,
            maximal,
            j,
            &scratch_i,
            &scratch_j,
            &candidates,
            cfg.n_candidates,
            budget,
            sink,
        ) {
            return MoveOutcome::improved(solution);
        }
    }
    MoveOutcome::unchanged(sol)
}
