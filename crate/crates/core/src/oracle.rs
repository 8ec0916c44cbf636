//! Exact min-max solver for tiny instances: exhaustive assignment of free
//! targets over vehicles, with each per-vehicle set solved exactly. Grounds
//! the optimality-gap checks elsewhere in the workspace.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{Instance, Solution, Tour};
use crate::tourkit::{exact_tsp_held_karp, HELD_KARP_MAX_TARGETS};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{got} free targets exceed the oracle cap of {max}")]
    TooManyFreeTargets { got: usize, max: usize },
    #[error(
        "vehicle {vehicle} could receive up to {worst_case} targets, over the per-vehicle cap of {max}"
    )]
    VehicleSetTooLarge {
        vehicle: usize,
        worst_case: usize,
        max: usize,
    },
}

/// Size caps protecting the exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleLimit {
    pub max_free_targets: usize,
    pub max_per_vehicle: usize,
}

impl Default for OracleLimit {
    fn default() -> Self {
        OracleLimit {
            max_free_targets: 10,
            max_per_vehicle: HELD_KARP_MAX_TARGETS,
        }
    }
}

/// A certified-optimal solution with its objective.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub solution: Solution,
    pub objective: f64,
}

/// Exact tour cost for `vehicle` covering its required targets plus the free
/// targets selected by `mask`, memoized per (vehicle, mask).
struct VehicleCostCache<'a> {
    inst: &'a Instance,
    free: &'a [usize],
    memo: HashMap<(usize, u32), f64>,
}

impl VehicleCostCache<'_> {
    fn cost(&mut self, vehicle: usize, mask: u32) -> f64 {
        if let Some(&c) = self.memo.get(&(vehicle, mask)) {
            return c;
        }
        let mut set: Vec<usize> = self.inst.vehicle(vehicle).required.clone();
        for (bit, &t) in self.free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                set.push(t);
            }
        }
        let cost = exact_tsp_held_karp(self.inst, vehicle, &set)
            .expect("per-vehicle cap checked upfront")
            .cost;
        self.memo.insert((vehicle, mask), cost);
        cost
    }
}

/// Enumerates every assignment of free targets to vehicles (a mixed-radix
/// counter walked depth-first), solving each vehicle set exactly and keeping
/// the assignment with the smallest maximum tour time. Subtrees whose partial
/// assignment already costs at least the best-known objective are pruned;
/// pruning cannot change the returned optimum because per-vehicle exact costs
/// only grow as targets are added.
pub fn brute_force_minmax(
    inst: &Instance,
    limit: &OracleLimit,
) -> Result<OracleSolution, OracleError> {
    let free = inst.free_targets();
    if free.len() > limit.max_free_targets {
        return Err(OracleError::TooManyFreeTargets {
            got: free.len(),
            max: limit.max_free_targets,
        });
    }
    let per_vehicle_cap = limit.max_per_vehicle.min(HELD_KARP_MAX_TARGETS);
    for (j, v) in inst.vehicles().iter().enumerate() {
        let worst_case = v.required.len() + free.len();
        if worst_case > per_vehicle_cap {
            return Err(OracleError::VehicleSetTooLarge {
                vehicle: j,
                worst_case,
                max: per_vehicle_cap,
            });
        }
    }

    let k = inst.num_vehicles();
    let mut cache = VehicleCostCache {
        inst,
        free: &free,
        memo: HashMap::new(),
    };

    let mut best_objective = f64::INFINITY;
    let mut best_masks: Vec<u32> = vec![0; k];
    let mut masks: Vec<u32> = vec![0; k];

    // assignment[d] = vehicle receiving free[d]; depth-first over the counter.
    fn descend(
        depth: usize,
        free_len: usize,
        k: usize,
        masks: &mut Vec<u32>,
        cache: &mut VehicleCostCache<'_>,
        best_objective: &mut f64,
        best_masks: &mut Vec<u32>,
    ) {
        if depth == free_len {
            let mut objective: f64 = 0.0;
            for (j, &mask) in masks.iter().enumerate() {
                objective = objective.max(cache.cost(j, mask));
                if objective >= *best_objective {
                    return;
                }
            }
            *best_objective = objective;
            best_masks.clone_from(masks);
            return;
        }
        for j in 0..k {
            masks[j] |= 1 << depth;
            // Adding a target never shrinks an exact metric tour, so a
            // partial set at or above the incumbent closes the subtree.
            if cache.cost(j, masks[j]) < *best_objective {
                descend(
                    depth + 1,
                    free_len,
                    k,
                    masks,
                    cache,
                    best_objective,
                    best_masks,
                );
            }
            masks[j] &= !(1 << depth);
        }
    }

    // With an empty free pool this immediately evaluates the single branch.
    descend(
        0,
        free.len(),
        k,
        &mut masks,
        &mut cache,
        &mut best_objective,
        &mut best_masks,
    );
    debug_assert!(best_objective.is_finite());

    let tours: Vec<Tour> = (0..k)
        .map(|j| {
            let mut set: Vec<usize> = inst.vehicle(j).required.clone();
            for (bit, &t) in free.iter().enumerate() {
                if best_masks[j] & (1 << bit) != 0 {
                    set.push(t);
                }
            }
            exact_tsp_held_karp(inst, j, &set).expect("cap checked")
        })
        .collect();
    let solution = Solution::from_tours(tours);
    let objective = solution.objective;
    Ok(OracleSolution {
        solution,
        objective,
    })
}
