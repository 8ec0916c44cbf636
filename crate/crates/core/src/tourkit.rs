//! Single-vehicle tour construction and improvement.
//!
//! These routines fill the role an external tour optimizer would otherwise
//! play: a nearest-neighbor seed, deterministic first-improvement 2-opt and
//! Or-opt passes, and a combined [`optimize_tour`] driver that alternates them
//! to a joint local optimum. [`exact_tsp_held_karp`] is the exact counterpart
//! used to certify optimality on small target sets.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{Instance, Tour};

/// Hard cap on the exact solver's target count (13 targets is ~1.4M DP cells).
pub const HELD_KARP_MAX_TARGETS: usize = 13;

#[derive(Debug, Error, PartialEq)]
pub enum TourkitError {
    #[error("exact solver capped at {max} targets, got {got}")]
    TooManyTargets { got: usize, max: usize },
}

/// Effort bounds for [`optimize_tour`].
#[derive(Debug, Clone, PartialEq)]
pub struct TourOptimizerBudget {
    /// Maximum number of combined 2-opt + Or-opt rounds.
    pub max_passes: usize,
    pub time_limit: Option<Duration>,
}

impl Default for TourOptimizerBudget {
    fn default() -> Self {
        TourOptimizerBudget {
            max_passes: 50,
            time_limit: None,
        }
    }
}

/// Nearest-neighbor tour over the given targets, starting from the depot.
/// Distance ties resolve to the lower target id.
pub fn nn_construct(inst: &Instance, vehicle: usize, targets: &[usize]) -> Tour {
    let mut remaining: Vec<usize> = targets.to_vec();
    remaining.sort_unstable();
    let mut order = Vec::with_capacity(remaining.len());
    let mut prev: Option<usize> = None;
    while !remaining.is_empty() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (idx, &t) in remaining.iter().enumerate() {
            let d = match prev {
                Some(p) => inst.dist_tt(p, t),
                None => inst.dist_dt(vehicle, t),
            };
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        let t = remaining.remove(best);
        order.push(t);
        prev = Some(t);
    }
    Tour::new(inst, vehicle, order)
}

/// Distance (not time) from the vertex at closed-tour position `pos` to the
/// vertex at `pos + 1`, with position 0 being the depot.
#[inline]
fn cycle_dist(inst: &Instance, vehicle: usize, order: &[usize], a: usize, b: usize) -> f64 {
    // Positions run over the closed cycle [depot, order...]; a and b index it.
    let n = order.len();
    debug_assert!(a <= n && b <= n);
    match (a, b) {
        (0, 0) => 0.0,
        (0, b) => inst.dist_dt(vehicle, order[b - 1]),
        (a, 0) => inst.dist_dt(vehicle, order[a - 1]),
        (a, b) => inst.dist_tt(order[a - 1], order[b - 1]),
    }
}

/// First-improvement 2-opt, sweeping until a full sweep finds nothing.
/// Returns whether any improvement was applied. The cached cost is kept up to
/// date incrementally.
pub fn two_opt_pass(inst: &Instance, tour: &mut Tour) -> bool {
    let n = tour.order.len();
    if n < 3 {
        return false;
    }
    let speed = inst.vehicle(tour.vehicle).speed;
    let mut improved_any = false;
    loop {
        let mut improved = false;
        // Reversing order[i-1..j] replaces cycle edges (i-1, i) and (j, j+1)
        // with (i-1, j) and (i, j+1); positions are on the closed cycle where
        // 0 is the depot and j+1 wraps back to it.
        for i in 1..=n - 1 {
            for j in i + 1..=n {
                let after = if j == n { 0 } else { j + 1 };
                let removed = cycle_dist(inst, tour.vehicle, &tour.order, i - 1, i)
                    + cycle_dist(inst, tour.vehicle, &tour.order, j, after);
                let added = cycle_dist(inst, tour.vehicle, &tour.order, i - 1, j)
                    + cycle_dist(inst, tour.vehicle, &tour.order, i, after);
                if added < removed {
                    tour.order[i - 1..j].reverse();
                    tour.cost += (added - removed) / speed;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
        improved_any = true;
    }
    improved_any
}

/// First-improvement Or-opt: relocates runs of 1..=3 consecutive targets to a
/// cheaper slot, trying both orientations, sweeping until stable. Returns
/// whether any improvement was applied.
pub fn or_opt_pass(inst: &Instance, tour: &mut Tour) -> bool {
    let mut improved_any = false;
    loop {
        let mut improved = false;
        'scan: for seg_len in 1..=3usize {
            let n = tour.order.len();
            if n < seg_len + 1 {
                continue;
            }
            for start in 0..=n - seg_len {
                if try_relocate_segment(inst, tour, start, seg_len) {
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
        improved_any = true;
    }
    improved_any
}

/// Attempts to move `order[start..start+len]` to its cheapest other slot,
/// considering both orientations. Applies the first strict improvement found.
fn try_relocate_segment(inst: &Instance, tour: &mut Tour, start: usize, len: usize) -> bool {
    let n = tour.order.len();
    let vehicle = tour.vehicle;
    let speed = inst.vehicle(vehicle).speed;

    let d = |a: Option<usize>, b: Option<usize>| -> f64 {
        match (a, b) {
            (None, None) => 0.0,
            (None, Some(t)) | (Some(t), None) => inst.dist_dt(vehicle, t),
            (Some(p), Some(q)) => inst.dist_tt(p, q),
        }
    };

    let first = tour.order[start];
    let last = tour.order[start + len - 1];
    let prev = if start == 0 { None } else { Some(tour.order[start - 1]) };
    let next = if start + len == n { None } else { Some(tour.order[start + len]) };
    let removal_gain = d(prev, Some(first)) + d(Some(last), next) - d(prev, next);

    // Slot s inserts between order[s-1] and order[s] (depot at both ends) in
    // the original coordinates; slots touching the segment are no-ops for the
    // forward orientation and are handled by 2-opt for the reversed one.
    for slot in 0..=n {
        if slot >= start && slot <= start + len {
            continue;
        }
        let a = if slot == 0 { None } else { Some(tour.order[slot - 1]) };
        let b = if slot == n { None } else { Some(tour.order[slot]) };
        let base = d(a, b);
        for reverse in [false, true] {
            let (head, tail) = if reverse { (last, first) } else { (first, last) };
            let added = d(a, Some(head)) + d(Some(tail), b) - base;
            if added < removal_gain {
                let seg: Vec<usize> = if reverse {
                    tour.order[start..start + len].iter().rev().copied().collect()
                } else {
                    tour.order[start..start + len].to_vec()
                };
                let target_slot = if slot > start { slot - len } else { slot };
                tour.order.drain(start..start + len);
                for (off, t) in seg.into_iter().enumerate() {
                    tour.order.insert(target_slot + off, t);
                }
                tour.cost += (added - removal_gain) / speed;
                return true;
            }
        }
    }
    false
}

/// Drives the tour to a joint 2-opt + Or-opt local optimum, or until the
/// budget runs out. Deterministic; the cached cost is refreshed from scratch
/// on exit so downstream bookkeeping starts clean.
pub fn optimize_tour(inst: &Instance, tour: &mut Tour, budget: &TourOptimizerBudget) {
    let started = Instant::now();
    for _ in 0..budget.max_passes.max(1) {
        let mut improved = two_opt_pass(inst, tour);
        improved |= or_opt_pass(inst, tour);
        if !improved {
            break;
        }
        if let Some(limit) = budget.time_limit {
            if started.elapsed() >= limit {
                break;
            }
        }
    }
    tour.recompute_cost(inst);
}

/// Provably minimum-cost closed tour over the given targets via bitmask
/// dynamic programming. Capped at [`HELD_KARP_MAX_TARGETS`] targets.
pub fn exact_tsp_held_karp(
    inst: &Instance,
    vehicle: usize,
    targets: &[usize],
) -> Result<Tour, TourkitError> {
    let m = targets.len();
    if m > HELD_KARP_MAX_TARGETS {
        return Err(TourkitError::TooManyTargets {
            got: m,
            max: HELD_KARP_MAX_TARGETS,
        });
    }
    if m == 0 {
        return Ok(Tour::empty(vehicle));
    }

    let full = (1usize << m) - 1;
    // dp[mask][last]: cheapest path depot -> (targets in mask) ending at last.
    let mut dp = vec![f64::INFINITY; (full + 1) * m];
    let mut parent = vec![usize::MAX; (full + 1) * m];
    for last in 0..m {
        dp[(1 << last) * m + last] = inst.dist_dt(vehicle, targets[last]);
    }
    for mask in 1..=full {
        for last in 0..m {
            if mask & (1 << last) == 0 {
                continue;
            }
            let cur = dp[mask * m + last];
            if !cur.is_finite() {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nmask = mask | (1 << next);
                let cand = cur + inst.dist_tt(targets[last], targets[next]);
                if cand < dp[nmask * m + next] {
                    dp[nmask * m + next] = cand;
                    parent[nmask * m + next] = last;
                }
            }
        }
    }

    let mut best_last = 0;
    let mut best = f64::INFINITY;
    for last in 0..m {
        let total = dp[full * m + last] + inst.dist_dt(vehicle, targets[last]);
        if total < best {
            best = total;
            best_last = last;
        }
    }

    let mut order_rev = Vec::with_capacity(m);
    let mut mask = full;
    let mut last = best_last;
    while last != usize::MAX {
        order_rev.push(targets[last]);
        let p = parent[mask * m + last];
        mask &= !(1 << last);
        last = p;
    }
    debug_assert_eq!(mask, 0);
    order_rev.reverse();
    Ok(Tour::new(inst, vehicle, order_rev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Point, VehicleSpec};

    fn instance_with(points: Vec<Point>, depot: Point, speed: f64) -> Instance {
        Instance::new(
            "t",
            points,
            vec![VehicleSpec::new(depot, speed, vec![])],
        )
        .unwrap()
    }

    #[test]
    fn nn_construct_empty_and_collinear() {
        let inst = instance_with(
            vec![Point::new(1.0, 0.0), Point::new(2.0, 0.0), Point::new(3.0, 0.0)],
            Point::new(0.0, 0.0),
            1.0,
        );
        let empty = nn_construct(&inst, 0, &[]);
        assert!(empty.is_empty());
        assert_eq!(empty.cost, 0.0);

        let tour = nn_construct(&inst, 0, &[0, 1, 2]);
        assert_eq!(tour.order, vec![0, 1, 2]);
        assert!((tour.cost - 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_opt_uncrosses_square() {
        // Visiting the unit square's corners in crossing order from a corner
        // depot; 2-opt must recover the perimeter.
        let inst = instance_with(
            vec![
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
                Point::new(1.0, 1.0),
            ],
            Point::new(0.0, 0.0),
            1.0,
        );
        let mut crossed = Tour::new(&inst, 0, vec![2, 0, 1]);
        let before = crossed.cost;
        let improved = two_opt_pass(&inst, &mut crossed);
        assert!(improved);
        assert!(crossed.cost < before);
        assert!((crossed.cost - 4.0).abs() < 1e-12);
        let mut sorted = crossed.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);

        // Already optimal: unchanged, no improvement flag.
        let snapshot = crossed.clone();
        assert!(!two_opt_pass(&inst, &mut crossed));
        assert_eq!(crossed, snapshot);
    }

    #[test]
    fn or_opt_fixes_missequenced_target() {
        // Two clusters; target 3 is visited in the middle of the left cluster
        // although it belongs with the right one. 2-opt cannot always fix a
        // pure relocation, Or-opt must.
        let inst = instance_with(
            vec![
                Point::new(0.0, 1.0),
                Point::new(0.0, 2.0),
                Point::new(0.0, 3.0),
                Point::new(10.0, 2.0),
                Point::new(10.0, 1.0),
                Point::new(10.0, 3.0),
            ],
            Point::new(0.0, 0.0),
            1.0,
        );
        let mut tour = Tour::new(&inst, 0, vec![0, 3, 1, 2, 5, 4]);
        let before = tour.cost;
        assert!(or_opt_pass(&inst, &mut tour));
        assert!(tour.cost < before);
        let recomputed = inst.tour_time(0, &tour.order);
        assert!((tour.cost - recomputed).abs() < 1e-9);
    }

    #[test]
    fn or_opt_leaves_optimal_square_alone() {
        let inst = instance_with(
            vec![
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            Point::new(0.0, 0.0),
            1.0,
        );
        let mut tour = Tour::new(&inst, 0, vec![0, 1, 2]);
        assert!(!or_opt_pass(&inst, &mut tour));
        assert_eq!(tour.order, vec![0, 1, 2]);
    }

    #[test]
    fn or_opt_leaves_tiny_tours_alone() {
        let inst = instance_with(
            vec![Point::new(1.0, 0.0)],
            Point::new(0.0, 0.0),
            1.0,
        );
        let mut empty = Tour::empty(0);
        assert!(!or_opt_pass(&inst, &mut empty));
        let mut single = Tour::new(&inst, 0, vec![0]);
        assert!(!or_opt_pass(&inst, &mut single));
        assert_eq!(single.order, vec![0]);
    }

    #[test]
    fn held_karp_unit_square() {
        let inst = instance_with(
            vec![
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            Point::new(0.0, 0.0),
            1.0,
        );
        let tour = exact_tsp_held_karp(&inst, 0, &[0, 1, 2]).unwrap();
        assert!((tour.cost - 4.0).abs() < 1e-12);
    }

    #[test]
    fn held_karp_triangle_is_perimeter() {
        let pts = vec![
            Point::new(3.0, 0.0),
            Point::new(0.0, 4.0),
            Point::new(0.0, 0.0),
        ];
        let perimeter = 3.0 + 4.0 + 5.0;
        for speed in [1.0, 2.0] {
            let inst = instance_with(pts.clone(), Point::new(0.0, 0.0), speed);
            // Depot coincides with the third point, so the optimum walks the
            // triangle plus the zero-length depot hop.
            let tour = exact_tsp_held_karp(&inst, 0, &[0, 1, 2]).unwrap();
            assert!((tour.cost - perimeter / speed).abs() < 1e-12);
        }
    }

    #[test]
    fn held_karp_rejects_oversized_sets() {
        let pts: Vec<Point> = (0..14).map(|i| Point::new(i as f64, 0.0)).collect();
        let inst = instance_with(pts, Point::new(0.0, 0.0), 1.0);
        let ids: Vec<usize> = (0..14).collect();
        assert_eq!(
            exact_tsp_held_karp(&inst, 0, &ids).unwrap_err(),
            TourkitError::TooManyTargets { got: 14, max: 13 }
        );
    }

    #[test]
    fn optimize_tour_small_sets_hit_exact_optimum() {
        // All orders of <= 3 targets have equal cost under symmetry, so the
        // optimizer must match the exact solver trivially.
        let inst = instance_with(
            vec![
                Point::new(2.0, 5.0),
                Point::new(-3.0, 1.0),
                Point::new(4.0, -2.0),
            ],
            Point::new(0.5, 0.5),
            1.25,
        );
        let mut tour = nn_construct(&inst, 0, &[0, 1, 2]);
        optimize_tour(&inst, &mut tour, &TourOptimizerBudget::default());
        let exact = exact_tsp_held_karp(&inst, 0, &[0, 1, 2]).unwrap();
        assert!((tour.cost - exact.cost).abs() < 1e-9);
    }
}
