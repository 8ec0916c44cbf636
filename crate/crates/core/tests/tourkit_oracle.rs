//! Tour-optimizer quality checks against the exact dynamic-programming
//! solver and against random-permutation baselines.

mod common;

use common::{random_point, rng};
use mmtsp_core::model::{Instance, Point, VehicleSpec};
use mmtsp_core::tourkit::{
    exact_tsp_held_karp, nn_construct, optimize_tour, or_opt_pass, two_opt_pass,
    TourOptimizerBudget,
};
use rand::prelude::*;

fn single_vehicle_instance<R: Rng>(r: &mut R, targets: usize) -> Instance {
    let pts: Vec<Point> = (0..targets).map(|_| random_point(r, 100.0)).collect();
    Instance::new(
        "tk",
        pts,
        vec![VehicleSpec::new(random_point(r, 100.0), 1.25, vec![])],
    )
    .unwrap()
}

#[test]
fn nn_construct_never_beats_the_exact_solver() {
    let mut r = rng(101);
    for _ in 0..100 {
        let inst = single_vehicle_instance(&mut r, 5);
        let ids: Vec<usize> = (0..5).collect();
        let greedy = nn_construct(&inst, 0, &ids);
        let exact = exact_tsp_held_karp(&inst, 0, &ids).unwrap();
        assert!(greedy.cost >= exact.cost - 1e-9);
    }
}

#[test]
fn two_opt_lands_within_a_quarter_of_optimal() {
    let mut r = rng(102);
    for _ in 0..100 {
        let inst = single_vehicle_instance(&mut r, 8);
        let ids: Vec<usize> = (0..8).collect();
        let mut tour = nn_construct(&inst, 0, &ids);
        two_opt_pass(&inst, &mut tour);
        let exact = exact_tsp_held_karp(&inst, 0, &ids).unwrap();
        assert!(
            tour.cost <= exact.cost * 1.25 + 1e-9,
            "2-opt {} vs exact {}",
            tour.cost,
            exact.cost
        );
    }
}

#[test]
fn optimize_tour_is_near_exact_on_ten_targets() {
    let mut r = rng(103);
    let budget = TourOptimizerBudget::default();
    let mut within = 0;
    for _ in 0..100 {
        let inst = single_vehicle_instance(&mut r, 10);
        let ids: Vec<usize> = (0..10).collect();
        let mut tour = nn_construct(&inst, 0, &ids);
        optimize_tour(&inst, &mut tour, &budget);
        let exact = exact_tsp_held_karp(&inst, 0, &ids).unwrap();
        assert!(tour.cost >= exact.cost - 1e-9, "optimizer beat the exact solver");
        if tour.cost <= exact.cost * 1.05 {
            within += 1;
        }
    }
    assert!(within >= 95, "only {within}/100 runs within 5% of optimal");
}

#[test]
fn exact_solver_lower_bounds_random_permutations() {
    let mut r = rng(104);
    let inst = single_vehicle_instance(&mut r, 8);
    let mut ids: Vec<usize> = (0..8).collect();
    let exact = exact_tsp_held_karp(&inst, 0, &ids).unwrap();
    for _ in 0..1000 {
        ids.shuffle(&mut r);
        let cost = inst.tour_time(0, &ids);
        assert!(exact.cost <= cost + 1e-9);
    }
}

#[test]
fn optimize_tour_is_idempotent_and_preserves_targets() {
    let mut r = rng(105);
    let budget = TourOptimizerBudget::default();
    for _ in 0..50 {
        let n = r.random_range(2..=14);
        let inst = single_vehicle_instance(&mut r, n);
        let ids: Vec<usize> = (0..n).collect();
        let mut tour = nn_construct(&inst, 0, &ids);
        optimize_tour(&inst, &mut tour, &budget);
        let once = tour.cost;
        let mut sorted = tour.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, ids, "target set must be preserved");
        optimize_tour(&inst, &mut tour, &budget);
        assert!((tour.cost - once).abs() <= 1e-12 * once.max(1.0));
    }
}

#[test]
fn passes_never_increase_cost_and_keep_targets() {
    let mut r = rng(106);
    for _ in 0..80 {
        let n = r.random_range(1..=12);
        let inst = single_vehicle_instance(&mut r, n);
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut r);
        let mut tour = mmtsp_core::model::Tour::new(&inst, 0, ids.clone());
        let start = tour.cost;
        two_opt_pass(&inst, &mut tour);
        let after_two = tour.cost;
        assert!(after_two <= start + 1e-9);
        or_opt_pass(&inst, &mut tour);
        assert!(tour.cost <= after_two + 1e-9);
        let recomputed = inst.tour_time(0, &tour.order);
        assert!(
            (tour.cost - recomputed).abs() <= 1e-9 * recomputed.max(1.0),
            "incremental cost drifted: {} vs {}",
            tour.cost,
            recomputed
        );
        let mut sorted = tour.order.clone();
        sorted.sort_unstable();
        ids.sort_unstable();
        assert_eq!(sorted, ids);
    }
}
