//! Shared generators for integration tests.
#![allow(dead_code)]

use mmtsp_core::instgen::{assign_required_targets, HeterogeneityMode, SPEED_SET};
use mmtsp_core::model::{Instance, Point, Solution, Tour, VehicleSpec};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point<R: Rng>(rng: &mut R, span: f64) -> Point {
    Point::new(rng.random_range(0.0..span), rng.random_range(0.0..span))
}

/// Uniform random instance, optionally with required-target assignments.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    name: &str,
    targets: usize,
    vehicles: usize,
    mode: HeterogeneityMode,
) -> Instance {
    let pts: Vec<Point> = (0..targets).map(|_| random_point(rng, 100.0)).collect();
    let specs: Vec<VehicleSpec> = (0..vehicles)
        .map(|_| {
            VehicleSpec::new(
                random_point(rng, 100.0),
                SPEED_SET[rng.random_range(0..SPEED_SET.len())],
                vec![],
            )
        })
        .collect();
    let inst = Instance::new(name, pts, specs).expect("valid random instance");
    assign_required_targets(&inst, mode).expect("ratio precondition holds")
}

/// Random feasible solution: free targets land on random vehicles, required
/// targets on their own, orders shuffled.
pub fn random_solution<R: Rng>(rng: &mut R, inst: &Instance) -> Solution {
    let k = inst.num_vehicles();
    let mut orders: Vec<Vec<usize>> = vec![Vec::new(); k];
    for t in 0..inst.num_targets() {
        match inst.required_owner(t) {
            Some(j) => orders[j].push(t),
            None => orders[rng.random_range(0..k)].push(t),
        }
    }
    let tours = orders
        .into_iter()
        .enumerate()
        .map(|(j, mut order)| {
            order.shuffle(rng);
            Tour::new(inst, j, order)
        })
        .collect();
    Solution::from_tours(tours)
}
