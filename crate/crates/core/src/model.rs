//! Problem data model: instances, tours, solutions, cost functions and the
//! feasibility validator.
//!
//! An instance consists of a set of targets and a fleet of vehicles, each with
//! its own depot, speed, and (possibly empty) set of required targets. Edge
//! costs are travel times: Euclidean distance divided by the vehicle speed.
//! The graph is complete and symmetric, so tours are stored as plain target
//! sequences with the depot implicit at both ends.

use std::sync::Arc;

use thiserror::Error;

/// Relative tolerance used when checking cached costs against recomputation.
pub const COST_CACHE_TOLERANCE: f64 = 1e-9;

/// Vertex count up to which the pairwise distance matrix is precomputed.
const DISTANCE_MATRIX_LIMIT: usize = 2000;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("non-finite coordinate ({x}, {y})")]
    NonFiniteCoordinate { x: f64, y: f64 },
    #[error("speed must be positive and finite, got {speed}")]
    InvalidSpeed { speed: f64 },
    #[error("instance needs at least one vehicle")]
    NoVehicles,
    #[error("required target {target} is out of range for {num_targets} targets")]
    RequiredTargetOutOfRange { target: usize, num_targets: usize },
    #[error("target {target} is required by both vehicle {first} and vehicle {second}")]
    OverlappingRequired {
        target: usize,
        first: usize,
        second: usize,
    },
    #[error("unknown target id {target}")]
    UnknownTarget { target: usize },
    #[error("unknown vehicle id {vehicle}")]
    UnknownVehicle { vehicle: usize },
}

/// A planar location with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// One vehicle of the fleet: where it starts, how fast it travels, and which
/// targets only it may cover.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleSpec {
    pub depot: Point,
    pub speed: f64,
    /// Target ids that this vehicle must cover, sorted ascending.
    pub required: Vec<usize>,
}

impl VehicleSpec {
    pub fn new(depot: Point, speed: f64, mut required: Vec<usize>) -> Self {
        required.sort_unstable();
        required.dedup();
        VehicleSpec {
            depot,
            speed,
            required,
        }
    }
}

/// An immutable problem instance. Construction validates all invariants, and
/// the pairwise distance matrix is precomputed for desk-scale instances so
/// the search loops never touch a square root.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    targets: Vec<Point>,
    vehicles: Vec<VehicleSpec>,
    /// For each target, the vehicle that requires it, if any.
    required_owner: Vec<Option<usize>>,
    /// Target-to-target distances, row-major, when within the matrix limit.
    /// Shared so that depot-perturbed copies of the instance reuse it.
    tt: Option<Arc<[f64]>>,
    /// Depot-to-target distances, row-major by vehicle.
    dt: Option<Vec<f64>>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        targets: Vec<Point>,
        vehicles: Vec<VehicleSpec>,
    ) -> Result<Self, ModelError> {
        if vehicles.is_empty() {
            return Err(ModelError::NoVehicles);
        }
        for p in &targets {
            if !p.is_finite() {
                return Err(ModelError::NonFiniteCoordinate { x: p.x, y: p.y });
            }
        }
        let mut required_owner: Vec<Option<usize>> = vec![None; targets.len()];
        for (i, v) in vehicles.iter().enumerate() {
            if !v.depot.is_finite() {
                return Err(ModelError::NonFiniteCoordinate {
                    x: v.depot.x,
                    y: v.depot.y,
                });
            }
            if !(v.speed.is_finite() && v.speed > 0.0) {
                return Err(ModelError::InvalidSpeed { speed: v.speed });
            }
            for &t in &v.required {
                if t >= targets.len() {
                    return Err(ModelError::RequiredTargetOutOfRange {
                        target: t,
                        num_targets: targets.len(),
                    });
                }
                if let Some(first) = required_owner[t] {
                    return Err(ModelError::OverlappingRequired {
                        target: t,
                        first,
                        second: i,
                    });
                }
                required_owner[t] = Some(i);
            }
        }

        let mut inst = Instance {
            name: name.into(),
            targets,
            vehicles,
            required_owner,
            tt: None,
            dt: None,
        };
        if inst.targets.len() + inst.vehicles.len() <= DISTANCE_MATRIX_LIMIT {
            inst.build_matrices();
        }
        Ok(inst)
    }

    fn build_matrices(&mut self) {
        let n = self.targets.len();
        let mut tt = vec![0.0; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                let d = self.targets[a].dist(&self.targets[b]);
                tt[a * n + b] = d;
                tt[b * n + a] = d;
            }
        }
        self.tt = Some(tt.into());
        self.dt = Some(self.compute_dt());
    }

    fn compute_dt(&self) -> Vec<f64> {
        let n = self.targets.len();
        let mut dt = vec![0.0; self.vehicles.len() * n];
        for (i, v) in self.vehicles.iter().enumerate() {
            for (t, p) in self.targets.iter().enumerate() {
                dt[i * n + t] = v.depot.dist(p);
            }
        }
        dt
    }

    /// Copy of this instance with every depot replaced. Targets, speeds and
    /// required sets are untouched; the target-target matrix is shared.
    pub fn with_depots(&self, depots: &[Point]) -> Result<Self, ModelError> {
        assert_eq!(depots.len(), self.vehicles.len());
        let mut out = self.clone();
        for (v, &d) in out.vehicles.iter_mut().zip(depots) {
            if !d.is_finite() {
                return Err(ModelError::NonFiniteCoordinate { x: d.x, y: d.y });
            }
            v.depot = d;
        }
        if out.tt.is_some() {
            out.dt = Some(out.compute_dt());
        }
        Ok(out)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn num_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn targets(&self) -> &[Point] {
        &self.targets
    }

    pub fn target(&self, id: usize) -> Point {
        self.targets[id]
    }

    pub fn vehicles(&self) -> &[VehicleSpec] {
        &self.vehicles
    }

    pub fn vehicle(&self, id: usize) -> &VehicleSpec {
        &self.vehicles[id]
    }

    /// The vehicle that must cover `target`, if any.
    pub fn required_owner(&self, target: usize) -> Option<usize> {
        self.required_owner[target]
    }

    pub fn is_required(&self, vehicle: usize, target: usize) -> bool {
        self.required_owner[target] == Some(vehicle)
    }

    /// Targets not pre-assigned to any vehicle, ascending.
    pub fn free_targets(&self) -> Vec<usize> {
        (0..self.targets.len())
            .filter(|&t| self.required_owner[t].is_none())
            .collect()
    }

    /// Distance between two targets.
    #[inline]
    pub fn dist_tt(&self, a: usize, b: usize) -> f64 {
        match &self.tt {
            Some(m) => m[a * self.targets.len() + b],
            None => self.targets[a].dist(&self.targets[b]),
        }
    }

    /// Distance from a vehicle's depot to a target.
    #[inline]
    pub fn dist_dt(&self, vehicle: usize, target: usize) -> f64 {
        match &self.dt {
            Some(m) => m[vehicle * self.targets.len() + target],
            None => self.vehicles[vehicle].depot.dist(&self.targets[target]),
        }
    }

    /// Travel time of the closed tour `depot -> order[0] -> ... -> depot`.
    /// An empty order costs nothing.
    pub fn tour_time(&self, vehicle: usize, order: &[usize]) -> f64 {
        let Some((&first, rest)) = order.split_first() else {
            return 0.0;
        };
        let mut d = self.dist_dt(vehicle, first);
        let mut prev = first;
        for &t in rest {
            d += self.dist_tt(prev, t);
            prev = t;
        }
        d += self.dist_dt(vehicle, prev);
        d / self.vehicles[vehicle].speed
    }
}

/// Travel time between two points at the given speed.
pub fn edge_cost(a: Point, b: Point, speed: f64) -> Result<f64, ModelError> {
    if !a.is_finite() {
        return Err(ModelError::NonFiniteCoordinate { x: a.x, y: a.y });
    }
    if !b.is_finite() {
        return Err(ModelError::NonFiniteCoordinate { x: b.x, y: b.y });
    }
    if !(speed.is_finite() && speed > 0.0) {
        return Err(ModelError::InvalidSpeed { speed });
    }
    Ok(a.dist(&b) / speed)
}

/// Travel time of a closed tour for one vehicle, with input validation.
pub fn tour_cost(inst: &Instance, vehicle: usize, order: &[usize]) -> Result<f64, ModelError> {
    if vehicle >= inst.num_vehicles() {
        return Err(ModelError::UnknownVehicle { vehicle });
    }
    for &t in order {
        if t >= inst.num_targets() {
            return Err(ModelError::UnknownTarget { target: t });
        }
    }
    Ok(inst.tour_time(vehicle, order))
}

/// One vehicle's closed visiting order with its cached travel time. The depot
/// is implicit at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub vehicle: usize,
    pub order: Vec<usize>,
    pub cost: f64,
}

impl Tour {
    pub fn new(inst: &Instance, vehicle: usize, order: Vec<usize>) -> Self {
        let cost = inst.tour_time(vehicle, &order);
        Tour {
            vehicle,
            order,
            cost,
        }
    }

    pub fn empty(vehicle: usize) -> Self {
        Tour {
            vehicle,
            order: Vec::new(),
            cost: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Refresh the cached cost from scratch.
    pub fn recompute_cost(&mut self, inst: &Instance) {
        self.cost = inst.tour_time(self.vehicle, &self.order);
    }
}

/// A feasible set of tours, one per vehicle, with the min-max objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub tours: Vec<Tour>,
    pub objective: f64,
}

impl Solution {
    /// Builds a solution from tours indexed by vehicle id.
    pub fn from_tours(tours: Vec<Tour>) -> Self {
        let objective = tours.iter().map(|t| t.cost).fold(0.0, f64::max);
        Solution { tours, objective }
    }

    pub fn recompute_objective(&mut self) {
        self.objective = self.tours.iter().map(|t| t.cost).fold(0.0, f64::max);
    }

    /// Vehicle whose tour attains the objective; lowest id on ties.
    pub fn maximal_vehicle(&self) -> usize {
        let mut best = 0;
        for (i, t) in self.tours.iter().enumerate() {
            if t.cost > self.tours[best].cost {
                best = i;
            }
        }
        best
    }
}

/// A single constraint breach found by [`validate_solution`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Tour list does not line up with the fleet.
    WrongTourCount { expected: usize, got: usize },
    TourVehicleMismatch { index: usize, vehicle: usize },
    UnknownTarget { vehicle: usize, target: usize },
    /// Target appears more than once across (or within) tours.
    DuplicateTarget { target: usize },
    MissedTarget { target: usize },
    /// Required target sits in the wrong vehicle's tour.
    RequiredAssignmentBreach {
        target: usize,
        required_by: usize,
        found_in: usize,
    },
    /// Cached tour cost drifted from recomputation beyond tolerance.
    CostCacheDrift {
        vehicle: usize,
        cached: f64,
        actual: f64,
    },
    ObjectiveDrift { cached: f64, actual: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::WrongTourCount { expected, got } => {
                write!(f, "expected {expected} tours, got {got}")
            }
            Violation::TourVehicleMismatch { index, vehicle } => {
                write!(f, "tour at index {index} claims vehicle {vehicle}")
            }
            Violation::UnknownTarget { vehicle, target } => {
                write!(f, "vehicle {vehicle} visits unknown target {target}")
            }
            Violation::DuplicateTarget { target } => write!(f, "duplicate target {target}"),
            Violation::MissedTarget { target } => write!(f, "missed target {target}"),
            Violation::RequiredAssignmentBreach {
                target,
                required_by,
                found_in,
            } => write!(
                f,
                "required-assignment breach: target {target} belongs to vehicle \
                 {required_by} but is covered by vehicle {found_in}"
            ),
            Violation::CostCacheDrift {
                vehicle,
                cached,
                actual,
            } => write!(
                f,
                "vehicle {vehicle} cached cost {cached} drifted from actual {actual}"
            ),
            Violation::ObjectiveDrift { cached, actual } => {
                write!(f, "cached objective {cached} drifted from actual {actual}")
            }
        }
    }
}

/// Outcome of validating a solution; violations are data, not errors.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() / scale
}

/// Checks that a solution is feasible for the instance: every target covered
/// exactly once, required targets on their own vehicle, and cached costs in
/// agreement with recomputation.
pub fn validate_solution(inst: &Instance, sol: &Solution) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = inst.num_vehicles();
    if sol.tours.len() != k {
        report.violations.push(Violation::WrongTourCount {
            expected: k,
            got: sol.tours.len(),
        });
        return report;
    }

    let mut seen = vec![0usize; inst.num_targets()];
    for (i, tour) in sol.tours.iter().enumerate() {
        if tour.vehicle != i {
            report.violations.push(Violation::TourVehicleMismatch {
                index: i,
                vehicle: tour.vehicle,
            });
            continue;
        }
        for &t in &tour.order {
            if t >= inst.num_targets() {
                report
                    .violations
                    .push(Violation::UnknownTarget { vehicle: i, target: t });
                continue;
            }
            seen[t] += 1;
            if let Some(owner) = inst.required_owner(t) {
                if owner != i {
                    report.violations.push(Violation::RequiredAssignmentBreach {
                        target: t,
                        required_by: owner,
                        found_in: i,
                    });
                }
            }
        }
        let actual = inst.tour_time(i, &tour.order);
        if relative_gap(tour.cost, actual) > COST_CACHE_TOLERANCE {
            report.violations.push(Violation::CostCacheDrift {
                vehicle: i,
                cached: tour.cost,
                actual,
            });
        }
    }

    for (t, &count) in seen.iter().enumerate() {
        if count == 0 {
            report.violations.push(Violation::MissedTarget { target: t });
        } else if count > 1 {
            report
                .violations
                .push(Violation::DuplicateTarget { target: t });
        }
    }

    let actual_objective = sol.tours.iter().map(|t| t.cost).fold(0.0, f64::max);
    if relative_gap(sol.objective, actual_objective) > COST_CACHE_TOLERANCE {
        report.violations.push(Violation::ObjectiveDrift {
            cached: sol.objective,
            actual: actual_objective,
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_vehicle_instance() -> Instance {
        Instance::new(
            "t",
            vec![
                Point::new(0.0, 3.0),
                Point::new(4.0, 3.0),
                Point::new(10.0, 0.0),
            ],
            vec![
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![0]),
                VehicleSpec::new(Point::new(10.0, 1.0), 2.0, vec![]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn edge_cost_examples() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(3.0, 4.0);
        assert_eq!(edge_cost(a, b, 1.0).unwrap(), 5.0);
        assert_eq!(edge_cost(a, b, 2.0).unwrap(), 2.5);
        let c = Point::new(7.0, 7.0);
        assert_eq!(edge_cost(c, c, 1.25).unwrap(), 0.0);
    }

    #[test]
    fn edge_cost_rejects_bad_input() {
        let a = Point::new(0.0, 0.0);
        assert!(matches!(
            edge_cost(Point::new(f64::NAN, 0.0), a, 1.0),
            Err(ModelError::NonFiniteCoordinate { .. })
        ));
        assert!(matches!(
            edge_cost(a, Point::new(1.0, f64::INFINITY), 1.0),
            Err(ModelError::NonFiniteCoordinate { .. })
        ));
        assert!(matches!(
            edge_cost(a, a, 0.0),
            Err(ModelError::InvalidSpeed { .. })
        ));
        assert!(matches!(
            edge_cost(a, a, -2.0),
            Err(ModelError::InvalidSpeed { .. })
        ));
    }

    #[test]
    fn tour_cost_examples() {
        let inst = Instance::new(
            "t",
            vec![Point::new(0.0, 3.0), Point::new(4.0, 3.0)],
            vec![
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                VehicleSpec::new(Point::new(0.0, 0.0), 2.0, vec![]),
            ],
        )
        .unwrap();
        assert_eq!(tour_cost(&inst, 0, &[]).unwrap(), 0.0);
        // depot (0,0) -> (0,3) -> (4,3) -> depot: 3 + 4 + 5
        assert!((tour_cost(&inst, 0, &[0, 1]).unwrap() - 12.0).abs() < 1e-12);
        assert!((tour_cost(&inst, 1, &[0, 1]).unwrap() - 6.0).abs() < 1e-12);
        assert!(matches!(
            tour_cost(&inst, 0, &[0, 7]),
            Err(ModelError::UnknownTarget { target: 7 })
        ));
        assert!(matches!(
            tour_cost(&inst, 9, &[]),
            Err(ModelError::UnknownVehicle { vehicle: 9 })
        ));
    }

    #[test]
    fn instance_rejects_overlapping_required() {
        let err = Instance::new(
            "t",
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            vec![
                VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![1]),
                VehicleSpec::new(Point::new(2.0, 0.0), 1.0, vec![1]),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::OverlappingRequired {
                target: 1,
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn instance_rejects_out_of_range_required() {
        let err = Instance::new(
            "t",
            vec![Point::new(0.0, 0.0)],
            vec![VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![3])],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ModelError::RequiredTargetOutOfRange { target: 3, .. }
        ));
    }

    #[test]
    fn validator_accepts_feasible_solution() {
        let inst = two_vehicle_instance();
        let sol = Solution::from_tours(vec![
            Tour::new(&inst, 0, vec![0, 1]),
            Tour::new(&inst, 1, vec![2]),
        ]);
        assert!(validate_solution(&inst, &sol).is_ok());
    }

    #[test]
    fn validator_reports_duplicate_and_missed() {
        let inst = two_vehicle_instance();
        let sol = Solution::from_tours(vec![
            Tour::new(&inst, 0, vec![0, 2]),
            Tour::new(&inst, 1, vec![2]),
        ]);
        let report = validate_solution(&inst, &sol);
        assert!(report
            .violations
            .contains(&Violation::DuplicateTarget { target: 2 }));
        assert!(report
            .violations
            .contains(&Violation::MissedTarget { target: 1 }));
    }

    #[test]
    fn validator_reports_required_breach() {
        let inst = two_vehicle_instance();
        // Target 0 is required by vehicle 0 but covered by vehicle 1.
        let sol = Solution::from_tours(vec![
            Tour::new(&inst, 0, vec![1]),
            Tour::new(&inst, 1, vec![0, 2]),
        ]);
        let report = validate_solution(&inst, &sol);
        assert!(report.violations.contains(&Violation::RequiredAssignmentBreach {
            target: 0,
            required_by: 0,
            found_in: 1,
        }));
    }

    #[test]
    fn validator_reports_cost_drift() {
        let inst = two_vehicle_instance();
        let mut tour = Tour::new(&inst, 0, vec![0, 1]);
        tour.cost += 0.5;
        let sol = Solution::from_tours(vec![tour, Tour::new(&inst, 1, vec![2])]);
        let report = validate_solution(&inst, &sol);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CostCacheDrift { vehicle: 0, .. })));
    }

    #[test]
    fn matrix_and_on_demand_distances_agree() {
        let mut inst = two_vehicle_instance();
        let with_matrix: Vec<f64> = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| inst.dist_tt(a, b))
            .collect();
        inst.tt = None;
        inst.dt = None;
        let on_demand: Vec<f64> = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| inst.dist_tt(a, b))
            .collect();
        assert_eq!(with_matrix, on_demand);
    }

    #[test]
    fn with_depots_shares_target_matrix() {
        let inst = two_vehicle_instance();
        let moved = inst
            .with_depots(&[Point::new(5.0, 5.0), Point::new(-1.0, 2.0)])
            .unwrap();
        assert_eq!(moved.vehicle(0).depot, Point::new(5.0, 5.0));
        assert_eq!(inst.vehicle(0).depot, Point::new(0.0, 0.0));
        assert_eq!(moved.dist_tt(0, 2), inst.dist_tt(0, 2));
        assert!((moved.dist_dt(0, 0) - Point::new(5.0, 5.0).dist(&inst.target(0))).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn edge_cost_is_symmetric(
            ax in -1e3..1e3f64, ay in -1e3..1e3f64,
            bx in -1e3..1e3f64, by in -1e3..1e3f64,
            v in 0.1..10.0f64,
        ) {
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            prop_assert_eq!(edge_cost(a, b, v).unwrap(), edge_cost(b, a, v).unwrap());
        }

        #[test]
        fn edge_cost_satisfies_triangle_inequality(
            ax in -1e3..1e3f64, ay in -1e3..1e3f64,
            bx in -1e3..1e3f64, by in -1e3..1e3f64,
            cx in -1e3..1e3f64, cy in -1e3..1e3f64,
            v in 0.1..10.0f64,
        ) {
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            let c = Point::new(cx, cy);
            let direct = edge_cost(a, c, v).unwrap();
            let via = edge_cost(a, b, v).unwrap() + edge_cost(b, c, v).unwrap();
            prop_assert!(direct <= via + 1e-9 * via.max(1.0));
        }

        #[test]
        fn tour_cost_invariant_under_rotation_and_reversal(
            pts in proptest::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 2..9),
            rot in 0usize..9,
        ) {
            let points: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let inst = Instance::new(
                "p",
                points,
                vec![VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![])],
            ).unwrap();
            let order: Vec<usize> = (0..inst.num_targets()).collect();
            let base = inst.tour_time(0, &order);

            let mut reversed = order.clone();
            reversed.reverse();
            let rev = inst.tour_time(0, &reversed);
            prop_assert!((base - rev).abs() <= 1e-9 * base.max(1.0));

            // The tour is a closed cycle through the depot and all targets, so
            // rotating the explicit vertex cycle must not change its cost.
            let cycle_cost = |vs: &[Point]| -> f64 {
                let mut d = 0.0;
                for i in 0..vs.len() {
                    d += vs[i].dist(&vs[(i + 1) % vs.len()]);
                }
                d
            };
            let mut cycle: Vec<Point> = Vec::with_capacity(order.len() + 1);
            cycle.push(inst.vehicle(0).depot);
            cycle.extend(order.iter().map(|&t| inst.target(t)));
            let full = cycle_cost(&cycle);
            prop_assert!((full - base).abs() <= 1e-9 * base.max(1.0));
            let mut rotated = cycle.clone();
            rotated.rotate_left(rot % cycle.len());
            prop_assert!((cycle_cost(&rotated) - full).abs() <= 1e-9 * full.max(1.0));
        }
    }
}
