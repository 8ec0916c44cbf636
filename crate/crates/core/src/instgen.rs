//! Benchmark-suite generation: random speeds from the five-element set and
//! the zero/three/five required-target assignment rules, applied to base
//! instances to produce heterogeneous variants.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Instance, VehicleSpec};

/// The speed values drawn uniformly for each vehicle.
pub const SPEED_SET: [f64; 5] = [1.0, 1.25, 1.5, 1.75, 2.0];

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error(
        "instance {name}: {targets} targets cannot supply {per_vehicle} required targets \
         to each of {vehicles} vehicles"
    )]
    RatioTooLow {
        name: String,
        targets: usize,
        vehicles: usize,
        per_vehicle: usize,
    },
}

/// How many targets get functionally assigned to each vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeterogeneityMode {
    ZeroTargets,
    ThreeTargets,
    FiveTargets,
}

impl HeterogeneityMode {
    pub fn per_vehicle(self) -> usize {
        match self {
            HeterogeneityMode::ZeroTargets => 0,
            HeterogeneityMode::ThreeTargets => 3,
            HeterogeneityMode::FiveTargets => 5,
        }
    }

    /// Suffix used in generated instance names, matching the `_0/_3/_5`
    /// convention of the benchmark tables.
    pub fn suffix(self) -> &'static str {
        match self {
            HeterogeneityMode::ZeroTargets => "0",
            HeterogeneityMode::ThreeTargets => "3",
            HeterogeneityMode::FiveTargets => "5",
        }
    }
}

/// Draws one speed per vehicle, uniformly from [`SPEED_SET`].
pub fn assign_speeds<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k)
        .map(|_| SPEED_SET[rng.random_range(0..SPEED_SET.len())])
        .collect()
}

/// Populates required-target sets per the mode rule: vehicles are processed
/// in index order, each sorting the remaining pool by distance from its depot
/// and taking the closest/median/farthest picks, which leave the pool.
/// Distance ties go to the lower target id.
pub fn assign_required_targets(
    inst: &Instance,
    mode: HeterogeneityMode,
) -> Result<Instance, GenError> {
    let per_vehicle = mode.per_vehicle();
    let k = inst.num_vehicles();
    if inst.num_targets() < per_vehicle * k {
        return Err(GenError::RatioTooLow {
            name: inst.name().to_string(),
            targets: inst.num_targets(),
            vehicles: k,
            per_vehicle,
        });
    }

    let mut pool: Vec<usize> = (0..inst.num_targets()).collect();
    let mut vehicles: Vec<VehicleSpec> = inst.vehicles().to_vec();
    for (j, vehicle) in vehicles.iter_mut().enumerate() {
        if per_vehicle == 0 {
            vehicle.required = Vec::new();
            continue;
        }
        pool.sort_by(|&a, &b| {
            inst.dist_dt(j, a)
                .total_cmp(&inst.dist_dt(j, b))
                .then(a.cmp(&b))
        });
        let picks = pick_indices(pool.len(), per_vehicle);
        let mut chosen: Vec<usize> = picks.iter().map(|&i| pool[i]).collect();
        chosen.sort_unstable();
        pool.retain(|t| !chosen.contains(t));
        vehicle.required = chosen;
    }

    Ok(Instance::new(inst.name(), inst.targets().to_vec(), vehicles)
        .expect("assignment preserves instance invariants"))
}

/// Indices picked from a sorted pool of length `len`: closest/median/farthest
/// for three picks; the two closest, two farthest, and the median for five.
/// The median is the lower median; if it collides with an extreme pick on a
/// tiny pool it steps toward the center until free.
fn pick_indices(len: usize, count: usize) -> Vec<usize> {
    debug_assert!(len >= count);
    let median = (len - 1) / 2;
    let mut picks: Vec<usize> = match count {
        3 => vec![0, median, len - 1],
        5 => vec![0, 1, median, len - 2, len - 1],
        _ => unreachable!("only 3- and 5-target modes exist"),
    };
    picks.sort_unstable();
    picks.dedup();
    let mut m = median;
    while picks.len() < count {
        m += 1;
        if !picks.contains(&m) {
            picks.push(m);
            picks.sort_unstable();
        }
    }
    picks
}

/// Outcome of [`generate_suite`]; bases that cannot satisfy a mode's ratio
/// requirement are reported without stopping the suite. The five-target
/// variant is skipped silently when the target-to-vehicle ratio is below
/// five, matching the published suite's 43 + 43 + 42 shape.
#[derive(Debug, Default)]
pub struct GeneratedSuite {
    pub instances: Vec<Instance>,
    pub errors: Vec<GenError>,
}

/// Expands each base instance into heterogeneous variants: random speeds
/// (one draw per base, shared by its variants) and the zero/three/five
/// required-target assignments. Generation is a pure function of
/// `(bases, seed)`; each base derives its own RNG stream from the seed and
/// its name so single instances regenerate identically in isolation.
pub fn generate_suite(bases: &[Instance], seed: u64) -> GeneratedSuite {
    let mut suite = GeneratedSuite::default();
    for base in bases {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, base.name()));
        let speeds = assign_speeds(base.num_vehicles(), &mut rng);
        let vehicles: Vec<VehicleSpec> = base
            .vehicles()
            .iter()
            .zip(&speeds)
            .map(|(v, &speed)| VehicleSpec::new(v.depot, speed, Vec::new()))
            .collect();
        let heterogeneous =
            Instance::new(base.name(), base.targets().to_vec(), vehicles)
                .expect("base instances are valid");

        for mode in [
            HeterogeneityMode::ZeroTargets,
            HeterogeneityMode::ThreeTargets,
            HeterogeneityMode::FiveTargets,
        ] {
            if mode == HeterogeneityMode::FiveTargets
                && heterogeneous.num_targets() < 5 * heterogeneous.num_vehicles()
            {
                continue;
            }
            match assign_required_targets(&heterogeneous, mode) {
                Ok(inst) => {
                    let name = format!("{}_{}", base.name(), mode.suffix());
                    suite.instances.push(
                        Instance::new(name, inst.targets().to_vec(), inst.vehicles().to_vec())
                            .expect("renaming preserves validity"),
                    );
                }
                Err(err) => suite.errors.push(err),
            }
        }
    }
    suite
}

/// FNV-1a over the seed and name; stable across platforms and releases.
fn mix_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in seed.to_le_bytes().iter().chain(name.as_bytes()) {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
