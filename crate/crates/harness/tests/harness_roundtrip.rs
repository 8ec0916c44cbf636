//! File-format and matrix-level contracts: exact instance round-trips,
//! append-only result CSVs, and seed-stable matrix reruns.

use mmtsp_core::instgen::{assign_required_targets, HeterogeneityMode};
use mmtsp_core::model::{Instance, Point, VehicleSpec};
use mmtsp_harness::format::{parse_instance, write_instance};
use mmtsp_harness::matrix::{parse_grid, run_matrix};
use mmtsp_harness::results::{read_rows, ResultRow, ResultSink, RowStatus};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn big_instance() -> Instance {
    let mut r = ChaCha8Rng::seed_from_u64(77);
    let pts: Vec<Point> = (0..500)
        .map(|_| Point::new(r.random_range(0.0..1000.0), r.random_range(0.0..1000.0)))
        .collect();
    let vehicles: Vec<VehicleSpec> = (0..20)
        .map(|_| {
            VehicleSpec::new(
                Point::new(r.random_range(0.0..1000.0), r.random_range(0.0..1000.0)),
                [1.0, 1.25, 1.5, 1.75, 2.0][r.random_range(0..5)],
                vec![],
            )
        })
        .collect();
    let inst = Instance::new("big", pts, vehicles).unwrap();
    assign_required_targets(&inst, HeterogeneityMode::FiveTargets).unwrap()
}

#[test]
fn five_hundred_target_round_trip_is_exact() {
    let inst = big_instance();
    let text = write_instance(&inst);
    let back = parse_instance(&text).unwrap();
    assert_eq!(back.name(), inst.name());
    assert_eq!(back.num_targets(), inst.num_targets());
    assert_eq!(back.num_vehicles(), inst.num_vehicles());
    for t in 0..inst.num_targets() {
        assert_eq!(back.target(t).x.to_bits(), inst.target(t).x.to_bits());
        assert_eq!(back.target(t).y.to_bits(), inst.target(t).y.to_bits());
    }
    for (a, b) in back.vehicles().iter().zip(inst.vehicles()) {
        assert_eq!(a.depot.x.to_bits(), b.depot.x.to_bits());
        assert_eq!(a.depot.y.to_bits(), b.depot.y.to_bits());
        assert_eq!(a.speed.to_bits(), b.speed.to_bits());
        assert_eq!(a.required, b.required);
    }
    // parse(write(parse(write(x)))) is a fixed point.
    assert_eq!(write_instance(&back), text);
}

#[test]
fn result_sink_appends_without_rewriting() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let row = |i: u64| ResultRow {
        instance: format!("I{i}"),
        config: "c".into(),
        objective: Some(i as f64),
        wall_s: 0.5,
        seed: i,
        runs: 1,
        status: RowStatus::Ok,
    };
    {
        let mut sink = ResultSink::append(&path).unwrap();
        sink.write(&row(1)).unwrap();
    }
    let first = std::fs::read_to_string(&path).unwrap();
    {
        let mut sink = ResultSink::append(&path).unwrap();
        sink.write(&row(2)).unwrap();
    }
    let second = std::fs::read_to_string(&path).unwrap();
    assert!(second.starts_with(&first), "append must not rewrite earlier rows");
    let rows = read_rows(&path).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].instance, "I1");
    assert_eq!(rows[1].instance, "I2");
    // An error row round-trips with an empty objective.
    {
        let mut sink = ResultSink::append(&path).unwrap();
        sink.write(&ResultRow {
            objective: None,
            status: RowStatus::Error,
            ..row(3)
        })
        .unwrap();
    }
    let rows = read_rows(&path).unwrap();
    assert_eq!(rows[2].objective, None);
    assert_eq!(rows[2].status, RowStatus::Error);
}

#[test]
fn matrix_reruns_reproduce_objectives() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let instances: Vec<Instance> = (0..3)
        .map(|i| {
            let pts: Vec<Point> = (0..12)
                .map(|_| Point::new(r.random_range(0.0..50.0), r.random_range(0.0..50.0)))
                .collect();
            Instance::new(
                format!("M{i}"),
                pts,
                vec![
                    VehicleSpec::new(Point::new(0.0, 0.0), 1.0, vec![]),
                    VehicleSpec::new(Point::new(50.0, 50.0), 1.5, vec![]),
                ],
            )
            .unwrap()
        })
        .collect();
    let configs = parse_grid(
        "[[config]]\nlabel = \"a\"\nruns = 1\n\n[[config]]\nlabel = \"b\"\nmultiswap = \"off\"\nruns = 1\n",
    )
    .unwrap();
    let collect = |jobs: usize| {
        let mut rows = run_matrix(&instances, &configs, 11, jobs, |_| {}).unwrap();
        rows.sort_by_key(|r| (r.instance.clone(), r.config.clone()));
        rows.into_iter()
            .map(|r| (r.instance, r.config, r.objective.unwrap().to_bits(), r.seed))
            .collect::<Vec<_>>()
    };
    let single = collect(1);
    let parallel = collect(4);
    assert_eq!(single, parallel, "objective columns must be seed-stable");
}
