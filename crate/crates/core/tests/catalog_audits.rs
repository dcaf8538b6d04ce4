//! Whole-catalog audits: every shipped map is nonexpansive across seeds,
//! claimed isometries preserve distances in both directions, ball
//! surjectivity holds for the surjective isometries with analytic inverses
//! as the oracle, and the recurrent set behaves as a closed set on
//! convergent fixtures.

use std::sync::Arc;

use norbit::maps::{audit_ball_surjectivity, audit_nonexpansive, make_map, DynamicMap, MapSpec};
use norbit::metric::{make_space, Space, SpaceSpec, TOL_METRIC};
use norbit::orbit::{compute_orbit, detect_recurrence};

fn space(spec: SpaceSpec) -> Arc<Space> {
    Arc::new(make_space(&spec).unwrap())
}

fn catalog() -> Vec<DynamicMap> {
    let e1 = space(SpaceSpec::with_dim("euclidean", 1));
    let e2 = space(SpaceSpec::with_dim("euclidean", 2));
    let z1 = space(SpaceSpec::with_dim("integer-lattice", 1));
    let half = space(SpaceSpec::new("half-line"));
    let circ = space(SpaceSpec::new("circle"));
    let dsk = space(SpaceSpec::new("poincare-disk"));
    let poly = space(SpaceSpec::with_dim("polydisc", 2));
    let golden = std::f64::consts::TAU * (5.0_f64.sqrt() - 1.0) / 2.0;

    vec![
        make_map(&MapSpec::new("identity", serde_json::Value::Null), &e2).unwrap(),
        make_map(&MapSpec::new("scale", serde_json::json!({"c": 0.5})), &e1).unwrap(),
        make_map(&MapSpec::new("scale", serde_json::json!({"c": -1.0})), &e1).unwrap(),
        make_map(&MapSpec::new("translation", serde_json::json!({"v": [1.5, -0.5]})), &e2)
            .unwrap(),
        make_map(&MapSpec::new("translation", serde_json::json!({"v": [1.0]})), &z1).unwrap(),
        make_map(&MapSpec::new("scale", serde_json::json!({"c": 0.25})), &half).unwrap(),
        make_map(&MapSpec::new("translation", serde_json::json!({"v": [2.0]})), &half).unwrap(),
        make_map(
            &MapSpec::new("rotation", serde_json::json!({"theta": std::f64::consts::TAU / 5.0})),
            &circ,
        )
        .unwrap(),
        make_map(&MapSpec::new("rotation", serde_json::json!({"theta": golden})), &circ).unwrap(),
        make_map(
            &MapSpec::new("mobius-elliptic", serde_json::json!({"theta": 0.9, "a": [0.3, 0.1]})),
            &dsk,
        )
        .unwrap(),
        make_map(&MapSpec::new("mobius-hyperbolic", serde_json::json!({"a": 0.5})), &dsk)
            .unwrap(),
        make_map(&MapSpec::new("mobius-parabolic", serde_json::json!({"t": 1.0})), &dsk).unwrap(),
        make_map(
            &MapSpec::new("blaschke", serde_json::json!({"zeros": [[0.0, 0.0], [0.3, 0.0]]})),
            &dsk,
        )
        .unwrap(),
        make_map(&MapSpec::new("blaschke", serde_json::json!({"zeros": [[0.4, 0.0]]})), &dsk)
            .unwrap(),
        make_map(
            &MapSpec::new(
                "product",
                serde_json::json!({
                    "factors": [
                        {"name": "blaschke", "params": {"zeros": [[0.0, 0.0], [0.0, 0.0]]}},
                        {"name": "mobius-elliptic", "params": {"theta": 0.4, "a": [0.2, 0.0]}},
                    ]
                }),
            ),
            &poly,
        )
        .unwrap(),
    ]
}

#[test]
fn every_catalog_map_is_nonexpansive_across_seeds() {
    for map in catalog() {
        for seed in 0..5u64 {
            let report = audit_nonexpansive(&map, 10_000, seed);
            assert!(
                report.passed,
                "{} failed at seed {seed}: defect {:.3e}",
                map.name(),
                report.max_defect
            );
        }
    }
}

#[test]
fn claimed_isometries_preserve_distances_both_ways() {
    for map in catalog().into_iter().filter(|m| m.claims_isometry()) {
        let space = map.space();
        let pts = space.sample(11, 2000);
        let mut worst = 0.0_f64;
        for chunk in pts.chunks_exact(2) {
            let before = space.distance(&chunk[0], &chunk[1]).unwrap();
            let after = space
                .distance(&map.apply(&chunk[0]).unwrap(), &map.apply(&chunk[1]).unwrap())
                .unwrap();
            worst = worst.max((after - before).abs());
        }
        assert!(worst <= TOL_METRIC, "{}: two-sided defect {worst:.3e}", map.name());
    }
}

#[test]
fn ball_surjectivity_holds_with_analytic_inverses_as_oracle() {
    // Rotation: the inverse is the reverse rotation.
    let circ = space(SpaceSpec::new("circle"));
    let theta = 0.9_f64;
    let rotation =
        make_map(&MapSpec::new("rotation", serde_json::json!({"theta": theta})), &circ).unwrap();
    let center = circ.point(&[1.0, 0.0]).unwrap();
    let radius = 0.5;
    let image_center = rotation.apply(&center).unwrap();
    for q in circ.sample_in_ball(&image_center, radius, 5, 32).unwrap() {
        let (x, y) = (q.coords()[0], q.coords()[1]);
        let preimage = circ
            .point(&[
                x * theta.cos() + y * theta.sin(),
                -x * theta.sin() + y * theta.cos(),
            ])
            .unwrap();
        assert!(circ.distance(&rotation.apply(&preimage).unwrap(), &q).unwrap() < 1e-12);
        assert!(circ.distance(&preimage, &center).unwrap() < radius + 1e-12);
    }
    let report = audit_ball_surjectivity(&rotation, &center, radius, 24, 7).unwrap();
    assert!(report.passed, "search defect {:.3e}", report.max_defect);

    // Disk automorphism: the inverse automorphism is closed-form.
    let dsk = space(SpaceSpec::new("poincare-disk"));
    let a = 0.4_f64;
    let automorphism =
        make_map(&MapSpec::new("blaschke", serde_json::json!({"zeros": [[a, 0.0]]})), &dsk)
            .unwrap();
    let center = dsk.point(&[0.0, 0.0]).unwrap();
    let radius = 1.0;
    let image_center = automorphism.apply(&center).unwrap();
    for q in dsk.sample_in_ball(&image_center, radius, 9, 32).unwrap() {
        let w = num_complex::Complex64::new(q.coords()[0], q.coords()[1]);
        let z = (w + a) / (num_complex::Complex64::new(1.0, 0.0) + a * w);
        let preimage = dsk.point(&[z.re, z.im]).unwrap();
        assert!(dsk.distance(&automorphism.apply(&preimage).unwrap(), &q).unwrap() < 1e-12);
        assert!(dsk.distance(&preimage, &center).unwrap() < radius + 1e-12);
    }
    let report = audit_ball_surjectivity(&automorphism, &center, radius, 24, 3).unwrap();
    assert!(report.passed, "search defect {:.3e}", report.max_defect);
}

#[test]
fn recurrent_points_limit_stays_recurrent_on_the_circle() {
    // A convergent sequence of certified recurrent starts whose limit must
    // certify at the same eps and horizon.
    let circ = space(SpaceSpec::new("circle"));
    let golden = std::f64::consts::TAU * (5.0_f64.sqrt() - 1.0) / 2.0;
    let map =
        make_map(&MapSpec::new("rotation", serde_json::json!({"theta": golden})), &circ).unwrap();
    let eps = 0.01;
    let horizon = 10_000;
    let angles: Vec<f64> = (0..5).map(|n| 0.1 / f64::powi(2.0, n)).collect();
    for angle in &angles {
        let start = circ.point(&[angle.cos(), angle.sin()]).unwrap();
        let orbit = compute_orbit(&map, &start, horizon).unwrap();
        assert!(detect_recurrence(&orbit, eps).is_ok(), "start at angle {angle} must certify");
    }
    let limit = circ.point(&[1.0, 0.0]).unwrap();
    let orbit = compute_orbit(&map, &limit, horizon).unwrap();
    assert!(detect_recurrence(&orbit, eps).is_ok(), "the limit point must certify");
}
