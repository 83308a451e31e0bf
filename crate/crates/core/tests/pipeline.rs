use levi_core::bench::*;
use levi_core::nodes::{planar_lattice, write_nodes};
use levi_core::LeviError;
use proptest::prelude::*;

#[test]
fn small_ads_run_fills_every_field() {
    let config = ExperimentConfig::new("ads", "heart", Method::Ads { layers: 4, k1: 2 });
    let out = run_experiment_with_points(&config).unwrap();
    let r = &out.report;
    // interior rings 1..=7, so only layers 2 and 7 are reported
    assert_eq!(r.err_local.iter().map(|l| l.layer).collect::<Vec<_>>(), [2, 7]);
    assert!(r.err_avg.unwrap() > 0.0);
    assert_eq!(r.node_counts.evaluation, out.points.len());
    assert_eq!(r.node_counts.unknowns, r.node_counts.internal + r.node_counts.boundary);
    assert!(r.condition >= 1.0);
    assert_eq!(ErrorReport::from_json(&r.to_json().unwrap()).unwrap(), *r);
}

#[test]
fn file_nodes_match_lattice_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nodes.txt");
    let problem = example1_heart();
    write_nodes(&path, &planar_lattice(&problem.domain, 21).unwrap()).unwrap();
    let lattice = ExperimentConfig::new(
        "a",
        "heart",
        Method::Drm {
            boundary_half: 64,
            nodes: NodeSource::Lattice { count: 21 },
        },
    );
    let file = ExperimentConfig::new(
        "a",
        "heart",
        Method::Drm {
            boundary_half: 64,
            nodes: NodeSource::File { path: path.clone() },
        },
    );
    let a = run_experiment_with_points(&lattice).unwrap();
    let b = run_experiment_with_points(&file).unwrap();
    assert_eq!(points_csv(&a.points), points_csv(&b.points));

    let missing = ExperimentConfig::new(
        "m",
        "heart",
        Method::Drm {
            boundary_half: 64,
            nodes: NodeSource::File {
                path: dir.path().join("none.txt"),
            },
        },
    );
    assert!(matches!(run_experiment(&missing), Err(LeviError::Nodes(_))));
}

#[test]
fn spatial_run_on_internal_nodes() {
    let mut config = ExperimentConfig::new(
        "b",
        "harmonic_ball",
        Method::Drm3d {
            polar: 8,
            nodes: NodeSource::Lattice { count: 15 },
            field_refinement: 2,
        },
    );
    config.evaluation = EvaluationSet::InternalNodes;
    let out = run_experiment_with_points(&config).unwrap();
    assert_eq!(out.points.len(), 15);
    assert_eq!(out.report.node_counts.boundary, 128);
    assert!(out.report.err_mean_abs < 5e-2, "{}", out.report.err_mean_abs);
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![0.0f64..1.0, 1e-300f64..1e300, Just(0.1 + 0.2)]
}

proptest! {
    #[test]
    fn reports_round_trip_exactly(
        errs in prop::collection::vec(finite(), 4),
        layers in prop::collection::vec((1usize..40, finite()), 0..5),
        counts in (0usize..100_000, 0usize..10_000, 0usize..10_000),
        avg in prop::option::of(finite()),
    ) {
        let report = ErrorReport {
            config: ExperimentConfig::new("p", "ellipse", Method::Drm {
                boundary_half: 256,
                nodes: NodeSource::Lattice { count: 208 },
            }),
            err_local: layers.iter().map(|&(layer, value)| LayerError { layer, value }).collect(),
            err_avg: avg,
            err_mean_abs: errs[0],
            err_rms_rel: errs[1],
            node_counts: NodeCounts {
                unknowns: counts.0,
                boundary: counts.1,
                internal: counts.2,
                evaluation: counts.2,
            },
            wall_time: errs[2],
            condition: errs[3],
        };
        let back = ErrorReport::from_json(&report.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, report);
    }
}
