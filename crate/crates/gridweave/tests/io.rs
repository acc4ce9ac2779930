use gridweave::io::{
    layout_to_json, load_layout, load_samples, parse_layout_json, parse_samples_csv, parse_samples_json, save_layout,
    IoError,
};
use gridweave::synth::gen_synthetic;
use gridweave_core::pipeline::run_pipeline;
use gridweave_core::{GridSpec, LambdaMode, PipelineConfig, PipelineId};

const THREE: &str = r#"{"samples": [
    {"id": "a", "x": 0.1, "y": 0.2, "cluster": "red"},
    {"id": "b", "x": 0.8, "y": 0.7, "cluster": "blue", "meta": {"label": "cat", "n": 3}},
    {"id": "c", "x": 0.5, "y": 0.5, "cluster": "red"}
]}"#;

#[test]
fn three_record_file_loads() {
    let set = parse_samples_json(THREE, "three.json").unwrap();
    assert_eq!(set.len(), 3);
    assert_eq!(set.cluster_names(), ["blue", "red"]);
    let b = set.sample(set.index_of("b").unwrap());
    assert_eq!(b.position, [0.8, 0.7]);
    assert_eq!(b.meta["label"], "cat");
    assert_eq!(b.meta["n"], "3");
    assert!(!set.has_similarities());
}

#[test]
fn duplicate_id_is_named() {
    let text = r#"{"samples": [
        {"id": "a", "x": 0, "y": 0, "cluster": "k"},
        {"id": "a", "x": 1, "y": 1, "cluster": "k"}
    ]}"#;
    let err = parse_samples_json(text, "dup.json").unwrap_err();
    assert_eq!(err.code(), "invalid_input");
    let msg = err.to_string();
    assert!(msg.contains("`a`") && msg.contains("record 2"), "{msg}");
}

#[test]
fn similarity_of_wrong_size_is_a_dimension_error() {
    let text = r#"{"samples": [
        {"id": "a", "x": 0, "y": 0, "cluster": "k"},
        {"id": "b", "x": 1, "y": 1, "cluster": "k"}
    ], "similarities": [[1, 0.5, 0], [0.5, 1, 0], [0, 0, 1]]}"#;
    let err = parse_samples_json(text, "sim.json").unwrap_err();
    match err {
        IoError::Invalid { source, .. } => assert!(matches!(
            source,
            gridweave_core::Error::SimilarityDimension {
                rows: 3,
                expected: 2,
                ..
            }
        )),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_json_reports_position() {
    let err = parse_samples_json("{\"samples\": [\n  {\"id\": }\n]}", "bad.json").unwrap_err();
    assert_eq!(err.code(), "parse");
    assert!(err.to_string().contains("line 2"), "{err}");
}

#[test]
fn csv_matches_json() {
    let csv = "id,x,y,cluster\na,0.1,0.2,red\n b , 0.8 ,0.7,blue\nc,0.5,0.5,red\n";
    let from_csv = parse_samples_csv(csv, "three.csv").unwrap();
    let from_json = parse_samples_json(THREE, "three.json").unwrap();
    assert_eq!(from_csv.len(), 3);
    for id in ["a", "b", "c"] {
        let (x, y) = (
            from_csv.sample(from_csv.index_of(id).unwrap()),
            from_json.sample(from_json.index_of(id).unwrap()),
        );
        assert_eq!((x.position, x.cluster), (y.position, y.cluster));
    }
}

#[test]
fn csv_errors_name_the_line() {
    let err = parse_samples_csv("id,x,y,cluster\na,0,0,k\nb,oops,0,k\n", "t.csv").unwrap_err();
    assert_eq!(err.code(), "parse");
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn layout_round_trip_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let samples = gen_synthetic(3, 30, 0.1, 4);
    let out = run_pipeline(
        &samples,
        GridSpec::new(6, 6).unwrap(),
        PipelineId::GLT,
        &PipelineConfig::new(LambdaMode::Adaptive, 4),
    )
    .unwrap();
    let samples_path = dir.path().join("in/samples.json");
    gridweave::io::write(&samples_path, &gridweave::io::samples_to_json(&samples)).unwrap();
    let reloaded = load_samples(&samples_path).unwrap();
    assert_eq!(reloaded, samples);

    let path = dir.path().join("layout.json");
    save_layout(&out.layout, &samples, &path).unwrap();
    let back = load_layout(&path, &reloaded).unwrap();
    assert_eq!(back, out.layout);
    assert_eq!(
        layout_to_json(&back, &reloaded),
        std::fs::read_to_string(&path).unwrap()
    );
}

fn tiny_layout() -> (gridweave_core::SampleSet, String) {
    let samples = parse_samples_json(THREE, "three.json").unwrap();
    let out = run_pipeline(
        &samples,
        GridSpec::new(2, 2).unwrap(),
        PipelineId::Baseline,
        &PipelineConfig::new(LambdaMode::Adaptive, 0),
    )
    .unwrap();
    let json = layout_to_json(&out.layout, &samples);
    (samples, json)
}

#[test]
fn unknown_sample_is_rejected() {
    let (samples, json) = tiny_layout();
    let json = json.replace("\"a\"", "\"zz\"");
    let err = parse_layout_json(&json, &samples, "l.json").unwrap_err();
    assert_eq!(err.code(), "unknown_sample");
    assert!(err.to_string().contains("zz"));
}

#[test]
fn version_mismatch_is_rejected() {
    let (samples, json) = tiny_layout();
    let json = json.replacen("\"version\": 1", "\"version\": 7", 1);
    let err = parse_layout_json(&json, &samples, "l.json").unwrap_err();
    assert_eq!(err.code(), "unsupported_version");
    assert!(err.to_string().contains("unsupported schema version 7"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_samples(std::path::Path::new("/nonexistent/samples.json")).unwrap_err();
    assert_eq!(err.code(), "io");
}
