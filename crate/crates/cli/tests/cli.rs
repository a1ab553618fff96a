mod support;

use dtsynth::synthetic::{planted_patch_video, CorpusSpec};
use dtsynth::video::write_raw_planar;
use support::{dtsynth, ok, p, snapshot, write_corpus, write_dictionary_corpus, write_toy_config};

#[test]
fn usage_errors_exit_one() {
    assert_eq!(dtsynth(&[]).status.code(), Some(1));
    assert_eq!(
        dtsynth(&["train", "--manifest", "m.jsonl", "--features", "f.txt"])
            .status
            .code(),
        Some(1)
    );
    let out = dtsynth(&["predict", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("o.json");
    assert_eq!(
        dtsynth(&["evaluate", "--task", "nope", "--out", p(&o)]).status.code(),
        Some(1)
    );
    let bad_set = dtsynth(&[
        "evaluate",
        "--task",
        "ap-selftest",
        "--set",
        "clips.clip_length=zero",
        "--out",
        p(&o),
    ]);
    assert_eq!(bad_set.status.code(), Some(1));
    assert_eq!(
        dtsynth(&["evaluate", "--task", "retrieval", "--out", p(&o)])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(dtsynth(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = d.join("m.json");
    let missing = dtsynth(&[
        "train",
        "--manifest",
        p(&d.join("none.jsonl")),
        "--features",
        "f",
        "--out",
        p(&o),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    let bad = d.join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"a\",\"l_dt\":\"TDT\",\"s_temporal\":0.3}\n").unwrap();
    let f = d.join("f.txt");
    std::fs::write(&f, "DTFEAT 1 EXTERNAL 1\na 1\n").unwrap();
    assert_eq!(
        dtsynth(&["train", "--manifest", p(&bad), "--features", p(&f), "--out", p(&o)])
            .status
            .code(),
        Some(2)
    );
    let ragged = d.join("r.txt");
    std::fs::write(&ragged, "DTFEAT 1 EXTERNAL 2\na 1 2\nb 1\n").unwrap();
    assert_eq!(
        dtsynth(&["features", "ingest", "--input", p(&ragged), "--out", p(&o)])
            .status
            .code(),
        Some(2)
    );
    assert!(!o.exists());
}

#[test]
fn ap_selftest_prints_seven_twelfths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ap.json");
    let stdout = ok(&["evaluate", "--task", "ap-selftest", "--out", p(&out)]);
    assert!(stdout.contains("7/12"), "{stdout}");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["fraction"], "7/12");
    assert!(dir.path().join("ap.json.config.json").exists());
}

#[test]
fn ingest_rewrites_external_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c3d.txt");
    std::fs::write(&input, "DTFEAT 1 C3D 3\nv1 0.5 1 2\nv0 1e-3 0 -4\n").unwrap();
    let out = dir.path().join("ext.txt");
    ok(&[
        "features",
        "ingest",
        "--input",
        p(&input),
        "--dim",
        "3",
        "--out",
        p(&out),
    ]);
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "DTFEAT 1 EXTERNAL 3\nv0 0.001 0 -4\nv1 0.5 1 2\n"
    );
    assert_eq!(
        dtsynth(&[
            "features",
            "ingest",
            "--input",
            p(&input),
            "--dim",
            "4",
            "--out",
            p(&out)
        ])
        .status
        .code(),
        Some(2)
    );
}

/// Runs `args` (whose last value is the output path under `root`) twice
/// into fresh roots and asserts byte-identical trees.
fn twice(dir: &std::path::Path, name: &str, args: impl Fn(&std::path::Path) -> Vec<String>) -> std::path::PathBuf {
    let mut snaps = Vec::new();
    for run in 0..2 {
        let root = dir.join(format!("{name}-{run}"));
        std::fs::create_dir_all(&root).unwrap();
        let a = args(&root);
        ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
        snaps.push(snapshot(&root));
    }
    assert!(!snaps[0].is_empty());
    assert_eq!(snaps[0], snaps[1], "{name} output differs between runs");
    dir.join(format!("{name}-0"))
}

#[test]
fn small_workflow_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let spec = CorpusSpec {
        per_class: 6,
        ..CorpusSpec::default()
    };
    let manifest = write_corpus(d, spec, 1);
    let dict_manifest = write_dictionary_corpus(d, CorpusSpec { per_class: 2, ..spec }, 1);
    let config = write_toy_config(d);
    let s = |x: &std::path::Path| x.to_str().unwrap().to_string();
    let common = |out: std::path::PathBuf| {
        vec![
            "--seed".into(),
            "5".into(),
            "--config".into(),
            s(&config),
            "--out".into(),
            s(&out),
        ]
    };

    let dict_root = twice(d, "dict", |r| {
        let mut a = vec!["dict".into(), "learn".into(), "--manifest".into(), s(&dict_manifest)];
        a.extend(common(r.join("dict.json")));
        a
    });
    let dict = dict_root.join("dict.json");
    assert!(dict_root.join("dict.json.config.json").exists());

    let feat_root = twice(d, "features", |r| {
        let mut a = vec![
            "features".into(),
            "extract".into(),
            "--manifest".into(),
            s(&manifest),
            "--dict".into(),
            s(&dict),
        ];
        for k in ["SCOPDT", "LBPTOP", "EXTERNAL"] {
            a.extend(["--kind".into(), k.into()]);
        }
        a.extend(common(r.join("feat")));
        a
    });
    let feats: Vec<String> = ["SCOPDT", "LBPTOP", "EXTERNAL"]
        .iter()
        .map(|k| s(&feat_root.join("feat").join(format!("{k}.txt"))))
        .collect();
    let with_features = |mut a: Vec<String>| {
        for f in &feats {
            a.extend(["--features".into(), f.clone()]);
        }
        a
    };

    let model_root = twice(d, "train", |r| {
        let mut a = with_features(vec!["train".into(), "--manifest".into(), s(&manifest)]);
        a.extend(common(r.join("model.json")));
        a
    });
    let model = model_root.join("model.json");
    let text = std::fs::read_to_string(&model).unwrap();
    assert_eq!(
        dtsynth::pipeline::TrainedPipeline::from_json(&text).unwrap().to_json(),
        text
    );

    let pred_root = twice(d, "predict", |r| {
        let mut a = with_features(vec![
            "predict".into(),
            "--model".into(),
            s(&model),
            "--manifest".into(),
            s(&manifest),
        ]);
        a.extend(common(r.join("pred.jsonl")));
        a
    });
    let lines = std::fs::read_to_string(pred_root.join("pred.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 18);

    twice(d, "evaluate", |r| {
        let mut a = with_features(vec![
            "evaluate".into(),
            "--task".into(),
            "all".into(),
            "--manifest".into(),
            s(&manifest),
            "--splits".into(),
            "2".into(),
        ]);
        a.extend(common(r.join("report.json")));
        a
    });

    let (video, _) = planted_patch_video(48, 24, 16, 3);
    let vpath = d.join("planted.raw");
    write_raw_planar(&video, &vpath).unwrap();
    let region_root = twice(d, "region", |r| {
        let mut a = vec![
            "detect-region".into(),
            "--model".into(),
            s(&model),
            "--dict".into(),
            s(&dict),
            "--video".into(),
            s(&vpath),
            "--count".into(),
            "4".into(),
            "--candidates".into(),
            "--set".into(),
            "regions.min_side=16".into(),
        ];
        a.extend(common(r.join("region.json")));
        a
    });
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(region_root.join("region.json")).unwrap()).unwrap();
    assert_eq!(v["candidates"].as_array().unwrap().len(), 4);
}
