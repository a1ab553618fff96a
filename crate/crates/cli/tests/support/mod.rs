#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dtsynth::pipeline::Manifest;
use dtsynth::synthetic::{dictionary_corpus, labelled_corpus, toy_config, CorpusSpec};
use dtsynth::video::{write_raw_planar, FrameSequence};

pub fn dtsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtsynth"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs the binary and returns stdout, failing with stderr on a nonzero exit.
pub fn ok(args: &[&str]) -> String {
    let out = dtsynth(args);
    assert!(
        out.status.success(),
        "dtsynth {args:?} exited with {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_videos(dir: &Path, name: &str, videos: &[FrameSequence], manifest: Manifest) -> PathBuf {
    let vdir = dir.join(format!("{name}-videos"));
    std::fs::create_dir_all(&vdir).unwrap();
    let mut rows = manifest.rows;
    for (v, row) in videos.iter().zip(rows.iter_mut()) {
        write_raw_planar(v, &vdir.join(format!("{}.raw", v.source_id()))).unwrap();
        row.path = Some(format!("{name}-videos/{}.raw", v.source_id()));
    }
    let path = dir.join(format!("{name}.jsonl"));
    std::fs::write(&path, Manifest::new(rows).unwrap().to_jsonl()).unwrap();
    path
}

/// Labelled corpus on disk as raw-planar files plus a manifest.
pub fn write_corpus(dir: &Path, spec: CorpusSpec, seed: u64) -> PathBuf {
    let (videos, manifest) = labelled_corpus(spec, seed);
    write_videos(dir, "corpus", &videos, manifest)
}

/// Unlabelled-by-use videos for dictionary learning.
pub fn write_dictionary_corpus(dir: &Path, spec: CorpusSpec, seed: u64) -> PathBuf {
    let videos = dictionary_corpus(spec, seed);
    let rows = videos
        .iter()
        .map(|v| {
            let mut a = dtsynth::pipeline::Annotation::new(v.source_id());
            a.dt = false;
            a
        })
        .collect();
    write_videos(dir, "dictionary", &videos, Manifest::new(rows).unwrap())
}

pub fn write_toy_config(dir: &Path) -> PathBuf {
    let path = dir.join("toy.toml");
    std::fs::write(&path, toy_config().to_toml()).unwrap();
    path
}

/// Every file below `dir`, relative path with contents, sorted.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push((
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}
