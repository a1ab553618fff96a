use std::fmt;
use std::path::{Path, PathBuf};

use dtsynth::config::{Config, ExternalSource};
use dtsynth::descriptors::{
    ingest_external, learn_dictionary, write_features, FeatureFileFormat, FeatureKind, FeatureTable, PatternDictionary,
};
use dtsynth::harness::{average_precision, average_precision_exact, run_splits, EvalTask};
use dtsynth::pipeline::{extract_features, BankId, FeatureStore, Manifest, TrainedPipeline};
use dtsynth::regions::{detect_region_with, spatial_score, CoarseMask};
use dtsynth::video::{load_sequence, FrameSequence, VideoFormat};
use serde_json::json;

use crate::{Common, DetectRegionArgs, DictLearnArgs, EvaluateArgs, ExtractArgs, IngestArgs, PredictArgs, TrainArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(dtsynth::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl From<dtsynth::Error> for CliError {
    fn from(e: dtsynth::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

/// Config file (or `base`, or defaults), then every `--set` in order.
fn effective_config(common: &Common, base: Option<Config>) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => base.unwrap_or_default(),
    };
    for o in &common.overrides {
        cfg.apply_override(o).map_err(|e| usage(format!("--set {o}: {e}")))?;
    }
    Ok(cfg)
}

fn sidecar_path(out: &Path) -> PathBuf {
    if out.is_dir() {
        out.join("config.json")
    } else {
        let mut s = out.as_os_str().to_owned();
        s.push(".config.json");
        PathBuf::from(s)
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Records the command, seed and effective configuration next to `out`.
fn echo_config(common: &Common, command: &str, cfg: &Config) -> Result<()> {
    let record = json!({
        "command": command,
        "seed": common.seed,
        "config_hash": cfg.hash(),
        "config": cfg.to_json_value(),
    });
    let text = serde_json::to_string_pretty(&record).expect("json value") + "\n";
    write_file(&sidecar_path(&common.out), text.as_bytes())
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable output") + "\n";
    write_file(path, text.as_bytes())
}

fn load_video(path: &Path, format: Option<&str>) -> Result<FrameSequence> {
    let format = match format {
        Some(f) => f.parse::<VideoFormat>().map_err(|e| usage(e.to_string()))?,
        None => VideoFormat::infer(path),
    };
    Ok(load_sequence(path, format)?)
}

fn load_dict(path: Option<&PathBuf>) -> Result<Option<PatternDictionary>> {
    path.map(|p| PatternDictionary::load(p)).transpose().map_err(Into::into)
}

fn load_store(paths: &[PathBuf], cfg: &Config) -> Result<FeatureStore> {
    let store = FeatureStore::load(paths, cfg.features.external_source)?;
    if cfg.features.external_source == ExternalSource::Lbptop && !store.tables.contains_key(&FeatureKind::External) {
        log::warn!("no EXTERNAL features given; LBP-TOP stands in for them");
    }
    Ok(store)
}

pub fn dict_learn(a: DictLearnArgs) -> Result<()> {
    let cfg = effective_config(&a.common, None)?;
    let mut videos = Vec::new();
    if let Some(m) = &a.manifest {
        let manifest = Manifest::load(m)?;
        for row in &manifest.rows {
            videos.push(manifest.load_video(row)?);
        }
    }
    for v in &a.video {
        videos.push(load_video(v, None)?);
    }
    if videos.is_empty() {
        return Err(CliError::Data(dtsynth::Error::InsufficientData(
            "no videos to learn from".into(),
        )));
    }
    let dict = learn_dictionary(&videos, &cfg.dictionary, a.common.seed)?;
    write_file(&a.common.out, dict.to_json().as_bytes())?;
    echo_config(&a.common, "dict learn", &cfg)?;
    println!(
        "learned {} codebooks of {} codewords from {} videos",
        dict.codebooks.len(),
        dict.codewords,
        videos.len()
    );
    Ok(())
}

pub fn features_extract(a: ExtractArgs) -> Result<()> {
    let cfg = effective_config(&a.common, None)?;
    let mut kinds = a
        .kinds
        .iter()
        .map(|k| k.parse::<FeatureKind>().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    kinds.sort();
    kinds.dedup();
    if kinds.contains(&FeatureKind::External) && cfg.features.external_source != ExternalSource::Lbptop {
        return Err(usage(
            "EXTERNAL descriptors are ingested, not extracted, unless features.external_source = \"lbptop\"",
        ));
    }
    if kinds.contains(&FeatureKind::Scopdt) && a.dict.is_none() {
        return Err(usage("SCOPDT extraction needs --dict"));
    }
    let dict = load_dict(a.dict.as_ref())?;
    let manifest = Manifest::load(&a.manifest)?;
    let mut store = FeatureStore::new(cfg.features.external_source);
    for (i, row) in manifest.rows.iter().enumerate() {
        let seq = manifest.load_video(row)?;
        store.insert_set(&row.id, extract_features(&seq, &kinds, dict.as_ref(), &cfg)?)?;
        log::info!("{}/{} {}", i + 1, manifest.len(), row.id);
    }
    std::fs::create_dir_all(&a.common.out)?;
    let (format, ext) = if a.binary {
        (FeatureFileFormat::Binary, "bin")
    } else {
        (FeatureFileFormat::Text, "txt")
    };
    for (kind, table) in &store.tables {
        let path = a.common.out.join(format!("{kind}.{ext}"));
        write_features(table, &path, format)?;
        println!(
            "{}: {} rows of dimension {}",
            path.display(),
            table.rows.len(),
            table.dim
        );
    }
    echo_config(&a.common, "features extract", &cfg)
}

pub fn features_ingest(a: IngestArgs) -> Result<()> {
    let cfg = effective_config(&a.common, None)?;
    let rows = ingest_external(&a.input, a.dim)?;
    let dim = rows
        .values()
        .next()
        .map(|d| d.dim())
        .ok_or_else(|| CliError::Data(dtsynth::Error::InsufficientData("feature file has no rows".into())))?;
    let mut table = FeatureTable::new(FeatureKind::External, dim);
    for (id, d) in rows {
        table.insert(id, d.values)?;
    }
    write_features(&table, &a.common.out, FeatureFileFormat::from_path(&a.common.out))?;
    echo_config(&a.common, "features ingest", &cfg)?;
    println!("ingested {} EXTERNAL rows of dimension {dim}", table.rows.len());
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let cfg = effective_config(&a.common, None)?;
    let manifest = Manifest::load(&a.manifest)?;
    let store = load_store(&a.features, &cfg)?;
    let pipeline = dtsynth::pipeline::train_pipeline(&manifest, &store, &cfg, a.common.seed)?;
    write_file(&a.common.out, pipeline.to_json().as_bytes())?;
    echo_config(&a.common, "train", &cfg)?;
    for (id, bank) in &pipeline.banks {
        println!("{}: {} training rows", id.as_str(), bank.training_rows);
    }
    Ok(())
}

pub fn predict(a: PredictArgs) -> Result<()> {
    let pipeline = TrainedPipeline::load(&a.model)?;
    let cfg = effective_config(&a.common, Some(pipeline.config.clone()))?;
    let store = load_store(&a.features, &cfg)?;
    let ids: Vec<String> = if let Some(m) = &a.manifest {
        Manifest::load(m)?.rows.into_iter().map(|r| r.id).collect()
    } else if !a.ids.is_empty() {
        a.ids.clone()
    } else {
        let source = match (store.tables.get(&FeatureKind::External), cfg.features.external_source) {
            (Some(t), _) => t,
            (None, ExternalSource::Lbptop) => store
                .tables
                .get(&FeatureKind::Lbptop)
                .ok_or(dtsynth::Error::MissingFeatureKind(FeatureKind::External))?,
            (None, ExternalSource::File) => {
                return Err(dtsynth::Error::MissingFeatureKind(FeatureKind::External).into())
            }
        };
        source.rows.keys().cloned().collect()
    };
    let mut out = String::new();
    let (mut dt, mut shdt) = (0, 0);
    for id in &ids {
        let p = pipeline.predict_from_store(id, &store)?;
        dt += p.is_dt as usize;
        shdt += (p.l_dt == dtsynth::pipeline::Mode::Shdt) as usize;
        out.push_str(&serde_json::to_string(&p).expect("prediction serializes"));
        out.push('\n');
    }
    write_file(&a.common.out, out.as_bytes())?;
    echo_config(&a.common, "predict", &cfg)?;
    println!(
        "{} predictions: {dt} retrieved as DT, {shdt} classified SHDT",
        ids.len()
    );
    Ok(())
}

pub fn detect_region(a: DetectRegionArgs) -> Result<()> {
    let pipeline = TrainedPipeline::load(&a.model)?;
    let mut cfg = effective_config(&a.common, Some(pipeline.config.clone()))?;
    if let Some(c) = a.count {
        cfg.regions.count = c;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    if pipeline.banks[&BankId::ShdtSpatial].models.is_none() {
        return Err(dtsynth::Error::UntrainedBank(BankId::ShdtSpatial.as_str().into()).into());
    }
    let dict = load_dict(a.dict.as_ref())?;
    let seq = load_video(&a.video, a.format.as_deref())?;
    let mask = a.mask.as_deref().map(CoarseMask::load_pgm).transpose()?;
    let res = detect_region_with(&seq, mask, cfg.regions.count, &cfg.regions, a.common.seed, |crop| {
        spatial_score(crop, &pipeline, dict.as_ref(), &cfg)
    })?;
    let mut record = json!({
        "video": a.video.display().to_string(),
        "rect": res.best.rect,
        "score": res.best.score,
    });
    if a.candidates {
        record["candidates"] = serde_json::to_value(&res.candidates).expect("candidates serialize");
    }
    write_json(&a.common.out, &record)?;
    echo_config(&a.common, "detect-region", &cfg)?;
    let r = res.best.rect;
    println!("x={} y={} w={} h={} score={:.6}", r.x, r.y, r.w, r.h, res.best.score);
    Ok(())
}

/// Three items, the top one negative: AP = (1/2 + 2/3) / 2.
const SELFTEST_SCORES: [f64; 3] = [0.9, 0.8, 0.7];
const SELFTEST_LABELS: [bool; 3] = [false, true, true];

pub fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut cfg = effective_config(&a.common, None)?;
    if a.task.eq_ignore_ascii_case("ap-selftest") {
        let ap = average_precision(&SELFTEST_SCORES, &SELFTEST_LABELS)?;
        let (n, d) = average_precision_exact(&SELFTEST_SCORES, &SELFTEST_LABELS)?;
        write_json(
            &a.common.out,
            &json!({
                "task": "ap-selftest",
                "scores": SELFTEST_SCORES,
                "labels": SELFTEST_LABELS,
                "average_precision": ap,
                "fraction": format!("{n}/{d}"),
            }),
        )?;
        echo_config(&a.common, "evaluate", &cfg)?;
        println!("ap-selftest: AP = {n}/{d} ({ap:.6})");
        return Ok(());
    }
    let task: EvalTask = a.task.parse().map_err(|e: dtsynth::Error| usage(e.to_string()))?;
    let manifest = a
        .manifest
        .as_ref()
        .ok_or_else(|| usage(format!("task {task} needs --manifest")))?;
    if a.features.is_empty() {
        return Err(usage(format!("task {task} needs --features")));
    }
    if let Some(s) = a.splits {
        cfg.evaluation.splits = s;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let manifest = Manifest::load(manifest)?;
    let store = load_store(&a.features, &cfg)?;
    let report = run_splits(&manifest, &store, task, &cfg, cfg.evaluation.splits, a.common.seed)?;
    write_json(
        &a.common.out,
        &serde_json::to_value(&report).expect("report serializes"),
    )?;
    echo_config(&a.common, "evaluate", &cfg)?;
    for (name, m) in &report.metrics {
        println!("{name}: {:.4} ± {:.4} over {} splits", m.mean, m.sd, m.values.len());
    }
    Ok(())
}
