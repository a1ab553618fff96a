//! Ranking metrics and the repeated random-split evaluation protocol.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::descriptors::FeatureKind;
use crate::error::{Error, Result};
use crate::pipeline::{
    classify_mode, predict_synthesizability, score_textureness, suggest_method, train_pipeline, Annotation,
    FeatureStore, Manifest, Mode,
};
use crate::rng::{derive_seed, rng_for, tag};

/// Indices sorted by descending score; ties keep input order.
fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

fn check_inputs(scores: &[f64], labels: &[bool]) -> Result<usize> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            got: labels.len(),
        });
    }
    match labels.iter().filter(|&&l| l).count() {
        0 => Err(Error::NoPositives),
        p => Ok(p),
    }
}

/// Non-interpolated average precision: the mean, over positives, of the
/// precision at each positive's rank.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let positives = check_inputs(scores, labels)?;
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in ranking(scores).iter().enumerate() {
        if labels[i] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(sum / positives as f64)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Average precision as a reduced fraction `(numerator, denominator)`.
pub fn average_precision_exact(scores: &[f64], labels: &[bool]) -> Result<(u128, u128)> {
    let positives = check_inputs(scores, labels)?;
    let (mut num, mut den) = (0u128, 1u128);
    let mut hits = 0u128;
    for (rank, &i) in ranking(scores).iter().enumerate() {
        if labels[i] {
            hits += 1;
            let r = rank as u128 + 1;
            num = num * r + hits * den;
            den *= r;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
    }
    den *= positives as u128;
    let g = gcd(num, den);
    Ok((num / g, den / g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
}

/// One point per distinct score, thresholding at `score >= threshold`,
/// from the highest threshold down.
pub fn pr_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<PrPoint>> {
    let positives = check_inputs(scores, labels)? as f64;
    let order = ranking(scores);
    let mut out = Vec::new();
    let (mut tp, mut seen) = (0usize, 0usize);
    for (k, &i) in order.iter().enumerate() {
        seen += 1;
        tp += labels[i] as usize;
        let last_of_group = order.get(k + 1).is_none_or(|&j| scores[j] != scores[i]);
        if last_of_group {
            out.push(PrPoint {
                threshold: scores[i],
                recall: tp as f64 / positives,
                precision: tp as f64 / seen as f64,
            });
        }
    }
    Ok(out)
}

pub fn accuracy<T: PartialEq>(predicted: &[T], truth: &[T]) -> Result<f64> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    Ok(predicted.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64)
}

pub fn mean_absolute_error(predicted: &[f64], truth: &[f64]) -> Result<f64> {
    if predicted.len() != truth.len() || truth.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    Ok(predicted.iter().zip(truth).map(|(a, b)| (a - b).abs()).sum::<f64>() / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalTask {
    Retrieval,
    Mode,
    SpatialShdt,
    TemporalShdt,
    TemporalTdt,
    MethodShdt,
    MethodTdt,
    All,
}

impl EvalTask {
    pub const NAMES: [&'static str; 8] = [
        "retrieval",
        "mode",
        "spatial-shdt",
        "temporal-shdt",
        "temporal-tdt",
        "method-shdt",
        "method-tdt",
        "all",
    ];

    const EACH: [EvalTask; 7] = [
        EvalTask::Retrieval,
        EvalTask::Mode,
        EvalTask::SpatialShdt,
        EvalTask::TemporalShdt,
        EvalTask::TemporalTdt,
        EvalTask::MethodShdt,
        EvalTask::MethodTdt,
    ];

    pub fn as_str(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    fn includes(self, other: EvalTask) -> bool {
        self == EvalTask::All || self == other
    }
}

impl fmt::Display for EvalTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalTask {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(s))
            .map(|i| if i == 7 { EvalTask::All } else { Self::EACH[i] })
            .ok_or_else(|| Error::Invalid(format!("unknown task {s:?}; expected one of {:?}", Self::NAMES)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub sd: f64,
    pub values: Vec<f64>,
}

impl MetricSummary {
    fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MetricSummary { mean, sd, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: EvalTask,
    pub metrics: BTreeMap<String, MetricSummary>,
    pub splits: usize,
    pub seed: u64,
    pub config_hash: String,
    /// Retrieval precision-recall points on the first split's test rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pr_curve: Option<Vec<PrPoint>>,
}

/// Stratification group: non-DT, SHDT or TDT.
fn group(row: &Annotation) -> usize {
    match (row.dt, row.l_dt) {
        (false, _) => 0,
        (true, Some(Mode::Shdt)) => 1,
        _ => 2,
    }
}

/// Stratified random partition into (train, test) row lists.
pub fn split_manifest(manifest: &Manifest, train_fraction: f64, seed: u64) -> Result<(Manifest, Manifest)> {
    let mut rng = rng_for(seed, &[tag("split")]);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for g in 0..3 {
        let mut rows: Vec<&Annotation> = manifest.rows.iter().filter(|r| group(r) == g).collect();
        if rows.is_empty() {
            continue;
        }
        if rows.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "group of {:?} has a single row; need two to split",
                rows[0].id
            )));
        }
        rows.shuffle(&mut rng);
        let k = ((rows.len() as f64 * train_fraction).round() as usize).clamp(1, rows.len() - 1);
        train.extend(rows[..k].iter().map(|r| (*r).clone()));
        test.extend(rows[k..].iter().map(|r| (*r).clone()));
    }
    let mut a = Manifest::new(train)?;
    let mut b = Manifest::new(test)?;
    a.base_dir = manifest.base_dir.clone();
    b.base_dir = manifest.base_dir.clone();
    Ok((a, b))
}

/// Positive class for ranking synthesizability scores.
fn synthesizable(score: f64) -> bool {
    score >= 0.5
}

fn evaluate_split(
    task: EvalTask,
    manifest: &Manifest,
    store: &FeatureStore,
    config: &Config,
    seed: u64,
) -> Result<(BTreeMap<String, f64>, Option<Vec<PrPoint>>)> {
    let (train, test) = split_manifest(manifest, config.evaluation.train_fraction, seed)?;
    let pipeline = train_pipeline(&train, store, config, seed)?;
    let kinds = pipeline.required_kinds();
    let mut metrics = BTreeMap::new();
    let mut curve = None;
    let sets = test
        .rows
        .iter()
        .map(|r| {
            let kinds: Vec<_> = if r.dt {
                kinds.clone()
            } else {
                vec![FeatureKind::External]
            };
            store.descriptors(&r.id, &kinds)
        })
        .collect::<Result<Vec<_>>>()?;
    let dt: Vec<(&Annotation, &_)> = test.rows.iter().zip(&sets).filter(|(r, _)| r.dt).collect();

    if task.includes(EvalTask::Retrieval) {
        let scores = sets
            .iter()
            .map(|s| score_textureness(&s[&FeatureKind::External], &pipeline.retrieval))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<bool> = test.rows.iter().map(|r| r.dt).collect();
        metrics.insert("retrieval_ap".into(), average_precision(&scores, &labels)?);
        curve = Some(pr_curve(&scores, &labels)?);
    }
    if task.includes(EvalTask::Mode) {
        let pred = dt
            .iter()
            .map(|(_, s)| Ok(classify_mode(s, &pipeline.mode)?.0))
            .collect::<Result<Vec<_>>>()?;
        let truth: Vec<Mode> = dt.iter().map(|(r, _)| r.l_dt.expect("DT rows carry l_dt")).collect();
        metrics.insert("mode_accuracy".into(), accuracy(&pred, &truth)?);
    }
    for (t, mode, name, spatial) in [
        (EvalTask::SpatialShdt, Mode::Shdt, "spatial_shdt", true),
        (EvalTask::TemporalShdt, Mode::Shdt, "temporal_shdt", false),
        (EvalTask::TemporalTdt, Mode::Tdt, "temporal_tdt", false),
    ] {
        if !task.includes(t) {
            continue;
        }
        let rows: Vec<_> = dt.iter().filter(|(r, _)| r.l_dt == Some(mode)).collect();
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (r, s) in rows {
            let (ss, st, _) = predict_synthesizability(s, mode, &pipeline)?;
            pred.push(if spatial {
                ss.expect("SHDT has a spatial score")
            } else {
                st
            });
            truth.push(if spatial { r.s_spatial } else { r.s_temporal }.expect("validated scores"));
        }
        if truth.is_empty() {
            continue;
        }
        metrics.insert(format!("{name}_mae"), mean_absolute_error(&pred, &truth)?);
        let labels: Vec<bool> = truth.iter().map(|&s| synthesizable(s)).collect();
        if let Ok(ap) = average_precision(&pred, &labels) {
            metrics.insert(format!("{name}_ap"), ap);
        }
    }
    for (t, mode, name) in [
        (EvalTask::MethodShdt, Mode::Shdt, "method_shdt_accuracy"),
        (EvalTask::MethodTdt, Mode::Tdt, "method_tdt_accuracy"),
    ] {
        if !task.includes(t) || pipeline.methods.get(&mode).is_none_or(Option::is_none) {
            continue;
        }
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for (r, s) in dt.iter().filter(|(r, _)| r.l_dt == Some(mode)) {
            if let Some(label) = r.method_label() {
                pred.push(suggest_method(s, mode, &pipeline)?);
                truth.push(label.to_string());
            }
        }
        if !truth.is_empty() {
            metrics.insert(name.into(), accuracy(&pred, &truth)?);
        }
    }
    Ok((metrics, curve))
}

/// Derived seed of split `i`.
pub fn split_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, &[tag("eval-split"), i as u64])
}

/// Trains and evaluates on `splits` stratified random partitions. A
/// metric is summarized over the splits where it was defined.
pub fn run_splits(
    manifest: &Manifest,
    store: &FeatureStore,
    task: EvalTask,
    config: &Config,
    splits: usize,
    seed: u64,
) -> Result<EvalReport> {
    if splits == 0 {
        return Err(Error::InsufficientData("need at least one split".into()));
    }
    let per_split = (0..splits)
        .into_par_iter()
        .map(|i| evaluate_split(task, manifest, store, config, split_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let pr_curve = per_split[0].1.clone();
    let mut collected: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (m, _) in per_split {
        for (k, v) in m {
            collected.entry(k).or_default().push(v);
        }
    }
    if collected.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no {task} metric was defined on any split"
        )));
    }
    Ok(EvalReport {
        task,
        metrics: collected
            .into_iter()
            .map(|(k, v)| (k, MetricSummary::from_values(v)))
            .collect(),
        splits,
        seed,
        config_hash: config.hash(),
        pr_curve,
    })
}
