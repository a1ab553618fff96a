//! Hierarchical prediction: DT retrieval, SHDT/TDT split, fused
//! synthesizability scores and synthesis-method suggestion.

mod annotation;
mod features;

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use annotation::{Annotation, Manifest, Mode, NULL_METHOD, SHDT_METHODS, TDT_METHODS};
pub use features::{extract_features, DescriptorSet, FeatureStore};

use crate::config::{BankConfig, Config, ModelFamily};
use crate::descriptors::{Descriptor, FeatureKind};
use crate::error::{Error, Result};
use crate::learning::{
    clamp01, fuse_scores, predict_score, train_forest, train_kernel_regressor, EnsembleClassifier, ForestMode,
    ForestModel, FusionWeights, Regressor,
};
use crate::rng::{derive_seed, rng_for, tag};

pub const PIPELINE_KIND: &str = "dtsynth-pipeline";
pub const PIPELINE_VERSION: u32 = 1;
const CHECK_ROWS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BankId {
    ShdtSpatial,
    ShdtTemporal,
    TdtTemporal,
}

impl BankId {
    pub const ALL: [BankId; 3] = [BankId::ShdtSpatial, BankId::ShdtTemporal, BankId::TdtTemporal];

    pub fn as_str(self) -> &'static str {
        match self {
            BankId::ShdtSpatial => "shdt_spatial",
            BankId::ShdtTemporal => "shdt_temporal",
            BankId::TdtTemporal => "tdt_temporal",
        }
    }

    pub fn config(self, config: &Config) -> &BankConfig {
        match self {
            BankId::ShdtSpatial => &config.banks.shdt_spatial,
            BankId::ShdtTemporal => &config.banks.shdt_temporal,
            BankId::TdtTemporal => &config.banks.tdt_temporal,
        }
    }

    /// Training target of a row for this bank, if the row belongs to it.
    pub fn target(self, row: &Annotation) -> Option<f64> {
        if !row.dt {
            return None;
        }
        match (self, row.l_dt?) {
            (BankId::ShdtSpatial, Mode::Shdt) => row.s_spatial,
            (BankId::ShdtTemporal, Mode::Shdt) => row.s_temporal,
            (BankId::TdtTemporal, Mode::Tdt) => row.s_temporal,
            _ => None,
        }
    }
}

/// Per-feature regressors whose clamped outputs are fused by weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorBank {
    pub weights: FusionWeights,
    /// `None` when no training rows belonged to the bank.
    pub models: Option<BTreeMap<FeatureKind, Regressor>>,
    pub training_rows: usize,
}

impl RegressorBank {
    pub fn kinds(&self) -> Vec<FeatureKind> {
        self.weights.kinds().collect()
    }

    pub fn predict(&self, name: BankId, descriptors: &DescriptorSet) -> Result<(f64, BTreeMap<FeatureKind, f64>)> {
        let models = self
            .models
            .as_ref()
            .ok_or_else(|| Error::UntrainedBank(name.as_str().to_string()))?;
        let raw = models
            .iter()
            .map(|(&k, m)| {
                let d = descriptors.get(&k).ok_or(Error::MissingFeatureKind(k))?;
                Ok((k, predict_score(m, &d.values)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok((fuse_scores(&raw, &self.weights)?, raw))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub textureness: f64,
    pub is_dt: bool,
    pub l_dt: Mode,
    pub mode_scores: BTreeMap<Mode, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_spatial: Option<f64>,
    pub s_temporal: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_md_spatial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_md_temporal: Option<String>,
    pub raw_scores: BTreeMap<BankId, BTreeMap<FeatureKind, f64>>,
}

impl Prediction {
    pub fn suggested_method(&self) -> Option<&str> {
        match self.l_dt {
            Mode::Shdt => self.l_md_spatial.as_deref(),
            Mode::Tdt => self.l_md_temporal.as_deref(),
        }
    }
}

/// Stored inputs and the prediction they produced at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckVector {
    pub inputs: BTreeMap<FeatureKind, Vec<f64>>,
    pub output: Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub model_kind: String,
    pub version: u32,
    pub seed: u64,
    pub config: Config,
    pub retrieval: ForestModel,
    pub mode: EnsembleClassifier,
    pub banks: BTreeMap<BankId, RegressorBank>,
    pub methods: BTreeMap<Mode, Option<EnsembleClassifier>>,
    pub checks: Vec<CheckVector>,
}

/// Every feature kind some stage of a pipeline built from `config` reads.
pub fn required_kinds(config: &Config) -> Vec<FeatureKind> {
    let mut kinds = vec![FeatureKind::External];
    kinds.extend(&config.mode.features);
    kinds.extend(&config.methods.features);
    for b in BankId::ALL {
        kinds.extend(b.config(config).models.keys());
    }
    kinds.sort();
    kinds.dedup();
    kinds
}

pub fn score_textureness(external: &Descriptor, model: &ForestModel) -> Result<f64> {
    model.predict_value(&external.values).map(clamp01)
}

/// Calibrated ensemble posterior over {SHDT, TDT}; exact ties go to TDT.
pub fn classify_mode(
    descriptors: &DescriptorSet,
    classifier: &EnsembleClassifier,
) -> Result<(Mode, BTreeMap<Mode, f64>)> {
    let (_, scores) = classifier.classify(descriptors)?;
    let (shdt, tdt) = (scores[0], scores[1]);
    let mode = if shdt > tdt { Mode::Shdt } else { Mode::Tdt };
    Ok((mode, [(Mode::Shdt, shdt), (Mode::Tdt, tdt)].into()))
}

pub fn predict_synthesizability(
    descriptors: &DescriptorSet,
    mode: Mode,
    pipeline: &TrainedPipeline,
) -> Result<(Option<f64>, f64, BTreeMap<BankId, BTreeMap<FeatureKind, f64>>)> {
    let mut raw = BTreeMap::new();
    let mut run = |id: BankId| -> Result<f64> {
        let (s, r) = pipeline.banks[&id].predict(id, descriptors)?;
        raw.insert(id, r);
        Ok(s)
    };
    let (spatial, temporal) = match mode {
        Mode::Shdt => (Some(run(BankId::ShdtSpatial)?), run(BankId::ShdtTemporal)?),
        Mode::Tdt => (None, run(BankId::TdtTemporal)?),
    };
    Ok((spatial, temporal, raw))
}

/// Most probable method within the mode's method set; ties go to the
/// lexicographically smallest name.
pub fn suggest_method(descriptors: &DescriptorSet, mode: Mode, pipeline: &TrainedPipeline) -> Result<String> {
    let classifier = pipeline
        .methods
        .get(&mode)
        .and_then(Option::as_ref)
        .ok_or_else(|| Error::UntrainedClassifier(format!("{mode} method suggester")))?;
    Ok(classifier.classify(descriptors)?.0)
}

fn rows_matrix(ids: &[&str], store: &FeatureStore, kind: FeatureKind) -> Result<Vec<Vec<f64>>> {
    ids.iter().map(|id| Ok(store.descriptor(id, kind)?.values)).collect()
}

fn train_bank(
    id: BankId,
    manifest: &Manifest,
    store: &FeatureStore,
    config: &Config,
    seed: u64,
) -> Result<RegressorBank> {
    let bank_cfg = id.config(config);
    let weights = FusionWeights::new(bank_cfg.weights.clone())?;
    let rows: Vec<(&str, f64)> = manifest
        .rows
        .iter()
        .filter_map(|r| id.target(r).map(|t| (r.id.as_str(), t)))
        .collect();
    if rows.is_empty() {
        log::warn!("bank {} has no training rows; left untrained", id.as_str());
        return Ok(RegressorBank {
            weights,
            models: None,
            training_rows: 0,
        });
    }
    let ids: Vec<&str> = rows.iter().map(|r| r.0).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let mut models = BTreeMap::new();
    for (&kind, family) in &bank_cfg.models {
        let x = rows_matrix(&ids, store, kind)?;
        let model = match family {
            ModelFamily::Forest => Regressor::Forest(train_forest(
                &x,
                &y,
                ForestMode::Regression,
                &config.banks.forest,
                derive_seed(seed, &[tag(id.as_str()), tag(kind.as_str())]),
            )?),
            ModelFamily::Kernel => Regressor::Kernel(train_kernel_regressor(&x, &y, &config.banks.kernel)?),
        };
        models.insert(kind, model);
    }
    Ok(RegressorBank {
        weights,
        models: Some(models),
        training_rows: rows.len(),
    })
}

fn train_methods(
    manifest: &Manifest,
    store: &FeatureStore,
    config: &Config,
) -> Result<BTreeMap<Mode, Option<EnsembleClassifier>>> {
    let mut out = BTreeMap::new();
    for mode in [Mode::Shdt, Mode::Tdt] {
        let classes: Vec<String> = mode.methods().iter().map(|s| s.to_string()).collect();
        let rows: Vec<(&str, usize)> = manifest
            .rows
            .iter()
            .filter(|r| r.dt && r.l_dt == Some(mode))
            .filter_map(|r| {
                let label = r.method_label()?;
                Some((r.id.as_str(), classes.iter().position(|c| c == label)?))
            })
            .collect();
        if rows.is_empty() {
            log::warn!("no labelled {mode} rows; method suggester left untrained");
            out.insert(mode, None);
            continue;
        }
        let ids: Vec<&str> = rows.iter().map(|r| r.0).collect();
        let labels: Vec<usize> = rows.iter().map(|r| r.1).collect();
        let features = config
            .methods
            .features
            .iter()
            .map(|&k| Ok((k, rows_matrix(&ids, store, k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        out.insert(
            mode,
            Some(EnsembleClassifier::train(
                &features,
                &labels,
                &classes,
                &config.methods.svm,
            )?),
        );
    }
    Ok(out)
}

pub fn train_pipeline(
    manifest: &Manifest,
    store: &FeatureStore,
    config: &Config,
    seed: u64,
) -> Result<TrainedPipeline> {
    config.validate()?;
    if manifest.is_empty() {
        return Err(Error::InsufficientData("empty manifest".into()));
    }

    // Retrieval: every row, DT versus non-DT.
    let mut neg_rng = rng_for(seed, &[tag("retrieval-negatives")]);
    let retrieval_rows: Vec<&Annotation> = manifest
        .rows
        .iter()
        .filter(|r| {
            r.dt || config
                .retrieval
                .negative_fraction
                .is_none_or(|f| neg_rng.gen::<f64>() < f)
        })
        .collect();
    let ids: Vec<&str> = retrieval_rows.iter().map(|r| r.id.as_str()).collect();
    let y: Vec<f64> = retrieval_rows.iter().map(|r| if r.dt { 1.0 } else { 0.0 }).collect();
    let retrieval = train_forest(
        &rows_matrix(&ids, store, FeatureKind::External)?,
        &y,
        ForestMode::Regression,
        &config.retrieval.forest,
        derive_seed(seed, &[tag("retrieval")]),
    )?;

    // Mode: DT rows only.
    let dt_rows: Vec<&Annotation> = manifest.rows.iter().filter(|r| r.dt).collect();
    if dt_rows.is_empty() {
        return Err(Error::ClassAbsent("no DT rows to train the mode classifier".into()));
    }
    let ids: Vec<&str> = dt_rows.iter().map(|r| r.id.as_str()).collect();
    let labels: Vec<usize> = dt_rows.iter().map(|r| (r.l_dt == Some(Mode::Tdt)) as usize).collect();
    let features = config
        .mode
        .features
        .iter()
        .map(|&k| Ok((k, rows_matrix(&ids, store, k)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let classes = vec![Mode::Shdt.to_string(), Mode::Tdt.to_string()];
    let mode = EnsembleClassifier::train(&features, &labels, &classes, &config.mode.svm)?;

    let banks = BankId::ALL
        .iter()
        .map(|&b| Ok((b, train_bank(b, manifest, store, config, seed)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let methods = train_methods(manifest, store, config)?;

    let mut pipeline = TrainedPipeline {
        model_kind: PIPELINE_KIND.into(),
        version: PIPELINE_VERSION,
        seed,
        config: config.clone(),
        retrieval,
        mode,
        banks,
        methods,
        checks: Vec::new(),
    };
    pipeline.refresh_checks(manifest, store);
    Ok(pipeline)
}

impl TrainedPipeline {
    pub fn required_kinds(&self) -> Vec<FeatureKind> {
        required_kinds(&self.config)
    }

    pub fn predict(&self, id: &str, descriptors: &DescriptorSet) -> Result<Prediction> {
        let external = descriptors
            .get(&FeatureKind::External)
            .ok_or(Error::MissingFeatureKind(FeatureKind::External))?;
        let textureness = score_textureness(external, &self.retrieval)?;
        let (l_dt, mode_scores) = classify_mode(descriptors, &self.mode)?;
        let (s_spatial, s_temporal, raw_scores) = predict_synthesizability(descriptors, l_dt, self)?;
        let method = match suggest_method(descriptors, l_dt, self) {
            Ok(m) => Some(m),
            Err(Error::UntrainedClassifier(what)) => {
                log::warn!("{id}: {what} untrained; no method suggested");
                None
            }
            Err(e) => return Err(e),
        };
        let (l_md_spatial, l_md_temporal) = match l_dt {
            Mode::Shdt => (method, None),
            Mode::Tdt => (None, method),
        };
        Ok(Prediction {
            id: id.to_string(),
            textureness,
            is_dt: textureness >= 0.5,
            l_dt,
            mode_scores,
            s_spatial,
            s_temporal,
            l_md_spatial,
            l_md_temporal,
            raw_scores,
        })
    }

    pub fn predict_from_store(&self, id: &str, store: &FeatureStore) -> Result<Prediction> {
        self.predict(id, &store.descriptors(id, &self.required_kinds())?)
    }

    /// Retrains only the method suggesters.
    pub fn retrain_methods(&mut self, manifest: &Manifest, store: &FeatureStore, config: &Config) -> Result<()> {
        self.config.methods = config.methods.clone();
        self.methods = train_methods(manifest, store, &self.config)?;
        self.refresh_checks(manifest, store);
        Ok(())
    }

    fn refresh_checks(&mut self, manifest: &Manifest, store: &FeatureStore) {
        let kinds = self.required_kinds();
        let mut checks = Vec::new();
        for row in manifest.rows.iter().filter(|r| r.dt) {
            if checks.len() == CHECK_ROWS {
                break;
            }
            let Ok(set) = store.descriptors(&row.id, &kinds) else {
                continue;
            };
            if let Ok(output) = self.predict(&row.id, &set) {
                checks.push(CheckVector {
                    inputs: set.into_iter().map(|(k, d)| (k, d.values)).collect(),
                    output,
                });
            }
        }
        self.checks = checks;
    }

    fn verify(&self) -> Result<()> {
        for c in &self.checks {
            let set: DescriptorSet = c
                .inputs
                .iter()
                .map(|(&k, v)| (k, Descriptor::new(k, v.clone())))
                .collect();
            let got = self.predict(&c.output.id, &set)?;
            let same = serde_json::to_string(&got).ok() == serde_json::to_string(&c.output).ok();
            if !same {
                return Err(Error::CorruptModel(format!(
                    "stored check for {:?} does not reproduce",
                    c.output.id
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pipeline serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let kind: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::CorruptModel(format!("pipeline: {e}")))?;
        match (
            kind.get("model_kind").and_then(|v| v.as_str()),
            kind.get("version").and_then(|v| v.as_u64()),
        ) {
            (Some(PIPELINE_KIND), Some(v)) if v == PIPELINE_VERSION as u64 => {}
            (k, v) => {
                return Err(Error::CorruptModel(format!(
                    "expected {PIPELINE_KIND} v{PIPELINE_VERSION}, found {k:?} v{v:?}"
                )))
            }
        }
        let p: TrainedPipeline =
            serde_json::from_value(kind).map_err(|e| Error::CorruptModel(format!("pipeline: {e}")))?;
        p.verify()?;
        Ok(p)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::unreadable(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExternalSource;
    use crate::descriptors::FeatureTable;

    fn small_config() -> Config {
        let mut c = Config::default();
        c.banks.forest.n_trees = 10;
        c.retrieval.forest.n_trees = 10;
        c
    }

    /// Ten rows with 2-d features per kind placed so every stage is separable.
    fn toy() -> (Manifest, FeatureStore) {
        let mut rows = Vec::new();
        let mut store = FeatureStore::new(ExternalSource::File);
        let mut tables: BTreeMap<FeatureKind, FeatureTable> =
            FeatureKind::ALL.iter().map(|&k| (k, FeatureTable::new(k, 2))).collect();
        for i in 0..10 {
            let mut a = Annotation::new(format!("v{i}"));
            let (base, jitter) = (i % 5, (i / 5) as f64 * 0.05);
            match base {
                0 => a.dt = false,
                1 | 2 => {
                    a.l_dt = Some(Mode::Shdt);
                    a.s_spatial = Some(if base == 1 { 1.0 } else { 0.5 });
                    a.s_temporal = Some(1.0);
                    a.l_md_spatial = Some(if base == 1 { "GatysDT" } else { "SNtextons" }.into());
                }
                _ => {
                    a.l_dt = Some(Mode::Tdt);
                    a.s_temporal = Some(if base == 3 { 0.0 } else { 1.0 });
                    a.l_md_temporal = Some(if base == 3 { NULL_METHOD } else { "LDS" }.into());
                }
            }
            for (&k, t) in tables.iter_mut() {
                let off = k as usize as f64 * 0.01;
                t.insert(
                    a.id.clone(),
                    vec![base as f64 + jitter + off, (base * base) as f64 - jitter],
                )
                .unwrap();
            }
            rows.push(a);
        }
        for t in tables.into_values() {
            store.add_table(t).unwrap();
        }
        (Manifest::new(rows).unwrap(), store)
    }

    #[test]
    fn trains_and_reproduces_labels() {
        let (m, s) = toy();
        let p = train_pipeline(&m, &s, &small_config(), 7).unwrap();
        for r in &m.rows {
            let pred = p.predict_from_store(&r.id, &s).unwrap();
            if !r.dt {
                continue;
            }
            assert_eq!(Some(pred.l_dt), r.l_dt, "{}", r.id);
            assert_eq!(pred.s_spatial.is_none(), pred.l_dt == Mode::Tdt);
            if let Some(md) = pred.suggested_method() {
                assert!(pred.l_dt.methods().contains(&md));
            }
            if r.l_dt == Some(Mode::Shdt) {
                assert_eq!(pred.l_md_spatial.as_deref(), r.l_md_spatial.as_deref());
            }
        }
        assert_eq!(p.checks.len(), 3);
    }

    #[test]
    fn serialization_round_trip_and_determinism() {
        let (m, s) = toy();
        let a = train_pipeline(&m, &s, &small_config(), 7).unwrap();
        let b = train_pipeline(&m, &s, &small_config(), 7).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = TrainedPipeline::from_json(&a.to_json()).unwrap();
        for r in &m.rows {
            let x = serde_json::to_string(&a.predict_from_store(&r.id, &s).unwrap()).unwrap();
            let y = serde_json::to_string(&back.predict_from_store(&r.id, &s).unwrap()).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn tampered_file_is_rejected() {
        let (m, s) = toy();
        let p = train_pipeline(&m, &s, &small_config(), 7).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        v["banks"]["tdt_temporal"]["weights"]["SCOPDT"] = serde_json::json!(5.0);
        v["checks"][0]["output"]["textureness"] = serde_json::json!(0.123);
        assert!(matches!(
            TrainedPipeline::from_json(&v.to_string()),
            Err(Error::CorruptModel(_))
        ));
        let wrong = p.to_json().replace(PIPELINE_KIND, "other");
        assert!(matches!(
            TrainedPipeline::from_json(&wrong),
            Err(Error::CorruptModel(_))
        ));
    }

    #[test]
    fn shdt_only_manifest_leaves_tdt_bank_untrained() {
        let (m, s) = toy();
        let rows: Vec<Annotation> = m.rows.iter().filter(|r| r.l_dt != Some(Mode::Tdt)).cloned().collect();
        let m2 = Manifest::new(rows).unwrap();
        let p = train_pipeline(&m2, &s, &small_config(), 1).unwrap();
        assert!(p.banks[&BankId::TdtTemporal].models.is_none());
        let set = s.descriptors("v3", &p.required_kinds()).unwrap();
        assert!(matches!(
            predict_synthesizability(&set, Mode::Tdt, &p),
            Err(Error::UntrainedBank(_))
        ));
    }

    #[test]
    fn all_dt_retrieval_is_constant() {
        let (m, s) = toy();
        let rows: Vec<Annotation> = m.rows.iter().filter(|r| r.dt).cloned().collect();
        let m2 = Manifest::new(rows).unwrap();
        let p = train_pipeline(&m2, &s, &small_config(), 1).unwrap();
        for r in &m2.rows {
            assert_eq!(p.predict_from_store(&r.id, &s).unwrap().textureness, 1.0);
        }
    }

    #[test]
    fn method_retraining_leaves_other_stages() {
        let (m, s) = toy();
        let mut p = train_pipeline(&m, &s, &small_config(), 3).unwrap();
        let before: Vec<Prediction> = m
            .rows
            .iter()
            .map(|r| p.predict_from_store(&r.id, &s).unwrap())
            .collect();
        let mut cfg = small_config();
        cfg.methods.svm.c = 50.0;
        p.retrain_methods(&m, &s, &cfg).unwrap();
        for (r, b) in m.rows.iter().zip(before) {
            let a = p.predict_from_store(&r.id, &s).unwrap();
            assert_eq!(a.textureness.to_bits(), b.textureness.to_bits());
            assert_eq!(a.l_dt, b.l_dt);
            assert_eq!(
                serde_json::to_string(&a.raw_scores).unwrap(),
                serde_json::to_string(&b.raw_scores).unwrap()
            );
        }
    }

    #[test]
    fn mode_tie_goes_to_tdt() {
        let (m, s) = toy();
        let p = train_pipeline(&m, &s, &small_config(), 3).unwrap();
        let shdt_only = EnsembleClassifier {
            classes: p.mode.classes.clone(),
            members: BTreeMap::new(),
        };
        assert!(classify_mode(&DescriptorSet::new(), &shdt_only).is_err());
        let (_, scores) = crate::learning::ensemble_classify(
            &p.mode.classes,
            &p.mode.members,
            &s.descriptors("v1", &p.required_kinds()).unwrap(),
        )
        .unwrap();
        assert_eq!(scores.len(), 2);
    }

    #[test]
    fn missing_features_are_reported() {
        let (m, mut s) = toy();
        s.tables.get_mut(&FeatureKind::Scopdt).unwrap().rows.remove("v1");
        assert!(matches!(
            train_pipeline(&m, &s, &small_config(), 1),
            Err(Error::MissingId { .. })
        ));
    }
}
