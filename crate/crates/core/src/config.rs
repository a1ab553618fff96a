//! One configuration tree covering every tunable default, loadable from
//! TOML and overridable by `section.key=value` strings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::descriptors::{DictionaryParams, FeatureKind};
use crate::error::{Error, Result};
use crate::learning::{ForestParams, KernelRegressorParams, SvmParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClipConfig {
    pub clip_length: usize,
    pub stride: usize,
}

impl Default for ClipConfig {
    fn default() -> Self {
        ClipConfig {
            clip_length: 16,
            stride: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExternalSource {
    /// Precomputed vectors read from a feature file.
    File,
    /// LBP-TOP computed from the video stands in for the external feature.
    Lbptop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub external_source: ExternalSource,
    pub external_dim: Option<usize>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            external_source: ExternalSource::File,
            external_dim: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct RetrievalConfig {
    pub forest: ForestParams,
    /// Fraction of non-DT rows kept for training; all when absent.
    pub negative_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub features: Vec<FeatureKind>,
    pub svm: SvmParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Forest,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BankConfig {
    pub models: BTreeMap<FeatureKind, ModelFamily>,
    pub weights: BTreeMap<FeatureKind, f64>,
}

impl Default for BankConfig {
    fn default() -> Self {
        BankConfig::shdt()
    }
}

impl BankConfig {
    fn shdt() -> Self {
        BankConfig {
            models: [
                (FeatureKind::External, ModelFamily::Forest),
                (FeatureKind::Scopdt, ModelFamily::Kernel),
            ]
            .into(),
            weights: [(FeatureKind::External, 0.5), (FeatureKind::Scopdt, 0.5)].into(),
        }
    }

    fn tdt() -> Self {
        BankConfig {
            models: [
                (FeatureKind::Lbptop, ModelFamily::Forest),
                (FeatureKind::External, ModelFamily::Forest),
                (FeatureKind::Scopdt, ModelFamily::Kernel),
            ]
            .into(),
            weights: [
                (FeatureKind::Lbptop, 1.0 / 3.0),
                (FeatureKind::External, 1.0 / 3.0),
                (FeatureKind::Scopdt, 1.0 / 3.0),
            ]
            .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BanksConfig {
    pub kernel: KernelRegressorParams,
    pub forest: ForestParams,
    pub shdt_spatial: BankConfig,
    pub shdt_temporal: BankConfig,
    pub tdt_temporal: BankConfig,
}

impl Default for BanksConfig {
    fn default() -> Self {
        BanksConfig {
            kernel: KernelRegressorParams::default(),
            forest: ForestParams::default(),
            shdt_spatial: BankConfig::shdt(),
            shdt_temporal: BankConfig::shdt(),
            tdt_temporal: BankConfig::tdt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub count: usize,
    pub min_side: usize,
    pub min_aspect: f64,
    pub max_aspect: f64,
    pub containment: f64,
    pub attempts_per_candidate: usize,
}

impl Default for RegionConfig {
    fn default() -> Self {
        RegionConfig {
            count: 100,
            min_side: 48,
            min_aspect: 0.5,
            max_aspect: 2.0,
            containment: 0.8,
            attempts_per_candidate: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub train_fraction: f64,
    pub splits: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            train_fraction: 0.5,
            splits: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub dictionary: DictionaryParams,
    pub clips: ClipConfig,
    pub features: FeatureConfig,
    pub retrieval: RetrievalConfig,
    pub mode: ClassifierConfig,
    pub banks: BanksConfig,
    pub methods: ClassifierConfig,
    pub regions: RegionConfig,
    pub evaluation: EvalConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            dictionary: DictionaryParams::default(),
            clips: ClipConfig::default(),
            features: FeatureConfig::default(),
            retrieval: RetrievalConfig::default(),
            mode: ClassifierConfig {
                features: vec![FeatureKind::Scopdt, FeatureKind::Lbptop, FeatureKind::External],
                svm: SvmParams::default(),
            },
            banks: BanksConfig::default(),
            methods: ClassifierConfig {
                features: vec![FeatureKind::External, FeatureKind::Scopdt],
                svm: SvmParams::default(),
            },
            regions: RegionConfig::default(),
            evaluation: EvalConfig::default(),
        }
    }
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Config::default().mode
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::parse("config", e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::unreadable(path, e))?;
        let cfg: Config = toml::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical JSON form, as 16 hex digits.
    pub fn hash(&self) -> String {
        format!("{:016x}", crate::rng::tag(&self.to_json_value().to_string()))
    }

    /// Applies `a.b.c=value`; the value is read as a TOML value, or as a
    /// bare string when it does not parse.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("override {assignment:?} is not key=value")))?;
        let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let mut root = toml::Value::try_from(&*self).map_err(|e| Error::Invalid(e.to_string()))?;
        let keys: Vec<&str> = path.trim().split('.').collect();
        let mut node = &mut root;
        for (i, key) in keys.iter().enumerate() {
            let table = node
                .as_table_mut()
                .ok_or_else(|| Error::Invalid(format!("config path {path:?} crosses a non-table")))?;
            if i + 1 == keys.len() {
                table.insert(key.to_string(), value.clone());
                break;
            }
            node = table
                .entry(key.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let cfg: Config = root
            .try_into()
            .map_err(|e: toml::de::Error| Error::Invalid(format!("override {assignment:?}: {}", e.message())))?;
        cfg.validate()?;
        *self = cfg;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Invalid(m.to_string()));
        if self.clips.clip_length == 0 || self.clips.stride == 0 {
            return bad("clip length and stride must be positive");
        }
        if !(0.0 < self.evaluation.train_fraction && self.evaluation.train_fraction < 1.0) {
            return bad("train fraction must lie strictly between 0 and 1");
        }
        if self.evaluation.splits == 0 {
            return bad("need at least one split");
        }
        if self.regions.count == 0 || self.regions.min_side == 0 {
            return bad("region count and minimum side must be positive");
        }
        if !(self.regions.min_aspect > 0.0 && self.regions.min_aspect <= self.regions.max_aspect) {
            return bad("region aspect range is empty");
        }
        if !(0.0..=1.0).contains(&self.regions.containment) {
            return bad("region containment must lie in [0, 1]");
        }
        if self.mode.features.is_empty() || self.methods.features.is_empty() {
            return bad("classifier feature sets must be non-empty");
        }
        for (name, bank) in [
            ("shdt_spatial", &self.banks.shdt_spatial),
            ("shdt_temporal", &self.banks.shdt_temporal),
            ("tdt_temporal", &self.banks.tdt_temporal),
        ] {
            if bank.models.is_empty() || !bank.models.keys().eq(bank.weights.keys()) {
                return Err(Error::Invalid(format!("bank {name}: model and weight kinds differ")));
            }
            crate::learning::FusionWeights::new(bank.weights.clone())?;
        }
        if let Some(f) = self.retrieval.negative_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return bad("negative fraction must lie in (0, 1]");
            }
        }
        Ok(())
    }
}
