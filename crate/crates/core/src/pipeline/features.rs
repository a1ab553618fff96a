use std::collections::BTreeMap;
use std::path::Path;

use crate::config::{Config, ExternalSource};
use crate::descriptors::{
    lbptop, read_features, scopdt, Descriptor, FeatureFileFormat, FeatureKind, FeatureTable, PatternDictionary,
};
use crate::error::{Error, Result};
use crate::video::{plan_clips, FrameSequence};

pub type DescriptorSet = BTreeMap<FeatureKind, Descriptor>;

/// Feature tables keyed by kind, joined to videos by id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStore {
    pub tables: BTreeMap<FeatureKind, FeatureTable>,
    pub external_source: ExternalSource,
}

impl FeatureStore {
    pub fn new(external_source: ExternalSource) -> Self {
        FeatureStore {
            tables: BTreeMap::new(),
            external_source,
        }
    }

    pub fn load(paths: &[impl AsRef<Path>], external_source: ExternalSource) -> Result<Self> {
        let mut store = Self::new(external_source);
        for p in paths {
            let p = p.as_ref();
            store.add_table(read_features(p, FeatureFileFormat::from_path(p))?)?;
        }
        Ok(store)
    }

    pub fn add_table(&mut self, table: FeatureTable) -> Result<()> {
        match self.tables.get_mut(&table.kind) {
            None => {
                self.tables.insert(table.kind, table);
            }
            Some(existing) => {
                for (id, v) in table.rows {
                    existing.insert(id, v)?;
                }
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, id: &str, d: Descriptor) -> Result<()> {
        self.tables
            .entry(d.kind)
            .or_insert_with(|| FeatureTable::new(d.kind, d.dim()))
            .insert(id, d.values)
    }

    pub fn insert_set(&mut self, id: &str, set: DescriptorSet) -> Result<()> {
        for d in set.into_values() {
            self.insert(id, d)?;
        }
        Ok(())
    }

    /// Source table for a kind, following the external substitution.
    fn table_for(&self, kind: FeatureKind) -> Option<&FeatureTable> {
        match (kind, self.external_source) {
            (FeatureKind::External, ExternalSource::Lbptop) => self
                .tables
                .get(&FeatureKind::External)
                .or_else(|| self.tables.get(&FeatureKind::Lbptop)),
            _ => self.tables.get(&kind),
        }
    }

    pub fn descriptor(&self, id: &str, kind: FeatureKind) -> Result<Descriptor> {
        let missing = || Error::MissingId {
            id: id.to_string(),
            kind,
        };
        let table = self.table_for(kind).ok_or_else(missing)?;
        let values = table.rows.get(id).ok_or_else(missing)?;
        Ok(Descriptor::new(kind, values.clone()))
    }

    pub fn descriptors(&self, id: &str, kinds: &[FeatureKind]) -> Result<DescriptorSet> {
        kinds.iter().map(|&k| Ok((k, self.descriptor(id, k)?))).collect()
    }

    pub fn kinds(&self) -> Vec<FeatureKind> {
        self.tables.keys().copied().collect()
    }
}

/// Computes the requested descriptors of a video. EXTERNAL can only be
/// produced here through the LBP-TOP substitution.
pub fn extract_features(
    seq: &FrameSequence,
    kinds: &[FeatureKind],
    dict: Option<&PatternDictionary>,
    config: &Config,
) -> Result<DescriptorSet> {
    let mut out = DescriptorSet::new();
    let mut lbp: Option<Descriptor> = None;
    for &kind in kinds {
        let d = match kind {
            FeatureKind::Scopdt => {
                let dict = dict.ok_or_else(|| Error::Invalid("SCOP-DT extraction needs a dictionary".into()))?;
                let plan = plan_clips(seq.len(), config.clips.clip_length, config.clips.stride)?;
                scopdt(seq, dict, &plan)?
            }
            FeatureKind::Lbptop | FeatureKind::External => {
                if kind == FeatureKind::External && config.features.external_source != ExternalSource::Lbptop {
                    return Err(Error::MissingFeatureKind(FeatureKind::External));
                }
                if lbp.is_none() {
                    lbp = Some(lbptop(seq)?);
                }
                Descriptor::new(kind, lbp.as_ref().unwrap().values.clone())
            }
        };
        out.insert(kind, d);
    }
    Ok(out)
}
