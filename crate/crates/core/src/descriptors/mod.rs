//! Fixed-length video descriptors: shape co-occurrence encodings over clips,
//! LBP histograms on three orthogonal planes, and externally computed
//! features read from files.

mod dictionary;
mod features_io;
pub mod kmeans;
mod lbptop;
mod patterns;
mod scopdt;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use dictionary::{learn_dictionary, Codebook, DictionaryParams, PatternDictionary};
pub use features_io::{ingest_external, read_features, write_features, FeatureFileFormat, FeatureTable};
pub use lbptop::{lbp_code, lbptop, uniform_bin, LBPTOP_DIM, UNIFORM_BINS};
pub use patterns::{extract_patterns, CooccurrencePattern};
pub use scopdt::{encode_clip, frame_counts, scopdt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureKind {
    #[serde(rename = "SCOPDT")]
    Scopdt,
    #[serde(rename = "LBPTOP")]
    Lbptop,
    #[serde(rename = "EXTERNAL")]
    External,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Scopdt, FeatureKind::Lbptop, FeatureKind::External];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Scopdt => "SCOPDT",
            FeatureKind::Lbptop => "LBPTOP",
            FeatureKind::External => "EXTERNAL",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_uppercase().replace(['-', '_'], "").as_str() {
            "SCOPDT" => Ok(FeatureKind::Scopdt),
            "LBPTOP" => Ok(FeatureKind::Lbptop),
            "EXTERNAL" | "C3D" => Ok(FeatureKind::External),
            _ => Err(Error::Invalid(format!("unknown feature kind {s:?}"))),
        }
    }
}

/// A feature vector tagged with the extractor that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub kind: FeatureKind,
    pub values: Vec<f64>,
}

impl Descriptor {
    pub fn new(kind: FeatureKind, values: Vec<f64>) -> Self {
        Descriptor { kind, values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}
