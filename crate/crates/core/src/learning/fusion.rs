use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::clamp01;
use crate::descriptors::FeatureKind;
use crate::error::{Error, Result};

/// Non-negative per-kind weights, normalized to sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<FeatureKind, f64>", into = "BTreeMap<FeatureKind, f64>")]
pub struct FusionWeights {
    weights: BTreeMap<FeatureKind, f64>,
}

impl FusionWeights {
    pub fn new(weights: BTreeMap<FeatureKind, f64>) -> Result<Self> {
        if weights.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Invalid("fusion weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.values().sum();
        if total <= 0.0 {
            return Err(Error::Invalid("fusion weights must not all be zero".into()));
        }
        Ok(FusionWeights {
            weights: weights.into_iter().map(|(k, w)| (k, w / total)).collect(),
        })
    }

    pub fn equal(kinds: &[FeatureKind]) -> Self {
        Self::new(kinds.iter().map(|&k| (k, 1.0)).collect()).expect("non-empty kinds")
    }

    pub fn get(&self, kind: FeatureKind) -> Option<f64> {
        self.weights.get(&kind).copied()
    }

    pub fn kinds(&self) -> impl Iterator<Item = FeatureKind> + '_ {
        self.weights.keys().copied()
    }

    pub fn as_map(&self) -> &BTreeMap<FeatureKind, f64> {
        &self.weights
    }
}

impl TryFrom<BTreeMap<FeatureKind, f64>> for FusionWeights {
    type Error = Error;

    fn try_from(w: BTreeMap<FeatureKind, f64>) -> Result<Self> {
        FusionWeights::new(w)
    }
}

impl From<FusionWeights> for BTreeMap<FeatureKind, f64> {
    fn from(w: FusionWeights) -> Self {
        w.weights
    }
}

/// Weighted mean of per-kind scores, kept inside the span of the inputs
/// against rounding and clamped to `[0, 1]`.
pub fn fuse_scores(scores: &BTreeMap<FeatureKind, f64>, weights: &FusionWeights) -> Result<f64> {
    if !scores.keys().eq(weights.weights.keys()) {
        return Err(Error::WeightMismatch);
    }
    let lo = scores.values().cloned().fold(f64::INFINITY, f64::min);
    let hi = scores.values().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean: f64 = scores.iter().map(|(k, s)| weights.weights[k] * s).sum();
    Ok(clamp01(mean.clamp(lo, hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use FeatureKind::*;

    fn scores(v: &[(FeatureKind, f64)]) -> BTreeMap<FeatureKind, f64> {
        v.iter().copied().collect()
    }

    #[test]
    fn equal_thirds() {
        let w = FusionWeights::equal(&[Lbptop, External, Scopdt]);
        let s = scores(&[(Lbptop, 0.9), (External, 0.9), (Scopdt, 0.9)]);
        assert_eq!(fuse_scores(&s, &w).unwrap(), 0.9);
    }

    #[test]
    fn halves() {
        let w = FusionWeights::equal(&[External, Scopdt]);
        assert_eq!(
            fuse_scores(&scores(&[(External, 1.0), (Scopdt, 0.0)]), &w).unwrap(),
            0.5
        );
        assert_eq!(
            fuse_scores(&scores(&[(External, 0.8), (Scopdt, 0.6)]), &w).unwrap(),
            0.7
        );
    }

    #[test]
    fn weights_normalize() {
        let w = FusionWeights::new(scores(&[(External, 2.0), (Scopdt, 2.0)])).unwrap();
        assert_eq!(w.get(External), Some(0.5));
        assert!(FusionWeights::new(scores(&[(External, -1.0)])).is_err());
    }

    #[test]
    fn mismatched_kinds() {
        let w = FusionWeights::equal(&[External, Scopdt]);
        assert!(matches!(
            fuse_scores(&scores(&[(External, 1.0)]), &w),
            Err(Error::WeightMismatch)
        ));
    }

    #[test]
    fn serde_normalizes() {
        let w: FusionWeights = serde_json::from_str(r#"{"EXTERNAL": 1, "SCOPDT": 3}"#).unwrap();
        assert_eq!(w.get(Scopdt), Some(0.75));
    }
}
