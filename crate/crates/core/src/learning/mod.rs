//! Regression and classification models trained from scratch, plus
//! late-fusion helpers.

mod ensemble;
mod forest;
mod fusion;
mod kernel;
pub mod linalg;
mod regressor;
mod svm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ensemble::{ensemble_classify, EnsembleClassifier};
pub use forest::{train_forest, ForestMode, ForestModel, ForestParams, Mtry, Node, Tree};
pub use fusion::{fuse_scores, FusionWeights};
pub use kernel::{Kernel, KernelSpec};
pub use regressor::{train_kernel_regressor, KernelRegressor, KernelRegressorParams};
pub use svm::{train_binary_classifier, train_classifier, BinaryClassifier, Classifier, PlattScaling, SvmParams};

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn clamp01(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

pub(crate) fn check_rows(x: &[Vec<f64>], n_targets: usize) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::InsufficientData("no training samples".into()));
    }
    if x.len() != n_targets {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: n_targets,
        });
    }
    let dim = x[0].len();
    for row in x {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite feature value".into()));
        }
    }
    Ok(dim)
}

/// Per-dimension z-scoring fitted on training inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let dim = x[0].len();
        let n = x.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for row in x {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn identity(dim: usize) -> Self {
        Standardizer {
            mean: vec![0.0; dim],
            scale: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }
}

/// A trained score regressor of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Regressor {
    Kernel(KernelRegressor),
    Forest(ForestModel),
}

impl Regressor {
    pub fn dim(&self) -> usize {
        match self {
            Regressor::Kernel(m) => m.dim(),
            Regressor::Forest(m) => m.dim,
        }
    }

    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        match self {
            Regressor::Kernel(m) => m.predict_raw(x),
            Regressor::Forest(m) => m.predict_value(x),
        }
    }
}

/// Model output clamped to `[0, 1]`.
pub fn predict_score(model: &Regressor, x: &[f64]) -> Result<f64> {
    model.predict_raw(x).map(clamp01)
}
