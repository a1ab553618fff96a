use std::path::Path;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, nearest};
use super::patterns::for_each_pattern;
use crate::error::{Error, Result};
use crate::rng::{rng_for, tag};
use crate::tos::{flst_with, TosConfig, TreeOfShapes, ATTRIBUTE_DIM};
use crate::video::FrameSequence;

pub const DICTIONARY_FORMAT: &str = "dtsynth-pattern-dictionary";
pub const DICTIONARY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DictionaryParams {
    pub codewords: usize,
    pub orders: Vec<usize>,
    pub frames_per_video: usize,
    /// Pool size cap per order; larger pools are subsampled with the seed.
    pub max_patterns: Option<usize>,
    pub max_iter: usize,
    pub tolerance: f64,
    pub min_area: usize,
}

impl Default for DictionaryParams {
    fn default() -> Self {
        DictionaryParams {
            codewords: 128,
            orders: vec![1, 2, 3],
            frames_per_video: 16,
            max_patterns: Some(200_000),
            max_iter: 100,
            tolerance: 1e-6,
            min_area: 1,
        }
    }
}

/// Codewords for one chain order, in standardized attribute space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub order: usize,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// K rows of `6 * order` values.
    pub centroids: Vec<Vec<f64>>,
    #[serde(default)]
    pub objective_history: Vec<f64>,
}

impl Codebook {
    pub fn dim(&self) -> usize {
        self.order * ATTRIBUTE_DIM
    }

    /// Nearest codeword to a raw (unstandardized) pattern.
    pub fn assign(&self, raw: &[f64], scratch: &mut Vec<f64>, flat: &[f64]) -> usize {
        scratch.clear();
        scratch.extend(
            raw.iter()
                .zip(self.mean.iter().zip(&self.scale))
                .map(|(v, (m, s))| (v - m) / s),
        );
        nearest(scratch, flat, self.dim()).0
    }

    pub(crate) fn flat_centroids(&self) -> Vec<f64> {
        self.centroids.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDictionary {
    pub format: String,
    pub version: u32,
    pub codewords: usize,
    pub orders: Vec<usize>,
    pub frames_per_video: usize,
    pub learn_seed: u64,
    pub tos: TosConfig,
    pub codebooks: Vec<Codebook>,
}

impl PatternDictionary {
    /// Builds a dictionary from explicit centroids with identity standardization.
    pub fn from_centroids(orders_and_centroids: Vec<(usize, Vec<Vec<f64>>)>) -> Result<Self> {
        let codewords = orders_and_centroids.first().map_or(0, |c| c.1.len());
        let mut codebooks = Vec::new();
        for (order, centroids) in orders_and_centroids {
            let dim = order * ATTRIBUTE_DIM;
            codebooks.push(Codebook {
                order,
                mean: vec![0.0; dim],
                scale: vec![1.0; dim],
                centroids,
                objective_history: Vec::new(),
            });
        }
        let dict = PatternDictionary {
            format: DICTIONARY_FORMAT.into(),
            version: DICTIONARY_VERSION,
            codewords,
            orders: codebooks.iter().map(|c| c.order).collect(),
            frames_per_video: 0,
            learn_seed: 0,
            tos: TosConfig::default(),
            codebooks,
        };
        dict.validate()?;
        Ok(dict)
    }

    pub fn dim(&self) -> usize {
        self.codewords * self.codebooks.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != DICTIONARY_FORMAT || self.version != DICTIONARY_VERSION {
            return Err(Error::CorruptModel(format!(
                "unsupported dictionary format {} v{}",
                self.format, self.version
            )));
        }
        if self.codebooks.is_empty() || self.codewords == 0 {
            return Err(Error::CorruptModel("dictionary has no codewords".into()));
        }
        for cb in &self.codebooks {
            let dim = cb.dim();
            if cb.order == 0 || cb.mean.len() != dim || cb.scale.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: cb.mean.len(),
                });
            }
            if cb.centroids.len() != self.codewords {
                return Err(Error::CorruptModel(format!(
                    "order {} has {} centroids, expected {}",
                    cb.order,
                    cb.centroids.len(),
                    self.codewords
                )));
            }
            for c in &cb.centroids {
                if c.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: c.len(),
                    });
                }
            }
            let all = cb.centroids.iter().flatten().chain(&cb.mean).chain(&cb.scale);
            if all.clone().any(|v| !v.is_finite()) || cb.scale.iter().any(|&s| s <= 0.0) {
                return Err(Error::CorruptModel("non-finite dictionary entries".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dictionary serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dict: PatternDictionary =
            serde_json::from_str(text).map_err(|e| Error::CorruptModel(format!("dictionary: {e}")))?;
        dict.validate()?;
        Ok(dict)
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

/// Trees of `m` seeded-random frames of every video.
fn sampled_trees(videos: &[FrameSequence], m: usize, tos: &TosConfig, seed: u64) -> Vec<TreeOfShapes> {
    let jobs: Vec<(usize, usize)> = videos
        .iter()
        .enumerate()
        .flat_map(|(v, seq)| {
            let mut rng = rng_for(seed, &[tag("dictionary-frames"), v as u64]);
            let mut frames = sample(&mut rng, seq.len(), m.min(seq.len())).into_vec();
            frames.sort_unstable();
            frames.into_iter().map(move |t| (v, t))
        })
        .collect();
    jobs.par_iter()
        .map(|&(v, t)| {
            let seq = &videos[v];
            flst_with(seq.frame(t), seq.height(), seq.width(), tos)
        })
        .collect()
}

pub fn learn_dictionary(videos: &[FrameSequence], params: &DictionaryParams, seed: u64) -> Result<PatternDictionary> {
    if params.codewords == 0 || params.frames_per_video == 0 {
        return Err(Error::Invalid("codewords and frames per video must be positive".into()));
    }
    if params.orders.is_empty() || params.orders.contains(&0) {
        return Err(Error::Invalid(
            "pattern orders must be a non-empty set of positive integers".into(),
        ));
    }
    if videos.is_empty() {
        return Err(Error::InsufficientData("empty dictionary training set".into()));
    }
    let mut orders = params.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    let tos = TosConfig {
        min_area: params.min_area,
    };
    let trees = sampled_trees(videos, params.frames_per_video, &tos, seed);
    log::info!("dictionary: {} trees from {} videos", trees.len(), videos.len());

    let mut codebooks = Vec::new();
    for &order in &orders {
        let dim = order * ATTRIBUTE_DIM;
        let mut pool = Vec::new();
        for t in &trees {
            for_each_pattern(t, order, |p| pool.extend_from_slice(p));
        }
        let mut n = pool.len() / dim;
        if n < params.codewords {
            return Err(Error::InsufficientPatterns {
                order,
                available: n,
                needed: params.codewords,
            });
        }
        if let Some(cap) = params.max_patterns {
            if n > cap.max(params.codewords) {
                let cap = cap.max(params.codewords);
                let mut rng = rng_for(seed, &[tag("dictionary-subsample"), order as u64]);
                let mut keep = sample(&mut rng, n, cap).into_vec();
                keep.sort_unstable();
                pool = keep
                    .iter()
                    .flat_map(|&i| pool[i * dim..(i + 1) * dim].iter().copied())
                    .collect();
                n = cap;
            }
        }
        let (mean, scale) = standardization(&pool, dim);
        for row in pool.chunks_exact_mut(dim) {
            for ((v, m), s) in row.iter_mut().zip(&mean).zip(&scale) {
                *v = (*v - m) / s;
            }
        }
        let mut rng = rng_for(seed, &[tag("dictionary-kmeans"), order as u64]);
        let km = kmeans(
            &pool,
            dim,
            params.codewords,
            params.max_iter,
            params.tolerance,
            &mut rng,
        )
        .map_err(|e| match e {
            Error::InsufficientPatterns { available, needed, .. } => Error::InsufficientPatterns {
                order,
                available,
                needed,
            },
            other => other,
        })?;
        log::info!(
            "dictionary: order {order}, {n} patterns, {} iterations, objective {:.4}",
            km.objective_history.len(),
            km.objective_history.last().copied().unwrap_or(0.0)
        );
        codebooks.push(Codebook {
            order,
            mean,
            scale,
            centroids: km.centroids.chunks_exact(dim).map(<[f64]>::to_vec).collect(),
            objective_history: km.objective_history,
        });
    }
    let dict = PatternDictionary {
        format: DICTIONARY_FORMAT.into(),
        version: DICTIONARY_VERSION,
        codewords: params.codewords,
        orders,
        frames_per_video: params.frames_per_video,
        learn_seed: seed,
        tos,
        codebooks,
    };
    dict.validate()?;
    Ok(dict)
}

/// Per-dimension mean and standard deviation; zero spread maps to 1.
fn standardization(pool: &[f64], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = (pool.len() / dim) as f64;
    let mut mean = vec![0.0; dim];
    for row in pool.chunks_exact(dim) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for row in pool.chunks_exact(dim) {
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
    (mean, scale)
}
