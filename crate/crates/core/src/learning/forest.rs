use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_rows;
use crate::error::{Error, Result};
use crate::rng::{rng_for, tag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mtry {
    Sqrt,
    All,
    Fraction(f64),
}

impl Mtry {
    fn count(self, dim: usize) -> usize {
        let m = match self {
            Mtry::Sqrt => (dim as f64).sqrt().round() as usize,
            Mtry::All => dim,
            Mtry::Fraction(f) => (f * dim as f64).round() as usize,
        };
        m.clamp(1, dim.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub mtry: Mtry,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_leaf: 2,
            mtry: Mtry::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ForestMode {
    Regression,
    Classification { classes: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { value } => return value,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub mode: ForestMode,
    pub params: ForestParams,
    pub seed: u64,
    pub dim: usize,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Mean of leaf outputs over trees (regression value or class frequencies).
    pub fn predict_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let width = match self.mode {
            ForestMode::Regression => 1,
            ForestMode::Classification { classes } => classes,
        };
        Ok((0..width)
            .map(|c| bounded_mean(self.trees.iter().map(|t| t.leaf(x)[c])))
            .collect())
    }

    /// Regression output, or the probability of class 1 for classifiers.
    pub fn predict_value(&self, x: &[f64]) -> Result<f64> {
        let v = self.predict_vector(x)?;
        Ok(match self.mode {
            ForestMode::Regression => v[0],
            ForestMode::Classification { .. } => v.get(1).copied().unwrap_or(0.0),
        })
    }
}

/// Running mean kept inside the range of its inputs, so equal inputs give
/// exactly that value.
fn bounded_mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut m, mut lo, mut hi) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for (k, v) in values.enumerate() {
        m += (v - m) / (k + 1) as f64;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    m.clamp(lo.min(hi), hi)
}

/// Trains `n_trees` CART trees; classification targets are class indices.
pub fn train_forest(
    x: &[Vec<f64>],
    y: &[f64],
    mode: ForestMode,
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel> {
    let dim = check_rows(x, y.len())?;
    if params.n_trees == 0 || params.min_leaf == 0 {
        return Err(Error::Invalid(
            "forest needs at least one tree and min_leaf >= 1".into(),
        ));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite target".into()));
    }
    if let ForestMode::Classification { classes } = mode {
        if y.iter().any(|&v| v < 0.0 || v.fract() != 0.0 || v as usize >= classes) {
            return Err(Error::Invalid(
                "class targets must be indices below the class count".into(),
            ));
        }
    }
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, &[tag("tree"), i as u64]);
            let n = x.len();
            let sample: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut builder = Builder {
                x,
                y,
                mode,
                params,
                mtry: params.mtry.count(dim),
                rng,
                nodes: Vec::new(),
            };
            builder.grow(sample, 0);
            Tree { nodes: builder.nodes }
        })
        .collect();
    Ok(ForestModel {
        mode,
        params: *params,
        seed,
        dim,
        trees,
    })
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    mode: ForestMode,
    params: &'a ForestParams,
    mtry: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn leaf_value(&self, idx: &[usize]) -> Vec<f64> {
        let n = idx.len() as f64;
        match self.mode {
            ForestMode::Regression => vec![bounded_mean(idx.iter().map(|&i| self.y[i]))],
            ForestMode::Classification { classes } => {
                let mut v = vec![0.0; classes];
                for &i in idx {
                    v[self.y[i] as usize] += 1.0;
                }
                v.iter_mut().for_each(|c| *c /= n);
                v
            }
        }
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: Vec::new() });
        let pure = idx.iter().all(|&i| self.y[i] == self.y[idx[0]]);
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        let split = if !pure && depth_ok && idx.len() >= 2 * self.params.min_leaf {
            self.best_split(&idx)
        } else {
            None
        };
        match split {
            None => {
                self.nodes[id] = Node::Leaf {
                    value: self.leaf_value(&idx),
                };
            }
            Some(s) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][s.feature] <= s.threshold);
                let left = self.grow(l, depth + 1);
                let right = self.grow(r, depth + 1);
                self.nodes[id] = Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
            }
        }
        id
    }

    /// Best split over `mtry` random features, widening to the remaining
    /// features when none of those improves impurity.
    fn best_split(&mut self, idx: &[usize]) -> Option<Split> {
        let dim = self.x[0].len();
        let mut features: Vec<usize> = (0..dim).collect();
        features.shuffle(&mut self.rng);
        let mut best: Option<Split> = None;
        for (k, &f) in features.iter().enumerate() {
            if k >= self.mtry && best.is_some() {
                break;
            }
            if let Some(s) = self.split_on(idx, f) {
                if best.as_ref().is_none_or(|b| s.gain > b.gain) {
                    best = Some(s);
                }
            }
        }
        best
    }

    fn split_on(&self, idx: &[usize], f: usize) -> Option<Split> {
        let mut pairs: Vec<(f64, f64)> = idx.iter().map(|&i| (self.x[i][f], self.y[i])).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pairs.len();
        let min_leaf = self.params.min_leaf;
        let mut best: Option<(usize, f64)> = None;
        match self.mode {
            ForestMode::Regression => {
                let mean = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
                let c: Vec<f64> = pairs.iter().map(|p| p.1 - mean).collect();
                let total: f64 = c.iter().sum();
                let total_sq: f64 = c.iter().map(|v| v * v).sum();
                let parent = total_sq - total * total / n as f64;
                let (mut s, mut sq) = (0.0, 0.0);
                for i in 1..n {
                    s += c[i - 1];
                    sq += c[i - 1] * c[i - 1];
                    if i < min_leaf || n - i < min_leaf || pairs[i - 1].0 == pairs[i].0 {
                        continue;
                    }
                    let (nl, nr) = (i as f64, (n - i) as f64);
                    let children = (sq - s * s / nl) + ((total_sq - sq) - (total - s) * (total - s) / nr);
                    let gain = parent - children;
                    if gain > 1e-12 * parent.max(f64::MIN_POSITIVE) && best.is_none_or(|b| gain > b.1) {
                        best = Some((i, gain));
                    }
                }
            }
            ForestMode::Classification { classes } => {
                let mut right = vec![0.0f64; classes];
                for p in &pairs {
                    right[p.1 as usize] += 1.0;
                }
                let impurity = |counts: &[f64], m: f64| m - counts.iter().map(|c| c * c).sum::<f64>() / m;
                let parent = impurity(&right, n as f64);
                let mut left = vec![0.0f64; classes];
                for i in 1..n {
                    let c = pairs[i - 1].1 as usize;
                    left[c] += 1.0;
                    right[c] -= 1.0;
                    if i < min_leaf || n - i < min_leaf || pairs[i - 1].0 == pairs[i].0 {
                        continue;
                    }
                    let gain = parent - impurity(&left, i as f64) - impurity(&right, (n - i) as f64);
                    if gain > 1e-12 && best.is_none_or(|b| gain > b.1) {
                        best = Some((i, gain));
                    }
                }
            }
        }
        best.map(|(i, gain)| {
            let (a, b) = (pairs[i - 1].0, pairs[i].0);
            let mid = a + (b - a) / 2.0;
            Split {
                feature: f,
                threshold: if mid < b { mid } else { a },
                gain,
            }
        })
    }
}
