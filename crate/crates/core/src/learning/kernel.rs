use serde::{Deserialize, Serialize};

use super::squared_distance;

/// Kernel choice as configured; a missing RBF width is filled in from data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: Option<f64> },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Rbf { gamma: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => (-gamma * squared_distance(a, b)).exp(),
        }
    }

    /// Resolves a spec against training inputs; RBF width defaults to the
    /// inverse median pairwise squared distance.
    pub fn resolve(spec: KernelSpec, x: &[Vec<f64>]) -> Kernel {
        match spec {
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Rbf { gamma: Some(g) } => Kernel::Rbf { gamma: g },
            KernelSpec::Rbf { gamma: None } => Kernel::Rbf { gamma: median_gamma(x) },
        }
    }

    pub fn gram(&self, x: &[Vec<f64>]) -> Vec<f64> {
        let n = x.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.eval(&x[i], &x[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        k
    }
}

fn median_gamma(x: &[Vec<f64>]) -> f64 {
    let mut d: Vec<f64> = Vec::new();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let v = squared_distance(&x[i], &x[j]);
            if v > 0.0 {
                d.push(v);
            }
        }
    }
    if d.is_empty() {
        return 1.0 / x.first().map_or(1, |r| r.len().max(1)) as f64;
    }
    d.sort_by(f64::total_cmp);
    1.0 / d[(d.len() - 1) / 2]
}
