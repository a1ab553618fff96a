use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, KernelSpec};
use super::{check_rows, Standardizer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    pub c: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub standardize: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: KernelSpec::default(),
            c: 1.0,
            tolerance: 1e-3,
            max_iter: 100_000,
            standardize: true,
        }
    }
}

/// Logistic map `p(f) = 1 / (1 + exp(a f + b))` from decision values to
/// probabilities of the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattScaling {
    pub a: f64,
    pub b: f64,
}

impl PlattScaling {
    pub fn probability(&self, f: f64) -> f64 {
        let z = self.a * f + self.b;
        if z >= 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        }
    }

    /// Newton fit with backtracking on regularized targets.
    pub fn fit(decisions: &[f64], labels: &[bool]) -> PlattScaling {
        let pos = labels.iter().filter(|&&l| l).count() as f64;
        let neg = labels.len() as f64 - pos;
        let hi = (pos + 1.0) / (pos + 2.0);
        let lo = 1.0 / (neg + 2.0);
        let t: Vec<f64> = labels.iter().map(|&l| if l { hi } else { lo }).collect();
        let objective = |a: f64, b: f64| -> f64 {
            decisions
                .iter()
                .zip(&t)
                .map(|(&f, &ti)| {
                    let z = f * a + b;
                    if z >= 0.0 {
                        ti * z + (-z).exp().ln_1p()
                    } else {
                        (ti - 1.0) * z + z.exp().ln_1p()
                    }
                })
                .sum()
        };
        let (mut a, mut b) = (0.0, ((neg + 1.0) / (pos + 1.0)).ln());
        let mut fval = objective(a, b);
        for _ in 0..100 {
            let (mut h11, mut h22, mut h21, mut g1, mut g2) = (1e-12, 1e-12, 0.0, 0.0, 0.0);
            for (&f, &ti) in decisions.iter().zip(&t) {
                let z = f * a + b;
                let (p, q) = if z >= 0.0 {
                    let e = (-z).exp();
                    (e / (1.0 + e), 1.0 / (1.0 + e))
                } else {
                    let e = z.exp();
                    (1.0 / (1.0 + e), e / (1.0 + e))
                };
                let d2 = p * q;
                h11 += f * f * d2;
                h22 += d2;
                h21 += f * d2;
                let d1 = ti - p;
                g1 += f * d1;
                g2 += d1;
            }
            if g1.abs() < 1e-5 && g2.abs() < 1e-5 {
                break;
            }
            let det = h11 * h22 - h21 * h21;
            let da = -(h22 * g1 - h21 * g2) / det;
            let db = -(-h21 * g1 + h11 * g2) / det;
            let gd = g1 * da + g2 * db;
            let mut step = 1.0;
            while step >= 1e-10 {
                let (na, nb) = (a + step * da, b + step * db);
                let nf = objective(na, nb);
                if nf < fval + 1e-4 * step * gd {
                    a = na;
                    b = nb;
                    fval = nf;
                    break;
                }
                step /= 2.0;
            }
            if step < 1e-10 {
                break;
            }
        }
        PlattScaling { a, b }
    }
}

/// Soft-margin kernel SVM with a calibrated output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryClassifier {
    pub kernel: Kernel,
    pub standardizer: Standardizer,
    pub support: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub platt: PlattScaling,
}

impl BinaryClassifier {
    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let z = self.standardizer.apply(x)?;
        Ok(self
            .support
            .iter()
            .zip(&self.coefficients)
            .map(|(s, c)| c * self.kernel.eval(s, &z))
            .sum::<f64>()
            + self.bias)
    }

    /// Calibrated probability of the positive class.
    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        Ok(self.platt.probability(self.decision_value(x)?))
    }

    /// Decision value at which the calibrated probability is one half.
    pub fn decision_boundary(&self) -> Option<f64> {
        (self.platt.a != 0.0).then(|| -self.platt.b / self.platt.a)
    }

    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.probability(x)? >= 0.5)
    }
}

pub fn train_binary_classifier(x: &[Vec<f64>], labels: &[bool], params: &SvmParams) -> Result<BinaryClassifier> {
    check_rows(x, labels.len())?;
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::DegenerateLabels);
    }
    if !(params.c > 0.0) {
        return Err(Error::Invalid(format!("C must be positive, got {}", params.c)));
    }
    let standardizer = if params.standardize {
        Standardizer::fit(x)
    } else {
        Standardizer::identity(x[0].len())
    };
    let z: Vec<Vec<f64>> = x.iter().map(|r| standardizer.apply(r)).collect::<Result<_>>()?;
    let kernel = Kernel::resolve(params.kernel, &z);
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let gram = kernel.gram(&z);
    let (alpha, rho) = smo(&gram, &y, params.c, params.tolerance, params.max_iter);

    let n = z.len();
    let decisions: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| alpha[j] * y[j] * gram[j * n + i]).sum::<f64>() - rho)
        .collect();
    let platt = PlattScaling::fit(&decisions, labels);
    let keep: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    Ok(BinaryClassifier {
        kernel,
        standardizer,
        support: keep.iter().map(|&i| z[i].clone()).collect(),
        coefficients: keep.iter().map(|&i| alpha[i] * y[i]).collect(),
        bias: -rho,
        platt,
    })
}

/// Dual coordinate-pair solver with maximal-violating-pair selection.
/// Returns the multipliers and the offset `rho` (decision = sum - rho).
fn smo(gram: &[f64], y: &[f64], c: f64, eps: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let k = |i: usize, j: usize| gram[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);
    for _ in 0..max_iter {
        let (mut gmax, mut i) = (f64::NEG_INFINITY, usize::MAX);
        let (mut gmin, mut j) = (f64::INFINITY, usize::MAX);
        for t in 0..n {
            let v = -y[t] * grad[t];
            if up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < eps {
            break;
        }
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = (k(i, i) + k(j, j) - 2.0 * k(i, j)).max(1e-12);
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
        }
    }

    let (mut ub, mut lb, mut free, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 { sum / free as f64 } else { (ub + lb) / 2.0 };
    (alpha, rho)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum ClassifierModel {
    /// Only one class was seen in training.
    Constant { index: usize },
    /// Two classes; the model scores `classes[1]`.
    Binary(BinaryClassifier),
    /// One model per class; `None` for classes without training samples.
    OneVsRest { members: Vec<Option<BinaryClassifier>> },
}

/// Multi-class classifier producing one calibrated score per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub classes: Vec<String>,
    pub dim: usize,
    pub model: ClassifierModel,
}

impl Classifier {
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let k = self.classes.len();
        Ok(match &self.model {
            ClassifierModel::Constant { index } => (0..k).map(|i| if i == *index { 1.0 } else { 0.0 }).collect(),
            ClassifierModel::Binary(m) => {
                let p = m.probability(x)?;
                vec![1.0 - p, p]
            }
            ClassifierModel::OneVsRest { members: ms } => ms
                .iter()
                .map(|m| m.as_ref().map_or(Ok(0.0), |m| m.probability(x)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Trains on class indices into `classes`.
pub fn train_classifier(
    x: &[Vec<f64>],
    labels: &[usize],
    classes: &[String],
    params: &SvmParams,
) -> Result<Classifier> {
    let dim = check_rows(x, labels.len())?;
    let k = classes.len();
    if labels.iter().any(|&l| l >= k) {
        return Err(Error::Invalid("class label outside the class set".into()));
    }
    let present: Vec<usize> = (0..k).filter(|c| labels.contains(c)).collect();
    let model = if present.len() == 1 {
        ClassifierModel::Constant { index: present[0] }
    } else if k == 2 {
        let y: Vec<bool> = labels.iter().map(|&l| l == 1).collect();
        ClassifierModel::Binary(train_binary_classifier(x, &y, params)?)
    } else {
        let members = (0..k)
            .map(|c| {
                if !present.contains(&c) {
                    return Ok(None);
                }
                let y: Vec<bool> = labels.iter().map(|&l| l == c).collect();
                train_binary_classifier(x, &y, params).map(Some)
            })
            .collect::<Result<_>>()?;
        ClassifierModel::OneVsRest { members }
    };
    Ok(Classifier {
        classes: classes.to_vec(),
        dim,
        model,
    })
}
