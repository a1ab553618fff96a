use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, KernelSpec};
use super::linalg::solve;
use super::{check_rows, clamp01, Standardizer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelRegressorParams {
    pub kernel: KernelSpec,
    pub ridge: f64,
    pub standardize: bool,
}

impl Default for KernelRegressorParams {
    fn default() -> Self {
        KernelRegressorParams {
            kernel: KernelSpec::default(),
            ridge: 1e-3,
            standardize: true,
        }
    }
}

/// Squared-loss kernel regression `f(x) = sum_i a_i k(x_i, x) + b` with a
/// ridge penalty on the function norm and an unpenalized bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRegressor {
    pub kernel: Kernel,
    pub ridge: f64,
    pub standardizer: Standardizer,
    pub support: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl KernelRegressor {
    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        let z = self.standardizer.apply(x)?;
        Ok(self
            .support
            .iter()
            .zip(&self.coefficients)
            .map(|(s, a)| a * self.kernel.eval(s, &z))
            .sum::<f64>()
            + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.predict_raw(x).map(clamp01)
    }
}

/// Solves the bordered system `[K + ridge I, 1; 1', 0] [a; b] = [y; 0]`,
/// whose solution minimizes the squared error plus `ridge * |f|^2`.
pub fn train_kernel_regressor(x: &[Vec<f64>], y: &[f64], params: &KernelRegressorParams) -> Result<KernelRegressor> {
    check_rows(x, y.len())?;
    if !(params.ridge >= 0.0) {
        return Err(Error::Invalid(format!(
            "ridge must be non-negative, got {}",
            params.ridge
        )));
    }
    let standardizer = if params.standardize {
        Standardizer::fit(x)
    } else {
        Standardizer::identity(x[0].len())
    };
    let z: Vec<Vec<f64>> = x.iter().map(|r| standardizer.apply(r)).collect::<Result<_>>()?;
    let kernel = Kernel::resolve(params.kernel, &z);
    let n = z.len();
    let m = n + 1;
    let gram = kernel.gram(&z);
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            a[i * m + j] = gram[i * n + j];
        }
        a[i * m + i] += params.ridge;
        a[i * m + n] = 1.0;
        a[n * m + i] = 1.0;
    }
    let mut rhs = y.to_vec();
    rhs.push(0.0);
    let sol = solve(a, rhs)?;
    Ok(KernelRegressor {
        kernel,
        ridge: params.ridge,
        standardizer,
        support: z,
        coefficients: sol[..n].to_vec(),
        bias: sol[n],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(ridge: f64) -> KernelRegressorParams {
        KernelRegressorParams {
            kernel: KernelSpec::Linear,
            ridge,
            standardize: true,
        }
    }

    #[test]
    fn single_point_is_interpolated() {
        let m = train_kernel_regressor(&[vec![0.3, -1.0]], &[0.7], &linear(0.0)).unwrap();
        assert!((m.predict(&[0.3, -1.0]).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn two_point_line() {
        let m = train_kernel_regressor(&[vec![0.0], vec![1.0]], &[0.0, 1.0], &linear(0.0)).unwrap();
        assert!((m.predict(&[0.5]).unwrap() - 0.5).abs() < 1e-8);
        assert!((m.predict_raw(&[2.0]).unwrap() - 2.0).abs() < 1e-8);
        assert_eq!(m.predict(&[2.0]).unwrap(), 1.0);
        assert_eq!(m.predict(&[-0.2]).unwrap(), 0.0);
    }

    #[test]
    fn duplicate_inputs_without_ridge_are_singular() {
        let x = vec![vec![1.0], vec![1.0], vec![2.0]];
        let p = KernelRegressorParams {
            kernel: KernelSpec::Rbf { gamma: Some(1.0) },
            ridge: 0.0,
            standardize: false,
        };
        assert!(matches!(
            train_kernel_regressor(&x, &[0.0, 1.0, 0.5], &p),
            Err(Error::SingularSystem)
        ));
        let p = KernelRegressorParams { ridge: 1e-3, ..p };
        assert!(train_kernel_regressor(&x, &[0.0, 1.0, 0.5], &p).is_ok());
    }

    #[test]
    fn dimension_checked_at_prediction() {
        let m = train_kernel_regressor(&[vec![0.0, 1.0]], &[0.5], &linear(1e-3)).unwrap();
        assert!(matches!(
            m.predict(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }
}
