use alloc::vec;
use alloc::vec::Vec;

use crate::numerics::Matrix;
use crate::{Error, Result};

pub const BN_EPS: f64 = 1e-5;
pub const BN_MOMENTUM: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Batch statistics; running statistics are updated.
    Train,
    /// Running statistics; deterministic per sample.
    Eval,
}

/// Per-feature batch normalization with a learned affine map.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormLayer {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub eps: f64,
    pub momentum: f64,
}

/// Batch statistics kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormCache {
    pub normalized: Matrix,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub inv_std: Vec<f64>,
}

impl BatchNormLayer {
    pub fn new(features: usize) -> Self {
        BatchNormLayer {
            gamma: vec![1.0; features],
            beta: vec![0.0; features],
            running_mean: vec![0.0; features],
            running_var: vec![1.0; features],
            eps: BN_EPS,
            momentum: BN_MOMENTUM,
        }
    }

    pub fn features(&self) -> usize {
        self.gamma.len()
    }

    fn check(&self, input: &Matrix) -> Result<()> {
        if input.cols() != self.features() {
            return Err(Error::dim("batchnorm_forward", self.features(), input.cols()));
        }
        Ok(())
    }

    /// Train-mode normalization with biased batch variance. Leaves the running
    /// statistics untouched; see [`BatchNormLayer::update_running`].
    pub fn normalize_batch(&self, input: &Matrix) -> Result<(Matrix, BatchNormCache)> {
        self.check(input)?;
        let batch = input.rows();
        if batch < 2 {
            return Err(Error::arg("batch norm in train mode needs a batch of at least 2"));
        }
        let inv_b = 1.0 / batch as f64;
        let mean: Vec<f64> = input.column_sums().iter().map(|s| s * inv_b).collect();
        let mut var = vec![0.0; self.features()];
        for r in 0..batch {
            for ((v, &x), &mu) in var.iter_mut().zip(input.row(r)).zip(&mean) {
                *v += (x - mu) * (x - mu);
            }
        }
        var.iter_mut().for_each(|v| *v *= inv_b);
        let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / libm::sqrt(v + self.eps)).collect();
        let normalized = Matrix::from_fn(batch, self.features(), |r, c| {
            (input.get(r, c) - mean[c]) * inv_std[c]
        });
        let out = self.affine(&normalized);
        Ok((
            out,
            BatchNormCache {
                normalized,
                mean,
                var,
                inv_std,
            },
        ))
    }

    pub fn normalize_eval(&self, input: &Matrix) -> Result<Matrix> {
        self.check(input)?;
        let inv_std: Vec<f64> = self
            .running_var
            .iter()
            .map(|v| 1.0 / libm::sqrt(v + self.eps))
            .collect();
        let normalized = Matrix::from_fn(input.rows(), self.features(), |r, c| {
            (input.get(r, c) - self.running_mean[c]) * inv_std[c]
        });
        Ok(self.affine(&normalized))
    }

    fn affine(&self, normalized: &Matrix) -> Matrix {
        Matrix::from_fn(normalized.rows(), normalized.cols(), |r, c| {
            self.gamma[c] * normalized.get(r, c) + self.beta[c]
        })
    }

    pub fn update_running(&mut self, cache: &BatchNormCache) {
        let m = self.momentum;
        for (rm, &mu) in self.running_mean.iter_mut().zip(&cache.mean) {
            *rm = (1.0 - m) * *rm + m * mu;
        }
        for (rv, &v) in self.running_var.iter_mut().zip(&cache.var) {
            *rv = (1.0 - m) * *rv + m * v;
        }
    }

    pub fn forward(&mut self, input: &Matrix, mode: Mode) -> Result<Matrix> {
        match mode {
            Mode::Train => {
                let (out, cache) = self.normalize_batch(input)?;
                self.update_running(&cache);
                Ok(out)
            }
            Mode::Eval => self.normalize_eval(input),
        }
    }

    /// Returns `(∂L/∂gamma, ∂L/∂beta, ∂L/∂input)` through the batch-statistics path.
    pub fn backward(
        &self,
        cache: &BatchNormCache,
        grad_out: &Matrix,
    ) -> (Vec<f64>, Vec<f64>, Matrix) {
        let batch = grad_out.rows();
        let features = self.features();
        let x_hat = &cache.normalized;
        let mut d_gamma = vec![0.0; features];
        let mut d_beta = vec![0.0; features];
        for r in 0..batch {
            for c in 0..features {
                let g = grad_out.get(r, c);
                d_gamma[c] += g * x_hat.get(r, c);
                d_beta[c] += g;
            }
        }
        // dx = inv_std/B * (B dx̂ - Σ dx̂ - x̂ Σ dx̂·x̂), with dx̂ = g·gamma,
        // so Σ dx̂ = gamma·d_beta and Σ dx̂·x̂ = gamma·d_gamma.
        let b = batch as f64;
        let grad_in = Matrix::from_fn(batch, features, |r, c| {
            let gamma = self.gamma[c];
            let dx_hat = grad_out.get(r, c) * gamma;
            cache.inv_std[c] / b
                * (b * dx_hat - gamma * d_beta[c] - x_hat.get(r, c) * gamma * d_gamma[c])
        });
        (d_gamma, d_beta, grad_in)
    }
}

pub fn batchnorm_forward(layer: &mut BatchNormLayer, input: &Matrix, mode: Mode) -> Result<Matrix> {
    layer.forward(input, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Rng, Stream};

    #[test]
    fn train_mode_standardizes() {
        let mut rng = Rng::new(8, Stream::Data);
        // Column variances well above eps, so the output variance
        // σ²/(σ² + eps) is within 1e-6 of one.
        let x = Matrix::from_fn(10, 4, |_, c| rng.uniform(-30.0, 30.0).unwrap() * (c + 1) as f64 + c as f64);
        let mut layer = BatchNormLayer::new(4);
        let y = batchnorm_forward(&mut layer, &x, Mode::Train).unwrap();
        let stats = |m: &Matrix, c: usize| {
            let col: Vec<f64> = (0..m.rows()).map(|r| m.get(r, c)).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / col.len() as f64;
            (mean, var)
        };
        for c in 0..4 {
            let (mean, var) = stats(&y, c);
            assert!(mean.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-6, "var {var}");
            let (_, raw) = stats(&x, c);
            assert!((var - raw / (raw + BN_EPS)).abs() < 1e-12);
        }
        assert_ne!(layer.running_mean, vec![0.0; 4]);
    }

    #[test]
    fn constant_column_is_zero() {
        let x = Matrix::from_fn(5, 2, |r, c| if c == 0 { 3.0 } else { r as f64 });
        let mut layer = BatchNormLayer::new(2);
        let y = layer.forward(&x, Mode::Train).unwrap();
        assert!(y.is_finite());
        for r in 0..5 {
            assert_eq!(y.get(r, 0), 0.0);
        }
    }

    #[test]
    fn eval_identity_with_default_stats() {
        let mut layer = BatchNormLayer::new(3);
        layer.eps = 0.0;
        let x = Matrix::from_vec(1, 3, vec![0.5, -2.0, 7.0]).unwrap();
        assert_eq!(layer.forward(&x, Mode::Eval).unwrap(), x);
        // with the default eps the map is identity up to sqrt(1 + 1e-5)
        let layer = BatchNormLayer::new(3);
        let y = layer.normalize_eval(&x).unwrap();
        for (a, b) in y.data().iter().zip(x.data()) {
            assert!((a - b).abs() < 1e-5 * b.abs().max(1.0));
        }
    }

    #[test]
    fn single_sample_train_rejected() {
        let mut layer = BatchNormLayer::new(2);
        assert!(layer.forward(&Matrix::zeros(1, 2), Mode::Train).is_err());
        assert!(layer.forward(&Matrix::zeros(1, 2), Mode::Eval).is_ok());
    }

    #[test]
    fn running_stats_momentum() {
        let x = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        let mut layer = BatchNormLayer::new(1);
        layer.forward(&x, Mode::Train).unwrap();
        assert!((layer.running_mean[0] - 0.2).abs() < 1e-15);
        assert!((layer.running_var[0] - (0.9 + 0.1 * 1.0)).abs() < 1e-15);
    }
}
