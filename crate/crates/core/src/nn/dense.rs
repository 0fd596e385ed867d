use alloc::vec::Vec;

use crate::numerics::{Matrix, Rng};
use crate::{Error, Result};

/// Affine layer `y = x Wᵀ + b`, `W` stored `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn new(weight: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weight.rows() {
            return Err(Error::dim("DenseLayer::new", weight.rows(), bias.len()));
        }
        Ok(DenseLayer { weight, bias })
    }

    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        DenseLayer {
            weight: Matrix::zeros(outputs, inputs),
            bias: alloc::vec![0.0; outputs],
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot(inputs: usize, outputs: usize, rng: &mut Rng) -> Self {
        let limit = libm::sqrt(6.0 / (inputs + outputs) as f64);
        let weight = Matrix::from_fn(outputs, inputs, |_, _| {
            rng.uniform(-limit, limit).expect("finite symmetric range")
        });
        DenseLayer {
            weight,
            bias: alloc::vec![0.0; outputs],
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, input: &Matrix) -> Result<Matrix> {
        if input.cols() != self.inputs() {
            return Err(Error::dim("dense_forward", self.inputs(), input.cols()));
        }
        let mut out = input.matmul_transposed(&self.weight)?;
        for r in 0..out.rows() {
            for (o, b) in out.row_mut(r).iter_mut().zip(&self.bias) {
                *o += b;
            }
        }
        Ok(out)
    }

    /// Gradients of the parameters and of the input, given `∂L/∂output`.
    pub fn backward(&self, input: &Matrix, grad_out: &Matrix) -> Result<(DenseGrads, Matrix)> {
        let weight = grad_out.transposed_matmul(input)?;
        let bias = grad_out.column_sums();
        let grad_in = grad_out.matmul(&self.weight)?;
        Ok((DenseGrads { weight, bias }, grad_in))
    }
}

pub fn dense_forward(layer: &DenseLayer, input: &Matrix) -> Result<Matrix> {
    layer.forward(input)
}
