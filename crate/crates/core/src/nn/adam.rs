use alloc::vec;
use alloc::vec::Vec;

use super::{Gradients, NetParams};
use crate::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Bias-corrected Adam over a fixed list of parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(sizes: &[usize], lr: f64) -> Self {
        AdamState {
            m: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            v: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            t: 0,
            lr,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            eps: ADAM_EPS,
        }
    }

    pub fn for_params(params: &NetParams, lr: f64) -> Self {
        let sizes: Vec<usize> = params.trainable().iter().map(|t| t.len()).collect();
        Self::new(&sizes, lr)
    }

    /// Zero both moment buffers of tensor `index`. With zero gradients from
    /// then on, that tensor stays bit-identical.
    pub fn clear_moments(&mut self, index: usize) {
        self.m[index].iter_mut().for_each(|x| *x = 0.0);
        self.v[index].iter_mut().for_each(|x| *x = 0.0);
    }

    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::dim("adam_step", self.m.len(), params.len().min(grads.len())));
        }
        for i in 0..params.len() {
            let len = self.m[i].len();
            if params[i].len() != len || grads[i].len() != len {
                return Err(Error::dim("adam_step", len, params[i].len()));
            }
        }
        self.t += 1;
        let t = self.t as f64;
        let c1 = 1.0 - libm::pow(self.beta1, t);
        let c2 = 1.0 - libm::pow(self.beta2, t);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            for (((p, &g), m), v) in p.iter_mut().zip(g.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= self.lr * m_hat / (libm::sqrt(v_hat) + self.eps);
            }
        }
        Ok(())
    }
}

pub fn adam_step(state: &mut AdamState, params: &mut NetParams, grads: &Gradients) -> Result<()> {
    let g = grads.tensors();
    let mut p = params.trainable_mut();
    state.step(&mut p, &g)
}
