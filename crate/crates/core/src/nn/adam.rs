use crate::error::{Error, Result};
use crate::nn::params::NetworkParams;

/// Adam optimiser state for one [`NetworkParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub step_count: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_stab: f64,
}

impl AdamState {
    pub fn new(params: &NetworkParams, lr: f64) -> Self {
        Self::with_betas(params, lr, 0.9, 0.999, 1e-8)
    }

    pub fn with_betas(
        params: &NetworkParams,
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps_stab: f64,
    ) -> Self {
        let zeros: Vec<Vec<f64>> = params
            .tensors()
            .iter()
            .map(|t| vec![0.0; t.len()])
            .collect();
        Self {
            m: zeros.clone(),
            v: zeros,
            step_count: 0,
            lr,
            beta1,
            beta2,
            eps_stab,
        }
    }

    /// One bias-corrected Adam step from the accumulated gradients, which are
    /// cleared afterwards.
    pub fn update(&mut self, params: &mut NetworkParams) -> Result<()> {
        if self.m.len() != params.len()
            || self
                .m
                .iter()
                .zip(params.tensors())
                .any(|(m, t)| m.len() != t.len())
        {
            return Err(Error::shape(
                "adam_update",
                "optimiser state does not match parameters",
            ));
        }
        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps_stab);
        for ((tensor, m), v) in params
            .tensors_mut()
            .iter_mut()
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            let grad = tensor.grad().to_vec();
            for (((w, g), mi), vi) in tensor
                .values_mut()
                .iter_mut()
                .zip(&grad)
                .zip(m.iter_mut())
                .zip(v.iter_mut())
            {
                *mi = b1 * *mi + (1.0 - b1) * g;
                *vi = b2 * *vi + (1.0 - b2) * g * g;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *w -= lr * m_hat / (v_hat.sqrt() + eps);
            }
            tensor.zero_grad();
        }
        Ok(())
    }
}
