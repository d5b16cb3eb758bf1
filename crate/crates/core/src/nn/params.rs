use crate::error::{Error, Result};
use crate::nn::tape::{Tape, Var};
use crate::nn::tensor::Tensor;

/// Index of a tensor inside a [`NetworkParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamId(pub(crate) usize);

/// Named tensors of one network, in registration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetworkParams {
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

/// Tape handles for every tensor of a [`NetworkParams`], same order.
#[derive(Debug, Clone)]
pub struct Bound(Vec<Var>);

impl Bound {
    pub fn get(&self, id: ParamId) -> Var {
        self.0[id.0]
    }

    /// All handles in registration order.
    pub fn vars(&self) -> &[Var] {
        &self.0
    }
}

impl NetworkParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, tensor: Tensor) -> ParamId {
        self.names.push(name.into());
        self.tensors.push(tensor);
        ParamId(self.tensors.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.tensors[id.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.names.iter().map(String::as_str).zip(&self.tensors)
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn scalar_count(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }

    /// Puts every tensor on the tape as a trainable leaf.
    pub fn bind(&self, tape: &mut Tape) -> Result<Bound> {
        self.bind_with(tape, true)
    }

    /// Puts every tensor on the tape as a constant; nothing flows back into it.
    pub fn bind_frozen(&self, tape: &mut Tape) -> Result<Bound> {
        self.bind_with(tape, false)
    }

    fn bind_with(&self, tape: &mut Tape, trainable: bool) -> Result<Bound> {
        self.tensors
            .iter()
            .map(|t| {
                let (r, c) = t.matrix_dims();
                if trainable {
                    tape.param(r, c, t.values().to_vec())
                } else {
                    tape.constant(r, c, t.values().to_vec())
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Bound)
    }

    /// Adds the tape's gradients into each tensor's accumulator.
    pub fn accumulate_grads(&mut self, tape: &Tape, bound: &Bound) {
        for (t, &v) in self.tensors.iter_mut().zip(&bound.0) {
            if let Some(g) = tape.grad(v) {
                t.grad_mut().iter_mut().zip(g).for_each(|(a, b)| *a += b);
            }
        }
    }

    pub fn zero_grad(&mut self) {
        self.tensors.iter_mut().for_each(Tensor::zero_grad);
    }

    fn check_compatible(&self, other: &NetworkParams, op: &'static str) -> Result<()> {
        if self.tensors.len() != other.tensors.len() {
            return Err(Error::shape(
                op,
                format!("{} tensors vs {}", self.tensors.len(), other.tensors.len()),
            ));
        }
        for (i, (a, b)) in self.tensors.iter().zip(&other.tensors).enumerate() {
            if a.shape() != b.shape() {
                return Err(Error::shape(
                    op,
                    format!(
                        "tensor {} ({}): {:?} vs {:?}",
                        i,
                        self.names[i],
                        a.shape(),
                        b.shape()
                    ),
                ));
            }
        }
        Ok(())
    }

    /// `self ← tau · source + (1 − tau) · self`, element-wise.
    pub fn soft_update_from(&mut self, source: &NetworkParams, tau: f64) -> Result<()> {
        self.check_compatible(source, "soft_update")?;
        for (dst, src) in self.tensors.iter_mut().zip(&source.tensors) {
            for (d, &s) in dst.values_mut().iter_mut().zip(src.values()) {
                *d = tau * s + (1.0 - tau) * *d;
            }
        }
        Ok(())
    }

    pub fn copy_from(&mut self, source: &NetworkParams) -> Result<()> {
        self.check_compatible(source, "copy_from")?;
        for (dst, src) in self.tensors.iter_mut().zip(&source.tensors) {
            dst.values_mut().copy_from_slice(src.values());
        }
        Ok(())
    }

    /// Euclidean distance between the flattened parameter vectors.
    pub fn distance(&self, other: &NetworkParams) -> Result<f64> {
        self.check_compatible(other, "distance")?;
        let sq: f64 = self
            .tensors
            .iter()
            .zip(&other.tensors)
            .flat_map(|(a, b)| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| (x - y) * (x - y))
            })
            .sum();
        Ok(sq.sqrt())
    }

    pub fn flat_values(&self) -> Vec<f64> {
        self.tensors
            .iter()
            .flat_map(|t| t.values().iter().copied())
            .collect()
    }
}
