use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::params::{Bound, NetworkParams, ParamId};
use crate::nn::tape::{Tape, Var};
use crate::nn::tensor::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, tape: &mut Tape, x: Var) -> Result<Var> {
        match self {
            Activation::Identity => Ok(x),
            Activation::Relu => tape.relu(x),
            Activation::Tanh => tape.tanh(x),
        }
    }
}

/// Fully connected layer `activation(W·x + b)` with `W: out × in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseLayer {
    pub weight: ParamId,
    pub bias: ParamId,
    pub activation: Activation,
    pub inputs: usize,
    pub outputs: usize,
}

impl DenseLayer {
    /// Registers a layer initialised uniformly in `±1/√inputs`.
    pub fn new<R: Rng + ?Sized>(
        params: &mut NetworkParams,
        name: &str,
        inputs: usize,
        outputs: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / (inputs as f64).sqrt();
        let weight = params.register(
            format!("{name}.weight"),
            Tensor::uniform(&[outputs, inputs], bound, rng),
        );
        let bias = params.register(
            format!("{name}.bias"),
            Tensor::uniform(&[outputs], bound, rng),
        );
        Self {
            weight,
            bias,
            activation,
            inputs,
            outputs,
        }
    }

    /// Wraps existing tensors, checking that their shapes agree.
    pub fn from_params(
        params: &NetworkParams,
        weight: ParamId,
        bias: ParamId,
        activation: Activation,
    ) -> Result<Self> {
        let w = params.get(weight).shape();
        let b = params.get(bias).shape();
        if w.len() != 2 || b != [w[0]] {
            return Err(Error::shape(
                "DenseLayer",
                format!("weight {w:?} with bias {b:?}"),
            ));
        }
        Ok(Self {
            weight,
            bias,
            activation,
            inputs: w[1],
            outputs: w[0],
        })
    }

    /// Batched forward on a tape; `x` is `B × inputs`.
    pub fn forward(&self, tape: &mut Tape, bound: &Bound, x: Var) -> Result<Var> {
        let (_, cols) = tape.dims(x);
        if cols != self.inputs {
            return Err(Error::shape(
                "dense_forward",
                format!("input has {cols} features, layer expects {}", self.inputs),
            ));
        }
        let z = tape.matmul_t(x, bound.get(self.weight))?;
        let z = tape.add_row(z, bound.get(self.bias))?;
        self.activation.apply(tape, z)
    }

    /// Multiplies the weight and bias by `factor` (used to shrink output heads).
    pub fn rescale(&self, params: &mut NetworkParams, factor: f64) {
        params.get_mut(self.weight).scale_values(factor);
        params.get_mut(self.bias).scale_values(factor);
    }
}

/// Single-sample dense forward outside any tape.
pub fn dense_forward(layer: &DenseLayer, params: &NetworkParams, x: &Tensor) -> Result<Tensor> {
    let mut tape = Tape::new();
    let bound = params.bind_frozen(&mut tape)?;
    let (rows, cols) = x.matrix_dims();
    let xv = tape.constant(rows, cols, x.values().to_vec())?;
    let y = layer.forward(&mut tape, &bound, xv)?;
    let (r, c) = tape.dims(y);
    let shape: Vec<usize> = if x.shape().len() == 1 {
        vec![c]
    } else {
        vec![r, c]
    };
    Tensor::new(&shape, tape.value(y).to_vec())
}

/// LSTM cell with gate blocks ordered (input, forget, cell-candidate, output).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LstmCell {
    pub input_weights: ParamId,
    pub recurrent_weights: ParamId,
    pub biases: ParamId,
    pub inputs: usize,
    pub hidden_size: usize,
}

/// Recurrent state of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Tensor,
    pub c: Tensor,
}

impl LstmState {
    pub fn zeros(hidden_size: usize) -> Self {
        Self {
            h: Tensor::zeros(&[hidden_size]),
            c: Tensor::zeros(&[hidden_size]),
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.h.len()
    }
}

/// Batched `(h, c)` living on a tape.
#[derive(Debug, Clone, Copy)]
pub struct LstmVars {
    pub h: Var,
    pub c: Var,
}

impl LstmCell {
    /// Registers a cell initialised uniformly in `±1/√hidden_size`.
    pub fn new<R: Rng + ?Sized>(
        params: &mut NetworkParams,
        name: &str,
        inputs: usize,
        hidden_size: usize,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / (hidden_size as f64).sqrt();
        let input_weights = params.register(
            format!("{name}.input_weights"),
            Tensor::uniform(&[4 * hidden_size, inputs], bound, rng),
        );
        let recurrent_weights = params.register(
            format!("{name}.recurrent_weights"),
            Tensor::uniform(&[4 * hidden_size, hidden_size], bound, rng),
        );
        let biases = params.register(
            format!("{name}.biases"),
            Tensor::uniform(&[4 * hidden_size], bound, rng),
        );
        Self {
            input_weights,
            recurrent_weights,
            biases,
            inputs,
            hidden_size,
        }
    }

    pub fn zero_state(&self, tape: &mut Tape, batch: usize) -> Result<LstmVars> {
        let n = batch * self.hidden_size;
        Ok(LstmVars {
            h: tape.constant(batch, self.hidden_size, vec![0.0; n])?,
            c: tape.constant(batch, self.hidden_size, vec![0.0; n])?,
        })
    }

    /// Input projection `x·W_inᵀ + b` for any number of stacked rows.
    pub fn project_inputs(&self, tape: &mut Tape, bound: &Bound, xs: Var) -> Result<Var> {
        let (_, cols) = tape.dims(xs);
        if cols != self.inputs {
            return Err(Error::shape(
                "lstm_step",
                format!("input has {cols} features, cell expects {}", self.inputs),
            ));
        }
        let z = tape.matmul_t(xs, bound.get(self.input_weights))?;
        tape.add_row(z, bound.get(self.biases))
    }

    /// One recurrence step given an already projected input block (`B × 4H`).
    pub fn step_projected(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        projected: Var,
        state: LstmVars,
    ) -> Result<LstmVars> {
        let (rows, cols) = tape.dims(state.h);
        if cols != self.hidden_size || tape.dims(state.c) != (rows, cols) {
            return Err(Error::shape(
                "lstm_step",
                format!(
                    "state is {rows}x{cols}, hidden size is {}",
                    self.hidden_size
                ),
            ));
        }
        let rec = tape.matmul_t(state.h, bound.get(self.recurrent_weights))?;
        let pre = tape.add(projected, rec)?;
        let gates = tape.lstm_gates(pre)?;
        let c = tape.lstm_cell(gates, state.c)?;
        let h = tape.lstm_hidden(gates, c)?;
        Ok(LstmVars { h, c })
    }

    pub fn step(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        x: Var,
        state: LstmVars,
    ) -> Result<LstmVars> {
        let projected = self.project_inputs(tape, bound, x)?;
        self.step_projected(tape, bound, projected, state)
    }

    /// Runs a time-major stack of `steps` blocks of `batch` rows from a zero
    /// state and returns the final state.
    pub fn run_sequence(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        xs: Var,
        steps: usize,
        batch: usize,
    ) -> Result<LstmVars> {
        let (rows, _) = tape.dims(xs);
        if rows != steps * batch {
            return Err(Error::shape(
                "run_sequence",
                format!("{rows} rows for {steps} steps of batch {batch}"),
            ));
        }
        let projected = self.project_inputs(tape, bound, xs)?;
        let mut state = self.zero_state(tape, batch)?;
        for t in 0..steps {
            let block = tape.slice_rows(projected, t * batch, batch)?;
            state = self.step_projected(tape, bound, block, state)?;
        }
        Ok(state)
    }
}

/// Single-sample LSTM step outside any tape. The input state is not modified.
pub fn lstm_step(
    cell: &LstmCell,
    params: &NetworkParams,
    x: &Tensor,
    state: &LstmState,
) -> Result<(Tensor, LstmState)> {
    if x.len() != cell.inputs {
        return Err(Error::shape(
            "lstm_step",
            format!("input has {} values, cell expects {}", x.len(), cell.inputs),
        ));
    }
    if state.h.len() != cell.hidden_size || state.c.len() != cell.hidden_size {
        return Err(Error::shape(
            "lstm_step",
            format!(
                "state ({}, {}) vs hidden size {}",
                state.h.len(),
                state.c.len(),
                cell.hidden_size
            ),
        ));
    }
    let hs = cell.hidden_size;
    let mut tape = Tape::new();
    let bound = params.bind_frozen(&mut tape)?;
    let xv = tape.constant(1, cell.inputs, x.values().to_vec())?;
    let vars = LstmVars {
        h: tape.constant(1, hs, state.h.values().to_vec())?,
        c: tape.constant(1, hs, state.c.values().to_vec())?,
    };
    let next = cell.step(&mut tape, &bound, xv, vars)?;
    let h = Tensor::new(&[hs], tape.value(next.h).to_vec())?;
    let c = Tensor::new(&[hs], tape.value(next.c).to_vec())?;
    Ok((h.clone(), LstmState { h, c }))
}
