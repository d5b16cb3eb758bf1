//! Minimal differentiable building blocks: tensors, a recording tape, dense
//! and LSTM layers, the squashed Gaussian head and Adam.

pub mod adam;
pub mod layers;
pub mod params;
pub mod policy;
pub mod tape;
pub mod tensor;

pub use adam::AdamState;
pub use layers::{dense_forward, lstm_step, Activation, DenseLayer, LstmCell, LstmState, LstmVars};
pub use params::{Bound, NetworkParams, ParamId};
pub use policy::{squashed_gaussian_sample, squashed_sample_on_tape};
pub use tape::{Tape, Var};
pub use tensor::Tensor;
