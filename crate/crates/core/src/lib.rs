//! Navigation agents for a hybrid aerial-underwater vehicle in a walled tank:
//! a small reverse-mode autodiff engine, two recurrent double-critic learners,
//! the tank simulator, a behaviour-based baseline and the experiment harness.

pub mod agents;
pub mod bba;
pub mod error;
pub mod harness;
pub mod nn;
pub mod sim;
pub mod types;

pub use agents::{
    AgentKind, Checkpoint, ContextMode, DocrlAgent, HyperparamsD, HyperparamsS, NetworkSizes,
};
pub use bba::{bba_step, BbaConfig};
pub use error::{Error, Result};
pub use harness::{AgentChoice, EvalSummary, RunConfig};
pub use sim::{Medium, Scenario, TankEnv, WorldConfig};
pub use types::{Action, Observation, ACTION_DIM, OBS_DIM, RANGE_BEAMS};
