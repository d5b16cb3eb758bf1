//! Configuration, training and evaluation runs, and trajectory export.

pub mod config;
pub mod eval;
pub mod export;
pub mod train;

pub use config::{AgentChoice, RunConfig};
pub use eval::{
    evaluate, run_evaluation, run_trial, trial_rng, Controller, EpisodeLog, EvalOutcome,
    EvalSummary, StepRecord, TrialRow,
};
pub use export::{export_trajectories, read_trajectory, ExportFormat, Trajectory, TrajectoryRow};
pub use train::{run_training, train_episode, training_setup, EpisodeRow, TrainingOutcome};
