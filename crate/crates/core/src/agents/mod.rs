pub mod buffer;
pub mod checkpoint;
pub mod driver;
pub mod hyper;
pub mod networks;
pub mod noise;
pub mod schedule;
pub mod update;

pub use buffer::{ReplayBuffer, SequenceBatch, Transition};
pub use checkpoint::Checkpoint;
pub use driver::{
    select_action_d, select_action_s, AgentKind, ContextMode, DocrlAgent, Hyper, UpdateStats,
};
pub use hyper::{HyperparamsD, HyperparamsS};
pub use networks::{Actor, ActorHead, ActorOutput, Critic, NetworkSizes};
pub use noise::OuProcess;
pub use schedule::{is_policy_step, policy_freq_at};
pub use update::{
    actor_objective_d, actor_objective_s, actor_update_d, actor_update_s, critic_loss,
    critic_update, smoothed_target_action, soft_update, td_target_d, td_target_d_detail,
    td_target_s, td_target_s_detail, AgentNetworks, Optimizers, TargetDetail,
};
