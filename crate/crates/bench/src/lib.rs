//! Fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tanknav_core::agents::Transition;
use tanknav_core::harness::{training_setup, RunConfig};
use tanknav_core::{DocrlAgent, TankEnv};

/// A default-sized agent whose buffer holds `steps` transitions of
/// obstacle-free play, past the warmup so `learn` updates on every call.
pub fn warmed_agent(agent: &str, steps: u64) -> (DocrlAgent, TankEnv, ChaCha8Rng) {
    let text = format!(
        "agent = {agent}\nrisers = none\nstart_steps = {}\n",
        steps - 1
    );
    let cfg = RunConfig::parse(&text).expect("bench config");
    let (mut agent, mut env, mut rng) = training_setup(&cfg).expect("setup");
    let mut obs = env.reset(&mut rng).expect("reset");
    agent.begin_episode();
    for _ in 0..steps {
        let a = agent.act(&obs, &mut rng).expect("act");
        let out = env.step(&a, &mut rng).expect("step");
        agent.observe(Transition {
            s: obs,
            a,
            r: out.reward,
            s_next: out.obs,
            term: out.term,
        });
        obs = out.obs;
        if out.done {
            obs = env.reset(&mut rng).expect("reset");
            agent.begin_episode();
        }
    }
    (agent, env, ChaCha8Rng::seed_from_u64(1))
}
