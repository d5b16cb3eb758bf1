mod common;

use common::{rng, uniform_vec};
use tanknav_core::harness::{evaluate, AgentChoice, RunConfig};
use tanknav_core::sim::{Medium, Scenario, WorldConfig};
use tanknav_core::{bba_step, BbaConfig, Observation, OBS_DIM};

#[test]
fn actions_stay_in_bounds_and_are_deterministic() {
    let cfg = BbaConfig::default();
    let mut r = rng(1);
    for i in 0..100_000 {
        let v = uniform_vec(&mut r, OBS_DIM, -1.0, 1.0);
        let mut obs: Observation = [0.0; OBS_DIM];
        obs.copy_from_slice(&v);
        obs[..20].iter_mut().for_each(|x| *x = x.abs());
        let medium = if i % 2 == 0 {
            Medium::Air
        } else {
            Medium::Water
        };
        let a = bba_step(&obs, medium, &cfg);
        assert!(a.iter().all(|x| (-1.0..=1.0).contains(x)), "{a:?}");
        assert_eq!(a, bba_step(&obs, medium, &cfg));
    }
}

#[test]
fn reaches_the_goal_in_an_empty_tank() {
    let cfg = RunConfig {
        agent: AgentChoice::Bba,
        scenario: Scenario::FixedAW,
        eval_trials: 10,
        world: WorldConfig::without_risers(),
        ..RunConfig::default()
    };
    let out = evaluate(&cfg, None).unwrap();
    assert_eq!(out.summary.success_count, 10);
    assert!(out.summary.t_air_mean > 0.0 && out.summary.t_water_mean > 0.0);
}
