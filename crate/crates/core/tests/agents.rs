//! Target semantics, update rules and agent-level invariants.

mod common;

use common::{normal_vec, random_batch, rng, uniform_vec};
use proptest::prelude::*;
use rand::Rng;
use tanknav_core::agents::*;
use tanknav_core::nn::{AdamState, NetworkParams};
use tanknav_core::{ACTION_DIM, OBS_DIM};

fn sizes() -> NetworkSizes {
    NetworkSizes {
        lstm_hidden: 6,
        actor_fc: 8,
        critic_fc1: 12,
        critic_fc2: 8,
    }
}

/// Networks whose targets have drifted away from their sources.
fn drifted_nets(seed: u64, head: ActorHead) -> AgentNetworks {
    let mut r = rng(seed);
    let mut nets = AgentNetworks::new(sizes(), head, &mut r);
    let other = AgentNetworks::new(sizes(), head, &mut r);
    nets.critic1_target = other.critic1;
    nets.critic2_target = other.critic2;
    if head == ActorHead::Deterministic {
        nets.actor_target = Some(other.actor);
    }
    nets
}

/// A deterministic actor computing `tanh` of the Gaussian actor's mean head.
fn mean_actor(gaussian: &Actor) -> Actor {
    let mut det = Actor::new(sizes(), ActorHead::Deterministic, &mut rng(0));
    let src: Vec<(String, Vec<f64>)> = gaussian
        .params
        .iter()
        .map(|(n, t)| (n.to_string(), t.values().to_vec()))
        .collect();
    for (tensor, (name, values)) in det.params.tensors_mut().iter_mut().zip(&src) {
        let n = tensor.len();
        // Head tensors keep only the mean rows; everything else copies over.
        assert!(name.starts_with("head") || values.len() == n, "{name}");
        tensor.values_mut().copy_from_slice(&values[..n]);
    }
    det
}

#[test]
fn scalar_target_examples() {
    // Two-transition batch through the public Bellman helpers: compare with
    // hand arithmetic using the critics' own outputs.
    let nets = drifted_nets(3, ActorHead::Deterministic);
    let mut batch = random_batch(&mut rng(4), 2, 1);
    batch.rewards = vec![1.0, 7.0];
    batch.terms = vec![0.0, 1.0];
    let hp = HyperparamsD::default();
    let d = td_target_d_detail(&batch, &nets, &hp, &[0.0; 6]).unwrap();
    assert!((d.targets[0] - (1.0 + 0.99 * d.q1[0].min(d.q2[0]))).abs() < 1e-12);
    assert_eq!(d.targets[1], 7.0);
}

#[test]
fn deterministic_target_matches_scalar_oracle() {
    let nets = drifted_nets(11, ActorHead::Deterministic);
    let mut r = rng(12);
    let batch = random_batch(&mut r, 64, 3);
    let hp = HyperparamsD::default();
    let draws = normal_vec(&mut r, 64 * ACTION_DIM);
    let batched = td_target_d(&batch, &nets, &hp, &draws).unwrap();
    let actor_t = nets.actor_target.as_ref().unwrap();
    for b in 0..64 {
        let raw = actor_t.replay(&batch.window(b, true)).unwrap();
        let a: Vec<f64> = (0..ACTION_DIM)
            .map(|k| {
                smoothed_target_action(
                    raw[k],
                    draws[b * ACTION_DIM + k],
                    hp.target_noise_std,
                    hp.noise_clip,
                )
            })
            .collect();
        let s_next = &batch.last_next_obs()[b * OBS_DIM..(b + 1) * OBS_DIM];
        let q1 = nets.critic1_target.q_values(s_next, &a, 1).unwrap()[0];
        let q2 = nets.critic2_target.q_values(s_next, &a, 1).unwrap()[0];
        let expect = batch.rewards[b] + hp.gamma * (1.0 - batch.terms[b]) * q1.min(q2);
        assert!(
            (batched[b] - expect).abs() < 1e-9,
            "sample {b}: {} vs {expect}",
            batched[b]
        );
    }
}

#[test]
fn stochastic_target_without_entropy_is_the_unsmoothed_deterministic_target() {
    let s_nets = drifted_nets(21, ActorHead::Gaussian);
    let mut d_nets = s_nets.clone();
    d_nets.actor_target = Some(mean_actor(&s_nets.actor));
    let batch = random_batch(&mut rng(22), 64, 4);
    let hs = HyperparamsS {
        alpha: 0.0,
        ..HyperparamsS::default()
    };
    let hd = HyperparamsD {
        target_noise_std: 0.0,
        ..HyperparamsD::default()
    };
    let zeros = vec![0.0; 64 * ACTION_DIM];
    let ts = td_target_s(&batch, &s_nets, &hs, &zeros).unwrap();
    let td = td_target_d(
        &batch,
        &d_nets,
        &hd,
        &normal_vec(&mut rng(23), 64 * ACTION_DIM),
    )
    .unwrap();
    for (a, b) in ts.iter().zip(&td) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn stochastic_target_formula() {
    let nets = drifted_nets(31, ActorHead::Gaussian);
    let mut r = rng(32);
    let batch = random_batch(&mut r, 16, 2);
    let hp = HyperparamsS::default();
    let noise = normal_vec(&mut r, 16 * ACTION_DIM);
    let d = td_target_s_detail(&batch, &nets, &hp, &noise).unwrap();
    let lp = d.log_probs.as_ref().unwrap();
    for b in 0..16 {
        let expect =
            batch.rewards[b] + 0.99 * (1.0 - batch.terms[b]) * (d.q1[b].min(d.q2[b]) - 0.2 * lp[b]);
        assert!((d.targets[b] - expect).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn double_critic_pessimism(seed in 0u64..10_000) {
        let nets = drifted_nets(seed, ActorHead::Deterministic);
        let mut r = rng(seed ^ 0xabc);
        let batch = random_batch(&mut r, 32, 2);
        let draws = normal_vec(&mut r, 32 * ACTION_DIM);
        let d = td_target_d_detail(&batch, &nets, &HyperparamsD::default(), &draws).unwrap();
        for b in 0..32 {
            let base = batch.rewards[b];
            let w = 0.99 * (1.0 - batch.terms[b]);
            prop_assert!(d.targets[b] <= base + w * d.q1[b]);
            prop_assert!(d.targets[b] <= base + w * d.q2[b]);
        }
    }

    #[test]
    fn smoothed_actions_stay_in_range(raw in -1.0f64..1.0, draw in -10.0f64..10.0, std in 0.0f64..2.0, clip in 0.0f64..1.0) {
        let a = smoothed_target_action(raw, draw, std, clip);
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert!((a - raw).abs() <= clip + 1e-15);
    }

    #[test]
    fn soft_update_is_a_convex_blend(seed in 0u64..10_000, tau in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let src = Critic::new(sizes(), &mut r);
        let mut tgt = Critic::new(sizes(), &mut r);
        let before = tgt.params.flat_values();
        soft_update(&src.params, &mut tgt.params, tau).unwrap();
        for ((t, s), b) in tgt.params.flat_values().iter().zip(src.params.flat_values()).zip(before) {
            prop_assert!((t - (tau * s + (1.0 - tau) * b)).abs() < 1e-12);
        }
    }

    #[test]
    fn buffer_never_exceeds_capacity(cap in 1usize..40, pushes in 0usize..120, ends in proptest::collection::vec(any::<bool>(), 120)) {
        let mut buf = ReplayBuffer::new(cap);
        for (i, &end) in ends.iter().enumerate().take(pushes) {
            buf.push(transition(i as f64, end));
            prop_assert!(buf.len() <= cap);
        }
        prop_assert_eq!(buf.len(), pushes.min(cap));
        if pushes > 0 {
            // Oldest surviving transition is the one pushed `len` steps ago.
            let oldest = buf.get(0).unwrap().r;
            prop_assert_eq!(oldest, (pushes - buf.len()) as f64);
        }
    }

    #[test]
    fn windows_never_cross_episode_ends(seed in 0u64..10_000, seq_len in 1usize..6) {
        let mut r = rng(seed);
        let mut buf = ReplayBuffer::new(50);
        for i in 0..80 {
            buf.push(transition(i as f64, r.random_bool(0.15)));
        }
        let batch = buf.sample(16, seq_len, &mut r).unwrap();
        for b in 0..16 {
            let idx = batch.indices[b];
            let window = batch.window(b, false);
            // Non-padded rows must be the consecutive predecessors of `idx`
            // and none of them (except possibly the last) may be terminal.
            let real: Vec<&Vec<f64>> = window.iter().filter(|o| o.iter().any(|&v| v != 0.0)).collect();
            let first = idx + 1 - real.len();
            for (k, o) in real.iter().enumerate() {
                let t = buf.get(first + k).unwrap();
                prop_assert_eq!(o[0], t.s[0]);
                if k + 1 < real.len() {
                    prop_assert!(!t.term);
                }
            }
        }
    }
}

/// Transition tagged by `tag` in its reward and first observation slot.
fn transition(tag: f64, term: bool) -> Transition {
    let mut s = [0.0; OBS_DIM];
    s[0] = tag + 1.0;
    Transition {
        s,
        a: [0.0; ACTION_DIM],
        r: tag,
        s_next: s,
        term,
    }
}

#[test]
fn buffer_sampling_is_uniform() {
    let mut buf = ReplayBuffer::new(100);
    for i in 0..100 {
        buf.push(transition(i as f64, false));
    }
    let mut r = rng(5);
    let mut counts = [0usize; 100];
    let draws = 10_000;
    for _ in 0..draws / 100 {
        for &i in &buf.sample(100, 1, &mut r).unwrap().indices {
            counts[i] += 1;
        }
    }
    let p = 0.01;
    let (mean, sd) = (draws as f64 * p, (draws as f64 * p * (1.0 - p)).sqrt());
    for (i, &c) in counts.iter().enumerate() {
        assert!(
            (c as f64 - mean).abs() <= 4.0 * sd,
            "index {i} drawn {c} times"
        );
    }
}

#[test]
fn soft_update_geometric_decay() {
    for tau in [0.005, 0.5, 1.0] {
        let mut r = rng(41);
        let src = Critic::new(sizes(), &mut r);
        let mut tgt = Critic::new(sizes(), &mut r);
        let gap0 = tgt.params.distance(&src.params).unwrap();
        for k in 1..=200 {
            soft_update(&src.params, &mut tgt.params, tau).unwrap();
            let gap = tgt.params.distance(&src.params).unwrap();
            let expect = (1.0 - tau).powi(k) * gap0;
            assert!(
                (gap - expect).abs() < 1e-10,
                "tau {tau} step {k}: {gap} vs {expect}"
            );
        }
    }
}

#[test]
fn soft_update_rejects_mismatched_shapes() {
    let mut r = rng(1);
    let a = Critic::new(sizes(), &mut r);
    let mut b = Critic::new(
        NetworkSizes {
            critic_fc1: 5,
            ..sizes()
        },
        &mut r,
    );
    assert!(soft_update(&a.params, &mut b.params, 0.5).is_err());
}

#[test]
fn schedule_is_monotone_within_two_and_six() {
    let mut prev = 0;
    for t in 0..=500 {
        let f = policy_freq_at(t, 500);
        assert!((2..=6).contains(&f));
        assert!(f >= prev);
        prev = f;
    }
    assert_eq!(policy_freq_at(375, 500), 4);
    assert_eq!(policy_freq_at(450, 500), 5);
}

fn tiny_hyper_d(start_steps: u64) -> Hyper {
    Hyper::D(HyperparamsD {
        start_steps,
        batch_size: 1,
        seq_len: 2,
        max_steps: 500,
        ..HyperparamsD::default()
    })
}

#[test]
fn actor_update_count_follows_schedule() {
    let mut r = rng(7);
    let mut agent = DocrlAgent::new(tiny_hyper_d(0), sizes(), ContextMode::Window, &mut r).unwrap();
    agent.begin_episode();
    for i in 0..500 {
        agent.observe(transition(i as f64 * 1e-3, false));
        agent.learn(&mut r).unwrap().expect("learning is open");
    }
    let expect = (1..=500u64).filter(|&t| is_policy_step(t, 500)).count() as u64;
    assert_eq!(agent.actor_updates, expect);
    assert_eq!(agent.critic_updates, 500);
}

#[test]
fn targets_move_only_through_soft_updates() {
    let mut r = rng(8);
    let mut agent = DocrlAgent::new(tiny_hyper_d(0), sizes(), ContextMode::Window, &mut r).unwrap();
    agent.begin_episode();
    for i in 0..40 {
        agent.observe(transition(i as f64 * 1e-2, false));
        let before = agent.nets.clone();
        let step = agent.episode_step;
        agent.learn(&mut r).unwrap();
        let after = &agent.nets;
        let tau = 0.005;
        let check = |src: &NetworkParams, old_t: &NetworkParams, new_t: &NetworkParams| {
            if is_policy_step(step, 500) {
                let mut expect = old_t.clone();
                soft_update(src, &mut expect, tau).unwrap();
                assert_eq!(expect.flat_values(), new_t.flat_values());
            } else {
                assert_eq!(old_t.flat_values(), new_t.flat_values());
            }
        };
        // Soft updates use the post-update sources.
        check(
            &after.critic1.params,
            &before.critic1_target.params,
            &after.critic1_target.params,
        );
        check(
            &after.critic2.params,
            &before.critic2_target.params,
            &after.critic2_target.params,
        );
        check(
            &after.actor.params,
            &before.actor_target.as_ref().unwrap().params,
            &after.actor_target.as_ref().unwrap().params,
        );
    }
}

#[test]
fn critic_and_actor_updates_touch_only_their_networks() {
    let mut nets = drifted_nets(9, ActorHead::Deterministic);
    let mut opts = Optimizers::new(&nets, 1e-3);
    let batch = random_batch(&mut rng(10), 8, 2);
    let snapshot = nets.clone();
    let targets = td_target_d(&batch, &nets, &HyperparamsD::default(), &[0.1; 24]).unwrap();
    assert_eq!(
        nets, snapshot,
        "computing targets must not change any network"
    );
    critic_update(&batch, &targets, &mut nets, &mut opts).unwrap();
    assert_eq!(nets.actor, snapshot.actor);
    assert_eq!(nets.actor_target, snapshot.actor_target);
    assert_eq!(nets.critic1_target, snapshot.critic1_target);
    assert_ne!(nets.critic1, snapshot.critic1);
    let after_critic = nets.clone();
    actor_update_d(&batch, &mut nets, &mut opts.actor).unwrap();
    assert_eq!(nets.critic1, after_critic.critic1);
    assert_eq!(nets.critic2, after_critic.critic2);
    assert_eq!(nets.actor_target, after_critic.actor_target);
    assert_ne!(nets.actor, after_critic.actor);
}

#[test]
fn critic_loss_matches_hand_computation_and_decreases() {
    let mut r = rng(12);
    let mut nets = AgentNetworks::new(sizes(), ActorHead::Deterministic, &mut r);
    let mut opts = Optimizers::new(&nets, 1e-3);
    let batch = random_batch(&mut r, 4, 1);
    let targets = uniform_vec(&mut r, 4, -3.0, 3.0);
    let mut by_hand = 0.0;
    for c in [&nets.critic1, &nets.critic2] {
        let q = c.q_values(batch.last_obs(), &batch.actions, 4).unwrap();
        by_hand += q
            .iter()
            .zip(&targets)
            .map(|(q, y)| (q - y) * (q - y))
            .sum::<f64>()
            / 4.0;
    }
    let loss = critic_update(&batch, &targets, &mut nets, &mut opts).unwrap();
    assert!((loss - by_hand).abs() < 1e-12);
    let after = critic_loss(&nets.critic1, &batch, &targets).unwrap().0
        + critic_loss(&nets.critic2, &batch, &targets).unwrap().0;
    assert!(after < loss, "{after} !< {loss}");
}

#[test]
fn critic_at_its_targets_has_zero_loss() {
    let mut r = rng(13);
    let mut nets = AgentNetworks::new(sizes(), ActorHead::Deterministic, &mut r);
    nets.critic2 = nets.critic1.clone();
    let mut opts = Optimizers::new(&nets, 1e-3);
    let batch = random_batch(&mut r, 4, 1);
    let targets = nets
        .critic1
        .q_values(batch.last_obs(), &batch.actions, 4)
        .unwrap();
    let before = nets.clone();
    assert_eq!(
        critic_update(&batch, &targets, &mut nets, &mut opts).unwrap(),
        0.0
    );
    assert_eq!(nets, before);
}

/// A critic fitted to `Q(s, a) = −Σ_k (a_k − centre)²` on random inputs.
fn quadratic_critic(centre: f64, seed: u64) -> Critic {
    let wide = NetworkSizes {
        critic_fc1: 64,
        critic_fc2: 32,
        ..sizes()
    };
    let mut r = rng(seed);
    let mut critic = Critic::new(wide, &mut r);
    let mut opt = AdamState::new(&critic.params, 3e-3);
    for _ in 0..3000 {
        let batch = random_batch(&mut r, 64, 1);
        let targets: Vec<f64> = batch
            .actions
            .chunks(ACTION_DIM)
            .map(|a| -a.iter().map(|x| (x - centre) * (x - centre)).sum::<f64>())
            .collect();
        let (_, grads) = critic_loss(&critic, &batch, &targets).unwrap();
        for (t, g) in critic.params.tensors_mut().iter_mut().zip(&grads) {
            t.grad_mut().copy_from_slice(g);
        }
        opt.update(&mut critic.params).unwrap();
    }
    critic
}

fn mean_distance(actions: &[f64], centre: f64) -> f64 {
    actions.iter().map(|a| (a - centre).abs()).sum::<f64>() / actions.len() as f64
}

#[test]
fn deterministic_actor_climbs_a_toy_critic() {
    let critic = quadratic_critic(0.5, 50);
    let mut r = rng(51);
    let mut nets = AgentNetworks::new(sizes(), ActorHead::Deterministic, &mut r);
    nets.critic1 = critic;
    let mut opt = AdamState::new(&nets.actor.params, 1e-2);
    let batch = random_batch(&mut r, 32, 2);
    let policy_actions = |actor: &Actor| -> Vec<f64> {
        (0..32)
            .flat_map(|b| actor.replay(&batch.window(b, false)).unwrap())
            .collect()
    };
    let mut last = mean_distance(&policy_actions(&nets.actor), 0.5);
    let start = last;
    for round in 0..4 {
        for _ in 0..50 {
            actor_update_d(&batch, &mut nets, &mut opt).unwrap();
        }
        let d = mean_distance(&policy_actions(&nets.actor), 0.5);
        // The fitted critic is only quadratic to within ~0.05 in action.
        assert!(d < last || d < 0.05, "round {round}: {d} !< {last}");
        last = d;
    }
    assert!(last < 0.1 && last < 0.25 * start, "{start} -> {last}");
}

#[test]
fn stochastic_actor_mean_moves_to_the_critic_peak() {
    let critic = quadratic_critic(0.0, 60);
    let mut r = rng(61);
    let mut nets = AgentNetworks::new(sizes(), ActorHead::Gaussian, &mut r);
    nets.critic1 = critic.clone();
    nets.critic2 = critic;
    // Start the mean away from the peak.
    let head_bias = nets.actor.params.tensors().len() - 1;
    nets.actor.params.tensors_mut()[head_bias].values_mut()[..ACTION_DIM].fill(0.6);
    let hp = HyperparamsS::default();
    let mut opt = AdamState::new(&nets.actor.params, 1e-2);
    let batch = random_batch(&mut r, 32, 2);
    let means = |actor: &Actor| -> Vec<f64> {
        (0..32)
            .flat_map(|b| actor.replay(&batch.window(b, false)).unwrap()[..ACTION_DIM].to_vec())
            .map(f64::tanh)
            .collect()
    };
    let start = mean_distance(&means(&nets.actor), 0.0);
    for _ in 0..200 {
        let noise = normal_vec(&mut r, 32 * ACTION_DIM);
        actor_update_s(&batch, &mut nets, &hp, &mut opt, &noise).unwrap();
    }
    let end = mean_distance(&means(&nets.actor), 0.0);
    assert!(end < 0.5 * start, "{start} -> {end}");
}

/// Mean of `−log π` over a fixed state batch, estimated with fresh draws.
fn entropy_estimate(nets: &AgentNetworks, batch: &SequenceBatch, seed: u64) -> f64 {
    let mut r = rng(seed);
    let hp = HyperparamsS {
        alpha: 0.0,
        ..HyperparamsS::default()
    };
    let mut total = 0.0;
    let rounds = 20;
    for _ in 0..rounds {
        // The current policy at the window's next observations gives log π.
        let mut shifted = batch.clone();
        shifted.next_obs = batch.obs.clone();
        let d = td_target_s_detail(
            &shifted,
            nets,
            &hp,
            &normal_vec(&mut r, batch.batch * ACTION_DIM),
        )
        .unwrap();
        total -= d.log_probs.unwrap().iter().sum::<f64>() / batch.batch as f64;
    }
    total / rounds as f64
}

#[test]
fn entropy_bonus_never_lowers_policy_entropy() {
    let batch = random_batch(&mut rng(70), 32, 2);
    let critic = quadratic_critic(0.3, 71);
    let mut entropies = Vec::new();
    for alpha in [0.0, 0.2] {
        let mut r = rng(72);
        let mut nets = AgentNetworks::new(sizes(), ActorHead::Gaussian, &mut r);
        nets.critic1 = critic.clone();
        nets.critic2 = critic.clone();
        let hp = HyperparamsS {
            alpha,
            ..HyperparamsS::default()
        };
        let mut opt = AdamState::new(&nets.actor.params, 1e-3);
        for _ in 0..500 {
            let noise = normal_vec(&mut r, 32 * ACTION_DIM);
            actor_update_s(&batch, &mut nets, &hp, &mut opt, &noise).unwrap();
        }
        entropies.push(entropy_estimate(&nets, &batch, 73));
    }
    assert!(
        entropies[1] >= entropies[0],
        "alpha 0.2 entropy {} < alpha 0 entropy {}",
        entropies[1],
        entropies[0]
    );
}

#[test]
fn constant_critic_leaves_the_actor_unchanged() {
    let mut r = rng(80);
    let mut nets = AgentNetworks::new(sizes(), ActorHead::Deterministic, &mut r);
    // Zero output layer: Q ≡ bias.
    let last = nets.critic1.params.tensors().len() - 2;
    nets.critic1.params.tensors_mut()[last]
        .values_mut()
        .fill(0.0);
    let before = nets.actor.clone();
    let mut opt = AdamState::new(&nets.actor.params, 1e-3);
    actor_update_d(&random_batch(&mut r, 8, 2), &mut nets, &mut opt).unwrap();
    assert_eq!(nets.actor, before);
}

#[test]
fn warmup_actions_come_from_the_uniform_sampler() {
    let start_steps = 30;
    let mut r = rng(90);
    let mut agent = DocrlAgent::new(
        tiny_hyper_d(start_steps),
        sizes(),
        ContextMode::Window,
        &mut r,
    )
    .unwrap();
    agent.begin_episode();
    let obs = [0.25; OBS_DIM];
    let mut warm = Vec::new();
    for i in 0..start_steps + 10 {
        let mut probe = agent.clone();
        let mut pr = r.clone();
        let a = agent.act(&obs, &mut r).unwrap();
        if i < start_steps {
            // A uniform draw consumes exactly three values from the generator.
            let expect: Vec<f64> = (0..ACTION_DIM)
                .map(|_| pr.random_range(-1.0..=1.0))
                .collect();
            assert_eq!(a.to_vec(), expect);
            warm.extend(a);
        } else {
            let greedy = probe.act_greedy(&obs).unwrap();
            assert_ne!(a, greedy, "exploring policy action carries OU noise");
            assert!(!agent.in_warmup());
        }
        agent.observe(Transition {
            s: obs,
            a,
            r: 0.0,
            s_next: obs,
            term: false,
        });
    }
    assert!(warm.iter().all(|v| (-1.0..=1.0).contains(v)));
}

#[test]
fn identical_seeds_give_identical_updates() {
    let run = || {
        let mut r = rng(100);
        let mut agent =
            DocrlAgent::new(tiny_hyper_d(5), sizes(), ContextMode::Window, &mut r).unwrap();
        agent.begin_episode();
        let mut losses = Vec::new();
        let mut obs = [0.1; OBS_DIM];
        for i in 0..40 {
            let a = agent.act(&obs, &mut r).unwrap();
            let mut next = obs;
            next[i % OBS_DIM] = a[0].abs();
            agent.observe(Transition {
                s: obs,
                a,
                r: a[1],
                s_next: next,
                term: false,
            });
            if let Some(s) = agent.learn(&mut r).unwrap() {
                losses.push(s.critic_loss);
            }
            obs = next;
        }
        (losses, agent.nets)
    };
    assert_eq!(run(), run());
}

#[test]
fn ou_stationary_spread() {
    let mut ou = OuProcess::new(3, 0.15, 0.2, 0.0, 1.0);
    let mut r = rng(110);
    let n = 100_000;
    let mut sums = [0.0; 3];
    let mut sq = [0.0; 3];
    for _ in 0..1000 {
        ou.sample(&mut r);
    }
    for _ in 0..n {
        let x = ou.sample(&mut r).to_vec();
        for k in 0..3 {
            sums[k] += x[k];
            sq[k] += x[k] * x[k];
        }
    }
    let expect = 0.2 / (2.0f64 * 0.15).sqrt();
    for k in 0..3 {
        let mean = sums[k] / n as f64;
        let sd = (sq[k] / n as f64 - mean * mean).sqrt();
        assert!(
            (sd - expect).abs() < 0.1 * expect,
            "dim {k}: {sd} vs {expect}"
        );
    }
}
