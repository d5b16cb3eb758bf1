/// Delayed-update period at within-episode step `t`: the integer part of
/// `1 / (0.5 − t / (3·max_steps))`.
///
/// Evaluated as the exact rational `6·max_steps / (3·max_steps − 2t)`; the
/// floating-point form truncates 2.999… to 2 at `t = max_steps / 2`.
/// Steps past `max_steps` use the `t = max_steps` value.
pub fn policy_freq_at(t: u64, max_steps: u64) -> u64 {
    let max_steps = max_steps.max(1);
    let t = t.min(max_steps);
    (6 * max_steps) / (3 * max_steps - 2 * t)
}

/// Whether the actor and targets update at step `t`.
pub fn is_policy_step(t: u64, max_steps: u64) -> bool {
    t.is_multiple_of(policy_freq_at(t, max_steps))
}
