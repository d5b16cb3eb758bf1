#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tanknav_core::agents::SequenceBatch;
use tanknav_core::nn::NetworkParams;
use tanknav_core::{ACTION_DIM, OBS_DIM};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn normal_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// A synthetic batch with observations in `[0, 1]`, actions in `[−1, 1]`,
/// rewards in `[−10, 100]` and roughly one terminal in five.
pub fn random_batch<R: Rng>(rng: &mut R, batch: usize, seq_len: usize) -> SequenceBatch {
    SequenceBatch {
        batch,
        seq_len,
        obs: uniform_vec(rng, batch * seq_len * OBS_DIM, 0.0, 1.0),
        next_obs: uniform_vec(rng, batch * seq_len * OBS_DIM, 0.0, 1.0),
        actions: uniform_vec(rng, batch * ACTION_DIM, -1.0, 1.0),
        rewards: uniform_vec(rng, batch, -10.0, 100.0),
        terms: (0..batch)
            .map(|_| if rng.random_bool(0.2) { 1.0 } else { 0.0 })
            .collect(),
        indices: (0..batch).collect(),
    }
}

/// Central finite-difference gradient of `f` with respect to every scalar in `params`.
pub fn numeric_grad(
    params: &mut NetworkParams,
    h: f64,
    mut f: impl FnMut(&NetworkParams) -> f64,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for ti in 0..params.len() {
        let n = params.tensors()[ti].len();
        let mut g = vec![0.0; n];
        for (i, gi) in g.iter_mut().enumerate() {
            let orig = params.tensors()[ti].values()[i];
            params.tensors_mut()[ti].values_mut()[i] = orig + h;
            let up = f(params);
            params.tensors_mut()[ti].values_mut()[i] = orig - h;
            let down = f(params);
            params.tensors_mut()[ti].values_mut()[i] = orig;
            *gi = (up - down) / (2.0 * h);
        }
        out.push(g);
    }
    out
}

/// Worst per-tensor relative error `‖a − n‖ / max(‖a‖, ‖n‖)`.
pub fn relative_error(analytic: &[Vec<f64>], numeric: &[Vec<f64>]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| {
            assert_eq!(a.len(), n.len());
            let diff: f64 = a
                .iter()
                .zip(n)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nn: f64 = n.iter().map(|x| x * x).sum::<f64>().sqrt();
            let scale = na.max(nn);
            if scale == 0.0 {
                0.0
            } else {
                diff / scale
            }
        })
        .fold(0.0, f64::max)
}
