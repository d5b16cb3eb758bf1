//! Tanh-squashed diagonal Gaussian policy head.

use crate::error::{Error, Result};
use crate::nn::tape::{Tape, Var};
use crate::nn::tensor::Tensor;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
pub const SQUASH_EPS: f64 = 1e-6;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Reparameterised sample on a tape. `mean` and `log_std` are `B × d`,
/// `noise` a constant of the same shape. Returns the squashed action
/// (`B × d`) and the per-row log-probability (`B × 1`).
pub fn squashed_sample_on_tape(
    tape: &mut Tape,
    mean: Var,
    log_std: Var,
    noise: Var,
) -> Result<(Var, Var)> {
    let (rows, cols) = tape.dims(mean);
    if tape.dims(log_std) != (rows, cols) || tape.dims(noise) != (rows, cols) {
        return Err(Error::shape(
            "squashed_gaussian_sample",
            format!(
                "mean {:?}, log_std {:?}, noise {:?}",
                tape.dims(mean),
                tape.dims(log_std),
                tape.dims(noise)
            ),
        ));
    }
    let log_std = tape.clamp(log_std, LOG_STD_MIN, LOG_STD_MAX)?;
    let std = tape.exp(log_std)?;
    let spread = tape.mul(std, noise)?;
    let u = tape.add(mean, spread)?;
    let action = tape.tanh(u)?;

    // Gaussian density of u written in terms of the standardised noise:
    // −½ε² − log σ − ½ln 2π per dimension.
    let eps_sq: Vec<f64> = tape
        .value(noise)
        .iter()
        .map(|e| -0.5 * e * e - HALF_LN_TWO_PI)
        .collect();
    let base = tape.constant(rows, cols, eps_sq)?;
    let gauss = tape.sub(base, log_std)?;
    let correction = tape.squash_correction(u, SQUASH_EPS)?;
    let per_dim = tape.sub(gauss, correction)?;
    let log_prob = tape.sum_rows(per_dim)?;
    Ok((action, log_prob))
}

/// Single-sample version: returns `tanh(mean + exp(log_std)·noise)` and its log-density.
pub fn squashed_gaussian_sample(
    mean: &Tensor,
    log_std: &Tensor,
    noise: &Tensor,
) -> Result<(Tensor, f64)> {
    if mean.len() != log_std.len() || mean.len() != noise.len() {
        return Err(Error::shape(
            "squashed_gaussian_sample",
            format!("lengths {}, {}, {}", mean.len(), log_std.len(), noise.len()),
        ));
    }
    let all = mean
        .values()
        .iter()
        .chain(log_std.values())
        .chain(noise.values());
    if all.clone().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("squashed_gaussian_sample"));
    }
    let d = mean.len();
    let mut tape = Tape::new();
    let m = tape.constant(1, d, mean.values().to_vec())?;
    let s = tape.constant(1, d, log_std.values().to_vec())?;
    let n = tape.constant(1, d, noise.values().to_vec())?;
    let (a, lp) = squashed_sample_on_tape(&mut tape, m, s, n)?;
    Ok((
        Tensor::new(&[d], tape.value(a).to_vec())?,
        tape.value(lp)[0],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[f64]) -> Tensor {
        Tensor::new(&[v.len()], v.to_vec()).unwrap()
    }

    #[test]
    fn standard_normal_at_mean() {
        let (a, lp) =
            squashed_gaussian_sample(&t(&[0.0, 0.0]), &t(&[0.0, 0.0]), &t(&[0.0, 0.0])).unwrap();
        assert_eq!(a.values(), &[0.0, 0.0]);
        let expect =
            2.0 * (-0.5 * (2.0 * std::f64::consts::PI).ln()) - 2.0 * (1.0 + SQUASH_EPS).ln();
        assert!((lp - expect).abs() < 1e-12);
    }

    #[test]
    fn deterministic_limit() {
        let (a, lp) = squashed_gaussian_sample(&t(&[0.0]), &t(&[-25.0]), &t(&[0.0])).unwrap();
        assert_eq!(a.values(), &[0.0]);
        // log_std is clamped to -20: peak density of N(0, e^-20).
        let expect = 20.0 - 0.5 * (2.0 * std::f64::consts::PI).ln() - (1.0 + SQUASH_EPS).ln();
        assert!((lp - expect).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_finite_and_mismatch() {
        assert!(squashed_gaussian_sample(&t(&[f64::NAN]), &t(&[0.0]), &t(&[0.0])).is_err());
        assert!(squashed_gaussian_sample(&t(&[0.0]), &t(&[0.0, 1.0]), &t(&[0.0])).is_err());
    }

    #[test]
    fn density_integrates_to_one() {
        // Change of variables: p(a) = N(atanh a; μ, σ) / (1 − a²). The correction
        // epsilon makes the log-density slightly too small, bounded by 1e-6/(1-a²).
        let (mean, log_std) = (0.3, -0.4f64);
        let n = 100_000;
        let h = 2.0 / n as f64;
        let mut total = 0.0;
        for k in 0..n {
            let a: f64 = -1.0 + (k as f64 + 0.5) * h;
            let u = a.atanh();
            let noise = (u - mean) / log_std.exp();
            let (_, lp) =
                squashed_gaussian_sample(&t(&[mean]), &t(&[log_std]), &t(&[noise])).unwrap();
            total += lp.exp() * h;
        }
        assert!((total - 1.0).abs() < 1e-2, "integral {total}");
    }
}
