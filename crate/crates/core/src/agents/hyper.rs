use crate::error::{Error, Result};

/// Settings for the deterministic double-critic agent.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparamsD {
    pub gamma: f64,
    pub tau: f64,
    /// Std of the target-policy smoothing noise.
    pub target_noise_std: f64,
    pub noise_clip: f64,
    pub start_steps: u64,
    pub batch_size: usize,
    pub max_steps: u64,
    pub max_eps: u64,
    pub seq_len: usize,
    pub lr: f64,
    pub buffer_capacity: usize,
}

/// Settings for the stochastic double-critic agent.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparamsS {
    pub gamma: f64,
    pub tau: f64,
    pub alpha: f64,
    pub start_steps: u64,
    pub batch_size: usize,
    pub max_steps: u64,
    pub max_eps: u64,
    pub seq_len: usize,
    pub lr: f64,
    pub buffer_capacity: usize,
}

impl Default for HyperparamsD {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 0.005,
            target_noise_std: 0.2,
            noise_clip: 0.5,
            start_steps: 1000,
            batch_size: 256,
            max_steps: 500,
            max_eps: 1500,
            seq_len: 4,
            lr: 1e-3,
            buffer_capacity: 100_000,
        }
    }
}

impl Default for HyperparamsS {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 0.005,
            alpha: 0.2,
            start_steps: 1000,
            batch_size: 256,
            max_steps: 500,
            max_eps: 1500,
            seq_len: 4,
            lr: 1e-3,
            buffer_capacity: 100_000,
        }
    }
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(what.to_string()))
    }
}

fn check_common(
    gamma: f64,
    tau: f64,
    batch: usize,
    max_steps: u64,
    max_eps: u64,
    seq_len: usize,
    lr: f64,
    cap: usize,
) -> Result<()> {
    check(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)")?;
    check(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]")?;
    check(batch > 0, "batch_size must be positive")?;
    check(max_steps > 0, "max_steps must be positive")?;
    check(max_eps > 0, "max_eps must be positive")?;
    check(seq_len > 0, "seq_len must be positive")?;
    check(lr > 0.0 && lr.is_finite(), "lr must be positive")?;
    check(cap >= batch, "buffer_capacity must hold at least one batch")
}

impl HyperparamsD {
    pub fn validate(&self) -> Result<()> {
        check_common(
            self.gamma,
            self.tau,
            self.batch_size,
            self.max_steps,
            self.max_eps,
            self.seq_len,
            self.lr,
            self.buffer_capacity,
        )?;
        check(
            self.target_noise_std >= 0.0,
            "target_noise_std must be non-negative",
        )?;
        check(self.noise_clip >= 0.0, "noise_clip must be non-negative")
    }
}

impl HyperparamsS {
    pub fn validate(&self) -> Result<()> {
        check_common(
            self.gamma,
            self.tau,
            self.batch_size,
            self.max_steps,
            self.max_eps,
            self.seq_len,
            self.lr,
            self.buffer_capacity,
        )?;
        check(self.alpha >= 0.0, "alpha must be non-negative")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        HyperparamsD::default().validate().unwrap();
        HyperparamsS::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let hp = HyperparamsD {
            gamma: 1.0,
            ..Default::default()
        };
        assert!(hp.validate().is_err());
        let hp = HyperparamsD {
            noise_clip: -0.1,
            ..Default::default()
        };
        assert!(hp.validate().is_err());
        let hp = HyperparamsS {
            alpha: -1.0,
            ..Default::default()
        };
        assert!(hp.validate().is_err());
    }
}
