use rand::Rng;
use rand_distr::StandardNormal;

/// Discretised Ornstein-Uhlenbeck process, one independent coordinate per
/// dimension: `x ← x + θ(μ − x)dt + σ√dt·ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuProcess {
    pub theta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub dt: f64,
    pub x: Vec<f64>,
}

impl OuProcess {
    pub fn new(dim: usize, theta: f64, sigma: f64, mu: f64, dt: f64) -> Self {
        assert!(
            theta > 0.0 && sigma >= 0.0 && dt > 0.0,
            "invalid OU parameters"
        );
        Self {
            theta,
            sigma,
            mu,
            dt,
            x: vec![mu; dim],
        }
    }

    /// Exploration noise on the three action channels.
    pub fn exploration() -> Self {
        Self::new(3, 0.15, 0.2, 0.0, 1.0)
    }

    pub fn reset(&mut self) {
        let mu = self.mu;
        self.x.iter_mut().for_each(|v| *v = mu);
    }

    /// Advances with caller-supplied standard normal draws.
    pub fn step(&mut self, gaussian_draw: &[f64]) -> &[f64] {
        debug_assert_eq!(gaussian_draw.len(), self.x.len());
        let diffusion = self.sigma * self.dt.sqrt();
        for (x, &xi) in self.x.iter_mut().zip(gaussian_draw) {
            *x += self.theta * (self.mu - *x) * self.dt + diffusion * xi;
        }
        &self.x
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[f64] {
        let draws: Vec<f64> = (0..self.x.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        self.step(&draws)
    }

    /// Stationary standard deviation of the continuous-time process.
    pub fn stationary_std(&self) -> f64 {
        self.sigma / (2.0 * self.theta).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_decay() {
        let mut p = OuProcess::new(1, 1.0, 0.0, 0.0, 0.1);
        p.x[0] = 1.0;
        p.step(&[0.7]);
        assert!((p.x[0] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn mean_is_a_fixed_point_without_diffusion() {
        let mut p = OuProcess::new(3, 0.4, 0.0, 0.25, 0.2);
        p.step(&[1.0, -1.0, 2.0]);
        assert_eq!(p.x, vec![0.25; 3]);
    }

    #[test]
    fn reset_returns_to_mean() {
        let mut p = OuProcess::exploration();
        p.step(&[1.0, 2.0, 3.0]);
        p.reset();
        assert_eq!(p.x, vec![0.0; 3]);
    }
}
