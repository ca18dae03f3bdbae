//! First-order adaptive-moment optimizer with per-parameter learning rates.

/// Moment coefficients and epsilon; defaults (0.9, 0.999, 1e-8).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam state over a flat parameter vector. Parameter groups are expressed
/// through the per-parameter learning-rate vector.
pub struct Adam {
    lr: Vec<f64>,
    cfg: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(lr: Vec<f64>, cfg: AdamConfig) -> Self {
        let n = lr.len();
        Adam {
            lr,
            cfg,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn uniform(n: usize, lr: f64, cfg: AdamConfig) -> Self {
        Self::new(vec![lr; n], cfg)
    }

    /// One bias-corrected update step in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.lr.len());
        assert_eq!(grad.len(), self.lr.len());
        self.t += 1;
        let b1t = 1.0 - self.cfg.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.cfg.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.cfg.beta1 * self.m[i] + (1.0 - self.cfg.beta1) * grad[i];
            self.v[i] = self.cfg.beta2 * self.v[i] + (1.0 - self.cfg.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / b1t;
            let v_hat = self.v[i] / b2t;
            params[i] -= self.lr[i] * m_hat / (v_hat.sqrt() + self.cfg.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_a_quadratic() {
        let mut p = vec![5.0, -3.0];
        let mut adam = Adam::uniform(2, 0.05, AdamConfig::default());
        for _ in 0..2000 {
            let g = vec![2.0 * p[0], 2.0 * (p[1] + 1.0)];
            adam.step(&mut p, &g);
        }
        assert!(p[0].abs() < 1e-3);
        assert!((p[1] + 1.0).abs() < 1e-3);
    }

    #[test]
    fn per_parameter_rates_scale_the_steps() {
        let mut p = vec![1.0, 1.0];
        let mut adam = Adam::new(vec![1e-2, 1e-4], AdamConfig::default());
        let g = vec![1.0, 1.0];
        adam.step(&mut p, &g);
        // First step moves each parameter by its own lr.
        assert!(((1.0 - p[0]) - 1e-2).abs() < 1e-9);
        assert!(((1.0 - p[1]) - 1e-4).abs() < 1e-9);
    }
}
