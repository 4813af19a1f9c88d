use crate::error::{Error, Result};
use crate::nn::params::Params;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if !ok {
            return Err(Error::Config(format!("invalid ADAM hyperparameters {self:?}")));
        }
        Ok(())
    }
}

/// First/second moment buffers and step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    pub t: u64,
    pub m: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(config: AdamConfig, num_params: usize) -> Self {
        Self {
            config,
            t: 0,
            m: vec![T::zero(); num_params],
            v: vec![T::zero(); num_params],
        }
    }

    /// Applies one bias-corrected update to every tensor of `params`.
    pub fn step_params(&mut self, params: &mut Params<T>, grads: &Params<T>) -> Result<()> {
        if params.num_params() != self.m.len() || grads.num_params() != self.m.len() {
            return Err(Error::Config(format!(
                "ADAM state holds {} moments, parameters have {}",
                self.m.len(),
                params.num_params()
            )));
        }
        let (lr_t, b1, b2, eps) = self.begin_step();
        let mut off = 0;
        for (p, g) in params.tensors_mut().into_iter().zip(grads.tensors()) {
            let end = off + p.len();
            update(p, g, &mut self.m[off..end], &mut self.v[off..end], lr_t, b1, b2, eps);
            off = end;
        }
        Ok(())
    }

    /// Increments `t` and returns `(bias-corrected lr, beta1, beta2, eps)`.
    fn begin_step(&mut self) -> (T, T, T, T) {
        self.t += 1;
        let c = &self.config;
        let t = self.t as i32;
        let lr_t = c.lr * (1.0 - c.beta2.powi(t)).sqrt() / (1.0 - c.beta1.powi(t));
        // eps is scaled to match the uncorrected formulation: lr*m_hat/(sqrt(v_hat)+eps)
        let eps_hat = c.eps * (1.0 - c.beta2.powi(t)).sqrt();
        (
            T::from_f64_lossy(lr_t),
            T::from_f64_lossy(c.beta1),
            T::from_f64_lossy(c.beta2),
            T::from_f64_lossy(eps_hat),
        )
    }
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn update<T: Scalar>(p: &mut [T], g: &[T], m: &mut [T], v: &mut [T], lr_t: T, b1: T, b2: T, eps: T) {
    let one = T::one();
    for i in 0..p.len() {
        let gi = g[i];
        m[i] = b1 * m[i] + (one - b1) * gi;
        v[i] = b2 * v[i] + (one - b2) * gi * gi;
        p[i] = p[i] - lr_t * m[i] / (v[i].sqrt() + eps);
    }
}

/// One bias-corrected ADAM update on flat slices.
pub fn adam_step<T: Scalar>(params: &mut [T], grads: &[T], state: &mut AdamState<T>) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::Config(format!(
            "ADAM shape mismatch: {} params, {} grads, {} moments",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    let (lr_t, b1, b2, eps) = state.begin_step();
    update(params, grads, &mut state.m, &mut state.v, lr_t, b1, b2, eps);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = vec![1.0, -2.0, 3.5];
        let mut s = AdamState::new(AdamConfig::default(), 3);
        adam_step(&mut p, &[0.0; 3], &mut s).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 3.5]);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let cfg = AdamConfig::default();
        for g in [0.05, -0.5, 7.0, -300.0] {
            let mut p = vec![0.0];
            let mut s = AdamState::new(cfg, 1);
            adam_step(&mut p, &[g], &mut s).unwrap();
            let expected = -cfg.lr * f64::signum(g);
            assert!((p[0] - expected).abs() <= cfg.lr * 1e-6, "g={g}: moved {}", p[0]);
        }
    }

    #[test]
    fn converges_on_scalar_quadratic() {
        // direct iteration of w <- adam(w, 2(w-3))
        let mut w = vec![0.0f64];
        let mut s = AdamState::new(AdamConfig { lr: 0.1, ..AdamConfig::default() }, 1);
        for _ in 0..100 {
            let g = 2.0 * (w[0] - 3.0);
            adam_step(&mut w, &[g], &mut s).unwrap();
        }
        assert!((w[0] - 3.0).abs() < 0.5, "w = {}", w[0]);
    }

    #[test]
    fn second_moment_stays_non_negative() {
        let mut p = vec![0.3; 4];
        let mut s = AdamState::new(AdamConfig::default(), 4);
        for k in 0..20 {
            let g: Vec<f64> = (0..4).map(|i| ((i + k) as f64).sin()).collect();
            adam_step(&mut p, &g, &mut s).unwrap();
        }
        assert!(s.v.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut s = AdamState::new(AdamConfig::default(), 2);
        assert!(matches!(adam_step(&mut [0.0; 3], &[0.0; 3], &mut s), Err(Error::Config(_))));
    }
}
