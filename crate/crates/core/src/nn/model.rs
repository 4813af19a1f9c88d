use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::lstm::{self, ForwardCache, LstmScratch};
use crate::nn::noise;
use crate::nn::params::{Gradients, Params, GATES};
use crate::nn::window::{WindowView, CHANNELS, WINDOW_LEN};
use crate::Scalar;

/// Dot product with eight independent partial sums, so the reduction is not
/// one serial dependency chain. The summation order is fixed.
#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] = acc[l] + x[l] * y[l];
        }
    }
    let mut tail = T::zero();
    for (&x, &y) in ra.iter().zip(rb) {
        tail = tail + x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Architecture and sampling configuration of a [`StanceModel`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelConfig {
    pub input_dim: usize,
    pub window_len: usize,
    pub lstm_units: usize,
    pub hidden_width: usize,
    pub sample_rate_hz: f64,
    /// Standard deviation of the training-time input corruption.
    pub noise_sigma: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            input_dim: CHANNELS,
            window_len: WINDOW_LEN,
            lstm_units: 20,
            hidden_width: 10,
            sample_rate_hz: 333.0,
            noise_sigma: 0.01,
        }
    }
}

impl ModelConfig {
    /// Instantaneous-posture variant: a single-row window.
    pub fn instantaneous() -> Self {
        Self {
            window_len: 1,
            ..Self::default()
        }
    }

    pub fn with_window_len(self, window_len: usize) -> Self {
        Self { window_len, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.window_len == 0 || self.lstm_units == 0 || self.hidden_width == 0 {
            return Err(Error::Config("model dimensions must be non-zero".into()));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::Config(format!("invalid sample rate {}", self.sample_rate_hz)));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config(format!("invalid noise sigma {}", self.noise_sigma)));
        }
        // multi-row windows must span 300 ms to within one sample period
        if self.window_len > 1 {
            let period = 1.0 / self.sample_rate_hz;
            let span = self.window_len as f64 * period;
            if (span - 0.3).abs() > period {
                return Err(Error::Config(format!(
                    "window of {} samples at {} Hz spans {:.4} s, expected 0.3 s",
                    self.window_len, self.sample_rate_hz, span
                )));
            }
        }
        Ok(())
    }
}

/// Learnable parameters plus the standardization statistics they were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct StanceModel<T> {
    pub config: ModelConfig,
    pub params: Params<T>,
    /// Per-channel mean in degrees.
    pub channel_mean: Vec<T>,
    /// Per-channel standard deviation in degrees, strictly positive.
    pub channel_std: Vec<T>,
}

impl<T: Scalar> StanceModel<T> {
    /// Freshly initialized model with identity standardization.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = Params::init(config.input_dim, config.lstm_units, config.hidden_width, &mut rng);
        Ok(Self {
            config,
            params,
            channel_mean: vec![T::zero(); config.input_dim],
            channel_std: vec![T::one(); config.input_dim],
        })
    }

    /// Model with every weight and bias set to zero.
    pub fn zeroed(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            params: Params::zeros(config.input_dim, config.lstm_units, config.hidden_width),
            channel_mean: vec![T::zero(); config.input_dim],
            channel_std: vec![T::one(); config.input_dim],
        })
    }

    pub fn with_standardization(mut self, mean: &[f64], std: &[f64]) -> Result<Self> {
        if mean.len() != self.config.input_dim || std.len() != self.config.input_dim {
            return Err(Error::Config("standardization statistics have the wrong length".into()));
        }
        self.channel_mean = mean.iter().map(|&v| T::from_f64_lossy(v)).collect();
        self.channel_std = std.iter().map(|&v| T::from_f64_lossy(v)).collect();
        self.validate()?;
        Ok(self)
    }

    pub fn window_len(&self) -> usize {
        self.config.window_len
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.params.validate()?;
        let c = &self.config;
        if self.params.lstm.input_dim != c.input_dim
            || self.params.lstm.units != c.lstm_units
            || self.params.hidden.n_out != c.hidden_width
        {
            return Err(Error::Config("parameter shapes disagree with the model config".into()));
        }
        if self.channel_mean.len() != c.input_dim || self.channel_std.len() != c.input_dim {
            return Err(Error::Config("standardization statistics have the wrong length".into()));
        }
        if self.channel_mean.iter().any(|m| !m.is_finite())
            || self.channel_std.iter().any(|s| !(s.is_finite() && *s > T::zero()))
        {
            return Err(Error::Config("channel std must be finite and strictly positive".into()));
        }
        if !self.params.is_finite() {
            return Err(Error::Config("parameters contain non-finite values".into()));
        }
        Ok(())
    }

    /// Z-scores one raw sample (degrees) into `out`.
    #[inline]
    pub fn standardize_into(&self, raw: &[f64], out: &mut [T]) {
        for (((o, &r), &m), &s) in out.iter_mut().zip(raw).zip(&self.channel_mean).zip(&self.channel_std) {
            *o = (T::from_f64_lossy(r) - m) / s;
        }
    }

    fn check_window(&self, x: &WindowView<'_, T>) -> Result<()> {
        if x.rows() != self.config.window_len || x.cols() != self.config.input_dim {
            return Err(Error::Config(format!(
                "window shape ({}, {}) does not match model ({}, {})",
                x.rows(),
                x.cols(),
                self.config.window_len,
                self.config.input_dim
            )));
        }
        Ok(())
    }

    /// Full forward pass with cache. With `training` set, the input is first
    /// corrupted with Gaussian noise drawn from `seed`.
    pub fn forward(&self, x: &WindowView<'_, T>, training: bool, seed: u64) -> Result<(T, ForwardCache<T>)> {
        let mut cache = ForwardCache::default();
        let alpha = self.forward_into(x, training, seed, &mut cache)?;
        Ok((alpha, cache))
    }

    /// As [`forward`](Self::forward), reusing an existing cache's allocations.
    pub fn forward_into(
        &self,
        x: &WindowView<'_, T>,
        training: bool,
        seed: u64,
        cache: &mut ForwardCache<T>,
    ) -> Result<T> {
        self.check_window(x)?;
        lstm::check_input(x, &self.params.lstm)?;
        if !x.is_finite() {
            return Err(Error::DataIntegrity("window contains non-finite values".into()));
        }
        let c = &self.config;
        cache.resize(x.rows(), c.input_dim, c.lstm_units, c.hidden_width);
        cache.input.copy_from_slice(x.as_slice());
        cache.noised = training && c.noise_sigma > 0.0;
        if cache.noised {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            noise::add_gaussian(&mut cache.input, c.noise_sigma, &mut rng)?;
        }
        lstm::forward_cached(&self.params.lstm, cache);
        let h_final = &cache.hidden[(cache.steps - 1) * c.lstm_units..];
        self.params
            .hidden
            .forward_into(h_final, Some(&mut cache.dense_pre), &mut cache.dense_act);
        let mut pre = [T::zero()];
        let mut out = [T::zero()];
        self.params
            .output
            .forward_into(&cache.dense_act, Some(&mut pre), &mut out);
        cache.out_pre = pre[0];
        cache.alpha = out[0];
        Ok(out[0])
    }

    /// Inference-mode prediction; allocates a fresh workspace.
    pub fn predict(&self, x: &WindowView<'_, T>) -> Result<T> {
        self.check_window(x)?;
        lstm::check_input(x, &self.params.lstm)?;
        let mut ws = Workspace::new(self);
        Ok(self.predict_with(x, &mut ws))
    }

    /// Inference-mode prediction without heap allocation. The window shape must
    /// already match the model.
    #[inline]
    pub fn predict_with(&self, x: &WindowView<'_, T>, ws: &mut Workspace<T>) -> T {
        debug_assert_eq!(x.rows(), self.config.window_len);
        let h = ws.lstm.run(&self.params.lstm, x);
        self.params.hidden.forward_into(h, None, &mut ws.dense);
        let mut out = [T::zero()];
        self.params.output.forward_into(&ws.dense, None, &mut out);
        out[0]
    }

    /// Gradient of `(alpha_hat - target)^2` w.r.t. every learnable parameter.
    pub fn backward(&self, cache: &ForwardCache<T>, x: &WindowView<'_, T>, target: T) -> Result<Gradients<T>> {
        self.check_cache(cache, x)?;
        let mut grads = self.params.zeros_like();
        let mut scratch = BackwardScratch::new(self);
        self.accumulate_gradients(cache, target, T::one(), &mut grads, &mut scratch);
        Ok(grads)
    }

    fn check_cache(&self, cache: &ForwardCache<T>, x: &WindowView<'_, T>) -> Result<()> {
        let c = &self.config;
        if cache.steps != x.rows()
            || cache.input_dim != x.cols()
            || cache.units != c.lstm_units
            || cache.dense_act.len() != c.hidden_width
            || cache.steps != c.window_len
        {
            return Err(Error::InvalidState(
                "forward cache was not produced by this model on this window".into(),
            ));
        }
        if !cache.noised && cache.input.as_slice() != x.as_slice() {
            return Err(Error::InvalidState("forward cache input differs from the given window".into()));
        }
        Ok(())
    }

    /// Adds `scale * d(alpha_hat - target)^2 / d(params)` into `grads`.
    pub(crate) fn accumulate_gradients(
        &self,
        cache: &ForwardCache<T>,
        target: T,
        scale: T,
        grads: &mut Gradients<T>,
        s: &mut BackwardScratch<T>,
    ) {
        let n = self.config.lstm_units;
        let width = GATES * n;
        let d = self.config.input_dim;
        let hw = self.config.hidden_width;
        let p = &self.params;
        let one = T::one();

        let y = cache.alpha;
        let d_out = scale * T::two() * (y - target) * y * (one - y);

        // output layer
        for k in 0..hw {
            grads.output.weight[k] = grads.output.weight[k] + cache.dense_act[k] * d_out;
        }
        grads.output.bias[0] = grads.output.bias[0] + d_out;

        // hidden dense layer
        for k in 0..hw {
            let a = cache.dense_act[k];
            s.d_dense[k] = p.output.weight[k] * d_out * a * (one - a);
        }
        let h_final = cache.hidden(cache.steps - 1);
        for k in 0..n {
            let row = &mut grads.hidden.weight[k * hw..(k + 1) * hw];
            let hk = h_final[k];
            for (g, &dd) in row.iter_mut().zip(&s.d_dense) {
                *g = *g + hk * dd;
            }
            let wrow = &p.hidden.weight[k * hw..(k + 1) * hw];
            s.dh[k] = dot(wrow, &s.d_dense);
        }
        for (g, &dd) in grads.hidden.bias.iter_mut().zip(&s.d_dense) {
            *g = *g + dd;
        }

        // backpropagation through time
        s.dc.iter_mut().for_each(|v| *v = T::zero());
        for t in (0..cache.steps).rev() {
            let gates = cache.gates(t);
            let (i, rest) = gates.split_at(n);
            let (f, rest) = rest.split_at(n);
            let (g, o) = rest.split_at(n);
            let tc = cache.cell_tanh(t);
            for u in 0..n {
                let dh = s.dh[u];
                let c_prev = if t == 0 { T::zero() } else { cache.cells[(t - 1) * n + u] };
                let d_o = dh * tc[u] * o[u] * (one - o[u]);
                let dc = s.dc[u] + dh * o[u] * (one - tc[u] * tc[u]);
                let d_i = dc * g[u] * i[u] * (one - i[u]);
                let d_g = dc * i[u] * (one - g[u] * g[u]);
                let d_f = dc * c_prev * f[u] * (one - f[u]);
                s.dz[u] = d_i;
                s.dz[n + u] = d_f;
                s.dz[2 * n + u] = d_g;
                s.dz[3 * n + u] = d_o;
                s.dc[u] = dc * f[u];
            }
            let x = &cache.input[t * d..(t + 1) * d];
            for (k, &xk) in x.iter().enumerate() {
                let row = &mut grads.lstm.kernel[k * width..(k + 1) * width];
                for (gr, &dz) in row.iter_mut().zip(&s.dz) {
                    *gr = *gr + xk * dz;
                }
            }
            for (gr, &dz) in grads.lstm.bias.iter_mut().zip(&s.dz) {
                *gr = *gr + dz;
            }
            if t > 0 {
                let h_prev = cache.hidden(t - 1);
                for k in 0..n {
                    let hk = h_prev[k];
                    let row = &mut grads.lstm.recurrent[k * width..(k + 1) * width];
                    for (gr, &dz) in row.iter_mut().zip(&s.dz) {
                        *gr = *gr + hk * dz;
                    }
                    let urow = &p.lstm.recurrent[k * width..(k + 1) * width];
                    s.dh[k] = dot(urow, &s.dz);
                }
            }
        }
    }
}

/// Reusable buffers for allocation-free inference.
#[derive(Debug, Clone)]
pub struct Workspace<T> {
    lstm: LstmScratch<T>,
    dense: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    pub fn new(model: &StanceModel<T>) -> Self {
        Self {
            lstm: LstmScratch::new(model.config.lstm_units),
            dense: vec![T::zero(); model.config.hidden_width],
        }
    }
}

/// Reusable buffers for backpropagation.
#[derive(Debug, Clone)]
pub struct BackwardScratch<T> {
    d_dense: Vec<T>,
    dh: Vec<T>,
    dc: Vec<T>,
    dz: Vec<T>,
}

impl<T: Scalar> BackwardScratch<T> {
    pub fn new(model: &StanceModel<T>) -> Self {
        let n = model.config.lstm_units;
        Self {
            d_dense: vec![T::zero(); model.config.hidden_width],
            dh: vec![T::zero(); n],
            dc: vec![T::zero(); n],
            dz: vec![T::zero(); GATES * n],
        }
    }
}

/// Forward pass as a free function.
pub fn model_forward<T: Scalar>(
    x: &WindowView<'_, T>,
    model: &StanceModel<T>,
    training: bool,
    seed: u64,
) -> Result<(T, ForwardCache<T>)> {
    model.forward(x, training, seed)
}

/// Backward pass as a free function.
pub fn model_backward<T: Scalar>(
    cache: &ForwardCache<T>,
    x: &WindowView<'_, T>,
    model: &StanceModel<T>,
    target: T,
) -> Result<Gradients<T>> {
    model.backward(cache, x, target)
}
