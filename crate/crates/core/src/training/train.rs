use log::info;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{standardize_fit, Trial};
use crate::error::{Error, Result};
use crate::nn::{AdamConfig, AdamState, BackwardScratch, ForwardCache, ModelConfig, StanceModel, WindowView, CHANNELS};
use crate::training::dataset::build_dataset;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Samples between consecutive training windows.
    pub stride: usize,
    pub model: ModelConfig,
    pub adam: AdamConfig,
    /// Seeds initialization, shuffling and input noise.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 256,
            stride: 5,
            model: ModelConfig::default(),
            // ten epochs over stride-5 windows of a few minutes of gait is
            // under a thousand updates; 1e-3 leaves the recurrent model underfit
            adam: AdamConfig { lr: 1e-2, ..AdamConfig::default() },
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn with_window_len(mut self, window_len: usize) -> Self {
        self.model.window_len = window_len;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.stride == 0 {
            return Err(Error::InvalidArgument(format!(
                "epochs ({}), batch size ({}) and stride ({}) must all be at least 1",
                self.epochs, self.batch_size, self.stride
            )));
        }
        self.model.validate()?;
        self.adam.validate()
    }
}

/// Mean per-window training loss of one epoch (noisy forward passes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub mean_loss: f64,
    pub batches: usize,
}

#[derive(Debug, Clone)]
pub struct TrainedModel<T> {
    pub model: StanceModel<T>,
    pub epochs: Vec<EpochLog>,
    pub n_windows: usize,
}

/// Shuffled mini-batch ADAM on the squared alpha error, with fresh Gaussian
/// input noise for every window visit. Standardization statistics come from
/// `trials` only. Deterministic in `cfg.seed`.
pub fn train<T: Scalar>(trials: &[Trial], cfg: &TrainConfig) -> Result<TrainedModel<T>> {
    cfg.validate()?;
    if trials.is_empty() {
        return Err(Error::InvalidArgument("training needs at least one trial".into()));
    }
    let (mean, std) = standardize_fit(trials)?;
    let mut model = StanceModel::<T>::new(cfg.model, cfg.seed)?.with_standardization(&mean, &std)?;
    let data = build_dataset(trials, cfg.model.window_len, cfg.stride)?;
    if data.is_empty() {
        return Err(Error::InvalidArgument("no trial is long enough for a single window".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x005E_ED0F_7EA1);
    let mut adam = AdamState::<T>::new(cfg.adam, model.params.num_params());
    let mut grads = model.params.zeros_like();
    let mut scratch = BackwardScratch::new(&model);
    let mut cache = ForwardCache::default();
    let mut window = data.window_buffer::<T>();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epochs = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
            grads.fill(T::zero());
            let scale = T::one() / T::from_usize(batch.len()).unwrap();
            let mut batch_loss = 0.0;
            for &i in batch {
                data.window_into(i, &model, &mut window)?;
                let view = WindowView::new(&window, cfg.model.window_len, CHANNELS)?;
                let target = T::from_f64_lossy(data.pairs[i].target);
                let alpha = model.forward_into(&view, true, rng.gen(), &mut cache)?;
                let err = (alpha - target).to_f64_exact();
                batch_loss += err * err;
                model.accumulate_gradients(&cache, target, scale, &mut grads, &mut scratch);
            }
            if !batch_loss.is_finite() || !grads.is_finite() {
                return Err(Error::Diverged { epoch, batch: b });
            }
            adam.step_params(&mut model.params, &grads)?;
            if !model.params.is_finite() {
                return Err(Error::Diverged { epoch, batch: b });
            }
            loss_sum += batch_loss;
            batches += 1;
        }
        let mean_loss = loss_sum / data.len() as f64;
        info!("epoch {}/{}: mean training loss {mean_loss:.6}", epoch + 1, cfg.epochs);
        epochs.push(EpochLog {
            epoch: epoch + 1,
            mean_loss,
            batches,
        });
    }
    Ok(TrainedModel {
        model,
        epochs,
        n_windows: data.len(),
    })
}
