use crate::data::trial::Trial;
use crate::error::{Error, Result};
use crate::nn::CHANNELS;

/// Lower bound applied to every fitted channel standard deviation.
pub const STD_FLOOR: f64 = 1e-6;

/// Per-channel mean and population standard deviation over all samples of all trials.
pub fn standardize_fit(trials: &[Trial]) -> Result<([f64; CHANNELS], [f64; CHANNELS])> {
    let n: usize = trials.iter().map(Trial::len).sum();
    if trials.is_empty() || n < 100 {
        return Err(Error::InvalidArgument(format!(
            "standardization needs at least one trial and 100 samples, got {} trials / {n} samples",
            trials.len()
        )));
    }
    let samples = || trials.iter().flat_map(|t| t.kinematics.iter());
    let mut mean = [0.0; CHANNELS];
    for s in samples() {
        for (m, v) in mean.iter_mut().zip(s.theta) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = [0.0; CHANNELS];
    for s in samples() {
        for ((acc, v), m) in var.iter_mut().zip(s.theta).zip(mean) {
            *acc += (v - m) * (v - m);
        }
    }
    let std = var.map(|v| (v / n as f64).sqrt().max(STD_FLOOR));
    Ok((mean, std))
}
