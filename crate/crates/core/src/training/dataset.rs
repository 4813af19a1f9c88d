use log::warn;

use crate::data::Trial;
use crate::error::{Error, Result};
use crate::nn::{StanceModel, CHANNELS};
use crate::Scalar;

/// One training pair: the window ending at `index` of trial `trial` and the
/// ground-truth alpha at that same sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowRef {
    pub trial: usize,
    pub index: usize,
    pub target: f64,
}

/// Window/target pairs over a set of trials. Windows are extracted on demand.
#[derive(Debug, Clone)]
pub struct Dataset<'a> {
    pub trials: &'a [Trial],
    pub window_len: usize,
    pub pairs: Vec<WindowRef>,
    /// Trials too short to hold a single window.
    pub skipped_trials: usize,
}

impl<'a> Dataset<'a> {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.target).collect()
    }

    /// Writes the standardized window of pair `i` into `out`.
    pub fn window_into<T: Scalar>(&self, i: usize, model: &StanceModel<T>, out: &mut [T]) -> Result<()> {
        let p = self.pairs[i];
        self.trials[p.trial].window_into(p.index, model, out)
    }

    pub fn window_buffer<T: Scalar>(&self) -> Vec<T> {
        vec![T::zero(); self.window_len * CHANNELS]
    }
}

/// Pairs every `stride`-th window end (starting at the first full window) with
/// its current-time alpha. Windows never cross trial boundaries.
pub fn build_dataset(trials: &[Trial], window_len: usize, stride: usize) -> Result<Dataset<'_>> {
    if window_len == 0 || stride == 0 {
        return Err(Error::InvalidArgument("window length and stride must be at least 1".into()));
    }
    let mut pairs = Vec::new();
    let mut skipped_trials = 0;
    for (ti, trial) in trials.iter().enumerate() {
        if trial.len() < window_len {
            warn!(
                "trial {} ({}) has {} samples, shorter than the {window_len}-sample window; skipped",
                trial.user_id,
                trial.condition,
                trial.len()
            );
            skipped_trials += 1;
            continue;
        }
        if trial.alpha.len() != trial.len() {
            return Err(Error::InvalidState(format!("trial {} has no alpha series", trial.user_id)));
        }
        pairs.extend((window_len - 1..trial.len()).step_by(stride).map(|index| WindowRef {
            trial: ti,
            index,
            target: trial.alpha.alpha[index],
        }));
    }
    Ok(Dataset {
        trials,
        window_len,
        pairs,
        skipped_trials,
    })
}
