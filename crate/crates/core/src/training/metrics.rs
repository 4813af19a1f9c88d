use std::collections::BTreeMap;

use crate::data::Trial;
use crate::error::{Error, Result};
use crate::nn::{mse_loss, StanceModel, Workspace, WindowView, CHANNELS};
use crate::Scalar;

/// Coefficient of determination `1 - SS_res / SS_tot`, with `SS_tot` about the
/// mean of `actual`. Negative values are possible.
pub fn r_squared(pred: &[f64], actual: &[f64]) -> Result<f64> {
    if pred.len() != actual.len() || actual.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "r2 needs equal series of length >= 2, got {} and {}",
            pred.len(),
            actual.len()
        )));
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric("r2 is undefined for a constant target".into()));
    }
    let ss_res: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Anything that produces alpha-hat for the window ending at a trial sample.
pub trait AlphaPredictor {
    fn window_len(&self) -> usize;

    fn predict_at(&mut self, trial: &Trial, index: usize) -> Result<f64>;
}

/// Inference-mode wrapper around a [`StanceModel`] with reusable buffers.
pub struct ModelPredictor<'m, T: Scalar> {
    model: &'m StanceModel<T>,
    ws: Workspace<T>,
    window: Vec<T>,
}

impl<'m, T: Scalar> ModelPredictor<'m, T> {
    pub fn new(model: &'m StanceModel<T>) -> Self {
        Self {
            model,
            ws: Workspace::new(model),
            window: vec![T::zero(); model.window_len() * CHANNELS],
        }
    }
}

impl<T: Scalar> AlphaPredictor for ModelPredictor<'_, T> {
    fn window_len(&self) -> usize {
        self.model.window_len()
    }

    fn predict_at(&mut self, trial: &Trial, index: usize) -> Result<f64> {
        trial.window_into(index, self.model, &mut self.window)?;
        let view = WindowView::new(&self.window, self.model.window_len(), CHANNELS)?;
        Ok(self.model.predict_with(&view, &mut self.ws).to_f64_exact())
    }
}

/// Returns the ground truth itself.
#[derive(Debug, Clone, Copy)]
pub struct PerfectPredictor {
    pub window_len: usize,
}

impl AlphaPredictor for PerfectPredictor {
    fn window_len(&self) -> usize {
        self.window_len
    }

    fn predict_at(&mut self, trial: &Trial, index: usize) -> Result<f64> {
        Ok(trial.alpha.alpha[index])
    }
}

/// Always predicts the same value.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPredictor {
    pub value: f64,
    pub window_len: usize,
}

impl AlphaPredictor for ConstantPredictor {
    fn window_len(&self) -> usize {
        self.window_len
    }

    fn predict_at(&mut self, _trial: &Trial, _index: usize) -> Result<f64> {
        Ok(self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserMetrics {
    pub mse: f64,
    /// `None` when the user's ground truth is constant.
    pub r2: Option<f64>,
    pub n_windows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub r2: f64,
    pub mse: f64,
    pub n_windows: usize,
    pub per_user: BTreeMap<String, UserMetrics>,
}

/// Predictions and targets for every full window (stride 1) of every trial.
pub fn predict_trials<P: AlphaPredictor + ?Sized>(
    predictor: &mut P,
    trials: &[Trial],
) -> Result<Vec<(String, Vec<f64>, Vec<f64>)>> {
    let w = predictor.window_len();
    let mut out = Vec::with_capacity(trials.len());
    for trial in trials {
        if trial.len() < w {
            continue;
        }
        let mut pred = Vec::with_capacity(trial.len() + 1 - w);
        for index in w - 1..trial.len() {
            pred.push(predictor.predict_at(trial, index)?);
        }
        let actual = trial.alpha.alpha[w - 1..].to_vec();
        out.push((trial.user_id.clone(), pred, actual));
    }
    Ok(out)
}

/// R2 and MSE over all valid windows, noise disabled, with a per-user breakdown.
pub fn evaluate_with<P: AlphaPredictor + ?Sized>(predictor: &mut P, trials: &[Trial]) -> Result<EvalReport> {
    let series = predict_trials(predictor, trials)?;
    let mut by_user: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (user, pred, actual) in series {
        let entry = by_user.entry(user).or_default();
        entry.0.extend(pred);
        entry.1.extend(actual);
    }
    let all_pred: Vec<f64> = by_user.values().flat_map(|(p, _)| p.iter().copied()).collect();
    let all_actual: Vec<f64> = by_user.values().flat_map(|(_, a)| a.iter().copied()).collect();
    if all_pred.is_empty() {
        return Err(Error::InvalidArgument("no trial is long enough for a single window".into()));
    }
    let per_user = by_user
        .into_iter()
        .map(|(user, (p, a))| {
            let m = UserMetrics {
                mse: mse_loss(&p, &a)?,
                r2: r_squared(&p, &a).ok(),
                n_windows: p.len(),
            };
            Ok((user, m))
        })
        .collect::<Result<_>>()?;
    Ok(EvalReport {
        r2: r_squared(&all_pred, &all_actual)?,
        mse: mse_loss(&all_pred, &all_actual)?,
        n_windows: all_pred.len(),
        per_user,
    })
}

pub fn evaluate<T: Scalar>(model: &StanceModel<T>, trials: &[Trial]) -> Result<EvalReport> {
    evaluate_with(&mut ModelPredictor::new(model), trials)
}
