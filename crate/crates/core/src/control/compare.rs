use crate::data::{AlphaSeries, Trial};
use crate::error::{Error, Result};
use crate::nn::StanceModel;
use crate::scalar::Scalar;
use crate::streaming::StreamingEstimator;
use crate::training::r_squared;

use super::blend::Blender;
use super::phases::{segment_phases, DEFAULT_HI, DEFAULT_LO};

pub const COMPARE_METRICS: [&str; 5] = ["mse", "r2", "stance_frac_truth", "stance_frac_pred", "mean_abs_alpha_err"];

/// Ground truth versus predicted alpha for one trial. Stance fractions are the
/// percentage of time with the right foot loaded; `r2` is `None` when the
/// truth is constant over the compared span.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub n: usize,
    pub mse: f64,
    pub r2: Option<f64>,
    pub stance_frac_truth: f64,
    pub stance_frac_pred: f64,
    pub double_stance_frac_truth: f64,
    pub double_stance_frac_pred: f64,
    pub mean_abs_alpha_err: f64,
}

impl CompareReport {
    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("mse", self.mse),
            ("r2", self.r2.unwrap_or(f64::NAN)),
            ("stance_frac_truth", self.stance_frac_truth),
            ("stance_frac_pred", self.stance_frac_pred),
            ("mean_abs_alpha_err", self.mean_abs_alpha_err),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("metric,value\n");
        for (k, v) in self.rows() {
            s.push_str(&format!("{k},{v:.16e}\n"));
        }
        s
    }
}

/// Compares two alpha series sampled on the same time base.
pub fn compare_series(truth: &AlphaSeries, pred: &AlphaSeries) -> Result<CompareReport> {
    if truth.len() != pred.len() || truth.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "series lengths differ or are empty ({} vs {})",
            truth.len(),
            pred.len()
        )));
    }
    let n = truth.len();
    let mse = truth.alpha.iter().zip(&pred.alpha).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n as f64;
    let r2 = match r_squared(&pred.alpha, &truth.alpha) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    // blending a unit left/right pair turns the output discrepancy into the
    // alpha discrepancy
    let mut blender = Blender::new();
    let (mut bt, mut bp) = ([0.0], [0.0]);
    let mut abs_err = 0.0;
    for (&a, &b) in truth.alpha.iter().zip(&pred.alpha) {
        blender.blend_into(a, &[0.0], &[1.0], &mut bt)?;
        blender.blend_into(b, &[0.0], &[1.0], &mut bp)?;
        abs_err += (bt[0] - bp[0]).abs();
    }
    let st = segment_phases(truth, DEFAULT_LO, DEFAULT_HI)?;
    let sp = segment_phases(pred, DEFAULT_LO, DEFAULT_HI)?;
    use super::phases::Phase::DoubleStance;
    Ok(CompareReport {
        n,
        mse,
        r2,
        stance_frac_truth: 100.0 * st.loaded_fraction(),
        stance_frac_pred: 100.0 * sp.loaded_fraction(),
        double_stance_frac_truth: 100.0 * st.phase_fraction(DoubleStance),
        double_stance_frac_pred: 100.0 * sp.phase_fraction(DoubleStance),
        mean_abs_alpha_err: abs_err / n as f64,
    })
}

/// Streams a trial through the model sample by sample. The returned series
/// starts at the first full window.
pub fn stream_trial<T: Scalar>(model: &StanceModel<T>, trial: &Trial) -> Result<AlphaSeries> {
    let mut est = StreamingEstimator::new(model);
    let mut t = Vec::with_capacity(trial.len());
    let mut alpha = Vec::with_capacity(trial.len());
    for s in &trial.kinematics {
        if let Some(a) = est.push(s)? {
            t.push(s.t);
            alpha.push(a.to_f64_exact());
        }
    }
    if alpha.is_empty() {
        return Err(Error::InsufficientData(format!(
            "trial has {} samples, window needs {}",
            trial.len(),
            model.window_len()
        )));
    }
    AlphaSeries::new(t, alpha)
}

/// Drives the streaming runtime over a recorded trial and compares its output
/// against ground truth over the span where predictions exist.
pub fn closed_loop_compare<T: Scalar>(trial: &Trial, model: &StanceModel<T>) -> Result<CompareReport> {
    let pred = stream_trial(model, trial)?;
    let skip = trial.len() - pred.len();
    let truth = AlphaSeries::new(trial.alpha.t[skip..].to_vec(), trial.alpha.alpha[skip..].to_vec())?;
    compare_series(&truth, &pred)
}
