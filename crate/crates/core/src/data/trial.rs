use std::fmt;
use std::str::FromStr;

use crate::data::alpha::{compute_alpha_series, AlphaSeries, DEFAULT_MIN_TOTAL_N};
use crate::error::{Error, Result};
use crate::nn::{StanceModel, WindowMatrix, CHANNELS};
use crate::Scalar;

pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 333.0;

/// Joint angles in degrees: left hip, right hip, left knee, right knee, backpack pitch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub t: f64,
    pub theta: [f64; CHANNELS],
}

impl KinematicSample {
    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() {
            return Err(Error::DataIntegrity(format!("non-finite timestamp {}", self.t)));
        }
        if let Some(a) = self.theta.iter().find(|a| !(a.is_finite() && a.abs() <= 180.0)) {
            return Err(Error::DataIntegrity(format!("joint angle {a} at t={} is not a finite angle in [-180, 180]", self.t)));
        }
        Ok(())
    }
}

/// Vertical ground reaction forces in newtons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrfSample {
    pub t: f64,
    pub f_left_y: f64,
    pub f_right_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// Zero desired interaction torque.
    Transparent,
    /// Virtual spring-damper impedance rendered at the joints.
    Rendering,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Transparent => "transparent",
            Condition::Rendering => "rendering",
        })
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transparent" => Ok(Condition::Transparent),
            "rendering" => Ok(Condition::Rendering),
            other => Err(Error::InvalidArgument(format!("unknown condition `{other}`"))),
        }
    }
}

/// Time-aligned kinematics and vertical GRFs for one user and condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub user_id: String,
    pub condition: Condition,
    pub sample_rate_hz: f64,
    pub kinematics: Vec<KinematicSample>,
    pub grf: Vec<GrfSample>,
    /// Ground-truth alpha derived from `grf`.
    pub alpha: AlphaSeries,
}

impl Trial {
    /// Validates the series and derives alpha with the default load threshold.
    pub fn new(
        user_id: impl Into<String>,
        condition: Condition,
        sample_rate_hz: f64,
        kinematics: Vec<KinematicSample>,
        grf: Vec<GrfSample>,
    ) -> Result<Self> {
        let mut trial = Self {
            user_id: user_id.into(),
            condition,
            sample_rate_hz,
            kinematics,
            grf,
            alpha: AlphaSeries::default(),
        };
        trial.validate()?;
        trial.alpha = compute_alpha_series(&trial, DEFAULT_MIN_TOTAL_N)?;
        Ok(trial)
    }

    pub fn len(&self) -> usize {
        self.kinematics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinematics.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::DataIntegrity(format!("invalid sample rate {}", self.sample_rate_hz)));
        }
        if self.kinematics.len() != self.grf.len() {
            return Err(Error::DataIntegrity(format!(
                "{} kinematic samples but {} force samples",
                self.kinematics.len(),
                self.grf.len()
            )));
        }
        let period = 1.0 / self.sample_rate_hz;
        for (i, (k, g)) in self.kinematics.iter().zip(&self.grf).enumerate() {
            k.validate()?;
            if k.t != g.t {
                return Err(Error::DataIntegrity(format!("sample {i}: kinematic and force timestamps differ")));
            }
            if !(g.f_left_y >= 0.0 && g.f_right_y >= 0.0 && g.f_left_y.is_finite() && g.f_right_y.is_finite()) {
                return Err(Error::DataIntegrity(format!("sample {i}: forces must be finite and non-negative")));
            }
            if i > 0 {
                let dt = k.t - self.kinematics[i - 1].t;
                if (dt - period).abs() > 0.01 * period {
                    return Err(Error::DataIntegrity(format!(
                        "sample {i}: spacing {dt} s deviates from 1/{} s by more than 1%",
                        self.sample_rate_hz
                    )));
                }
            }
        }
        Ok(())
    }

    /// Standardized window of `model.window_len()` rows ending at `index`.
    pub fn window_extract<T: Scalar>(&self, index: usize, model: &StanceModel<T>) -> Result<WindowMatrix<T>> {
        let len = model.window_len();
        let mut data = vec![T::zero(); len * CHANNELS];
        self.window_into(index, model, &mut data)?;
        WindowMatrix::from_vec(data, len, CHANNELS)
    }

    /// Writes the standardized window ending at `index` into `out`.
    pub fn window_into<T: Scalar>(&self, index: usize, model: &StanceModel<T>, out: &mut [T]) -> Result<()> {
        let len = model.window_len();
        if index + 1 < len {
            return Err(Error::OutOfRange { index, first_valid: len - 1 });
        }
        if index >= self.len() {
            return Err(Error::InvalidArgument(format!("index {index} beyond trial of {} samples", self.len())));
        }
        if model.config.input_dim != CHANNELS || out.len() != len * CHANNELS {
            return Err(Error::Config("window buffer does not match the model input shape".into()));
        }
        let start = index + 1 - len;
        for (row, sample) in out.chunks_exact_mut(CHANNELS).zip(&self.kinematics[start..=index]) {
            model.standardize_into(&sample.theta, row);
        }
        Ok(())
    }
}

/// Free-function form of [`Trial::window_extract`].
pub fn window_extract<T: Scalar>(trial: &Trial, index: usize, model: &StanceModel<T>) -> Result<WindowMatrix<T>> {
    trial.window_extract(index, model)
}
