use crate::data::trial::Trial;
use crate::error::{Error, Result};

/// Total vertical load (N) below which the previous alpha is held.
pub const DEFAULT_MIN_TOTAL_N: f64 = 20.0;

/// Stance interpolation factor at each sample: 0 = left stance, 1 = right stance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlphaSeries {
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl AlphaSeries {
    pub fn new(t: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if t.len() != alpha.len() {
            return Err(Error::InvalidArgument(format!(
                "alpha series has {} timestamps but {} values",
                t.len(),
                alpha.len()
            )));
        }
        if let Some(i) = alpha.iter().position(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::DataIntegrity(format!("alpha[{i}] = {} outside [0, 1]", alpha[i])));
        }
        Ok(Self { t, alpha })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Fraction of body weight on the right foot, `F_right / (F_left + F_right)`.
///
/// When the total load is below `min_total` the ratio is not meaningful and
/// `prev_alpha` is returned unchanged.
pub fn stance_interpolation(f_left_y: f64, f_right_y: f64, prev_alpha: f64, min_total: f64) -> Result<f64> {
    if !(f_left_y >= 0.0 && f_right_y >= 0.0) || !f_left_y.is_finite() || !f_right_y.is_finite() {
        return Err(Error::DataIntegrity(format!(
            "vertical forces must be finite and non-negative, got left={f_left_y} right={f_right_y}"
        )));
    }
    if !(0.0..=1.0).contains(&prev_alpha) {
        return Err(Error::InvalidArgument(format!("previous alpha {prev_alpha} outside [0, 1]")));
    }
    let total = f_left_y + f_right_y;
    if total >= min_total && total > 0.0 {
        Ok(f_right_y / total)
    } else {
        Ok(prev_alpha)
    }
}

/// Applies [`stance_interpolation`] along a trial, starting from a held value of 0.5.
pub fn compute_alpha_series(trial: &Trial, min_total: f64) -> Result<AlphaSeries> {
    let mut prev = 0.5;
    let mut alpha = Vec::with_capacity(trial.grf.len());
    for g in &trial.grf {
        prev = stance_interpolation(g.f_left_y, g.f_right_y, prev, min_total)?;
        alpha.push(prev);
    }
    Ok(AlphaSeries {
        t: trial.grf.iter().map(|g| g.t).collect(),
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(stance_interpolation(0.0, 500.0, 0.2, 10.0).unwrap(), 1.0);
        assert_eq!(stance_interpolation(400.0, 400.0, 0.2, 10.0).unwrap(), 0.5);
        assert_eq!(stance_interpolation(100.0, 300.0, 0.2, 10.0).unwrap(), 0.75);
        assert_eq!(stance_interpolation(0.1, 0.2, 0.3, 10.0).unwrap(), 0.3);
    }

    #[test]
    fn zero_threshold_and_zero_load_holds() {
        assert_eq!(stance_interpolation(0.0, 0.0, 0.4, 0.0).unwrap(), 0.4);
    }

    #[test]
    fn negative_force_is_rejected() {
        assert!(matches!(stance_interpolation(-1.0, 10.0, 0.5, 10.0), Err(Error::DataIntegrity(_))));
        assert!(matches!(stance_interpolation(f64::NAN, 10.0, 0.5, 10.0), Err(Error::DataIntegrity(_))));
    }
}
