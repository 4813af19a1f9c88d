use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::info;

use crate::data::Trial;
use crate::error::{Error, Result};
use crate::training::metrics::evaluate;
use crate::training::train::{train, TrainConfig};

pub const LOOCV_COLUMNS: [&str; 6] = ["train_users", "test_user", "variant", "train_mse", "test_mse", "r2_test"];

/// Label for a window length, e.g. `tw0` for a single sample, `tw300` for 99 samples at 333 Hz.
pub fn variant_label(window_len: usize, sample_rate_hz: f64) -> String {
    if window_len <= 1 {
        "tw0".to_string()
    } else {
        let ms = (window_len as f64 / sample_rate_hz * 100.0).round() * 10.0;
        format!("tw{ms:.0}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoocvRow {
    pub train_users: Vec<String>,
    pub test_user: String,
    pub variant: String,
    pub window_len: usize,
    /// MSE of the trained model over every window of its own training users.
    pub train_mse: f64,
    pub test_mse: f64,
    pub r2_test: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoocvReport {
    pub rows: Vec<LoocvRow>,
}

impl LoocvReport {
    pub fn rows_for(&self, variant: &str) -> impl Iterator<Item = &LoocvRow> {
        let variant = variant.to_string();
        self.rows.iter().filter(move |r| r.variant == variant)
    }

    pub fn mean_test_mse(&self, variant: &str) -> Option<f64> {
        mean(self.rows_for(variant).map(|r| r.test_mse))
    }

    pub fn mean_test_r2(&self, variant: &str) -> Option<f64> {
        mean(self.rows_for(variant).map(|r| r.r2_test))
    }

    /// CSV with header `train_users,test_user,variant,train_mse,test_mse,r2_test`;
    /// training users are `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut out = LOOCV_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{:.16e}",
                r.train_users.join(";"),
                r.test_user,
                r.variant,
                r.train_mse,
                r.test_mse,
                r.r2_test
            );
        }
        out
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Leave-one-user-out cross-validation for each window length in `window_lens`.
///
/// For every variant and held-out user, a model is trained from scratch on the
/// remaining users only and evaluated on both splits.
pub fn loocv(trials_by_user: &BTreeMap<String, Vec<Trial>>, cfg: &TrainConfig, window_lens: &[usize]) -> Result<LoocvReport> {
    if trials_by_user.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "leave-one-out needs at least 2 users, got {}",
            trials_by_user.len()
        )));
    }
    if window_lens.is_empty() {
        return Err(Error::InvalidArgument("no window-length variants given".into()));
    }
    let mut report = LoocvReport::default();
    for &window_len in window_lens {
        let variant_cfg = cfg.with_window_len(window_len);
        let variant = variant_label(window_len, cfg.model.sample_rate_hz);
        for test_user in trials_by_user.keys() {
            let train_users: Vec<String> = trials_by_user.keys().filter(|u| *u != test_user).cloned().collect();
            let train_trials: Vec<Trial> = train_users
                .iter()
                .flat_map(|u| trials_by_user[u].iter().cloned())
                .collect();
            let test_trials = &trials_by_user[test_user];
            let trained = train::<f64>(&train_trials, &variant_cfg)?;
            let train_eval = evaluate(&trained.model, &train_trials)?;
            let test_eval = evaluate(&trained.model, test_trials)?;
            info!(
                "{variant} hold-out {test_user}: train mse {:.5}, test mse {:.5}, test r2 {:.3}",
                train_eval.mse, test_eval.mse, test_eval.r2
            );
            report.rows.push(LoocvRow {
                train_users,
                test_user: test_user.clone(),
                variant: variant.clone(),
                window_len,
                train_mse: train_eval.mse,
                test_mse: test_eval.mse,
                r2_test: test_eval.r2,
            });
        }
    }
    Ok(report)
}

/// Groups trials by user id.
pub fn group_by_user(trials: Vec<Trial>) -> BTreeMap<String, Vec<Trial>> {
    let mut map: BTreeMap<String, Vec<Trial>> = BTreeMap::new();
    for t in trials {
        map.entry(t.user_id.clone()).or_default().push(t);
    }
    map
}
