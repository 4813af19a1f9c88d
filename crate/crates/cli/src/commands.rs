use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use gaitweight::control::{closed_loop_compare, compare_series};
use gaitweight::data::{load_trial_csv, save_trial_csv, synth_corpus, trial_file_name, Condition, Trial};
use gaitweight::nn::AdamConfig;
use gaitweight::streaming::{bench_latency_samples, load_model, save_model, StreamingEstimator};
use gaitweight::training::{evaluate, group_by_user, loocv, train, TrainConfig};
use gaitweight::StanceModel;
use log::info;
use serde::{Deserialize, Serialize};

use crate::config::resolve;
use crate::failure::{bail_usage, CliResult, Failure};
use crate::manifest::{manifest_path_for, Recorder};

fn write_output(path: &Path, contents: &str, rec: &mut Recorder) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::runtime(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::runtime(anyhow::anyhow!("cannot write {}: {e}", path.display())))?;
    rec.outputs.push(path.to_path_buf());
    Ok(())
}

/// Loads every trial file matching `pattern`, in sorted path order.
fn load_glob(pattern: &str, rec: &mut Recorder) -> CliResult<Vec<Trial>> {
    let paths = glob::glob(pattern).map_err(|e| Failure::usage(anyhow::anyhow!("invalid glob '{pattern}': {e}")))?;
    let mut paths: Vec<PathBuf> = paths.filter_map(|p| p.ok()).filter(|p| p.is_file()).collect();
    paths.sort();
    if paths.is_empty() {
        return bail_usage(format!("no trial files match '{pattern}'"));
    }
    let mut trials = Vec::with_capacity(paths.len());
    for p in paths {
        trials.push(load_trial(&p, rec)?);
    }
    Ok(trials)
}

fn load_trial(path: &Path, rec: &mut Recorder) -> CliResult<Trial> {
    if !path.is_file() {
        return bail_usage(format!("trial file {} does not exist", path.display()));
    }
    let trial = load_trial_csv(path)?;
    rec.inputs.push(path.to_path_buf());
    Ok(trial)
}

fn load_model_file(path: &Path, rec: &mut Recorder) -> CliResult<StanceModel> {
    if !path.is_file() {
        return bail_usage(format!("model file {} does not exist", path.display()));
    }
    let model = load_model(path)?;
    rec.inputs.push(path.to_path_buf());
    Ok(model)
}

fn required<T: Clone>(value: &Option<T>, name: &str) -> CliResult<T> {
    match value {
        Some(v) => Ok(v.clone()),
        None => bail_usage(format!("missing required setting '{name}' (flag or config file)")),
    }
}

// ---- synth ----------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Number of synthetic users
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    /// Comma-separated conditions (transparent, rendering)
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<Condition>>,
    /// Trial length in seconds
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Directory receiving one CSV per user and condition
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub users: usize,
    pub conditions: Vec<Condition>,
    pub duration: f64,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            users: 6,
            conditions: vec![Condition::Transparent],
            duration: 60.0,
            seed: 0,
            out_dir: None,
        }
    }
}

pub fn synth(args: &SynthArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("synth");
    let cfg: SynthConfig = resolve("synth", config, args)?;
    let out_dir = required(&cfg.out_dir, "out_dir")?;
    if !(cfg.duration.is_finite() && cfg.duration > 0.0) {
        return bail_usage(format!("duration must be positive, got {}", cfg.duration));
    }
    if cfg.users == 0 || cfg.conditions.is_empty() {
        return bail_usage("need at least one user and one condition");
    }
    let trials = synth_corpus(cfg.users, &cfg.conditions, cfg.duration, cfg.seed)?;
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::runtime(anyhow::anyhow!("cannot create {}: {e}", out_dir.display())))?;
    for trial in &trials {
        let path = out_dir.join(trial_file_name(trial));
        save_trial_csv(trial, &path)?;
        rec.outputs.push(path);
    }
    info!("wrote {} trials to {}", trials.len(), out_dir.display());
    rec.finish(&cfg, vec![cfg.seed], &out_dir.join("synth.manifest.json"))?;
    Ok(())
}

// ---- shared training settings -----------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct TrainFlags {
    /// Window length in samples (1 for the instantaneous variant)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    /// Samples between consecutive training windows
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub window: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub stride: usize,
    pub lr: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            window: d.model.window_len,
            epochs: d.epochs,
            batch_size: d.batch_size,
            stride: d.stride,
            lr: d.adam.lr,
            noise_sigma: d.model.noise_sigma,
            seed: d.seed,
        }
    }
}

impl TrainSettings {
    fn to_train_config(&self) -> TrainConfig {
        let mut cfg = TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            stride: self.stride,
            adam: AdamConfig { lr: self.lr, ..AdamConfig::default() },
            seed: self.seed,
            ..TrainConfig::default()
        }
        .with_window_len(self.window);
        cfg.model.noise_sigma = self.noise_sigma;
        cfg
    }
}

// ---- train ----------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Glob selecting trial CSV files
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<String>,
    /// Model file to write
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_model: Option<PathBuf>,
    /// Per-epoch loss CSV (default: <out-model>.log.csv)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct TrainCmdConfig {
    pub trials: Option<String>,
    pub out_model: Option<PathBuf>,
    pub log: Option<PathBuf>,
    #[serde(flatten)]
    pub train: TrainSettings,
}

pub fn train_cmd(args: &TrainArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("train");
    let cfg: TrainCmdConfig = resolve("train", config, args)?;
    let pattern = required(&cfg.trials, "trials")?;
    let out_model = required(&cfg.out_model, "out_model")?;
    let tc = cfg.train.to_train_config();
    tc.validate()?;
    let trials = load_glob(&pattern, &mut rec)?;
    let trained = train::<f64>(&trials, &tc)?;
    if let Some(dir) = out_model.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::runtime(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
    }
    save_model(&trained.model, &out_model)?;
    rec.outputs.push(out_model.clone());
    let mut log_csv = String::from("epoch,mean_loss,batches\n");
    for e in &trained.epochs {
        let _ = writeln!(log_csv, "{},{:.16e},{}", e.epoch, e.mean_loss, e.batches);
    }
    let log_path = cfg.log.clone().unwrap_or_else(|| with_suffix(&out_model, ".log.csv"));
    write_output(&log_path, &log_csv, &mut rec)?;
    info!("trained on {} windows, model written to {}", trained.n_windows, out_model.display());
    rec.finish(&cfg, vec![tc.seed], &manifest_path_for(&out_model))?;
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

// ---- eval -----------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Glob selecting trial CSV files
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<String>,
    /// Metrics CSV to write
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub model: Option<PathBuf>,
    pub trials: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn eval(args: &EvalArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("eval");
    let cfg: EvalConfig = resolve("eval", config, args)?;
    let model = load_model_file(&required(&cfg.model, "model")?, &mut rec)?;
    let trials = load_glob(&required(&cfg.trials, "trials")?, &mut rec)?;
    let out = required(&cfg.out, "out")?;
    let report = evaluate(&model, &trials)?;
    let mut csv = String::from("user,n_windows,mse,r2\n");
    for (user, m) in &report.per_user {
        let r2 = m.r2.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let _ = writeln!(csv, "{user},{},{:.16e},{r2}", m.n_windows, m.mse);
    }
    let _ = writeln!(csv, "all,{},{:.16e},{:.16e}", report.n_windows, report.mse, report.r2);
    write_output(&out, &csv, &mut rec)?;
    info!("mse {:.5}, r2 {:.4} over {} windows", report.mse, report.r2, report.n_windows);
    rec.finish(&cfg, vec![], &manifest_path_for(&out))?;
    Ok(())
}

// ---- loocv ----------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct LoocvArgs {
    /// Glob selecting trial CSV files; users come from the file contents
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<String>,
    /// Report CSV to write
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Comma-separated window lengths to compare
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoocvConfig {
    pub trials: Option<String>,
    pub out: Option<PathBuf>,
    pub windows: Vec<usize>,
    #[serde(flatten)]
    pub train: TrainSettings,
}

impl Default for LoocvConfig {
    fn default() -> Self {
        Self {
            trials: None,
            out: None,
            windows: vec![1, 99],
            train: TrainSettings::default(),
        }
    }
}

pub fn loocv_cmd(args: &LoocvArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("loocv");
    let cfg: LoocvConfig = resolve("loocv", config, args)?;
    let out = required(&cfg.out, "out")?;
    let tc = cfg.train.to_train_config();
    tc.validate()?;
    for &w in &cfg.windows {
        tc.with_window_len(w).validate()?;
    }
    let trials = load_glob(&required(&cfg.trials, "trials")?, &mut rec)?;
    let by_user = group_by_user(trials);
    if by_user.len() < 2 {
        return bail_usage(format!("leave-one-out needs at least 2 users, found {}", by_user.len()));
    }
    let report = loocv(&by_user, &tc, &cfg.windows)?;
    write_output(&out, &report.to_csv(), &mut rec)?;
    rec.finish(&cfg, vec![tc.seed], &manifest_path_for(&out))?;
    Ok(())
}

// ---- bench ----------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Number of timed predictions
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Untimed calls before measuring
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warmup: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Summary CSV to write
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Optional CSV of every timed call
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub model: Option<PathBuf>,
    pub n: usize,
    pub warmup: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub samples: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { model: None, n: 10_000, warmup: 200, seed: 0, out: None, samples: None }
    }
}

pub fn bench(args: &BenchArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("bench");
    let cfg: BenchConfig = resolve("bench", config, args)?;
    let model = load_model_file(&required(&cfg.model, "model")?, &mut rec)?;
    let out = required(&cfg.out, "out")?;
    let (stats, samples) = bench_latency_samples(&model, cfg.n, cfg.warmup, cfg.seed)?;
    write_output(&out, &stats.to_csv(), &mut rec)?;
    if let Some(path) = &cfg.samples {
        let mut csv = String::from("call,latency_us\n");
        for (i, s) in samples.iter().enumerate() {
            let _ = writeln!(csv, "{i},{s:.3}");
        }
        write_output(path, &csv, &mut rec)?;
    }
    info!("mean {:.1} us, p99 {:.1} us, max {:.1} us", stats.mean_us, stats.p99_us, stats.max_us);
    rec.finish(&cfg, vec![cfg.seed], &manifest_path_for(&out))?;
    Ok(())
}

// ---- stream ---------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct StreamArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Trial CSV to replay sample by sample
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<PathBuf>,
    /// Prediction CSV to write
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct StreamConfig {
    pub model: Option<PathBuf>,
    pub trial: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn stream(args: &StreamArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("stream");
    let cfg: StreamConfig = resolve("stream", config, args)?;
    let model = load_model_file(&required(&cfg.model, "model")?, &mut rec)?;
    let trial = load_trial(&required(&cfg.trial, "trial")?, &mut rec)?;
    let out = required(&cfg.out, "out")?;
    let mut est = StreamingEstimator::new(&model);
    let mut csv = String::from("t,alpha_hat,alpha\n");
    for (i, s) in trial.kinematics.iter().enumerate() {
        if let Some(a) = est.push(s)? {
            let _ = writeln!(csv, "{:.16e},{a:.16e},{:.16e}", s.t, trial.alpha.alpha[i]);
        }
    }
    write_output(&out, &csv, &mut rec)?;
    rec.finish(&cfg, vec![], &manifest_path_for(&out))?;
    Ok(())
}

// ---- compare --------------------------------------------------------------

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long, conflicts_with = "perfect")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Use the ground truth itself as the prediction
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub perfect: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<PathBuf>,
    /// Report CSV to write
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub model: Option<PathBuf>,
    pub perfect: bool,
    pub trial: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn compare(args: &CompareArgs, config: Option<&Path>) -> CliResult<()> {
    let mut rec = Recorder::start("compare");
    let cfg: CompareConfig = resolve("compare", config, args)?;
    let trial = load_trial(&required(&cfg.trial, "trial")?, &mut rec)?;
    let out = required(&cfg.out, "out")?;
    let report = match (&cfg.model, cfg.perfect) {
        (_, true) => compare_series(&trial.alpha, &trial.alpha)?,
        (Some(path), false) => {
            let model = load_model_file(path, &mut rec)?;
            closed_loop_compare(&trial, &model)?
        }
        (None, false) => return bail_usage("compare needs --model or --perfect"),
    };
    write_output(&out, &report.to_csv(), &mut rec)?;
    rec.finish(&cfg, vec![], &manifest_path_for(&out))?;
    Ok(())
}
