use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::KinematicSample;
use crate::error::{Error, Result};
use crate::nn::StanceModel;
use crate::streaming::ring::StreamingEstimator;
use crate::Scalar;

pub const LATENCY_COLUMNS: [&str; 5] = ["n", "mean_us", "std_us", "p99_us", "max_us"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyStats {
    pub n: usize,
    pub mean_us: f64,
    pub std_us: f64,
    pub max_us: f64,
    pub p99_us: f64,
}

impl LatencyStats {
    /// Summary of per-call durations in microseconds; p99 is nearest-rank.
    pub fn from_samples(samples_us: &[f64]) -> Result<Self> {
        if samples_us.is_empty() {
            return Err(Error::InvalidArgument("no latency samples".into()));
        }
        let n = samples_us.len();
        let mean = samples_us.iter().sum::<f64>() / n as f64;
        let var = samples_us.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n as f64;
        let mut sorted = samples_us.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
        Ok(Self {
            n,
            mean_us: mean,
            std_us: var.sqrt(),
            max_us: sorted[n - 1],
            p99_us: sorted[rank - 1],
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = LATENCY_COLUMNS.join(",");
        let _ = writeln!(
            out,
            "\n{},{:.3},{:.3},{:.3},{:.3}",
            self.n, self.mean_us, self.std_us, self.p99_us, self.max_us
        );
        out
    }
}

/// Per-call wall-clock latency of the streaming path (push + predict).
///
/// Random kinematic samples are streamed through a fresh estimator; the first
/// `warmup` calls (which include the buffer fill) are discarded and the next
/// `n_predictions` are timed. Returns the summary and the raw samples.
pub fn bench_latency_samples<T: Scalar>(
    model: &StanceModel<T>,
    n_predictions: usize,
    warmup: usize,
    seed: u64,
) -> Result<(LatencyStats, Vec<f64>)> {
    if n_predictions < 1000 {
        return Err(Error::InvalidArgument(format!("need at least 1000 timed predictions, got {n_predictions}")));
    }
    if warmup < 100 || warmup < model.window_len() {
        return Err(Error::InvalidArgument(format!(
            "warm-up must be at least max(100, window length), got {warmup}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<KinematicSample> = (0..1024)
        .map(|i| KinematicSample {
            t: i as f64 / model.config.sample_rate_hz,
            theta: std::array::from_fn(|_| rng.gen_range(-60.0..60.0)),
        })
        .collect();
    let mut est = StreamingEstimator::new(model);
    let mut sink = T::zero();
    for s in samples.iter().cycle().take(warmup) {
        if let Some(a) = est.push(s)? {
            sink = sink + a;
        }
    }
    let mut timings = Vec::with_capacity(n_predictions);
    for s in samples.iter().cycle().skip(warmup % samples.len()).take(n_predictions) {
        let start = Instant::now();
        let out = est.push(s)?;
        let elapsed = start.elapsed();
        sink = sink + out.ok_or_else(|| Error::InvalidState("window not full after warm-up".into()))?;
        timings.push(elapsed.as_secs_f64() * 1e6);
    }
    std::hint::black_box(sink);
    Ok((LatencyStats::from_samples(&timings)?, timings))
}

pub fn bench_latency<T: Scalar>(model: &StanceModel<T>, n_predictions: usize, warmup: usize) -> Result<LatencyStats> {
    bench_latency_samples(model, n_predictions, warmup, 0).map(|(s, _)| s)
}
