//! Real-time inference: a ring-buffered window fed one sample at a time,
//! latency measurement and model persistence.

pub mod bench;
pub mod persist;
pub mod ring;

pub use bench::{bench_latency, bench_latency_samples, LatencyStats, LATENCY_COLUMNS};
pub use persist::{load_model, model_from_bytes, model_to_bytes, save_model, FORMAT_VERSION, MAGIC};
pub use ring::{push_sample, RingWindow, StreamingEstimator};
