//! Weight-distribution estimation for lower-limb exoskeletons.
//!
//! A small LSTM regressor maps a short window of joint kinematics to the stance
//! interpolation factor `alpha` (0 = left stance, 1 = right stance). The crate
//! covers the numerical engine, data handling and synthetic gait generation,
//! training and cross-validation, a streaming runtime with persistence, and a
//! closed-loop comparison harness.
//!
//! The numerical engine is generic over [`Scalar`]; the aliases below fix it to
//! `f64` (the default everywhere else in the crate) or `f32`.

pub mod control;
pub mod data;
pub mod error;
pub mod nn;
mod scalar;
pub mod streaming;
pub mod training;

pub use error::{Error, ModelFileError, Result};
pub use scalar::Scalar;

pub type StanceModel = nn::StanceModel<f64>;
pub type StanceModelF32 = nn::StanceModel<f32>;
pub type WindowMatrix = nn::WindowMatrix<f64>;
pub type WindowMatrixF32 = nn::WindowMatrix<f32>;
pub type Gradients = nn::Gradients<f64>;
pub type AdamState = nn::AdamState<f64>;
pub type ForwardCache = nn::ForwardCache<f64>;
pub type RingWindow = streaming::RingWindow<f64>;

