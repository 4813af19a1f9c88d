//! Recurrent regression engine: LSTM over a kinematic window followed by two
//! sigmoid dense layers, with exact backpropagation through time and ADAM.

pub mod adam;
pub mod gradcheck;
pub mod loss;
pub mod lstm;
pub mod model;
pub mod noise;
pub mod params;
pub mod window;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use gradcheck::{central_difference, finite_diff_grad, max_relative_error};
pub use loss::mse_loss;
pub use lstm::{lstm_forward, ForwardCache};
pub use model::{model_backward, model_forward, BackwardScratch, ModelConfig, StanceModel, Workspace};
pub use noise::gaussian_corrupt;
pub use params::{Activation, DenseParams, Gradients, LstmParams, Params, GATES};
pub use window::{WindowMatrix, WindowView, CHANNELS, WINDOW_LEN};
