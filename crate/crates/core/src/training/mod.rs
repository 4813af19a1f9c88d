//! Dataset assembly, the training loop, evaluation metrics and leave-one-user-out
//! cross-validation.

pub mod dataset;
pub mod loocv;
pub mod metrics;
pub mod train;

pub use dataset::{build_dataset, Dataset, WindowRef};
pub use loocv::{group_by_user, loocv, variant_label, LoocvReport, LoocvRow, LOOCV_COLUMNS};
pub use metrics::{
    evaluate, evaluate_with, predict_trials, r_squared, AlphaPredictor, ConstantPredictor, EvalReport, ModelPredictor,
    PerfectPredictor, UserMetrics,
};
pub use train::{train, EpochLog, TrainConfig, TrainedModel};
