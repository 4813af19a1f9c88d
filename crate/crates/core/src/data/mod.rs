//! Ground-truth weight distribution, trial handling, standardization and a
//! synthetic gait generator.

pub mod alpha;
pub mod csv_io;
pub mod standardize;
pub mod synth;
pub mod trial;

pub use alpha::{compute_alpha_series, stance_interpolation, AlphaSeries, DEFAULT_MIN_TOTAL_N};
pub use csv_io::{load_trial_csv, save_trial_csv, trial_file_name, TRIAL_COLUMNS};
pub use standardize::{standardize_fit, STD_FLOOR};
pub use synth::{synth_corpus, synth_gait, GaitShape, GaitSynthParams};
pub use trial::{window_extract, Condition, GrfSample, KinematicSample, Trial, DEFAULT_SAMPLE_RATE_HZ};
