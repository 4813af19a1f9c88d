//! Closed-loop use of the estimator: blending left/right controller outputs,
//! gait phase segmentation and trial-level comparison against ground truth.

mod blend;
mod compare;
mod phases;

pub use blend::{blend, Blender};
pub use compare::{closed_loop_compare, compare_series, stream_trial, CompareReport, COMPARE_METRICS};
pub use phases::{
    classify, cycle_stats, segment_phases, CycleBreakdown, GaitCycleStats, Phase, Segment, StanceSegments,
    CYCLE_CONVENTION, DEFAULT_HI, DEFAULT_LO,
};
