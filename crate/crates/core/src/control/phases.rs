use std::fmt;

use crate::data::AlphaSeries;
use crate::error::{Error, Result};

pub const DEFAULT_LO: f64 = 0.1;
pub const DEFAULT_HI: f64 = 0.9;

/// Cycles run from one right-stance onset to the next; stance is the share of
/// the cycle in which the right foot carries load (right or double stance).
pub const CYCLE_CONVENTION: &str = "cycle = right-stance onset to next right-stance onset; stance = right foot loaded (right + double stance)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    LeftStance,
    RightStance,
    DoubleStance,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::LeftStance => "left_stance",
            Phase::RightStance => "right_stance",
            Phase::DoubleStance => "double_stance",
        })
    }
}

/// Maximal run of samples `[start_idx, end_idx)` in one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub phase: Phase,
    pub start_t: f64,
    pub end_t: f64,
    pub start_idx: usize,
    pub end_idx: usize,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.end_t - self.start_t
    }
}

/// Contiguous, non-overlapping segments covering the whole series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StanceSegments {
    pub segments: Vec<Segment>,
}

impl StanceSegments {
    pub fn total_duration(&self) -> f64 {
        match (self.segments.first(), self.segments.last()) {
            (Some(a), Some(b)) => b.end_t - a.start_t,
            _ => 0.0,
        }
    }

    /// Share of the samples spent in `phase`.
    pub fn phase_fraction(&self, phase: Phase) -> f64 {
        let count = |keep: &dyn Fn(&Segment) -> bool| {
            self.segments.iter().filter(|s| keep(s)).map(|s| s.end_idx - s.start_idx).sum::<usize>()
        };
        let total = count(&|_| true);
        if total == 0 {
            return 0.0;
        }
        count(&|s| s.phase == phase) as f64 / total as f64
    }

    /// Share of the samples with the right foot loaded.
    pub fn loaded_fraction(&self) -> f64 {
        1.0 - self.phase_fraction(Phase::LeftStance)
    }

    /// Maps every sample back to its phase.
    pub fn sample_phases(&self) -> Vec<Phase> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.phase, s.end_idx - s.start_idx))
            .collect()
    }
}

pub fn classify(alpha: f64, lo: f64, hi: f64) -> Phase {
    if alpha <= lo {
        Phase::LeftStance
    } else if alpha >= hi {
        Phase::RightStance
    } else {
        Phase::DoubleStance
    }
}

/// Thresholds alpha into left (`<= lo`), right (`>= hi`) and double stance and
/// merges equal neighbours into maximal runs. The last segment ends one sample
/// period after the final timestamp.
pub fn segment_phases(series: &AlphaSeries, lo: f64, hi: f64) -> Result<StanceSegments> {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < lo ({lo}) < hi ({hi}) < 1")));
    }
    let n = series.len();
    if n == 0 || series.t.len() != n {
        return Err(Error::InvalidArgument("cannot segment an empty series".into()));
    }
    let dt = if n > 1 { series.t[1] - series.t[0] } else { 0.0 };
    let time_at = |i: usize| if i < n { series.t[i] } else { series.t[n - 1] + dt };
    let mut segments: Vec<Segment> = Vec::new();
    let mut start = 0;
    let mut phase = classify(series.alpha[0], lo, hi);
    for i in 1..=n {
        let next = if i < n { Some(classify(series.alpha[i], lo, hi)) } else { None };
        if next != Some(phase) {
            segments.push(Segment {
                phase,
                start_t: time_at(start),
                end_t: time_at(i),
                start_idx: start,
                end_idx: i,
            });
            if let Some(p) = next {
                phase = p;
                start = i;
            }
        }
    }
    Ok(StanceSegments { segments })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleBreakdown {
    pub start_t: f64,
    pub duration_s: f64,
    pub right_stance_s: f64,
    pub double_stance_s: f64,
    pub left_stance_s: f64,
    /// Right foot loaded, percent of the cycle.
    pub stance_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitCycleStats {
    pub mean_cycle_s: f64,
    pub stance_pct_mean: f64,
    pub stance_pct_std: f64,
    pub cycles: Vec<CycleBreakdown>,
    pub convention: &'static str,
}

/// Per-cycle timing between consecutive right-stance onsets. The series must
/// contain at least two complete cycles.
pub fn cycle_stats(segments: &StanceSegments) -> Result<GaitCycleStats> {
    // an onset is only observed if something precedes it
    let onsets: Vec<usize> = segments
        .segments
        .iter()
        .enumerate()
        .filter(|(i, s)| *i > 0 && s.phase == Phase::RightStance)
        .map(|(i, _)| i)
        .collect();
    if onsets.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 complete gait cycles, found {}",
            onsets.len().saturating_sub(1)
        )));
    }
    let cycles: Vec<CycleBreakdown> = onsets
        .windows(2)
        .map(|w| {
            let segs = &segments.segments[w[0]..w[1]];
            let time_in = |p: Phase| segs.iter().filter(|s| s.phase == p).map(Segment::duration).sum::<f64>();
            let duration = segments.segments[w[1]].start_t - segs[0].start_t;
            let samples = |pred: fn(Phase) -> bool| {
                segs.iter().filter(|s| pred(s.phase)).map(|s| s.end_idx - s.start_idx).sum::<usize>()
            };
            let loaded = samples(|p| p != Phase::LeftStance) as f64;
            let total = samples(|_| true) as f64;
            CycleBreakdown {
                start_t: segs[0].start_t,
                duration_s: duration,
                right_stance_s: time_in(Phase::RightStance),
                double_stance_s: time_in(Phase::DoubleStance),
                left_stance_s: time_in(Phase::LeftStance),
                stance_pct: 100.0 * loaded / total,
            }
        })
        .collect();
    let n = cycles.len() as f64;
    let mean = cycles.iter().map(|c| c.stance_pct).sum::<f64>() / n;
    let var = cycles.iter().map(|c| (c.stance_pct - mean).powi(2)).sum::<f64>() / n;
    Ok(GaitCycleStats {
        mean_cycle_s: cycles.iter().map(|c| c.duration_s).sum::<f64>() / n,
        stance_pct_mean: mean,
        stance_pct_std: var.sqrt(),
        cycles,
        convention: CYCLE_CONVENTION,
    })
}
