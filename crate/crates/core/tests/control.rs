use gaitweight::control::{
    closed_loop_compare, compare_series, cycle_stats, segment_phases, stream_trial, Phase, StanceSegments,
    DEFAULT_HI, DEFAULT_LO,
};
use gaitweight::data::{standardize_fit, synth_gait, AlphaSeries, GaitSynthParams};
use gaitweight::nn::ModelConfig;
use gaitweight::{Error, StanceModel};
use proptest::prelude::*;

fn series(alpha: Vec<f64>, rate: f64) -> AlphaSeries {
    let t = (0..alpha.len()).map(|i| i as f64 / rate).collect();
    AlphaSeries::new(t, alpha).unwrap()
}

fn square_wave(cycles: usize, half: usize) -> AlphaSeries {
    let alpha = (0..cycles * 2 * half).map(|i| if (i / half) % 2 == 0 { 0.0 } else { 1.0 }).collect();
    series(alpha, 100.0)
}

fn check_cover(s: &StanceSegments, n: usize) {
    let segs = &s.segments;
    assert_eq!(segs[0].start_idx, 0);
    assert_eq!(segs.last().unwrap().end_idx, n);
    for w in segs.windows(2) {
        assert_eq!(w[0].end_idx, w[1].start_idx);
        assert_eq!(w[0].end_t, w[1].start_t);
        assert_ne!(w[0].phase, w[1].phase);
    }
    assert!(segs.iter().all(|g| g.end_idx > g.start_idx && g.end_t >= g.start_t));
    if n > 1 {
        assert!(segs.iter().all(|g| g.end_t > g.start_t));
    }
}

#[test]
fn constant_zero_is_one_left_segment() {
    let s = segment_phases(&series(vec![0.0; 50], 100.0), DEFAULT_LO, DEFAULT_HI).unwrap();
    assert_eq!(s.segments.len(), 1);
    assert_eq!(s.segments[0].phase, Phase::LeftStance);
    assert!((s.segments[0].end_t - 0.5).abs() < 1e-12);
}

#[test]
fn square_wave_alternates_without_double_stance() {
    let sw = square_wave(5, 40);
    let s = segment_phases(&sw, DEFAULT_LO, DEFAULT_HI).unwrap();
    check_cover(&s, sw.len());
    assert_eq!(s.segments.len(), 10);
    assert!(s.segments.iter().all(|g| g.phase != Phase::DoubleStance));
    let stats = cycle_stats(&s).unwrap();
    assert_eq!(stats.stance_pct_mean, 50.0);
    assert_eq!(stats.stance_pct_std, 0.0);
    assert!((stats.mean_cycle_s - 0.8).abs() < 1e-12);
}

#[test]
fn bad_thresholds_and_empty_series() {
    let sw = square_wave(2, 10);
    for (lo, hi) in [(0.0, 0.9), (0.5, 0.5), (0.9, 0.1), (0.1, 1.0)] {
        assert!(matches!(segment_phases(&sw, lo, hi), Err(Error::InvalidArgument(_))));
    }
    assert!(matches!(
        segment_phases(&AlphaSeries::default(), DEFAULT_LO, DEFAULT_HI),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn too_few_cycles() {
    // two right-stance onsets bound only one complete cycle
    let s = segment_phases(&square_wave(2, 20), DEFAULT_LO, DEFAULT_HI).unwrap();
    assert!(matches!(cycle_stats(&s), Err(Error::InsufficientData(_))));
    let flat = segment_phases(&series(vec![0.5; 300], 100.0), DEFAULT_LO, DEFAULT_HI).unwrap();
    assert!(matches!(cycle_stats(&flat), Err(Error::InsufficientData(_))));
}

#[test]
fn generator_stance_fraction_recovered() {
    // right foot carries load from alpha > lo on the way up until alpha <= lo
    // on the way down; for the linear ramps that is 0.5 + 0.8 * ds of a cycle
    for seed in 0..3 {
        let p = GaitSynthParams { seed, ..Default::default() };
        let tr = synth_gait(&p, 30.0).unwrap();
        let s = segment_phases(&tr.alpha, DEFAULT_LO, DEFAULT_HI).unwrap();
        check_cover(&s, tr.len());
        let configured = 100.0 * p.stance_fraction;
        let expected = 100.0 * (0.5 + 0.8 * p.double_stance_fraction);
        let stats = cycle_stats(&s).unwrap();
        assert!((stats.stance_pct_mean - configured).abs() <= 3.0, "{}", stats.stance_pct_mean);
        assert!((stats.stance_pct_mean - expected).abs() <= 1.0, "{}", stats.stance_pct_mean);
        assert!((100.0 * s.loaded_fraction() - configured).abs() <= 3.0);
        assert!((stats.mean_cycle_s - p.cycle_period_s()).abs() <= 0.05 * p.cycle_period_s());
        for c in &stats.cycles {
            assert!(c.stance_pct > 0.0 && c.stance_pct < 100.0);
            let parts = c.left_stance_s + c.right_stance_s + c.double_stance_s;
            assert!((parts - c.duration_s).abs() < 1e-9);
        }
        assert!(!stats.convention.is_empty());
    }
}

#[test]
fn perfect_predictor_has_no_discrepancy() {
    let tr = synth_gait(&GaitSynthParams::default(), 10.0).unwrap();
    let r = compare_series(&tr.alpha, &tr.alpha).unwrap();
    assert_eq!(r.mse, 0.0);
    assert_eq!(r.r2, Some(1.0));
    assert_eq!(r.mean_abs_alpha_err, 0.0);
    assert_eq!(r.stance_frac_truth, r.stance_frac_pred);
}

#[test]
fn constant_half_predictor_is_all_double_stance() {
    let tr = synth_gait(&GaitSynthParams::default(), 10.0).unwrap();
    let flat = AlphaSeries::new(tr.alpha.t.clone(), vec![0.5; tr.len()]).unwrap();
    let r = compare_series(&tr.alpha, &flat).unwrap();
    assert_eq!(r.double_stance_frac_pred, 100.0);
    assert_eq!(r.stance_frac_pred, 100.0);
    assert!(r.stance_frac_truth < 70.0);
    let csv = r.to_csv();
    let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(csv.lines().next(), Some("metric,value"));
    assert_eq!(names, ["mse", "r2", "stance_frac_truth", "stance_frac_pred", "mean_abs_alpha_err"]);
}

#[test]
fn closed_loop_uses_streaming_predictions() {
    let tr = synth_gait(&GaitSynthParams { seed: 4, ..Default::default() }, 8.0).unwrap();
    let (m, s) = standardize_fit(std::slice::from_ref(&tr)).unwrap();
    let model = StanceModel::new(ModelConfig::default(), 1).unwrap().with_standardization(&m, &s).unwrap();
    let pred = stream_trial(&model, &tr).unwrap();
    assert_eq!(pred.len(), tr.len() - 98);
    assert_eq!(pred.t[0], tr.kinematics[98].t);
    let r = closed_loop_compare(&tr, &model).unwrap();
    assert_eq!(r.n, pred.len());
    let direct: f64 =
        pred.alpha.iter().zip(&tr.alpha.alpha[98..]).map(|(p, a)| (p - a).abs()).sum::<f64>() / pred.len() as f64;
    assert!((r.mean_abs_alpha_err - direct).abs() <= 1e-12);
}

fn canonical(p: Phase) -> f64 {
    match p {
        Phase::LeftStance => 0.0,
        Phase::RightStance => 1.0,
        Phase::DoubleStance => 0.5,
    }
}

proptest! {
    #[test]
    fn segmentation_is_idempotent_and_covering(alpha in proptest::collection::vec(0.0f64..=1.0, 1..300)) {
        let sr = series(alpha, 50.0);
        let s = segment_phases(&sr, DEFAULT_LO, DEFAULT_HI).unwrap();
        check_cover(&s, sr.len());
        let phases = s.sample_phases();
        prop_assert_eq!(phases.len(), sr.len());
        let again = series(phases.iter().map(|&p| canonical(p)).collect(), 50.0);
        prop_assert_eq!(segment_phases(&again, DEFAULT_LO, DEFAULT_HI).unwrap(), s);
    }

    #[test]
    fn mean_abs_err_reduces_to_alpha_error(
        pairs in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 2..200)
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let expected = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64;
        let r = compare_series(&series(a, 100.0), &series(b, 100.0)).unwrap();
        prop_assert!((r.mean_abs_alpha_err - expected).abs() <= 1e-12);
    }
}
