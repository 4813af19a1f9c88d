//! Parametric treadmill-walking generator.
//!
//! The gait cycle starts when the right foot begins loading. With `ds` the
//! double-stance fraction per transition, alpha ramps linearly 0 -> 1 over
//! `[0, ds)`, stays at 1 (right single stance) until 0.5, ramps back down over
//! `[0.5, 0.5 + ds)` and stays at 0 (left single stance) for the rest of the
//! cycle. Each leg is therefore in stance for `0.5 + ds` of the cycle.
//! Joint angles are smooth periodic functions of each leg's own phase; the left
//! leg lags the right by half a cycle.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::trial::{Condition, GrfSample, KinematicSample, Trial, DEFAULT_SAMPLE_RATE_HZ};
use crate::error::{Error, Result};
use crate::nn::CHANNELS;

/// Channel indices into a kinematic sample.
pub const L_HIP: usize = 0;
pub const R_HIP: usize = 1;
pub const L_KNEE: usize = 2;
pub const R_KNEE: usize = 3;
pub const BACKPACK: usize = 4;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaitSynthParams {
    pub user_id: String,
    pub condition: Condition,
    pub sample_rate_hz: f64,
    /// Steps per minute; one gait cycle is two steps.
    pub cadence: f64,
    /// Fraction of the cycle each foot is loaded. Must equal `0.5 + double_stance_fraction`.
    pub stance_fraction: f64,
    /// Fraction of the cycle spent in each of the two double-stance transitions.
    pub double_stance_fraction: f64,
    /// Peak-to-mean amplitude per channel, degrees.
    pub amplitude: [f64; CHANNELS],
    /// Mean angle per channel, degrees.
    pub offset: [f64; CHANNELS],
    /// Combined user and exoskeleton weight, newtons.
    pub body_weight_n: f64,
    /// Additive white noise per channel, degrees.
    pub kinematic_noise_deg: [f64; CHANNELS],
    /// Multiplicative noise on each loaded foot's force (relative std).
    pub grf_noise_frac: f64,
    /// Relative std of the per-cycle period.
    pub timing_jitter: f64,
    /// Relative std of the per-stride joint excursion, interpolated smoothly across each cycle.
    pub stride_amplitude_var: f64,
    /// Stationary std (degrees) of a slow mean-reverting posture drift added to every channel.
    pub posture_drift_deg: f64,
    /// Correlation time of the posture drift, seconds.
    pub posture_drift_tau_s: f64,
    pub seed: u64,
}

impl Default for GaitSynthParams {
    fn default() -> Self {
        Self {
            user_id: "us1".into(),
            condition: Condition::Transparent,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            cadence: 60.0,
            stance_fraction: 0.6,
            double_stance_fraction: 0.1,
            amplitude: [18.0, 18.0, 28.0, 28.0, 2.0],
            offset: [12.0, 12.0, 22.0, 22.0, 6.0],
            body_weight_n: 900.0,
            kinematic_noise_deg: [0.3, 0.3, 0.3, 0.3, 0.2],
            grf_noise_frac: 0.02,
            timing_jitter: 0.02,
            stride_amplitude_var: 0.08,
            posture_drift_deg: 3.0,
            posture_drift_tau_s: 2.0,
            seed: 0,
        }
    }
}

impl GaitSynthParams {
    /// Sets the double-stance fraction and the matching stance fraction.
    pub fn with_double_stance(mut self, double_stance_fraction: f64) -> Self {
        self.double_stance_fraction = double_stance_fraction;
        self.stance_fraction = 0.5 + double_stance_fraction;
        self
    }

    /// Turns off every stochastic component.
    pub fn noiseless(mut self) -> Self {
        self.kinematic_noise_deg = [0.0; CHANNELS];
        self.grf_noise_frac = 0.0;
        self.timing_jitter = 0.0;
        self.stride_amplitude_var = 0.0;
        self.posture_drift_deg = 0.0;
        self
    }

    pub fn cycle_period_s(&self) -> f64 {
        120.0 / self.cadence
    }

    /// Fraction of the cycle with exactly one loaded foot.
    pub fn single_stance_fraction(&self) -> f64 {
        1.0 - 2.0 * self.double_stance_fraction
    }

    pub fn validate(&self) -> Result<()> {
        let ds = self.double_stance_fraction;
        let finite = [
            self.sample_rate_hz,
            self.cadence,
            self.stance_fraction,
            ds,
            self.body_weight_n,
            self.grf_noise_frac,
            self.timing_jitter,
            self.stride_amplitude_var,
            self.posture_drift_deg,
            self.posture_drift_tau_s,
        ]
        .iter()
        .chain(&self.amplitude)
        .chain(&self.offset)
        .chain(&self.kinematic_noise_deg)
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("generator parameters must be finite".into()));
        }
        if !(0.0 < ds && ds < self.stance_fraction && self.stance_fraction < 1.0) {
            return Err(Error::Config(format!(
                "need 0 < double_stance_fraction ({ds}) < stance_fraction ({}) < 1",
                self.stance_fraction
            )));
        }
        if (self.stance_fraction - (0.5 + ds)).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "a symmetric gait with double stance {ds} has stance fraction {}, got {}",
                0.5 + ds,
                self.stance_fraction
            )));
        }
        if self.sample_rate_hz <= 0.0 || self.cadence <= 0.0 || self.body_weight_n <= 0.0 {
            return Err(Error::Config("sample rate, cadence and body weight must be positive".into()));
        }
        if self.grf_noise_frac < 0.0 || self.timing_jitter < 0.0 || self.kinematic_noise_deg.iter().any(|&n| n < 0.0) {
            return Err(Error::Config("noise levels must be non-negative".into()));
        }
        if self.stride_amplitude_var < 0.0 || self.posture_drift_deg < 0.0 || self.posture_drift_tau_s <= 0.0 {
            return Err(Error::Config("stride variability and drift must be non-negative, drift time positive".into()));
        }
        if self.timing_jitter >= 0.2 || self.grf_noise_frac >= 0.5 || self.stride_amplitude_var >= 0.3 {
            return Err(Error::Config(
                "timing jitter must be < 0.2, stride variability < 0.3 and force noise < 0.5".into(),
            ));
        }
        let peak = self.offset.iter().zip(&self.amplitude).map(|(o, a)| o.abs() + 1.6 * a.abs()).fold(0.0, f64::max);
        if peak > 170.0 {
            return Err(Error::Config("joint amplitudes/offsets exceed the physical angle range".into()));
        }
        Ok(())
    }

    /// Parameters for the `index`-th member of a synthetic cohort.
    ///
    /// Cadence, double stance, joint ranges, offsets and weight are drawn around
    /// the defaults from `corpus_seed`; the rendering condition narrows hip and
    /// knee excursions.
    pub fn cohort_member(index: usize, condition: Condition, corpus_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(corpus_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index as u64);
        let base = Self::default();
        let cadence = base.cadence * rng.gen_range(0.88..1.12);
        let ds = rng.gen_range(0.075..0.125);
        let scale: [f64; 3] = [rng.gen_range(0.85..1.15), rng.gen_range(0.85..1.15), rng.gen_range(0.7..1.3)];
        let shift: [f64; 3] = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-3.0..3.0)];
        let weight = rng.gen_range(750.0..1100.0);
        let render = if condition == Condition::Rendering { 0.8 } else { 1.0 };
        let amp = |i: usize, joint: usize| base.amplitude[i] * scale[joint] * if joint < 2 { render } else { 1.0 };
        let off = |i: usize, joint: usize| base.offset[i] + shift[joint];
        let seed_offset = if condition == Condition::Rendering { 1 } else { 0 };
        Self {
            user_id: format!("us{}", index + 1),
            condition,
            cadence,
            amplitude: [amp(L_HIP, 0), amp(R_HIP, 0), amp(L_KNEE, 1), amp(R_KNEE, 1), amp(BACKPACK, 2)],
            offset: [off(L_HIP, 0), off(R_HIP, 0), off(L_KNEE, 1), off(R_KNEE, 1), off(BACKPACK, 2)],
            body_weight_n: weight,
            seed: corpus_seed.wrapping_mul(1000).wrapping_add(2 * index as u64 + seed_offset),
            ..base
        }
        .with_double_stance(ds)
    }
}

/// Periodic bump centred at `mu` with concentration `kappa`, peak value 1.
fn bump(phase: f64, mu: f64, kappa: f64) -> f64 {
    (kappa * ((TAU * (phase - mu)).cos() - 1.0)).exp()
}

/// Ground-truth alpha at cycle phase `phase` in `[0, 1)`.
pub fn alpha_profile(phase: f64, ds: f64) -> f64 {
    if phase < ds {
        phase / ds
    } else if phase < 0.5 {
        1.0
    } else if phase < 0.5 + ds {
        1.0 - (phase - 0.5) / ds
    } else {
        0.0
    }
}

/// Noise-free joint-angle profile for one parameter set.
#[derive(Debug, Clone)]
pub struct GaitShape<'a> {
    params: &'a GaitSynthParams,
    knee_mean: f64,
}

impl<'a> GaitShape<'a> {
    pub fn new(params: &'a GaitSynthParams) -> Self {
        // periodic integrand: the rectangle rule converges geometrically
        const N: usize = 2048;
        let knee_mean = (0..N).map(|i| Self::knee_raw(params.stance_fraction, i as f64 / N as f64)).sum::<f64>() / N as f64;
        Self { params, knee_mean }
    }

    fn hip_raw(stance: f64, leg_phase: f64) -> f64 {
        // maximum extension at toe-off, a little asymmetry from the second harmonic
        (TAU * (leg_phase - (stance - 0.5))).cos() + 0.12 * (2.0 * TAU * (leg_phase - 0.1)).cos()
    }

    fn knee_raw(stance: f64, leg_phase: f64) -> f64 {
        let loading = 0.3 * bump(leg_phase, 0.25 * stance, 12.0);
        let swing = bump(leg_phase, stance + 0.4 * (1.0 - stance), 9.0);
        loading + swing
    }

    /// Joint angles at cycle phase `phase` (right foot starts loading at 0).
    /// Every channel's cycle mean equals its `offset`.
    pub fn angles(&self, phase: f64) -> [f64; CHANNELS] {
        self.angles_scaled(phase, 1.0)
    }

    /// As [`angles`](Self::angles) with every excursion multiplied by `scale`.
    pub fn angles_scaled(&self, phase: f64, scale: f64) -> [f64; CHANNELS] {
        let p = self.params;
        let amp = p.amplitude.map(|a| a * scale);
        let s = p.stance_fraction;
        let left = (phase + 0.5).rem_euclid(1.0);
        let mut theta = [0.0; CHANNELS];
        theta[L_HIP] = p.offset[L_HIP] + amp[L_HIP] * Self::hip_raw(s, left);
        theta[R_HIP] = p.offset[R_HIP] + amp[R_HIP] * Self::hip_raw(s, phase);
        theta[L_KNEE] = p.offset[L_KNEE] + amp[L_KNEE] * (Self::knee_raw(s, left) - self.knee_mean);
        theta[R_KNEE] = p.offset[R_KNEE] + amp[R_KNEE] * (Self::knee_raw(s, phase) - self.knee_mean);
        theta[BACKPACK] = p.offset[BACKPACK] + amp[BACKPACK] * (2.0 * TAU * phase + 0.3).cos();
        theta
    }
}

/// Synthesizes a trial of `duration_s` seconds, deterministic in `params.seed`.
pub fn synth_gait(params: &GaitSynthParams, duration_s: f64) -> Result<Trial> {
    params.validate()?;
    if !(duration_s >= 5.0) || !duration_s.is_finite() {
        return Err(Error::Config(format!("duration must be at least 5 s, got {duration_s}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let n = (duration_s * params.sample_rate_hz).round() as usize;
    let dt = 1.0 / params.sample_rate_hz;
    let base_period = params.cycle_period_s();
    let draw_period = |rng: &mut ChaCha8Rng| {
        let jitter = (params.timing_jitter * unit.sample(rng)).clamp(-0.2, 0.2);
        base_period * (1.0 + jitter)
    };

    let shape = GaitShape::new(params);
    let draw_scale = |rng: &mut ChaCha8Rng| 1.0 + (params.stride_amplitude_var * unit.sample(rng)).clamp(-0.5, 0.5);
    let decay = (-dt / params.posture_drift_tau_s).exp();
    let drift_step = params.posture_drift_deg * (1.0 - decay * decay).sqrt();
    let mut drift: [f64; CHANNELS] = std::array::from_fn(|_| params.posture_drift_deg * unit.sample(&mut rng));

    let mut kinematics = Vec::with_capacity(n);
    let mut grf = Vec::with_capacity(n);
    let mut cycle_start = 0.0;
    let mut period = draw_period(&mut rng);
    let mut scale_now = draw_scale(&mut rng);
    let mut scale_next = draw_scale(&mut rng);
    for i in 0..n {
        let t = i as f64 * dt;
        while t - cycle_start >= period {
            cycle_start += period;
            period = draw_period(&mut rng);
            scale_now = scale_next;
            scale_next = draw_scale(&mut rng);
        }
        let phase = ((t - cycle_start) / period).clamp(0.0, 1.0 - f64::EPSILON);
        let scale = scale_now + (scale_next - scale_now) * phase;
        let mut theta = shape.angles_scaled(phase, scale);
        for ((v, &sd), d) in theta.iter_mut().zip(&params.kinematic_noise_deg).zip(drift.iter_mut()) {
            *d = *d * decay + drift_step * unit.sample(&mut rng);
            *v += *d + sd * unit.sample(&mut rng);
        }
        let alpha = alpha_profile(phase, params.double_stance_fraction);
        // double-hump vertical load, peaks shortly after each loading transition
        let total = params.body_weight_n * (1.0 + 0.1 * (2.0 * TAU * (phase - params.double_stance_fraction)).cos());
        let mut noisy = |f: f64| (f * (1.0 + params.grf_noise_frac * unit.sample(&mut rng))).max(0.0);
        let f_right_y = noisy(total * alpha);
        let f_left_y = noisy(total * (1.0 - alpha));
        kinematics.push(KinematicSample { t, theta });
        grf.push(GrfSample { t, f_left_y, f_right_y });
    }
    Trial::new(params.user_id.clone(), params.condition, params.sample_rate_hz, kinematics, grf)
}

/// `n_users` cohort members, one trial per condition each, `duration_s` long.
pub fn synth_corpus(n_users: usize, conditions: &[Condition], duration_s: f64, corpus_seed: u64) -> Result<Vec<Trial>> {
    let mut trials = Vec::with_capacity(n_users * conditions.len());
    for u in 0..n_users {
        for &c in conditions {
            trials.push(synth_gait(&GaitSynthParams::cohort_member(u, c, corpus_seed), duration_s)?);
        }
    }
    Ok(trials)
}
