//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Criterion numbers given as arguments restrict
//! the run, e.g. `cargo test --test acceptance -- 1 8`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use gaitweight::control::closed_loop_compare;
use gaitweight::data::{
    save_trial_csv, stance_interpolation, synth_corpus, synth_gait, Condition, GaitSynthParams, Trial,
};
use gaitweight::nn::{finite_diff_grad, max_relative_error, ModelConfig, WindowMatrix, CHANNELS};
use gaitweight::streaming::{bench_latency, model_from_bytes, model_to_bytes, StreamingEstimator};
use gaitweight::training::{evaluate, evaluate_with, group_by_user, loocv, train, ConstantPredictor, TrainConfig};
use gaitweight::StanceModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Users 2..6 of the seed-0 corpus train both variants; user 1 is held out.
struct HeldOut {
    test: Vec<Trial>,
    train_mse: f64,
    tw300: StanceModel,
    tw0: StanceModel,
}

fn held_out() -> &'static HeldOut {
    static CELL: OnceLock<HeldOut> = OnceLock::new();
    CELL.get_or_init(|| {
        let corpus = synth_corpus(6, &[Condition::Transparent], 60.0, 0).unwrap();
        let (test, train_set) = (corpus[..1].to_vec(), corpus[1..].to_vec());
        let tw300 = train::<f64>(&train_set, &TrainConfig::default()).unwrap().model;
        let tw0 = train::<f64>(&train_set, &TrainConfig::default().with_window_len(1)).unwrap().model;
        let train_mse = evaluate(&tw300, &train_set).unwrap().mse;
        HeldOut { test, train_mse, tw300, tw0 }
    })
}

fn latency() -> Outcome {
    let m = &held_out().tw300;
    let stats = bench_latency(m, 10_000, 200).map_err(|e| e.to_string())?;
    check(
        stats.n >= 10_000 && stats.p99_us < 1000.0,
        format!(
            "p99 {:.1} us over {} predictions (mean {:.1}, max {:.1}); limit 1000 us",
            stats.p99_us, stats.n, stats.mean_us, stats.max_us
        ),
    )
}

fn gradients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let triples = 24;
    for k in 0..triples {
        let window_len = if k % 4 == 3 { 1 } else { 99 };
        let mut m = gaitweight::nn::StanceModel::<f64>::zeroed(ModelConfig::default().with_window_len(window_len)).unwrap();
        for i in 0..m.params.num_params() {
            *m.params.get_mut(i).unwrap() = rng.gen_range(-0.5..0.5);
        }
        let data: Vec<f64> = (0..window_len * CHANNELS).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = WindowMatrix::from_vec(data, window_len, CHANNELS).unwrap();
        let target = rng.gen_range(0.0..1.0);
        let (_, cache) = m.forward(&x.view(), false, 0).unwrap();
        let analytic = m.backward(&cache, &x.view(), target).unwrap();
        let numeric = finite_diff_grad(&m, &x.view(), target, 1e-6).unwrap();
        worst = worst.max(max_relative_error(&analytic, &numeric));
    }
    check(worst <= 1e-5, format!("max relative error {worst:.2e} over {triples} triples; limit 1e-5"))
}

fn streaming_equivalence() -> Outcome {
    let h = held_out();
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for seed in [11, 12, 13] {
        let trial = synth_gait(&GaitSynthParams { seed, ..Default::default() }, 20.0).unwrap();
        for model in [&h.tw300, &h.tw0] {
            let mut est = StreamingEstimator::new(model);
            for (i, s) in trial.kinematics.iter().enumerate() {
                let streamed = est.push(s).unwrap();
                if i + 1 < model.window_len() {
                    if streamed.is_some() {
                        return Err(format!("prediction before the window filled at index {i}"));
                    }
                    continue;
                }
                let batch = model.predict(&trial.window_extract(i, model).unwrap().view()).unwrap();
                worst = worst.max((streamed.unwrap() - batch).abs());
                compared += 1;
            }
        }
    }
    check(worst <= 1e-12, format!("max |stream - batch| {worst:.2e} over {compared} predictions; limit 1e-12"))
}

fn alpha_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 20_000;
    let min_total = 20.0;
    let mut failures = Vec::new();
    let mut held = 0;
    for k in 0..n {
        // every other pair straddles the load threshold
        let top = if k % 2 == 0 { 1500.0 } else { 30.0 };
        let l: f64 = rng.gen_range(0.0..top);
        let r: f64 = rng.gen_range(0.0..top);
        let c: f64 = rng.gen_range(0.05..20.0);
        let prev: f64 = rng.gen_range(0.0..1.0);
        let si = |l: f64, r: f64| stance_interpolation(l, r, prev, min_total).unwrap();
        let a = si(l, r);
        if !(0.0..=1.0).contains(&a) {
            failures.push(format!("range at pair {k}"));
        }
        if l + r >= min_total {
            if (a - r / (l + r)).abs() > 1e-12 {
                failures.push(format!("definition at pair {k}"));
            }
            if (a + si(r, l) - 1.0).abs() > 1e-12 {
                failures.push(format!("symmetry at pair {k}"));
            }
            if c * (l + r) >= min_total && (si(c * l, c * r) - a).abs() > 1e-12 {
                failures.push(format!("scale invariance at pair {k}"));
            }
        } else {
            held += 1;
            if a != prev {
                failures.push(format!("hold at pair {k}"));
            }
        }
    }
    check(failures.is_empty(), format!(
            "{n} random force pairs ({held} below the load threshold), {} violations{}",
            failures.len(),
            failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
        ))
}

fn window_history() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 0..3u64 {
        let t0 = Instant::now();
        let by_user = group_by_user(synth_corpus(6, &[Condition::Transparent], 60.0, seed).unwrap());
        let cfg = TrainConfig { seed, ..TrainConfig::default() };
        let report = loocv(&by_user, &cfg, &[1, 99]).map_err(|e| e.to_string())?;
        let (m0, m300) = (report.mean_test_mse("tw0").unwrap(), report.mean_test_mse("tw300").unwrap());
        let r300 = report.mean_test_r2("tw300").unwrap();
        let pass = m300 <= m0 && r300 >= 0.85;
        ok &= pass;
        lines.push(format!(
            "seed {seed}: tw300 mse {m300:.4} vs tw0 {m0:.4}, tw300 r2 {r300:.3} ({:.0} s)",
            t0.elapsed().as_secs_f64()
        ));
    }
    check(ok, format!("{}; need tw300 mse <= tw0 mse and r2 >= 0.85", lines.join("; ")))
}

fn learning_sanity() -> Outcome {
    let h = held_out();
    let test = evaluate(&h.tw300, &h.test).map_err(|e| e.to_string())?;
    let base = evaluate_with(&mut ConstantPredictor { value: 0.5, window_len: 99 }, &h.test).unwrap();
    check(
        test.mse <= 0.25 * base.mse && h.train_mse <= 0.25 * base.mse,
        format!(
            "held-out mse {:.4} (train {:.4}) vs constant-0.5 baseline {:.4}; limit 0.25x = {:.4}",
            test.mse,
            h.train_mse,
            base.mse,
            0.25 * base.mse
        ),
    )
}

fn stance_timing() -> Outcome {
    let h = held_out();
    let r = closed_loop_compare(&h.test[0], &h.tw300).map_err(|e| e.to_string())?;
    let diff = (r.stance_frac_pred - r.stance_frac_truth).abs();
    check(
        diff <= 10.0,
        format!(
            "stance fraction predicted {:.1}% vs truth {:.1}% (difference {diff:.1} points; limit 10)",
            r.stance_frac_pred, r.stance_frac_truth
        ),
    )
}

fn persistence() -> Outcome {
    let h = held_out();
    let bytes = model_to_bytes(&h.tw300);
    let loaded: StanceModel = model_from_bytes(&bytes).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trial = &h.test[0];
    let mut mismatched = 0;
    for _ in 0..100 {
        let i = rng.gen_range(98..trial.len());
        let w = trial.window_extract(i, &h.tw300).unwrap();
        let (a, b) = (h.tw300.predict(&w.view()).unwrap(), loaded.predict(&w.view()).unwrap());
        mismatched += usize::from(a.to_bits() != b.to_bits());
    }
    let mut undetected = 0;
    let mut variants = 0;
    for pos in 0..bytes.len() {
        let mut b = bytes.clone();
        b[pos] ^= 1 << rng.gen_range(0..8);
        undetected += usize::from(model_from_bytes::<f64>(&b).is_ok());
        undetected += usize::from(model_from_bytes::<f64>(&bytes[..pos]).is_ok());
        variants += 2;
    }
    for _ in 0..1000 {
        let mut b = bytes.clone();
        for _ in 0..rng.gen_range(2..16) {
            let pos = rng.gen_range(0..b.len());
            b[pos] = b[pos].wrapping_add(rng.gen_range(1..=255));
        }
        undetected += usize::from(model_from_bytes::<f64>(&b).is_ok());
        variants += 1;
    }
    check(
        mismatched == 0 && undetected == 0,
        format!("{mismatched}/100 windows differ after reload; {undetected}/{variants} corrupted files accepted"),
    )
}

fn determinism() -> Outcome {
    let run = || {
        let corpus = synth_corpus(3, &[Condition::Transparent, Condition::Rendering], 8.0, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files: Vec<Vec<u8>> = corpus
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let p = dir.path().join(format!("{i}.csv"));
                save_trial_csv(t, &p).unwrap();
                std::fs::read(&p).unwrap()
            })
            .collect();
        let cfg = TrainConfig { epochs: 2, seed: 4, ..TrainConfig::default() };
        let model = model_to_bytes(&train::<f64>(&corpus, &cfg).unwrap().model);
        let small = TrainConfig { epochs: 1, stride: 20, ..cfg };
        let report = loocv(&group_by_user(corpus), &small, &[1, 99]).unwrap().to_csv();
        (files, model, report)
    };
    let (a, b) = (run(), run());
    check(
        a.0 == b.0 && a.1 == b.1 && a.2 == b.2,
        format!(
            "trial files identical: {}, models identical: {}, loocv reports identical: {}",
            a.0 == b.0,
            a.1 == b.1,
            a.2 == b.2
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "latency", latency),
        (2, "gradient correctness", gradients),
        (3, "streaming/batch equivalence", streaming_equivalence),
        (4, "stance interpolation invariants", alpha_invariants),
        (5, "window-history benefit", window_history),
        (6, "learning sanity", learning_sanity),
        (7, "closed-loop stance timing", stance_timing),
        (8, "persistence", persistence),
        (9, "determinism", determinism),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {n} {name}: {d} [{secs:.1} s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL {n} {name}: {d} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
