use gaitweight::data::{standardize_fit, synth_corpus, synth_gait, Condition, GaitSynthParams, Trial};
use gaitweight::training::{
    build_dataset, evaluate, evaluate_with, group_by_user, loocv, r_squared, train, variant_label, ConstantPredictor,
    PerfectPredictor, TrainConfig, TrainedModel, LOOCV_COLUMNS,
};
use gaitweight::Error;
use proptest::prelude::*;

fn corpus(users: usize, secs: f64, seed: u64) -> Vec<Trial> {
    synth_corpus(users, &[Condition::Transparent], secs, seed).unwrap()
}

fn truncated(trial: &Trial, n: usize) -> Trial {
    Trial::new(
        trial.user_id.clone(),
        trial.condition,
        trial.sample_rate_hz,
        trial.kinematics[..n].to_vec(),
        trial.grf[..n].to_vec(),
    )
    .unwrap()
}

#[test]
fn dataset_pair_count() {
    let tr = synth_gait(&GaitSynthParams::default(), 60.0).unwrap();
    assert_eq!(tr.len(), 19980);
    let ds = build_dataset(std::slice::from_ref(&tr), 99, 5).unwrap();
    assert_eq!(ds.len(), (19980 - 98 - 1) / 5 + 1);
    assert_eq!(ds.pairs[0].index, 98);
    assert!(ds.pairs.iter().all(|p| p.target == tr.alpha.alpha[p.index]));
}

#[test]
fn short_trial_is_skipped() {
    let tr = synth_gait(&GaitSynthParams::default(), 5.0).unwrap();
    let short = truncated(&tr, 98);
    let trials = [short, tr.clone()];
    let ds = build_dataset(&trials, 99, 1).unwrap();
    assert_eq!(ds.skipped_trials, 1);
    assert!(ds.pairs.iter().all(|p| p.trial == 1));
    assert_eq!(ds.len(), tr.len() - 98);
    let only_short = build_dataset(&trials[..1], 99, 1).unwrap();
    assert!(only_short.is_empty());
}

#[test]
fn strided_targets_are_a_subsequence() {
    let trials = corpus(2, 6.0, 3);
    let d1 = build_dataset(&trials, 99, 1).unwrap();
    let d5 = build_dataset(&trials, 99, 5).unwrap();
    let mut it = d1.pairs.iter();
    for p in &d5.pairs {
        assert!(it.any(|q| q == p), "{p:?} missing from the stride-1 set");
    }
    // no window crosses a trial boundary
    for p in &d1.pairs {
        assert!(p.index + 1 >= 99 && p.index < trials[p.trial].len());
    }
}

#[test]
fn invalid_configs_rejected() {
    let trials = corpus(2, 6.0, 0);
    for cfg in [
        TrainConfig { epochs: 0, ..Default::default() },
        TrainConfig { batch_size: 0, ..Default::default() },
        TrainConfig { stride: 0, ..Default::default() },
    ] {
        assert!(matches!(train::<f64>(&trials, &cfg), Err(Error::InvalidArgument(_))));
    }
    assert!(train::<f64>(&[], &TrainConfig::default()).is_err());
    assert!(build_dataset(&trials, 99, 0).is_err());
}

fn quick(trials: &[Trial], window_len: usize, seed: u64, epochs: usize) -> TrainedModel<f64> {
    let cfg = TrainConfig { epochs, seed, ..TrainConfig::default().with_window_len(window_len) };
    train(trials, &cfg).unwrap()
}

#[test]
fn same_seed_same_model() {
    let trials = corpus(2, 8.0, 1);
    let a = quick(&trials, 99, 7, 2);
    let b = quick(&trials, 99, 7, 2);
    assert_eq!(a.model, b.model);
    assert_eq!(a.epochs, b.epochs);
    let c = quick(&trials, 99, 8, 2);
    assert_ne!(a.model.params, c.model.params);
}

#[test]
fn standardization_comes_from_training_trials() {
    let trials = corpus(2, 8.0, 2);
    let m = quick(&trials, 1, 0, 1);
    let (mean, std) = standardize_fit(&trials).unwrap();
    assert_eq!(m.model.channel_mean, mean);
    assert_eq!(m.model.channel_std, std);
}

#[test]
fn loss_decreases_for_each_corpus_seed() {
    for seed in 0..3 {
        let trials = corpus(2, 12.0, seed);
        let m = quick(&trials, 99, seed, 10);
        let first = m.epochs.first().unwrap().mean_loss;
        let last = m.epochs.last().unwrap().mean_loss;
        assert!(last < first, "seed {seed}: {first} -> {last}");
        assert_eq!(m.epochs.len(), 10);
        assert_eq!(m.n_windows, build_dataset(&trials, 99, 5).unwrap().len());
    }
}

#[test]
fn perfect_and_constant_predictors() {
    let trials = corpus(3, 20.0, 4);
    let perfect = evaluate_with(&mut PerfectPredictor { window_len: 99 }, &trials).unwrap();
    assert_eq!(perfect.r2, 1.0);
    assert_eq!(perfect.mse, 0.0);
    assert_eq!(perfect.n_windows, trials.iter().map(|t| t.len() - 98).sum::<usize>());
    assert_eq!(perfect.per_user.len(), 3);

    let flat = evaluate_with(&mut ConstantPredictor { value: 0.5, window_len: 99 }, &trials).unwrap();
    let a: Vec<f64> = trials.iter().flat_map(|t| t.alpha.alpha[98..].iter().copied()).collect();
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    let var = a.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / a.len() as f64;
    assert!(flat.r2.abs() <= 0.05, "r2 {}", flat.r2);
    // mse = var + (mean - 0.5)^2 exactly
    assert!((flat.mse - (var + (mean - 0.5).powi(2))).abs() < 1e-12);
    assert!((flat.mse - var).abs() <= 0.05 * var);
}

#[test]
fn evaluate_is_order_independent() {
    let trials = corpus(2, 8.0, 5);
    let m = quick(&trials, 1, 0, 1);
    let fwd = evaluate(&m.model, &trials).unwrap();
    let rev: Vec<Trial> = trials.iter().rev().cloned().collect();
    let back = evaluate(&m.model, &rev).unwrap();
    assert!((fwd.mse - back.mse).abs() <= 1e-12);
    assert!((fwd.r2 - back.r2).abs() <= 1e-12);
    assert!(matches!(evaluate(&m.model, &[]), Err(Error::InvalidArgument(_))));
}

#[test]
fn loocv_structure() {
    let by_user = group_by_user(corpus(3, 5.0, 6));
    let cfg = TrainConfig { epochs: 1, ..TrainConfig::default() };
    let report = loocv(&by_user, &cfg, &[1, 99]).unwrap();
    assert_eq!(report.rows.len(), 6);
    for variant in ["tw0", "tw300"] {
        let rows: Vec<_> = report.rows_for(variant).collect();
        assert_eq!(rows.len(), 3);
        for r in rows {
            assert!(!r.train_users.contains(&r.test_user));
            assert_eq!(r.train_users.len(), 2);
            assert!(r.train_mse >= 0.0 && r.test_mse >= 0.0 && r.r2_test <= 1.0);
        }
    }
    let csv = report.to_csv();
    assert_eq!(csv.lines().next().unwrap(), LOOCV_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().nth(1).unwrap().starts_with("us2;us3,us1,tw0,"));

    let one = group_by_user(corpus(1, 5.0, 6));
    assert!(matches!(loocv(&one, &cfg, &[1]), Err(Error::InvalidArgument(_))));
}

#[test]
fn variant_labels() {
    assert_eq!(variant_label(1, 333.0), "tw0");
    assert_eq!(variant_label(99, 333.0), "tw300");
}

#[test]
fn r2_rejects_degenerate_inputs() {
    assert!(matches!(r_squared(&[0.1, 0.2], &[0.5, 0.5]), Err(Error::UndefinedMetric(_))));
    assert!(matches!(r_squared(&[0.1], &[0.5]), Err(Error::InvalidArgument(_))));
}

proptest! {
    #[test]
    fn r2_is_permutation_invariant(
        pairs in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..60),
        rot in 0usize..60,
    ) {
        let (p, a): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        prop_assume!(a.iter().any(|x| (x - a[0]).abs() > 1e-6));
        let base = r_squared(&p, &a).unwrap();
        let mut shuffled = pairs.clone();
        shuffled.rotate_left(rot % pairs.len());
        shuffled.reverse();
        let (p2, a2): (Vec<f64>, Vec<f64>) = shuffled.into_iter().unzip();
        let r2 = r_squared(&p2, &a2).unwrap();
        prop_assert!((base - r2).abs() <= 1e-9 * base.abs().max(1.0));
        prop_assert!(base <= 1.0);
    }
}
