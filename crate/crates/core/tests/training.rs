use graphquant::{
    generate_synthetic, random_prototypes, train_accelerated, train_standard, DeltaMode, LearningRate, Matcher,
    Representation, TrainConfig,
};

fn scalar(v: f64) -> Representation {
    Representation::from_vec(1, 1, vec![v]).unwrap()
}

/// Plain 1-D competitive learning with the harmonic rate.
fn reference_1d(points: &[f64], mut codes: Vec<f64>, cycles: usize) -> Vec<f64> {
    let mut wins = vec![0u64; codes.len()];
    for _ in 0..cycles {
        for &x in points {
            let j = (0..codes.len())
                .min_by(|&a, &b| (x - codes[a]).abs().total_cmp(&(x - codes[b]).abs()))
                .unwrap();
            let eta = 1.0 / (wins[j] as f64 + 1.0);
            codes[j] += eta * (x - codes[j]);
            wins[j] += 1;
        }
    }
    codes
}

fn sorted_codes(reps: &[Representation]) -> Vec<f64> {
    let mut v: Vec<f64> = reps.iter().map(|y| y.as_slice()[0]).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn scalar_codes_converge_to_cluster_means() {
    let points = [0.0, 1.0, 9.0, 10.0];
    let mut oracle = reference_1d(&points, vec![1.0, 10.0], 50);
    oracle.sort_by(f64::total_cmp);
    assert!((oracle[0] - 0.5).abs() < 1e-6 && (oracle[1] - 9.5).abs() < 1e-6, "{oracle:?}");

    let s: Vec<_> = points.into_iter().map(scalar).collect();
    let config = TrainConfig { cycles: 50, ..TrainConfig::new(2) };
    for train in [train_standard, train_accelerated] {
        let (cb, _) = train(&s, &[], &config).unwrap();
        let codes = sorted_codes(&cb.reps);
        for (c, o) in codes.iter().zip(&oracle) {
            assert!((c - o).abs() < 1e-6, "{codes:?} vs {oracle:?}");
        }
    }
}

fn synthetic() -> (Vec<Representation>, Vec<String>) {
    let protos = random_prototypes(3, 4, 2, 0.5, 3.0, 11).unwrap();
    let ds = generate_synthetic(&protos, 10, 0.2, 0.05, 12).unwrap();
    (ds.representations().unwrap(), ds.labels())
}

#[test]
fn training_is_deterministic() {
    let (graphs, labels) = synthetic();
    let config = TrainConfig { cycles: 10, seed: 5, ..TrainConfig::new(3) };
    for train in [train_standard, train_accelerated] {
        let (a, ra) = train(&graphs, &labels, &config).unwrap();
        let (b, rb) = train(&graphs, &labels, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
    }
}

#[test]
fn accelerated_matches_standard_with_fewer_calls() {
    let (graphs, labels) = synthetic();
    let config = TrainConfig { cycles: 30, seed: 1, ..TrainConfig::new(3) };
    let (_, std_report) = train_standard(&graphs, &labels, &config).unwrap();
    let (_, acc_report) = train_accelerated(&graphs, &labels, &config).unwrap();
    assert_eq!(acc_report.per_cycle[0].matcher_calls, 3 * 30);
    assert!(acc_report.per_cycle.iter().all(|c| c.matcher_calls <= 90));
    assert!(acc_report.totals.matcher_calls < std_report.totals.matcher_calls);
    let (a, b) = (std_report.final_metrics.distortion, acc_report.final_metrics.distortion);
    assert!((a - b).abs() <= 0.05 * a.max(b), "{a} vs {b}");
}

#[test]
fn instrumented_runs_are_clean_for_every_sound_setting() {
    let (graphs, labels) = synthetic();
    for theta in [0.0, 0.1, 0.5] {
        let config = TrainConfig { cycles: 15, theta, instrument_bounds: true, ..TrainConfig::new(3) };
        let (_, report) = train_accelerated(&graphs, &labels, &config).unwrap();
        let t = &report.totals;
        assert_eq!((t.bound_violations, t.wrong_prunes, t.theta_violations), (0, 0, 0), "theta {theta}");
    }
}

#[test]
fn corrupted_lower_bounds_are_detected() {
    let (graphs, labels) = synthetic();
    let config = TrainConfig { cycles: 3, instrument_bounds: true, corrupt_lower_bounds: true, ..TrainConfig::new(3) };
    let (_, report) = train_accelerated(&graphs, &labels, &config).unwrap();
    assert!(report.totals.bound_violations > 0);
}

#[test]
fn every_delta_mode_and_schedule_trains() {
    let (graphs, labels) = synthetic();
    for delta_mode in [DeltaMode::PathLength, DeltaMode::Displacement, DeltaMode::GraphDistance] {
        for lr in [LearningRate::Harmonic, LearningRate::ExponentialDecay { eta0: 0.3, tau: 10.0 }] {
            let config = TrainConfig { cycles: 5, delta_mode, lr, ..TrainConfig::new(3) };
            let (cb, report) = train_accelerated(&graphs, &labels, &config).unwrap();
            assert_eq!(cb.k(), 3);
            assert_eq!(report.per_cycle.len(), 5);
            assert!(report.final_metrics.accuracy.is_some());
        }
    }
}

#[test]
fn graduated_assignment_training_runs() {
    let (graphs, labels) = synthetic();
    let config = TrainConfig { cycles: 3, matcher: Matcher::graduated_assignment(), ..TrainConfig::new(3) };
    let (_, report) = train_accelerated(&graphs, &labels, &config).unwrap();
    assert!(report.final_metrics.distortion.is_finite());
}

#[test]
fn k_equal_to_n_reaches_zero_distortion() {
    let (graphs, _) = synthetic();
    let graphs = &graphs[..6];
    let config = TrainConfig { cycles: 5, ..TrainConfig::new(6) };
    for train in [train_standard, train_accelerated] {
        let (_, report) = train(graphs, &[], &config).unwrap();
        assert!(report.final_metrics.distortion < 1e-9, "{}", report.final_metrics.distortion);
    }
}
