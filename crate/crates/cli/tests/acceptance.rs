//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use graphquant::{
    brute_force_distance, exact_distance, generate_synthetic, graduated_assignment_distance, random_prototypes,
    silhouette_index, train_accelerated, train_standard, GaParams, Permutation, Representation, TrainConfig,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT_PAIRS: usize = 200;
const EXACT_MAX_ORDER: usize = 6;
const EXACT_TIME_LIMIT: Duration = Duration::from_secs(60);
const METRIC_TRIPLES: usize = 100;
const METRIC_TOL: f64 = 1e-9;
const BOUNDS_TIME_LIMIT: Duration = Duration::from_secs(300);
const THETA_TOL: f64 = 1e-9;
const SPEEDUP_CYCLE: usize = 20;
const SPEEDUP_CYCLE_FRACTION: f64 = 0.5;
const SPEEDUP_TOTAL_FRACTION: f64 = 0.6;
const PARITY_DISTORTION_REL: f64 = 0.05;
const PARITY_SILHOUETTE_ABS: f64 = 0.05;
const SCALAR_TOL: f64 = 1e-6;
const SILHOUETTE_EXAMPLE: f64 = 0.8997;
const SILHOUETTE_TOL: f64 = 1e-4;
const SILHOUETTE_MATRICES: usize = 100;
const GA_PAIRS: usize = 100;
const GA_ORDER: usize = 5;
const GA_UNDERESTIMATE_TOL: f64 = 1e-9;
const GA_ISOMORPHIC_COST: f64 = 1e-6;
const GA_SUCCESS_RATE: f64 = 0.95;

// Clustered synthetic setup shared by the training criteria.
const PROTOTYPES: usize = 3;
const PROTOTYPE_ORDER: usize = 4;
const ATTR_DIM: usize = 2;
const COPIES: usize = 20;
const NOISE_SIGMA: f64 = 0.2;
const EDGE_FLIP: f64 = 0.05;
const K: usize = 3;
const CYCLES: usize = 50;
const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Criterion = fn() -> Result<Outcome, String>;

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("exact-matcher oracle equivalence", exact_matcher_oracle),
        ("metric axioms", metric_axioms),
        ("bound soundness and pruning correctness", bound_soundness),
        ("theta-deviation bound", theta_deviation),
        ("speedup behavior", speedup_behavior),
        ("solution-quality parity", quality_parity),
        ("scalar competitive learning", scalar_sanity),
        ("silhouette correctness", silhouette_correctness),
        ("graduated assignment validity", graduated_assignment_validity),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (number, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {} [{:.2}s]", number + 1, result.detail, start.elapsed().as_secs_f64());
        failures += usize::from(!result.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn random_rep(rng: &mut ChaCha8Rng, n: usize, r: usize, p_edge: f64) -> Representation {
    let mut x = Representation::zeros(n, r);
    for i in 0..n {
        for c in 0..r {
            x.cell_mut(i, i)[c] = rng.random_range(-2.0..2.0);
        }
        for j in i + 1..n {
            if rng.random_bool(p_edge) {
                let attr: Vec<f64> = (0..r).map(|_| rng.random_range(-2.0..2.0)).collect();
                x.cell_mut(i, j).copy_from_slice(&attr);
                x.cell_mut(j, i).copy_from_slice(&attr);
            }
        }
    }
    x
}

fn clustered() -> Result<(Vec<Representation>, Vec<String>), String> {
    let protos = random_prototypes(PROTOTYPES, PROTOTYPE_ORDER, ATTR_DIM, 0.5, 3.0, SEED).map_err(|e| e.to_string())?;
    let ds = generate_synthetic(&protos, COPIES, NOISE_SIGMA, EDGE_FLIP, SEED).map_err(|e| e.to_string())?;
    Ok((ds.representations().map_err(|e| e.to_string())?, ds.labels()))
}

fn config() -> TrainConfig {
    TrainConfig { cycles: CYCLES, seed: SEED, ..TrainConfig::new(K) }
}

fn exact_matcher_oracle() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..EXACT_PAIRS {
        let n = rng.random_range(1..=EXACT_MAX_ORDER);
        let r = rng.random_range(1..=2);
        let x = random_rep(&mut rng, n, r, 0.5);
        let y = random_rep(&mut rng, n, r, 0.5);
        let exact = exact_distance(&x, &y).map_err(|e| e.to_string())?;
        let brute = brute_force_distance(&x, &y).map_err(|e| e.to_string())?;
        if exact.cost != brute.cost {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    Ok(outcome(
        mismatches == 0 && elapsed < EXACT_TIME_LIMIT,
        format!("{mismatches} cost mismatches over {EXACT_PAIRS} pairs in {:.2}s", elapsed.as_secs_f64()),
    ))
}

fn metric_axioms() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut identity, mut symmetry, mut triangle) = (0, 0, 0);
    for _ in 0..METRIC_TRIPLES {
        let n = rng.random_range(1..=EXACT_MAX_ORDER);
        let r = rng.random_range(1..=2);
        let [x, y, z] = [0; 3].map(|_| random_rep(&mut rng, n, r, 0.5));
        let d = |a: &Representation, b: &Representation| exact_distance(a, b).map(|al| al.cost);
        let e = |err: graphquant::Error| err.to_string();
        identity += usize::from(d(&x, &x).map_err(e)? != 0.0);
        symmetry += usize::from((d(&x, &y).map_err(e)? - d(&y, &x).map_err(e)?).abs() > METRIC_TOL);
        triangle += usize::from(d(&x, &z).map_err(e)? > d(&x, &y).map_err(e)? + d(&y, &z).map_err(e)? + METRIC_TOL);
    }
    Ok(outcome(
        identity + symmetry + triangle == 0,
        format!("{METRIC_TRIPLES} triples: identity {identity}, symmetry {symmetry}, triangle {triangle} failures"),
    ))
}

fn bound_soundness() -> Result<Outcome, String> {
    let (graphs, labels) = clustered()?;
    let start = Instant::now();
    let config = TrainConfig { instrument_bounds: true, ..config() };
    let (_, report) = train_accelerated(&graphs, &labels, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let t = &report.totals;
    Ok(outcome(
        t.bound_violations == 0 && t.wrong_prunes == 0 && elapsed < BOUNDS_TIME_LIMIT,
        format!(
            "N={} k={K} theta=0 cycles={CYCLES}: {} bound violations, {} wrong prunes",
            graphs.len(),
            t.bound_violations,
            t.wrong_prunes
        ),
    ))
}

fn theta_deviation() -> Result<Outcome, String> {
    let (graphs, labels) = clustered()?;
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [0.1, 0.5] {
        let config = TrainConfig { theta, instrument_bounds: true, ..config() };
        let (_, report) = train_accelerated(&graphs, &labels, &config).map_err(|e| e.to_string())?;
        let t = &report.totals;
        pass &= t.max_fresh_excess <= theta + THETA_TOL && t.theta_violations == 0 && t.bound_violations == 0;
        parts.push(format!("theta={theta}: max excess {:.3e}, {} over", t.max_fresh_excess, t.theta_violations));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn speedup_behavior() -> Result<Outcome, String> {
    let (graphs, labels) = clustered()?;
    let (_, report) = train_accelerated(&graphs, &labels, &config()).map_err(|e| e.to_string())?;
    let full = (K * graphs.len()) as u64;
    let first = report.per_cycle[0].matcher_calls;
    let at = report.per_cycle[SPEEDUP_CYCLE - 1].matcher_calls as f64 / full as f64;
    let total = report.totals.matcher_calls as f64 / (CYCLES as u64 * full) as f64;
    Ok(outcome(
        first == full && at < SPEEDUP_CYCLE_FRACTION && total < SPEEDUP_TOTAL_FRACTION,
        format!(
            "cycle 1: {first}/{full} calls, cycle {SPEEDUP_CYCLE}: {:.1}%, total: {:.1}% of std",
            100.0 * at,
            100.0 * total
        ),
    ))
}

fn quality_parity() -> Result<Outcome, String> {
    let (graphs, labels) = clustered()?;
    let (_, std_report) = train_standard(&graphs, &labels, &config()).map_err(|e| e.to_string())?;
    let (_, acc_report) = train_accelerated(&graphs, &labels, &config()).map_err(|e| e.to_string())?;
    let (ds, da) = (std_report.final_metrics.distortion, acc_report.final_metrics.distortion);
    let rel = (ds - da).abs() / ds.abs().max(da.abs()).max(f64::MIN_POSITIVE);
    let (ss, sa) = match (std_report.final_metrics.silhouette, acc_report.final_metrics.silhouette) {
        (Some(s), Some(a)) => (s, a),
        _ => return Ok(outcome(false, "silhouette undefined".into())),
    };
    Ok(outcome(
        rel <= PARITY_DISTORTION_REL && (ss - sa).abs() <= PARITY_SILHOUETTE_ABS,
        format!("distortion std {ds:.4} acc {da:.4} (rel {rel:.2e}); silhouette std {ss:.4} acc {sa:.4}"),
    ))
}

/// 1-D competitive learning with the harmonic rate, visiting points in order.
fn reference_1d(points: &[f64], mut codes: Vec<f64>, cycles: usize) -> Vec<f64> {
    let mut wins = vec![0u64; codes.len()];
    for _ in 0..cycles {
        for &x in points {
            let j = (0..codes.len()).min_by(|&a, &b| (x - codes[a]).abs().total_cmp(&(x - codes[b]).abs())).unwrap();
            codes[j] += (x - codes[j]) / (wins[j] as f64 + 1.0);
            wins[j] += 1;
        }
    }
    codes.sort_by(f64::total_cmp);
    codes
}

fn scalar_sanity() -> Result<Outcome, String> {
    let points = [0.0, 1.0, 9.0, 10.0];
    let expected = reference_1d(&points, vec![1.0, 10.0], CYCLES);
    let graphs: Vec<_> =
        points.iter().map(|&v| Representation::from_vec(1, 1, vec![v])).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let config = TrainConfig { cycles: CYCLES, ..TrainConfig::new(2) };
    let mut pass = (expected[0] - 0.5).abs() <= SCALAR_TOL && (expected[1] - 9.5).abs() <= SCALAR_TOL;
    let mut found = Vec::new();
    for train in [train_standard, train_accelerated] {
        let (cb, _) = train(&graphs, &[], &config).map_err(|e| e.to_string())?;
        let mut codes: Vec<f64> = cb.reps.iter().map(|y| y.as_slice()[0]).collect();
        codes.sort_by(f64::total_cmp);
        pass &= codes.iter().zip(&expected).all(|(c, e)| (c - e).abs() <= SCALAR_TOL);
        found.push(format!("{codes:?}"));
    }
    Ok(outcome(pass, format!("reference {expected:?}, std {}, acc {}", found[0], found[1])))
}

fn silhouette_correctness() -> Result<Outcome, String> {
    let line = [0.0f64, 1.0, 10.0, 11.0];
    let d: Vec<Vec<f64>> = line.iter().map(|a| line.iter().map(|b| (a - b).abs()).collect()).collect();
    let example = silhouette_index(&d, &[0, 0, 1, 1]).map_err(|e| e.to_string())?;
    let mut pass = (example - SILHOUETTE_EXAMPLE).abs() <= SILHOUETTE_TOL;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..SILHOUETTE_MATRICES {
        let n = rng.random_range(3..15);
        let mut m = vec![vec![0.0; n]; n];
        for (i, j) in (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))) {
            let v = rng.random_range(0.0..10.0);
            m[i][j] = v;
            m[j][i] = v;
        }
        let mut clusters: Vec<usize> = (0..n).map(|i| i % 2).collect();
        for c in clusters.iter_mut().skip(2) {
            *c = rng.random_range(0..3);
        }
        let scale = rng.random_range(0.01..100.0);
        let scaled: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|v| v * scale).collect()).collect();
        let s = silhouette_index(&m, &clusters).map_err(|e| e.to_string())?;
        let t = silhouette_index(&scaled, &clusters).map_err(|e| e.to_string())?;
        if !(-1.0..=1.0).contains(&s) || (s - t).abs() > 1e-9 {
            bad += 1;
        }
    }
    pass &= bad == 0;
    Ok(outcome(
        pass,
        format!("hand example {example:.6}; {bad} of {SILHOUETTE_MATRICES} random matrices out of range or scale-variant"),
    ))
}

fn graduated_assignment_validity() -> Result<Outcome, String> {
    let params = GaParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut underestimates = 0;
    for _ in 0..GA_PAIRS {
        let x = random_rep(&mut rng, GA_ORDER, 2, 0.5);
        let y = random_rep(&mut rng, GA_ORDER, 2, 0.5);
        let ga = graduated_assignment_distance(&x, &y, &params).map_err(|e| e.to_string())?;
        let exact = exact_distance(&x, &y).map_err(|e| e.to_string())?;
        underestimates += usize::from(ga.cost < exact.cost - GA_UNDERESTIMATE_TOL);
    }
    let mut found = 0;
    for _ in 0..GA_PAIRS {
        let x = random_rep(&mut rng, GA_ORDER, 2, 0.5);
        let mut map: Vec<usize> = (0..GA_ORDER).collect();
        map.shuffle(&mut rng);
        let y = x.permute(&Permutation::new(map).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let ga = graduated_assignment_distance(&x, &y, &params).map_err(|e| e.to_string())?;
        found += usize::from(ga.cost <= GA_ISOMORPHIC_COST);
    }
    let rate = found as f64 / GA_PAIRS as f64;
    Ok(outcome(
        underestimates == 0 && rate >= GA_SUCCESS_RATE,
        format!("{underestimates} underestimates over {GA_PAIRS} pairs; isomorphic pairs solved {:.0}%", 100.0 * rate),
    ))
}

fn run_compare(bin: &str, dataset: &Path, dir: &Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let report = dir.join("report.jsonl");
    let cycles = dir.join("cycles.csv");
    let status = Command::new(bin)
        .args(["compare", "--k", &K.to_string(), "--cycles", &CYCLES.to_string(), "--seed", &SEED.to_string()])
        .arg("--dataset")
        .arg(dataset)
        .arg("--out-report")
        .arg(&report)
        .arg("--out-cycles")
        .arg(&cycles)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("compare failed: {}", String::from_utf8_lossy(&status.stderr)));
    }
    Ok((std::fs::read(report).map_err(|e| e.to_string())?, std::fs::read(cycles).map_err(|e| e.to_string())?))
}

fn determinism() -> Result<Outcome, String> {
    let bin = env!("CARGO_BIN_EXE_graphquant");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dataset = dir.path().join("data.jsonl");
    let protos = random_prototypes(PROTOTYPES, PROTOTYPE_ORDER, ATTR_DIM, 0.5, 3.0, SEED).map_err(|e| e.to_string())?;
    generate_synthetic(&protos, COPIES, NOISE_SIGMA, EDGE_FLIP, SEED)
        .and_then(|ds| ds.save(&dataset))
        .map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    std::fs::create_dir_all(&a).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&b).map_err(|e| e.to_string())?;
    let first = run_compare(bin, &dataset, &a)?;
    let second = run_compare(bin, &dataset, &b)?;
    let same_report = first.0 == second.0;
    let same_cycles = first.1 == second.1;
    Ok(outcome(
        same_report && same_cycles && !first.1.is_empty(),
        format!("report identical: {same_report}, cycle CSV identical: {same_cycles}"),
    ))
}
