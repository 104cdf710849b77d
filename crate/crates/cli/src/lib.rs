//! Command-line front end: training, std/acc comparison, bound validation and
//! synthetic data generation.
//!
//! Output files are deterministic under a fixed seed. The per-cycle CSV has
//! the columns listed in [`CYCLE_COLUMNS`] (prefixed by `algo` for `compare`),
//! and the report holds one JSON record per trained algorithm.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use graphquant::{
    generate_synthetic, random_prototypes, speedup, train_accelerated, train_standard, Dataset, DeltaMode,
    LearningRate, Matcher, TrainConfig, TrainReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

pub const CYCLE_COLUMNS: [&str; 8] = [
    "cycle",
    "distortion",
    "matcher_calls",
    "matcher_calls_pct",
    "pruned_c1",
    "pruned_c2",
    "delta_max",
    "stale_count",
];

#[derive(Debug, Parser)]
#[command(name = "graphquant", version, about = "Competitive learning quantization of attributed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one quantizer.
    Train(RunArgs),
    /// Train std and acc under the same seed and compare them.
    Compare(RunArgs),
    /// Run an instrumented accelerated training and audit every bound.
    ValidateBounds(RunArgs),
    /// Write a distorted-prototype dataset.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Std,
    Acc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatcherArg {
    Exact,
    Ga,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DeltaArg {
    Path,
    Displacement,
    Graph,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Line-delimited JSON graph file.
    #[arg(long)]
    dataset: PathBuf,
    /// Training algorithm (`train` only).
    #[arg(long, value_enum, default_value = "std")]
    algo: Algo,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 150)]
    cycles: usize,
    /// Upper bound staleness threshold of the accelerated algorithm [default: 0].
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    matcher: MatcherArg,
    /// `harmonic` or `exp:ETA0:TAU`.
    #[arg(long, default_value = "harmonic", value_parser = parse_lr)]
    lr: LearningRate,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How code graph movement is measured when widening bounds.
    #[arg(long, value_enum, default_value = "path")]
    delta: DeltaArg,
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    out_cycles: Option<PathBuf>,
    /// Audit bounds and pruning decisions against exact distances.
    #[arg(long)]
    instrument: bool,
    #[arg(long, hide = true)]
    corrupt_lower_bound: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    prototypes: usize,
    #[arg(long, default_value_t = 20)]
    copies: usize,
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 2)]
    attr_dim: usize,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    /// Attributes are drawn uniformly from `[0, scale)`.
    #[arg(long, default_value_t = 3.0)]
    scale: f64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0.0)]
    flip: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_lr(s: &str) -> Result<LearningRate, String> {
    if s == "harmonic" {
        return Ok(LearningRate::Harmonic);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let lr = match parts.as_slice() {
        ["exp", eta0, tau] => LearningRate::ExponentialDecay {
            eta0: eta0.parse().map_err(|e| format!("bad eta0 {eta0:?}: {e}"))?,
            tau: tau.parse().map_err(|e| format!("bad tau {tau:?}: {e}"))?,
        },
        _ => return Err(format!("expected `harmonic` or `exp:ETA0:TAU`, got {s:?}")),
    };
    lr.validate().map_err(|e| e.to_string())?;
    Ok(lr)
}

/// One record of the report file.
#[derive(Debug, Serialize)]
struct ReportRecord<'a> {
    algo: &'static str,
    dataset: String,
    k: usize,
    n_graphs: usize,
    cycles: usize,
    seed: u64,
    theta: f64,
    matcher: &'static str,
    distortion: f64,
    accuracy: Option<f64>,
    silhouette: Option<f64>,
    matcher_calls: u64,
    init_calls: u64,
    eval_calls: u64,
    pruned_c1: u64,
    pruned_c2: u64,
    bound_violations: u64,
    wrong_prunes: u64,
    theta_violations: u64,
    max_fresh_excess: f64,
    sinkhorn_warnings: u64,
    speedup: Option<f64>,
    notes: &'a str,
}

#[derive(Debug, Serialize)]
struct CycleRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    algo: Option<&'static str>,
    cycle: usize,
    distortion: f64,
    matcher_calls: u64,
    matcher_calls_pct: f64,
    pruned_c1: u64,
    pruned_c2: u64,
    delta_max: f64,
    stale_count: usize,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::ValidateBounds(args) => cmd_validate_bounds(&args),
        Command::Generate(args) => cmd_generate(&args).map(|()| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

struct Loaded {
    graphs: Vec<graphquant::Representation>,
    labels: Vec<String>,
}

fn load(path: &Path) -> anyhow::Result<Loaded> {
    let dataset = Dataset::load(path).with_context(|| format!("loading {}", path.display()))?;
    let graphs = dataset.representations()?;
    let labels = if dataset.has_labels() { dataset.labels() } else { Vec::new() };
    Ok(Loaded { graphs, labels })
}

fn config(args: &RunArgs, algo: Algo) -> anyhow::Result<TrainConfig> {
    if args.theta.is_some() && algo == Algo::Std {
        bail!("--theta only applies to the accelerated algorithm");
    }
    let matcher = match args.matcher {
        MatcherArg::Exact => Matcher::exact(),
        MatcherArg::Ga => Matcher::graduated_assignment(),
        MatcherArg::Brute => Matcher::BruteForce,
    };
    let delta_mode = match args.delta {
        DeltaArg::Path => DeltaMode::PathLength,
        DeltaArg::Displacement => DeltaMode::Displacement,
        DeltaArg::Graph => DeltaMode::GraphDistance,
    };
    let config = TrainConfig {
        cycles: args.cycles,
        theta: args.theta.unwrap_or(0.0),
        matcher,
        lr: args.lr,
        seed: args.seed,
        instrument_bounds: args.instrument,
        delta_mode,
        corrupt_lower_bounds: args.corrupt_lower_bound,
        ..TrainConfig::new(args.k)
    };
    config.validate()?;
    Ok(config)
}

fn train(loaded: &Loaded, config: &TrainConfig, algo: Algo) -> anyhow::Result<TrainReport> {
    let (_, report) = match algo {
        Algo::Std => train_standard(&loaded.graphs, &loaded.labels, config)?,
        Algo::Acc => train_accelerated(&loaded.graphs, &loaded.labels, config)?,
    };
    Ok(report)
}

fn record<'a>(args: &RunArgs, config: &TrainConfig, report: &'a TrainReport, speedup: Option<f64>) -> ReportRecord<'a> {
    let t = &report.totals;
    ReportRecord {
        algo: report.algorithm.name(),
        dataset: args.dataset.display().to_string(),
        k: report.k,
        n_graphs: report.n_graphs,
        cycles: config.cycles,
        seed: config.seed,
        theta: config.theta,
        matcher: config.matcher.name(),
        distortion: report.final_metrics.distortion,
        accuracy: report.final_metrics.accuracy,
        silhouette: report.final_metrics.silhouette,
        matcher_calls: t.matcher_calls,
        init_calls: t.init_calls,
        eval_calls: t.eval_calls,
        pruned_c1: t.pruned_c1,
        pruned_c2: t.pruned_c2,
        bound_violations: t.bound_violations,
        wrong_prunes: t.wrong_prunes,
        theta_violations: t.theta_violations,
        max_fresh_excess: t.max_fresh_excess,
        sinkhorn_warnings: t.sinkhorn_warnings,
        speedup: speedup.filter(|s| s.is_finite()),
        notes: &t.notes,
    }
}

fn write_report(path: &Path, records: &[ReportRecord]) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn write_cycles(path: &Path, reports: &[&TrainReport], with_algo: bool) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    for report in reports {
        let full = (report.k * report.n_graphs) as f64;
        for c in &report.per_cycle {
            out.serialize(CycleRow {
                algo: with_algo.then(|| report.algorithm.name()),
                cycle: c.cycle,
                distortion: c.distortion,
                matcher_calls: c.matcher_calls,
                matcher_calls_pct: 100.0 * c.matcher_calls as f64 / full,
                pruned_c1: c.pruned_c1,
                pruned_c2: c.pruned_c2,
                delta_max: c.delta_max,
                stale_count: c.stale_count,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>, scale: f64, precision: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.*}", precision, v * scale))
}

fn print_summary(records: &[ReportRecord]) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{:<6}{:>14}{:>10}{:>12}{:>12}{:>10}", "algo", "error", "accuracy", "silhouette", "matchings", "speedup")?;
    for r in records {
        writeln!(
            out,
            "{:<6}{:>14.4}{:>10}{:>12}{:>12}{:>10}",
            r.algo,
            r.distortion,
            fmt_opt(r.accuracy, 100.0, 1),
            fmt_opt(r.silhouette, 1.0, 3),
            r.matcher_calls,
            fmt_opt(r.speedup, 1.0, 2),
        )?;
    }
    Ok(())
}

fn cmd_train(args: &RunArgs) -> anyhow::Result<i32> {
    let config = config(args, args.algo)?;
    let loaded = load(&args.dataset)?;
    let report = train(&loaded, &config, args.algo)?;
    let records = [record(args, &config, &report, None)];
    if let Some(path) = &args.out_report {
        write_report(path, &records)?;
    }
    if let Some(path) = &args.out_cycles {
        write_cycles(path, &[&report], false)?;
    }
    print_summary(&records)?;
    Ok(EXIT_OK)
}

fn cmd_compare(args: &RunArgs) -> anyhow::Result<i32> {
    let std_config = TrainConfig { theta: 0.0, instrument_bounds: false, ..config(args, Algo::Acc)? };
    let acc_config = config(args, Algo::Acc)?;
    let loaded = load(&args.dataset)?;
    let std_report = train(&loaded, &std_config, Algo::Std)?;
    let acc_report = train(&loaded, &acc_config, Algo::Acc)?;
    let ratio = speedup(std_report.totals.matcher_calls, acc_report.totals.matcher_calls)?;
    let records = [
        record(args, &std_config, &std_report, Some(1.0)),
        record(args, &acc_config, &acc_report, Some(ratio)),
    ];
    if let Some(path) = &args.out_report {
        write_report(path, &records)?;
    }
    if let Some(path) = &args.out_cycles {
        write_cycles(path, &[&std_report, &acc_report], true)?;
    }
    print_summary(&records)?;
    Ok(EXIT_OK)
}

fn cmd_validate_bounds(args: &RunArgs) -> anyhow::Result<i32> {
    if !matches!(args.matcher, MatcherArg::Exact | MatcherArg::Brute) {
        bail!("validate-bounds requires an exact matcher");
    }
    let config = TrainConfig { instrument_bounds: true, ..config(args, Algo::Acc)? };
    let loaded = load(&args.dataset)?;
    let report = train(&loaded, &config, Algo::Acc)?;
    let records = [record(args, &config, &report, None)];
    if let Some(path) = &args.out_report {
        write_report(path, &records)?;
    }
    if let Some(path) = &args.out_cycles {
        write_cycles(path, &[&report], false)?;
    }
    let t = &report.totals;
    println!("bound_violations={}", t.bound_violations);
    println!("wrong_prunes={}", t.wrong_prunes);
    println!("theta_violations={}", t.theta_violations);
    println!("max_fresh_excess={}", t.max_fresh_excess);
    let failed = t.bound_violations + t.wrong_prunes + t.theta_violations > 0;
    println!("{}", if failed { "FAIL" } else { "OK" });
    Ok(if failed { EXIT_VIOLATION } else { EXIT_OK })
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let prototypes = random_prototypes(args.prototypes, args.order, args.attr_dim, args.edge_prob, args.scale, args.seed)?;
    let dataset = generate_synthetic(&prototypes, args.copies, args.noise, args.flip, args.seed)?;
    dataset.save(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wrote {} graphs to {}", dataset.len(), args.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn learning_rate_flag() {
        assert_eq!(parse_lr("harmonic"), Ok(LearningRate::Harmonic));
        assert_eq!(parse_lr("exp:0.5:20"), Ok(LearningRate::ExponentialDecay { eta0: 0.5, tau: 20.0 }));
        assert!(parse_lr("exp:0.5").is_err());
        assert!(parse_lr("exp:-1:2").is_err());
        assert!(parse_lr("linear").is_err());
    }

    #[test]
    fn theta_with_std_is_a_usage_error() {
        let cli = Cli::try_parse_from(["graphquant", "train", "--dataset", "x", "--k", "2", "--theta", "0.1"]).unwrap();
        let Command::Train(args) = cli.command else { unreachable!() };
        assert!(config(&args, Algo::Std).is_err());
        assert!(config(&args, Algo::Acc).is_ok());
    }

    #[test]
    fn unknown_flag_exits_with_usage_code() {
        assert_eq!(run(["graphquant", "train", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["graphquant", "--help"]), EXIT_OK);
    }

    #[test]
    fn validate_bounds_rejects_ga() {
        assert_eq!(run(["graphquant", "validate-bounds", "--dataset", "x", "--k", "2", "--matcher", "ga"]), EXIT_USAGE);
    }
}
