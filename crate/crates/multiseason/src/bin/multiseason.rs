//! Command-line interface: simulate, detect, fit, forecast, benchmark.
//!
//! Every subcommand is reproducible: the same invocation with the same
//! `--seed` writes byte-identical output. Human-readable tables print
//! numbers with six significant digits; JSON and CSV files carry full
//! precision and round-trip losslessly.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use multiseason::bench::{run_benchmark, BenchProtocol, BenchReport};
use multiseason::error::{MsError, Result};
use multiseason::predict;
use multiseason::selection::{select_model, Criterion, ModelDocument, MsConfig};
use multiseason::series::{read_series_csv, TimeSeries};
use multiseason::simgen::{gen_setup, SetupKind, SimSetup, SimulatedSeries};
use multiseason::spectrum::detect_candidates;

#[derive(Parser)]
#[command(
    name = "multiseason",
    version,
    about = "Forecasting for time series with multiple unknown seasonal periods",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for grid fitting and benchmarking (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic series from one of the study designs
    Simulate(SimulateArgs),
    /// Detect candidate seasonal periods in a series
    Detect(DetectArgs),
    /// Fit and select a model, writing it as a JSON document
    Fit(FitArgs),
    /// Forecast ahead from a fitted model document
    Forecast(ForecastArgs),
    /// Run the rolling-origin benchmark for one study design
    Benchmark(BenchmarkArgs),
}

/// Procedure configuration shared by detect, fit, and benchmark.
#[derive(Args)]
struct ConfigArgs {
    /// Seasonal components in the model; 0 gives the plain ARMA baseline
    #[arg(long)]
    r: usize,

    /// Lags per seasonal set; must exceed max(max-p, max-q)
    #[arg(long, default_value_t = 6)]
    tau: usize,

    /// Largest AR order tried
    #[arg(long = "max-p", default_value_t = 3)]
    max_p: usize,

    /// Largest MA order tried
    #[arg(long = "max-q", default_value_t = 3)]
    max_q: usize,

    /// Selection criterion: bc, aic, or bic
    #[arg(long, default_value = "bc")]
    criterion: Criterion,

    /// Smallest admissible seasonal period (never below max-p/max-q)
    #[arg(long)]
    min_period: Option<usize>,

    /// Largest admissible seasonal lag (default: half the series length)
    #[arg(long)]
    max_period: Option<usize>,

    /// Also consider models with fewer than r seasonal sets
    #[arg(long)]
    allow_fewer: bool,

    /// Optimizer starts per candidate model (extra starts are jittered)
    #[arg(long, default_value_t = 1)]
    multi_start: usize,

    /// Relative gradient tolerance of the optimizer
    #[arg(long, default_value_t = 1e-6)]
    grad_tol: f64,

    /// Seed feeding every stochastic component
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ConfigArgs {
    fn to_config(&self) -> MsConfig {
        MsConfig {
            r: self.r,
            tau: self.tau,
            p_max: self.max_p,
            q_max: self.max_q,
            criterion: self.criterion,
            min_period: self.min_period,
            max_period: self.max_period,
            allow_fewer: self.allow_fewer,
            multi_start: self.multi_start,
            seed: self.seed,
            grad_tol: self.grad_tol,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Design: trig-single, trig-double, non-trig-double, or mixed
    #[arg(long)]
    kind: SetupKind,

    /// Series length
    #[arg(long)]
    n: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the seasonal/noise components as extra columns
    #[arg(long)]
    components: bool,
}

#[derive(Args)]
struct DetectArgs {
    /// Input CSV: one number per line, optional header
    #[arg(long)]
    input: PathBuf,

    /// Subtract the sample mean before detection
    #[arg(long)]
    center: bool,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV: one number per line, optional header
    #[arg(long)]
    input: PathBuf,

    /// Subtract the sample mean before fitting (forecasts shift back)
    #[arg(long)]
    center: bool,

    /// Embed the full scored leaderboard in the document
    #[arg(long)]
    leaderboard: bool,

    /// Output path for the model JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ForecastArgs {
    /// Fitted model document from `fit`
    #[arg(long)]
    model: PathBuf,

    /// Series to forecast from (typically the one the model was fit on)
    #[arg(long)]
    input: PathBuf,

    /// Steps ahead to predict
    #[arg(long)]
    horizon: usize,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Design: trig-single, trig-double, non-trig-double, or mixed
    #[arg(long)]
    kind: SetupKind,

    /// Parallel sequences to generate
    #[arg(long, default_value_t = 10)]
    sequences: usize,

    /// Rolling evaluations per sequence
    #[arg(long, default_value_t = 10)]
    evaluations: usize,

    /// Training length of the first evaluation
    #[arg(long, default_value_t = 650)]
    initial_train: usize,

    /// Training-window growth between evaluations
    #[arg(long, default_value_t = 25)]
    increment: usize,

    /// Forecast length per evaluation
    #[arg(long, default_value_t = 100)]
    horizon: usize,

    /// Horizons at which CMSE is reported
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 5, 15, 50, 100])]
    report_points: Vec<usize>,

    /// Use the full-scale protocol (30 sequences x 50 evaluations, increment 5)
    #[arg(long)]
    paper_scale: bool,

    /// Fit on raw training windows instead of mean-centered ones
    #[arg(long)]
    no_center: bool,

    /// Write the full JSON report (raw cell matrix included) here
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    config: ConfigArgs,
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Detect(args) => detect(args),
        Command::Fit(args) => fit(args),
        Command::Forecast(args) => forecast(args),
        Command::Benchmark(args) => benchmark(args),
    }
}

/// Writes to the path, or stdout when no path is given.
fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Six significant digits for human-readable tables.
fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let sim = gen_setup(&SimSetup {
        kind: args.kind,
        n: args.n,
        seed: args.seed,
    })?;
    let content = if args.components {
        components_csv(&sim)
    } else {
        let mut text = String::from("x\n");
        for v in sim.series.values() {
            let _ = writeln!(text, "{v}");
        }
        text
    };
    emit(args.out.as_ref(), &content)?;
    if args.out.is_some() {
        println!("wrote {} rows ({})", args.n, args.kind);
    }
    Ok(())
}

fn components_csv(sim: &SimulatedSeries) -> String {
    let mut header = vec!["x"];
    if sim.trig.is_some() {
        header.push("trig");
    }
    if sim.a.is_some() {
        header.push("a");
    }
    if sim.b.is_some() {
        header.push("b");
    }
    header.push("z");
    let mut text = header.join(",");
    text.push('\n');
    for t in 0..sim.series.len() {
        let _ = write!(text, "{}", sim.series.values()[t]);
        if let Some(trig) = &sim.trig {
            let _ = write!(text, ",{}", trig[t]);
        }
        if let Some(a) = &sim.a {
            let _ = write!(text, ",{}", a[t]);
        }
        if let Some(b) = &sim.b {
            let _ = write!(text, ",{}", b[t]);
        }
        let _ = writeln!(text, ",{}", sim.z[t]);
    }
    text
}

fn detect(args: DetectArgs) -> Result<()> {
    let cfg = args.config.to_config();
    cfg.validate()?;
    if cfg.r == 0 {
        return Err(MsError::InvalidConfig(
            "detect needs r >= 1 seasonal components".into(),
        ));
    }
    let series = read_series_csv(&args.input)?;
    let series = if args.center {
        series.centered().0
    } else {
        series
    };
    let (min_lag, max_lag) = cfg.detection_bounds(series.len());
    let candidates = detect_candidates(&series, cfg.r, cfg.tau, min_lag, max_lag)?;
    println!("{:<8} {:<12} {:<6} {}", "center", "lags", "freq", "power");
    for c in &candidates {
        println!(
            "{:<8} {:<12} {:<6} {}",
            c.lag_set.center(),
            format!("{}..{}", c.lag_set.min_lag(), c.lag_set.max_lag()),
            c.freq_index,
            sig6(c.power)
        );
    }
    Ok(())
}

fn fit(args: FitArgs) -> Result<()> {
    let cfg = args.config.to_config();
    cfg.validate()?;
    let raw = read_series_csv(&args.input)?;
    let (series, center_mean) = if args.center {
        let (centered, mean) = raw.centered();
        (centered, Some(mean))
    } else {
        (raw, None)
    };
    let selection = select_model(&series, &cfg)?;
    let mut doc = ModelDocument::new(&selection.best, &cfg, center_mean);
    if args.leaderboard {
        doc = doc.with_leaderboard(&selection.leaderboard);
    }
    let json = doc.to_json()?;
    emit(args.out.as_ref(), &json)?;
    let best = &selection.best;
    let centers: Vec<String> = best
        .spec
        .lag_sets
        .iter()
        .map(|s| s.center().to_string())
        .collect();
    let summary = format!(
        "selected p={} q={} centers=[{}] {}={} over {} fitted specs ({} skipped)",
        best.spec.p,
        best.spec.q,
        centers.join(", "),
        best.criterion,
        sig6(best.criterion_value),
        selection.leaderboard.len(),
        selection.skipped.len(),
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn forecast(args: ForecastArgs) -> Result<()> {
    let doc = ModelDocument::from_json(&std::fs::read_to_string(&args.model)?)?;
    let raw = read_series_csv(&args.input)?;
    let mean = doc.center_mean.unwrap_or(0.0);
    let series = if doc.center_mean.is_some() {
        TimeSeries::new(raw.values().iter().map(|v| v - mean).collect())?
    } else {
        raw
    };
    let fitted = doc.to_fitted();
    let result = predict(&series, &fitted, args.horizon)?;
    let mut text = String::from("step,prediction\n");
    for (j, value) in result.predictions().iter().enumerate() {
        let _ = writeln!(text, "{},{}", j + 1, value + mean);
    }
    emit(args.out.as_ref(), &text)?;
    if args.out.is_some() {
        println!(
            "wrote {} predictions from origin {}",
            args.horizon,
            result.origin()
        );
    }
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<()> {
    let cfg = args.config.to_config();
    let mut protocol = if args.paper_scale {
        BenchProtocol::paper_scale(cfg, args.config.seed)
    } else {
        BenchProtocol {
            sequences: args.sequences,
            evaluations: args.evaluations,
            initial_train: args.initial_train,
            train_increment: args.increment,
            horizon: args.horizon,
            report_points: args.report_points.clone(),
            ..BenchProtocol::desk(cfg, args.config.seed)
        }
    };
    protocol.center = !args.no_center;
    let report = run_benchmark(args.kind, &protocol)?;
    print_report(&report);
    if let Some(path) = &args.out {
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        std::fs::write(path, json)?;
    }
    Ok(())
}

fn print_report(report: &BenchReport) {
    let cfg = &report.protocol.config;
    let method = if cfg.r == 0 {
        format!("ARMA baseline (p<={}, q<={})", cfg.p_max, cfg.q_max)
    } else {
        format!(
            "MS (r={}, tau={}, criterion {})",
            cfg.r, cfg.tau, cfg.criterion
        )
    };
    println!(
        "benchmark {}: {} | {} sequences x {} evaluations, train {}+{}k, horizon {}",
        report.kind,
        method,
        report.protocol.sequences,
        report.protocol.evaluations,
        report.protocol.initial_train,
        report.protocol.train_increment,
        report.protocol.horizon
    );
    println!("{:<6} {:<12} {:<12} {}", "n", "mean", "se", "cells");
    for rp in &report.report_points {
        println!(
            "{:<6} {:<12} {:<12} {}",
            rp.n,
            sig6(rp.mean),
            sig6(rp.se),
            rp.count
        );
    }
    if !report.failures.is_empty() {
        println!("{} cells failed and were excluded:", report.failures.len());
        for f in &report.failures {
            println!("  seq {} eval {}: {}", f.sequence, f.evaluation, f.reason);
        }
    }
}
