use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use c2l::eval::{self, Dataset, RunOptions, Strategy, SynthConfig, SynthKind};
use clicks2line_cli::{parse_predictor, serve, simulate, PolicyArgs, PredictorSpec};

#[derive(Parser)]
#[command(name = "clicks2line", version, about = "Adaptive click/line interactive segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure NoC on a dataset of images/ and masks/.
    Evaluate(EvaluateArgs),
    /// Simulate one instance and write a per-round trace.
    Simulate(simulate::SimulateArgs),
    /// Generate the synthetic bars/blobs suite.
    Synth(SynthArgs),
    /// Print a markdown table from report files.
    Table {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Serve the session API, /predict and static assets.
    Serve(serve::ServeArgs),
    /// Answer wire-protocol requests on stdin, one JSON object per line.
    PredictStdio {
        #[arg(long, default_value = "geodesic", value_parser = parse_predictor)]
        predictor: PredictorSpec,
    },
}

#[derive(Debug, Clone)]
struct Thresholds(Vec<f64>);

#[derive(Debug, Clone)]
struct Kinds(Vec<SynthKind>);

fn parse_thresholds(s: &str) -> Result<Thresholds, String> {
    let ts = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad threshold {t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    eval::validate_thresholds(&ts).map_err(|e| e.to_string())?;
    Ok(Thresholds(ts))
}

fn parse_kinds(s: &str) -> Result<Kinds, String> {
    s.split(',').map(|k| k.trim().parse()).collect::<Result<_, _>>().map(Kinds)
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "geodesic", value_parser = parse_predictor)]
    predictor: PredictorSpec,
    #[arg(long, default_value = "adaptive")]
    strategy: Strategy,
    #[arg(long, default_value = "0.85,0.90,0.95", value_parser = parse_thresholds)]
    thresholds: Thresholds,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Report path; a markdown table is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Evaluate instances one at a time.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    /// Instances per kind.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value = "bars,blobs", value_parser = parse_kinds)]
    kinds: Kinds,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 96)]
    size: usize,
    /// Smallest foreground/background intensity gap.
    #[arg(long)]
    contrast_min: Option<i32>,
    /// Largest foreground/background intensity gap.
    #[arg(long)]
    contrast_max: Option<i32>,
    /// Noise amplitude inside objects.
    #[arg(long)]
    fg_noise: Option<i32>,
    /// Noise amplitude in the background.
    #[arg(long)]
    bg_noise: Option<i32>,
    /// Width of alternating appearance bands across objects (0: none).
    #[arg(long)]
    band_period: Option<usize>,
    /// Intensity step between neighbouring bands.
    #[arg(long)]
    band_step: Option<i32>,
}

fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    if !args.dataset.is_dir() {
        bail!("dataset directory {} not found", args.dataset.display());
    }
    let dataset = Dataset::open(&args.dataset)?;
    let predictor = args.predictor.build();
    let report = eval::run_dataset(
        &dataset,
        predictor.as_ref(),
        args.policy.policy(),
        args.strategy,
        &args.thresholds.0,
        RunOptions {
            parallel: !args.sequential,
        },
    )?;
    eval::write_report(&report, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    print!("{}", eval::render_table(std::slice::from_ref(&report)));
    if report.failures > 0 {
        log::warn!("{} instance(s) failed", report.failures);
    }
    Ok(())
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let d = SynthConfig::default();
    let cfg = SynthConfig {
        size: args.size,
        count: args.count,
        seed: args.seed,
        kinds: args.kinds.0,
        contrast: (
            args.contrast_min.unwrap_or(d.contrast.0),
            args.contrast_max.unwrap_or(d.contrast.1),
        ),
        fg_noise: args.fg_noise.unwrap_or(d.fg_noise),
        bg_noise: args.bg_noise.unwrap_or(d.bg_noise),
        band_period: args.band_period.unwrap_or(d.band_period),
        band_step: args.band_step.unwrap_or(d.band_step),
    };
    let stems = eval::gen_synthetic(&args.out, &cfg)?;
    println!("wrote {} instances to {}", stems.len(), args.out.display());
    Ok(())
}

fn table(paths: Vec<PathBuf>) -> anyhow::Result<()> {
    let reports = paths
        .iter()
        .map(|p| eval::read_report(p).with_context(|| format!("reading {}", p.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    print!("{}", eval::render_table(&reports));
    Ok(())
}

fn predict_stdio(spec: PredictorSpec) -> anyhow::Result<()> {
    use std::io::{BufRead, Write};
    let predictor = spec.build();
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let req: c2l::predictor::wire::WireRequest = serde_json::from_str(&line)?;
        let resp = c2l::predictor::wire::handle_request(&req, predictor.as_ref())?;
        serde_json::to_writer(&mut stdout, &resp)?;
        stdout.write_all(b"\n")?;
        stdout.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLICKS2LINE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Synth(a) => synth(a),
        Command::Table { reports } => table(reports),
        Command::Serve(a) => serve::run(a),
        Command::PredictStdio { predictor } => predict_stdio(predictor),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
