use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::Args;
use serde::Serialize;

use c2l::eval::Strategy;
use c2l::interaction::{next_target, Done, Engine, Policy, Session, StepOutcome, StepRecord};
use c2l::linegen::{render_debug, LineOutcome};
use c2l::{rle, Image, LabelMask};

use crate::{parse_predictor, PolicyArgs, PredictorSpec};

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    #[arg(long, default_value = "geodesic", value_parser = parse_predictor)]
    predictor: PredictorSpec,
    #[arg(long, default_value = "adaptive")]
    strategy: Strategy,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Trace output; printed to stdout when absent.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write a weight-map/line rendering for every line round.
    #[arg(long)]
    debug_dir: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct TraceRound {
    #[serde(flatten)]
    pub record: StepRecord,
    pub mask_rle: Vec<u32>,
}

#[derive(Serialize)]
pub struct Trace {
    pub image: String,
    pub mask: String,
    pub width: usize,
    pub height: usize,
    pub predictor: String,
    pub strategy: Strategy,
    pub policy: Policy,
    pub done: Option<Done>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub rounds: Vec<TraceRound>,
}

fn write_debug(engine: &Engine<f64>, session: &Session, dir: &std::path::Path) -> anyhow::Result<()> {
    let gt = session.gt.as_ref().expect("simulation has ground truth");
    let Some(target) = next_target(gt, &session.current_mask()) else {
        return Ok(());
    };
    if let LineOutcome::Line(p) = engine.lines.line_for_region(&target.region, gt, target.sign) {
        let line = &engine.lines.candidates.lines[p.selection.index];
        let img = render_debug(&p.crop, &p.weights, line);
        let path = dir.join(format!("round_{:02}.png", session.annotations().len()));
        img.save(&path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn run(args: SimulateArgs) -> anyhow::Result<()> {
    let image = Image::read(&args.image)?;
    let gt = LabelMask::read_png(&args.mask)?;
    let policy = args.strategy.apply(args.policy.policy());
    let engine = Engine::<f64>::new(policy)?;
    let predictor = args.predictor.build();
    let (width, height) = image.dims();
    let mut session = Session::new(Arc::new(image), Some(gt))?;
    if let Some(d) = &args.debug_dir {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let mut rounds = Vec::new();
    let mut done = None;
    let mut error = None;
    loop {
        if let Some(d) = &args.debug_dir {
            if let Ok(Ok(plan)) = engine.plan(&session) {
                if plan.chosen == c2l::Kind::Line && plan.fallback.is_none() {
                    write_debug(&engine, &session, d)?;
                }
            }
        }
        match engine.step(&mut session, predictor.as_ref()) {
            Ok(StepOutcome::Step(record)) => rounds.push(TraceRound {
                record,
                mask_rle: rle::encode(&session.current_mask()),
            }),
            Ok(StepOutcome::Done(d)) => {
                done = Some(d);
                break;
            }
            Err(e) => {
                log::error!("simulation stopped: {e}");
                error = Some(e.to_string());
                break;
            }
        }
    }
    let trace = Trace {
        image: args.image.display().to_string(),
        mask: args.mask.display().to_string(),
        width,
        height,
        predictor: predictor.id(),
        strategy: args.strategy,
        policy,
        done,
        error,
        rounds,
    };
    let json = serde_json::to_string_pretty(&trace)?;
    match &args.trace {
        Some(p) => std::fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}
