//! NoC evaluation: run the simulated annotator over a dataset and count the
//! click-equivalents needed to reach each IoU threshold.

mod dataset;
mod report;
mod synth;

pub use dataset::{load_instance, Dataset, InstanceRef};
pub use report::{read_report, render_table, report_json, write_report};
pub use synth::{gen_synthetic, synth_instance, SynthConfig, SynthKind};

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image_grid::Image;
use crate::interaction::{Engine, Policy, Session, StepOutcome, StepRecord};
use crate::mask::LabelMask;
use crate::predictor::Predictor;

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.85, 0.90, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Clicks only (`q = ∞`).
    Clicks,
    /// Click or line by elongation.
    Adaptive,
}

impl Strategy {
    pub fn apply(self, policy: Policy) -> Policy {
        match self {
            Strategy::Clicks => Policy {
                q: f64::INFINITY,
                ..policy
            },
            Strategy::Adaptive => policy,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Clicks => "clicks",
            Strategy::Adaptive => "adaptive",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "clicks" | "clicks-only" => Ok(Strategy::Clicks),
            "adaptive" => Ok(Strategy::Adaptive),
            other => Err(format!("unknown strategy {other:?} (expected clicks or adaptive)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: String,
    /// NoC per threshold, in threshold order.
    pub noc: Vec<u32>,
    pub reached: Vec<bool>,
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub final_iou: f64,
    pub trace: Vec<StepRecord>,
}

pub fn validate_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::InvalidParam("no thresholds".into()));
    }
    if thresholds.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::InvalidParam("thresholds must lie in (0, 1)".into()));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam("thresholds must be strictly ascending".into()));
    }
    Ok(())
}

/// Simulates one instance until every threshold is reached, the error region
/// vanishes or the budget runs out. NoC@t is the cumulative cost after the
/// first step with IoU ≥ t; unreached thresholds count as the budget.
pub fn run_instance<P: Predictor + ?Sized>(
    id: &str,
    image: Arc<Image>,
    gt: LabelMask,
    predictor: &P,
    engine: &Engine<f64>,
    thresholds: &[f64],
) -> Result<InstanceResult> {
    validate_thresholds(thresholds)?;
    let budget = engine.policy.budget;
    let mut session = Session::new(image, Some(gt))?;
    let mut noc: Vec<Option<u32>> = vec![None; thresholds.len()];
    let mut trace = Vec::new();
    let mut error = None;
    while noc.iter().any(Option::is_none) {
        match engine.step(&mut session, predictor) {
            Ok(StepOutcome::Step(rec)) => {
                for (slot, &t) in noc.iter_mut().zip(thresholds) {
                    if slot.is_none() && rec.iou >= t {
                        *slot = Some(rec.cumulative_cost);
                    }
                }
                trace.push(rec);
            }
            Ok(StepOutcome::Done(_)) => break,
            Err(e) => {
                log::warn!("instance {id}: {e}");
                error = Some(e.to_string());
                break;
            }
        }
    }
    let failed = error.is_some();
    let reached: Vec<bool> = noc.iter().map(|n| n.is_some() && !failed).collect();
    Ok(InstanceResult {
        id: id.to_string(),
        noc: noc
            .iter()
            .map(|n| if failed { budget } else { n.unwrap_or(budget) })
            .collect(),
        reached,
        failed,
        error,
        final_iou: session.iou::<f64>().unwrap_or(0.0),
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub dataset: String,
    pub strategy: Strategy,
    pub predictor: String,
    pub policy: Policy,
    pub thresholds: Vec<f64>,
    /// Mean NoC per threshold, failures counted at the budget.
    pub mean_noc: Vec<f64>,
    pub failures: usize,
    /// Instances that could not be read.
    pub skipped: Vec<String>,
    pub instances: Vec<InstanceResult>,
}

impl Report {
    /// Mean NoC per threshold over the instances whose id starts with
    /// `prefix`.
    pub fn mean_noc_where(&self, prefix: &str) -> Vec<f64> {
        let picked: Vec<&InstanceResult> = self.instances.iter().filter(|i| i.id.starts_with(prefix)).collect();
        mean_noc(&picked, self.thresholds.len())
    }
}

fn mean_noc(instances: &[&InstanceResult], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if instances.is_empty() {
                return 0.0;
            }
            let sum: u64 = instances.iter().map(|i| i.noc[k] as u64).sum();
            sum as f64 / instances.len() as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Evaluate instances on the rayon pool.
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { parallel: true }
    }
}

/// Evaluates every instance of `dataset`. Results keep the dataset order
/// whatever the scheduling.
pub fn run_dataset<P: Predictor + ?Sized>(
    dataset: &Dataset,
    predictor: &P,
    policy: Policy,
    strategy: Strategy,
    thresholds: &[f64],
    opts: RunOptions,
) -> Result<Report> {
    validate_thresholds(thresholds)?;
    if dataset.instances.is_empty() {
        return Err(Error::InvalidParam(format!("dataset {} is empty", dataset.name)));
    }
    let policy = strategy.apply(policy);
    let engine = Engine::<f64>::new(policy)?;
    let run_one = |inst: &InstanceRef| -> std::result::Result<InstanceResult, String> {
        let (image, gt) = load_instance(inst).map_err(|e| format!("{}: {e}", inst.stem))?;
        run_instance(&inst.stem, Arc::new(image), gt, predictor, &engine, thresholds)
            .map_err(|e| format!("{}: {e}", inst.stem))
    };
    let outcomes: Vec<_> = if opts.parallel {
        dataset.instances.par_iter().map(run_one).collect()
    } else {
        dataset.instances.iter().map(run_one).collect()
    };
    let mut instances = Vec::new();
    let mut skipped = dataset.skipped.clone();
    for o in outcomes {
        match o {
            Ok(r) => instances.push(r),
            Err(msg) => {
                log::warn!("skipping instance {msg}");
                skipped.push(msg);
            }
        }
    }
    let refs: Vec<&InstanceResult> = instances.iter().collect();
    Ok(Report {
        dataset: dataset.name.clone(),
        strategy,
        predictor: predictor.id(),
        policy,
        thresholds: thresholds.to_vec(),
        mean_noc: mean_noc(&refs, thresholds.len()),
        failures: instances.iter().filter(|i| i.failed).count(),
        skipped,
        instances,
    })
}
