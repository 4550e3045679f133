//! Adaptive click/line policy and the simulated annotator.
//!
//! Each round the simulated user looks at the largest mislabeled region. On
//! the first round, or when the region is not elongated enough, it clicks at
//! the region's interior maximum; otherwise it draws a generated line. A line
//! counts as two clicks against the budget.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{Annotation, Kind, Sign};
use crate::distance::distance_transform;
use crate::geom::Point;
use crate::image_grid::Image;
use crate::linegen::{CandidateParams, Fallback, LineGenerator, LineOutcome, DEFAULT_PENALTY};
use crate::mask::{iou, BinaryMask, Label, LabelMask};
use crate::predictor::{PredictError, PredictRequest, Predictor};
use crate::region::{connected_components, elongation, Region};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    /// Elongation at or above which a line is used. `+∞` means clicks only.
    #[serde(with = "extended_f64")]
    pub q: f64,
    pub first_round_click: bool,
    /// Weight-map penalty for opposite-class pixels.
    pub penalty: f64,
    pub candidates: CandidateParams,
    /// Maximum cumulative click-equivalent cost.
    pub budget: u32,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            q: 5.0,
            first_round_click: true,
            penalty: DEFAULT_PENALTY,
            candidates: CandidateParams::default(),
            budget: 20,
        }
    }
}

impl Policy {
    pub fn clicks_only() -> Self {
        Self {
            q: f64::INFINITY,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.q > 1.0) {
            return Err(crate::Error::InvalidParam(format!("q must exceed 1, got {}", self.q)));
        }
        if self.budget < 1 {
            return Err(crate::Error::InvalidParam("budget must be at least 1".into()));
        }
        if !(self.penalty < 0.0) {
            return Err(crate::Error::InvalidParam("penalty must be negative".into()));
        }
        self.candidates.validate()
    }
}

/// JSON has no infinity; `q = +∞` is written as the string `"inf"`.
mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Num(*v).serialize(s)
        } else if *v > 0.0 {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Err(serde::ser::Error::custom("q must be finite or +inf"))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad number {t:?}"))),
        }
    }
}

/// The region the simulated user addresses next.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub region: Region,
    pub sign: Sign,
}

/// Largest connected error region of `pred` against `gt`, ignoring ignore
/// pixels. False negatives (missed foreground) get a positive sign, false
/// positives a negative one. On equal size a false-negative region wins.
pub fn next_target(gt: &LabelMask, pred: &BinaryMask) -> Option<Target> {
    assert_eq!(gt.dims(), pred.dims(), "mask dimensions differ");
    let (w, h) = gt.dims();
    let mut fn_map = BinaryMask::new(w, h);
    let mut fp_map = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            match (gt.get(x, y), pred.get(x, y)) {
                (Label::Foreground, false) => fn_map.set(x, y, true),
                (Label::Background, true) => fp_map.set(x, y, true),
                _ => {}
            }
        }
    }
    let best_fn = connected_components(&fn_map).into_iter().next();
    let best_fp = connected_components(&fp_map).into_iter().next();
    match (best_fn, best_fp) {
        (None, None) => None,
        (Some(r), None) => Some(Target {
            region: r,
            sign: Sign::Positive,
        }),
        (None, Some(r)) => Some(Target {
            region: r,
            sign: Sign::Negative,
        }),
        (Some(a), Some(b)) => Some(if b.area() > a.area() {
            Target {
                region: b,
                sign: Sign::Negative,
            }
        } else {
            Target {
                region: a,
                sign: Sign::Positive,
            }
        }),
    }
}

/// Click on the first round; afterwards a line iff elongation ≥ q.
pub fn choose_kind(region: &Region, round: usize, policy: &Policy) -> Kind {
    if round == 0 && policy.first_round_click {
        return Kind::Click;
    }
    if !policy.q.is_finite() {
        return Kind::Click;
    }
    if elongation::<f64>(region) >= policy.q {
        Kind::Line
    } else {
        Kind::Click
    }
}

/// Interior maximum of the region's distance transform. Ties go to the pixel
/// nearest the centroid, then to the smallest `(y, x)`.
pub fn place_click(region: &Region) -> Point {
    let b = region.bbox;
    let local = BinaryMask::from_points(
        b.width(),
        b.height(),
        region.pixels.iter().map(|p| Point::new(p.x - b.x0, p.y - b.y0)),
    );
    let dt = distance_transform::<f64>(&local);
    let sums = region.sums();
    // n² times the squared distance to the centroid, exact.
    let off_centre = |p: &Point| {
        let dx = sums.n * p.x as i128 - sums.sx;
        let dy = sums.n * p.y as i128 - sums.sy;
        dx * dx + dy * dy
    };
    *region
        .pixels
        .iter()
        .min_by_key(|p| {
            let d = dt.squared(p.x - b.x0, p.y - b.y0);
            (std::cmp::Reverse(d), off_centre(p), p.y, p.x)
        })
        .expect("region is non-empty")
}

/// One session: an image, optional ground truth, and the annotation history
/// with the mask produced after each annotation.
#[derive(Debug, Clone)]
pub struct Session {
    pub image: Arc<Image>,
    pub gt: Option<LabelMask>,
    annotations: Vec<Annotation>,
    masks: Vec<BinaryMask>,
    cumulative_cost: u32,
}

impl Session {
    pub fn new(image: Arc<Image>, gt: Option<LabelMask>) -> crate::Result<Self> {
        if let Some(g) = &gt {
            if g.dims() != image.dims() {
                return Err(crate::Error::DimensionMismatch {
                    expected_w: image.width(),
                    expected_h: image.height(),
                    got_w: g.width(),
                    got_h: g.height(),
                });
            }
        }
        Ok(Self {
            image,
            gt,
            annotations: Vec::new(),
            masks: Vec::new(),
            cumulative_cost: 0,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.image.dims()
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn masks(&self) -> &[BinaryMask] {
        &self.masks
    }

    pub fn cumulative_cost(&self) -> u32 {
        self.cumulative_cost
    }

    /// Latest prediction, or the empty mask before any input.
    pub fn current_mask(&self) -> BinaryMask {
        self.masks.last().cloned().unwrap_or_else(|| {
            let (w, h) = self.dims();
            BinaryMask::new(w, h)
        })
    }

    pub fn iou<T: Scalar>(&self) -> Option<T> {
        self.gt.as_ref().map(|g| iou(&self.current_mask(), g).expect("dimensions checked"))
    }

    /// Appends `annotation`, runs the predictor and records its mask. On error
    /// the session is unchanged.
    pub fn apply<P: Predictor + ?Sized>(
        &mut self,
        annotation: Annotation,
        predictor: &P,
    ) -> Result<&BinaryMask, PredictError> {
        let (w, h) = self.dims();
        annotation
            .validate(w, h)
            .map_err(|e| PredictError::InvalidRequest(e.to_string()))?;
        let mut all = self.annotations.clone();
        all.push(annotation);
        let prev = self.masks.last();
        let mask = predictor.predict(&PredictRequest {
            image: &self.image,
            annotations: &all,
            prev_mask: prev,
        })?;
        if mask.dims() != (w, h) {
            return Err(PredictError::DimensionMismatch {
                width: w,
                height: h,
                detail: format!("predictor returned {}x{}", mask.width(), mask.height()),
            });
        }
        self.cumulative_cost += all.last().expect("just pushed").cost();
        self.annotations = all;
        self.masks.push(mask);
        Ok(self.masks.last().expect("just pushed"))
    }

    /// Removes the latest annotation and its mask.
    pub fn undo(&mut self) -> Option<Annotation> {
        let a = self.annotations.pop()?;
        self.masks.pop();
        self.cumulative_cost -= a.cost();
        Some(a)
    }
}

/// The input the simulated user would give next.
#[derive(Debug, Clone)]
pub struct Plan {
    pub annotation: Annotation,
    /// Kind the policy asked for, before any fallback.
    pub chosen: Kind,
    pub fallback: Option<Fallback>,
    pub region_area: usize,
    pub elongation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Done {
    /// No error region left.
    Converged,
    /// The budget is spent.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub round: usize,
    pub annotation: Annotation,
    pub chosen: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Fallback>,
    pub cost: u32,
    pub cumulative_cost: u32,
    pub iou: f64,
    pub region_area: usize,
    /// `None` when the region is collinear (infinite elongation).
    pub elongation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Step(StepRecord),
    Done(Done),
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("session has no ground truth")]
    NoGroundTruth,
    #[error(transparent)]
    Predictor(#[from] PredictError),
}

/// Policy plus the precomputed line candidates.
#[derive(Debug, Clone)]
pub struct Engine<T> {
    pub policy: Policy,
    pub lines: LineGenerator<T>,
}

impl<T: Scalar> Engine<T> {
    pub fn new(policy: Policy) -> crate::Result<Self> {
        policy.validate()?;
        Ok(Self {
            lines: LineGenerator::new(policy.candidates, T::from_f64_lossy(policy.penalty))?,
            policy,
        })
    }

    /// Decides the next input for `session` without applying it.
    pub fn plan(&self, session: &Session) -> Result<Result<Plan, Done>, StepError> {
        let gt = session.gt.as_ref().ok_or(StepError::NoGroundTruth)?;
        let spent = session.cumulative_cost();
        if spent >= self.policy.budget {
            return Ok(Err(Done::BudgetExhausted));
        }
        let Some(target) = next_target(gt, &session.current_mask()) else {
            return Ok(Err(Done::Converged));
        };
        let round = session.annotations().len();
        let chosen = choose_kind(&target.region, round, &self.policy);
        let mut fallback = None;
        let mut annotation = None;
        if chosen == Kind::Line {
            if spent + Kind::Line.cost() > self.policy.budget {
                fallback = Some(Fallback::Budget);
            } else {
                match self.lines.line_for_region(&target.region, gt, target.sign) {
                    LineOutcome::Line(p) => annotation = Some(p.annotation),
                    LineOutcome::Fallback(f) => fallback = Some(f),
                }
            }
            if let Some(f) = fallback {
                log::info!("line fallback to click in round {round}: {f:?}");
            }
        }
        let annotation =
            annotation.unwrap_or_else(|| Annotation::click(target.sign, place_click(&target.region)));
        Ok(Ok(Plan {
            annotation,
            chosen,
            fallback,
            region_area: target.region.area(),
            elongation: elongation::<f64>(&target.region),
        }))
    }

    /// One simulated round: plan, predict, record.
    pub fn step<P: Predictor + ?Sized>(
        &self,
        session: &mut Session,
        predictor: &P,
    ) -> Result<StepOutcome, StepError> {
        let plan = match self.plan(session)? {
            Ok(p) => p,
            Err(done) => return Ok(StepOutcome::Done(done)),
        };
        let round = session.annotations().len();
        let cost = plan.annotation.cost();
        session.apply(plan.annotation.clone(), predictor)?;
        Ok(StepOutcome::Step(StepRecord {
            round,
            annotation: plan.annotation,
            chosen: plan.chosen,
            fallback: plan.fallback,
            cost,
            cumulative_cost: session.cumulative_cost(),
            iou: session.iou::<f64>().expect("ground truth present"),
            region_area: plan.region_area,
            elongation: plan.elongation.is_finite().then_some(plan.elongation),
        }))
    }
}
