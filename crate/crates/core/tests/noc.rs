use std::sync::Arc;

use c2l::annotation::Kind;
use c2l::eval::run_instance;
use c2l::interaction::{Engine, Policy};
use c2l::predictor::{PredictError, PredictRequest, Predictor};
use c2l::{BinaryMask, Image, Label, LabelMask};

const BAR_X0: usize = 10;
const BAR_Y0: usize = 8;

/// After `n` annotations, covers the first `cover[n - 1]` columns of a
/// 200×3 bar (the last entry repeats).
struct Scripted {
    cover: Vec<usize>,
}

impl Predictor for Scripted {
    fn id(&self) -> String {
        "scripted".into()
    }

    fn predict(&self, req: &PredictRequest<'_>) -> Result<BinaryMask, PredictError> {
        let n = req.annotations.len().min(self.cover.len());
        let cols = self.cover[n - 1];
        let (w, h) = req.image.dims();
        Ok(BinaryMask::from_fn(w, h, |x, y| {
            (BAR_X0..BAR_X0 + cols).contains(&x) && (BAR_Y0..BAR_Y0 + 3).contains(&y)
        }))
    }
}

fn bar() -> (Arc<Image>, LabelMask) {
    let gt = LabelMask::from_fn(220, 20, |x, y| {
        if (BAR_X0..BAR_X0 + 200).contains(&x) && (BAR_Y0..BAR_Y0 + 3).contains(&y) {
            Label::Foreground
        } else {
            Label::Background
        }
    });
    (Arc::new(Image::from_fn_gray(220, 20, |_, _| 0)), gt)
}

#[test]
fn scripted_trace_accounts_line_cost() {
    let (img, gt) = bar();
    let engine = Engine::<f64>::new(Policy::default()).unwrap();
    let stub = Scripted {
        cover: vec![172, 182, 192],
    };
    let r = run_instance("bar", img, gt, &stub, &engine, &[0.85, 0.90, 0.95]).unwrap();
    let kinds: Vec<Kind> = r.trace.iter().map(|s| s.annotation.kind).collect();
    assert_eq!(kinds, [Kind::Click, Kind::Line, Kind::Line]);
    let costs: Vec<u32> = r.trace.iter().map(|s| s.cumulative_cost).collect();
    assert_eq!(costs, [1, 3, 5]);
    assert_eq!(r.noc, [1, 3, 5]);
    assert_eq!(r.reached, [true, true, true]);
}

#[test]
fn unreached_thresholds_count_as_budget() {
    let (img, gt) = bar();
    let engine = Engine::<f64>::new(Policy::clicks_only()).unwrap();
    let stub = Scripted { cover: vec![172] };
    let r = run_instance("bar", img, gt, &stub, &engine, &[0.85, 0.90, 0.95]).unwrap();
    assert_eq!(r.noc, [1, 20, 20]);
    assert_eq!(r.reached, [true, false, false]);
    assert_eq!(r.trace.last().unwrap().cumulative_cost, 20);
    assert!(!r.failed);
}
