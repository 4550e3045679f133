//! Concurrent store of interactive sessions, as used by the HTTP service.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{Annotation, Kind};
use crate::image_grid::Image;
use crate::interaction::{Done, Engine, Session, StepError};
use crate::linegen::Fallback;
use crate::mask::{BinaryMask, LabelMask};
use crate::predictor::{PredictError, Predictor};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
    #[error("session has no ground truth")]
    NoGroundTruth,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Predictor(#[from] PredictError),
    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl From<StepError> for SessionError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::NoGroundTruth => SessionError::NoGroundTruth,
            StepError::Predictor(p) => SessionError::Predictor(p),
        }
    }
}

/// State returned after every mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionState {
    pub mask: BinaryMask,
    pub annotations: usize,
    pub cumulative_cost: u32,
    /// IoU against the ground truth, when the session has one.
    pub iou: Option<f64>,
}

/// What the simulated user would do next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Suggestion {
    Next {
        annotation: Annotation,
        chosen: Kind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fallback: Option<Fallback>,
        region_area: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        elongation: Option<f64>,
    },
    Converged,
    BudgetExhausted,
}

type Shared = Arc<Mutex<Session>>;

pub struct SessionStore {
    sessions: RwLock<HashMap<String, Shared>>,
    predictor: Arc<dyn Predictor>,
    engine: Engine<f64>,
}

fn state(s: &Session) -> SessionState {
    SessionState {
        mask: s.current_mask(),
        annotations: s.annotations().len(),
        cumulative_cost: s.cumulative_cost(),
        iou: s.iou(),
    }
}

impl SessionStore {
    pub fn new(predictor: Arc<dyn Predictor>, engine: Engine<f64>) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            predictor,
            engine,
        }
    }

    pub fn predictor_id(&self) -> String {
        self.predictor.id()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn create(&self, image: Image, gt: Option<LabelMask>) -> Result<String, SessionError> {
        let session = Session::new(Arc::new(image), gt)?;
        let id = uuid::Uuid::new_v4().to_string();
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(id)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.write().expect("session map poisoned").remove(id).is_some()
    }

    fn get(&self, id: &str) -> Result<Shared, SessionError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn annotate(&self, id: &str, annotation: Annotation) -> Result<SessionState, SessionError> {
        let shared = self.get(id)?;
        let mut s = shared.lock().expect("session poisoned");
        let (w, h) = s.dims();
        annotation
            .validate(w, h)
            .map_err(|e| SessionError::InvalidAnnotation(e.to_string()))?;
        s.apply(annotation, self.predictor.as_ref())?;
        Ok(state(&s))
    }

    pub fn undo(&self, id: &str) -> Result<SessionState, SessionError> {
        let shared = self.get(id)?;
        let mut s = shared.lock().expect("session poisoned");
        s.undo().ok_or(SessionError::NothingToUndo)?;
        Ok(state(&s))
    }

    pub fn state(&self, id: &str) -> Result<SessionState, SessionError> {
        let shared = self.get(id)?;
        let s = shared.lock().expect("session poisoned");
        Ok(state(&s))
    }

    pub fn annotations(&self, id: &str) -> Result<Vec<Annotation>, SessionError> {
        let shared = self.get(id)?;
        let s = shared.lock().expect("session poisoned");
        Ok(s.annotations().to_vec())
    }

    pub fn suggest(&self, id: &str) -> Result<Suggestion, SessionError> {
        let shared = self.get(id)?;
        let s = shared.lock().expect("session poisoned");
        Ok(match self.engine.plan(&s)? {
            Ok(p) => Suggestion::Next {
                annotation: p.annotation,
                chosen: p.chosen,
                fallback: p.fallback,
                region_area: p.region_area,
                elongation: p.elongation.is_finite().then_some(p.elongation),
            },
            Err(Done::Converged) => Suggestion::Converged,
            Err(Done::BudgetExhausted) => Suggestion::BudgetExhausted,
        })
    }
}

/// Runs `annotations` on a fresh session and returns the final mask.
pub fn replay<P: Predictor + ?Sized>(
    image: Arc<Image>,
    annotations: &[Annotation],
    predictor: &P,
) -> Result<BinaryMask, SessionError> {
    let mut s = Session::new(image, None)?;
    for a in annotations {
        s.apply(a.clone(), predictor)?;
    }
    Ok(s.current_mask())
}
