//! Command-line and HTTP front ends for the `c2l` interaction engine.

use std::sync::Arc;

use clap::Args;

use c2l::interaction::Policy;
use c2l::linegen::CandidateParams;
use c2l::predictor::{GeodesicParams, GeodesicPredictor, HttpPredictor, Predictor, SubprocessPredictor};

pub mod serve;
pub mod simulate;

#[derive(Debug, Clone)]
pub enum PredictorSpec {
    Geodesic(GeodesicParams),
    External(String),
    Http(String),
}

impl PredictorSpec {
    pub fn build(&self) -> Arc<dyn Predictor> {
        match self {
            PredictorSpec::Geodesic(p) => Arc::new(GeodesicPredictor::<f64>::new(*p)),
            PredictorSpec::External(cmd) => Arc::new(SubprocessPredictor::new(cmd.clone())),
            PredictorSpec::Http(url) => Arc::new(HttpPredictor::new(url)),
        }
    }
}

pub fn parse_predictor(s: &str) -> Result<PredictorSpec, String> {
    if s == "geodesic" {
        return Ok(PredictorSpec::Geodesic(GeodesicParams::default()));
    }
    if let Some(beta) = s.strip_prefix("geodesic:") {
        let beta: f64 = beta.parse().map_err(|e| format!("bad geodesic beta {beta:?}: {e}"))?;
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(format!("geodesic beta must be finite and non-negative, got {beta}"));
        }
        return Ok(PredictorSpec::Geodesic(GeodesicParams {
            beta,
            ..GeodesicParams::default()
        }));
    }
    if s.starts_with("http://") || s.starts_with("https://") {
        return Ok(PredictorSpec::Http(s.to_string()));
    }
    if let Some(url) = s.strip_prefix("http:") {
        if !url.is_empty() {
            let url = if url.contains("://") { url.to_string() } else { format!("http://{url}") };
            return Ok(PredictorSpec::Http(url));
        }
    }
    if let Some(cmd) = s.strip_prefix("external:") {
        if !cmd.trim().is_empty() {
            return Ok(PredictorSpec::External(cmd.to_string()));
        }
    }
    Err(format!(
        "unknown predictor {s:?} (expected geodesic, geodesic:BETA, external:CMD or http:URL)"
    ))
}

/// Interaction policy flags shared by `evaluate`, `simulate` and `serve`.
#[derive(Args, Debug, Clone)]
pub struct PolicyArgs {
    /// Budget in click-equivalents.
    #[arg(long, default_value_t = 20)]
    pub budget: u32,
    /// Elongation threshold for drawing a line.
    #[arg(long, default_value_t = 5.0)]
    pub q: f64,
    /// Weight of opposite-class pixels (negative).
    #[arg(long, default_value_t = -100.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Side of the square line-search crop.
    #[arg(long, default_value_t = 64)]
    pub crop: usize,
}

impl PolicyArgs {
    pub fn policy(&self) -> Policy {
        let defaults = Policy::default();
        Policy {
            q: self.q,
            penalty: self.k,
            budget: self.budget,
            candidates: CandidateParams {
                side: self.crop,
                ..defaults.candidates
            },
            ..defaults
        }
    }
}

