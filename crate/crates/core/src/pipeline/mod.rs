//! Frame-by-frame orchestration: template tracking on every frame,
//! re-detection every `redetect_interval` frames, IOU association with
//! timing inheritance, and motion analysis feeding the event log.
//!
//! One tracking worker owns all track state and consumes frames strictly in
//! order. Detections are merged only between frame steps. In sync mode the
//! detections of frame k are merged right after frame k; in async mode a
//! second worker computes them and the merge may trail by up to
//! `max_detection_lag` frames.

mod config;
mod run;
mod state;

use std::convert::Infallible;

use thiserror::Error;

use crate::frames::FrameIoError;
use crate::ncc::TrackerError;

pub use config::{ConfigError, Mode, PipelineConfig};
pub use run::{run_pipeline, run_pipeline_observed, Detector, FileDetector, FrameObserver, RunOutput};
pub use state::{fit_template, AnnotationRecord, MergeRecord, PipelineState, Track, MAX_MISSED_CYCLES};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("frame out of sequence: expected index {expected}, got {got}")]
    Sequencing { expected: u64, got: u64 },
    #[error("no detection data for scheduled re-detection at frame {frame}")]
    MissingDetections { frame: u64 },
    #[error("re-detection requested at frame {frame}, which is not a multiple of {interval}")]
    OffSchedule { frame: u64, interval: u64 },
    #[error("re-detection before any frame was tracked")]
    NoFrameYet,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error(transparent)]
    Frames(#[from] FrameIoError),
    #[error("detector failed: {0}")]
    Detector(String),
}

impl From<Infallible> for PipelineError {
    fn from(e: Infallible) -> Self {
        match e {}
    }
}
